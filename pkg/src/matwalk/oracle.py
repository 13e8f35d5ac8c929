"""Brute-force cross-checks, independent of the production formulas.

The excursion-maximum law is recovered here purely from first-step analysis:
P(M <= n, D < inf) is the absorption probability of the finite chain on
states [2, n] (absorbing below 2 = success, above n = failure), obtained by a
dense linear solve.  Differencing in n gives P(M = n, D < inf).  Nothing is
shared with the matrix-product formulas except the transition probabilities.
"""

from __future__ import annotations

import numpy as np

from .walk_exact import WalkModel

__all__ = ["confined_return_prob", "oracle_max_dist", "oracle_hitting"]


def _jumps(family: str) -> tuple:
    return (1, 2) if family == "21" else (2, 1)


def confined_return_prob(model: WalkModel, n: int) -> float:
    """P(M <= n, D < inf) = P(fall below 2 before visiting any state > n | start 2)."""
    if n < 2:
        return 0.0
    up_jump, down_jump = _jumps(model.family)
    up = model.up_prob_array(n)
    size = n - 1  # states 2..n
    A = np.eye(size)
    rhs = np.zeros(size)
    for k in range(2, n + 1):
        i = k - 2
        if k + up_jump <= n:
            A[i, k + up_jump - 2] -= up[k]
        if k - down_jump >= 2:
            A[i, k - down_jump - 2] -= 1.0 - up[k]
        else:
            rhs[i] = 1.0 - up[k]
    return float(np.linalg.solve(A, rhs)[0])


def oracle_max_dist(model: WalkModel, n_max: int) -> np.ndarray:
    """P(M = n, D < inf) for n = 2..n_max (indices 0, 1 are NaN)."""
    out = np.full(n_max + 1, np.nan)
    prev = 0.0
    for n in range(2, n_max + 1):
        cur = confined_return_prob(model, n)
        out[n] = cur - prev
        prev = cur
    return out


def oracle_hitting(model: WalkModel, m: int, n: int) -> tuple:
    """(P at n, P at n+1, P low) for the escape from 2 to [n, inf) vs [0, m].

    Solved as two absorption problems on the states m+1..n-1.
    """
    if not (0 <= m < 2 <= n - 1):
        raise ValueError("need m < 2 and n >= 3 so that the start state 2 is interior")
    up_jump, down_jump = _jumps(model.family)
    up = model.up_prob_array(n)
    states = list(range(m + 1, n))
    idx = {k: i for i, k in enumerate(states)}
    size = len(states)
    A = np.eye(size)
    rhs_n = np.zeros(size)
    rhs_n1 = np.zeros(size)
    for k in states:
        i = idx[k]
        tgt = k + up_jump
        if tgt < n:
            A[i, idx[tgt]] -= up[k]
        elif tgt == n:
            rhs_n[i] = up[k]
        else:
            rhs_n1[i] = up[k]
        tgt = k - down_jump
        if tgt > m:
            A[i, idx[tgt]] -= 1.0 - up[k]
    lu = np.linalg.inv(A)
    at_n = float((lu @ rhs_n)[idx[2]])
    at_n1 = float((lu @ rhs_n1)[idx[2]])
    return at_n, at_n1, 1.0 - at_n - at_n1
