"""Pure-Python reference kernels.

These are the fallback implementations of the hot loops (long matrix-product
sweeps, Monte Carlo excursions, bound scans).  The compiled extension in
``_core`` mirrors them operation for operation: the float paths use the same
evaluation order and the simulators consume the same RNG stream (xoshiro256++
seeded per excursion via the splitmix64 finalizer), so both backends produce
identical results, not merely statistically equivalent ones.
"""

from __future__ import annotations

import math

import numpy as np

IS_COMPILED = False

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    """splitmix64 output finalizer (avalanches all input bits)."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _stream_state(seed: int, index: int):
    """Initial xoshiro256++ state for excursion ``index`` of run ``seed``.

    Runs splitmix64 from a per-excursion key, so the stream depends only on
    (seed, global excursion index) — never on worker layout.
    """
    s = (seed ^ _mix64((index + 1) * _GOLDEN)) & _MASK
    state = []
    for _ in range(4):
        s = (s + _GOLDEN) & _MASK
        state.append(_mix64(s))
    if state[0] | state[1] | state[2] | state[3] == 0:
        state[0] = _GOLDEN  # all-zero state is invalid for xoshiro
    return state


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


def _next_double(s: list) -> float:
    """One xoshiro256++ step mapped to [0, 1) with 53 random bits."""
    result = (_rotl((s[0] + s[3]) & _MASK, 23) + s[0]) & _MASK
    t = (s[1] << 17) & _MASK
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return (result >> 11) * 2.0 ** -53


def prod21_log_e1(theta: np.ndarray, m: int, n: int) -> np.ndarray:
    """log(e1 N_s ... N_{m+1} e1^t) for s = m..n (empty product at s = m).

    ``theta[k]`` is the matrix parameter at index k; entries below m are NaN.
    The running column vector N_s...N_{m+1} e1^t is renormalized by its first
    component each step, which accumulates into the returned log.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if n >= theta.shape[0]:
        raise ValueError("theta array too short for requested n")
    out = np.full(n + 1, np.nan)
    out[m] = 0.0
    u1, u2, scale = 1.0, 0.0, 0.0
    for s in range(m + 1, n + 1):
        t = theta[s] * (u1 + u2)
        u2 = u1 / t
        u1 = 1.0
        scale += math.log(t)
        out[s] = scale
    return out


def prod12_log_rows(theta: np.ndarray, anchor: int) -> tuple:
    """First-row logs of N_s ... N_anchor for s = anchor+1 down to 2.

    Returns (log_y1, log_y2) with log_yj[s] = log(e1 N_s ... N_anchor ej^t);
    s = anchor+1 is the empty product (log_y1 = 0, log_y2 = -inf).  Entries at
    s < 2 are NaN.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if anchor >= theta.shape[0]:
        raise ValueError("theta array too short for requested anchor")
    if anchor < 1:
        raise ValueError("anchor must be >= 1")
    log_y1 = np.full(anchor + 2, np.nan)
    log_y2 = np.full(anchor + 2, np.nan)
    r11, r12, r21, r22 = 1.0, 0.0, 0.0, 1.0
    scale = 0.0
    log_y1[anchor + 1] = 0.0
    log_y2[anchor + 1] = -math.inf
    for s in range(anchor, 1, -1):
        n11 = theta[s] * (r11 + r21)
        n12 = theta[s] * (r12 + r22)
        r21, r22 = r11, r12
        r11, r12 = n11, n12
        norm = r11 if r11 > r12 else r12
        r11 /= norm
        r12 /= norm
        r21 /= norm
        r22 /= norm
        scale += math.log(norm)
        log_y1[s] = scale + (math.log(r11) if r11 > 0.0 else -math.inf)
        log_y2[s] = scale + (math.log(r12) if r12 > 0.0 else -math.inf)
    return log_y1, log_y2


def simulate_excursions(up_prob: np.ndarray, up_jump: int, down_jump: int,
                        n_excursions: int, seed: int, index_offset: int,
                        step_cap: int, height_cap: int) -> tuple:
    """Excursions from 2 until the state drops below 2 or a cap binds.

    Returns (counts, censored_step, censored_height) where counts[x] is the
    number of excursions that returned with maximum exactly x.  The cap checks
    happen before each draw, so raising a cap replays every excursion
    identically up to the old cap.
    """
    up_prob = np.asarray(up_prob, dtype=np.float64)
    if up_prob.shape[0] < height_cap + 1:
        raise ValueError("up_prob must cover states up to height_cap")
    counts = np.zeros(height_cap + 1, dtype=np.int64)
    censored_step = 0
    censored_height = 0
    for e in range(n_excursions):
        s = _stream_state(seed, index_offset + e)
        state = 2
        mx = 2
        steps = 0
        while True:
            if steps >= step_cap:
                censored_step += 1
                break
            if _next_double(s) < up_prob[state]:
                state += up_jump
                if state > height_cap:
                    censored_height += 1
                    break
                if state > mx:
                    mx = state
            else:
                state -= down_jump
                if state < 2:
                    counts[mx] += 1
                    break
            steps += 1
    return counts, censored_step, censored_height


def simulate_hitting(up_prob: np.ndarray, up_jump: int, down_jump: int,
                     m: int, n: int, trials: int, seed: int,
                     index_offset: int) -> tuple:
    """Frequency counts for hitting [n, inf) at n, at n+1, or [0, m] first.

    Starts at 2; the region is finite so no censoring is needed.
    """
    up_prob = np.asarray(up_prob, dtype=np.float64)
    if up_prob.shape[0] < n:
        raise ValueError("up_prob must cover states up to n-1")
    if not (0 <= m < 2 <= n):
        raise ValueError("need m < 2 <= n with start state 2 strictly inside")
    at_n = 0
    at_n1 = 0
    at_low = 0
    for e in range(trials):
        s = _stream_state(seed, index_offset + e)
        state = 2
        while True:
            if _next_double(s) < up_prob[state]:
                state += up_jump
                if state >= n:
                    if state == n:
                        at_n += 1
                    else:
                        at_n1 += 1
                    break
            else:
                state -= down_jump
                if state <= m:
                    at_low += 1
                    break
    return at_n, at_n1, at_low


def sandwich_scan(a: np.ndarray, b: np.ndarray, d: np.ndarray,
                  slack: float = 1e-9) -> tuple:
    """Check zeta <= rho(product)/prod rho <= gamma over all pairs m <= k.

    Arrays are indexed 1..k_max (index 0 ignored).  Returns (violations,
    worst), where worst is the largest relative excursion beyond a bound
    (negative when every pair is strictly inside).  ``slack`` absorbs
    floating-point rounding: the bounds are exact in real arithmetic but both
    sides here carry ~k rounding errors.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    k_max = a.shape[0] - 1
    rho = np.empty(k_max + 1)
    for k in range(1, k_max + 1):
        rho[k] = 0.5 * (a[k] + math.sqrt(a[k] * a[k] + 4.0 * b[k] * d[k]))
    # prefix sums of the per-step log max/min factors of the telescoping bounds
    lmax = np.zeros(k_max + 1)
    lmin = np.zeros(k_max + 1)
    for k in range(2, k_max + 1):
        lr = math.log(rho[k] / rho[k - 1])
        ld = math.log(d[k] / d[k - 1])
        lmax[k] = lmax[k - 1] + (lr if lr > ld else ld)
        lmin[k] = lmin[k - 1] + (lr if lr < ld else ld)
    violations = 0
    worst = -math.inf
    for m in range(1, k_max + 1):
        p11, p12, p21, p22 = 1.0, 0.0, 0.0, 1.0
        for k in range(m, k_max + 1):
            n11 = (a[k] * p11 + b[k] * p21) / rho[k]
            n12 = (a[k] * p12 + b[k] * p22) / rho[k]
            n21 = d[k] * p11 / rho[k]
            n22 = d[k] * p12 / rho[k]
            p11, p12, p21, p22 = n11, n12, n21, n22
            tr = p11 + p22
            det = p11 * p22 - p12 * p21
            disc = tr * tr - 4.0 * det
            if disc < 0.0:
                disc = 0.0
            ratio = 0.5 * (tr + math.sqrt(disc))
            lr = math.log(rho[m] / rho[k])
            ld = math.log(d[m] / d[k])
            gamma = math.exp(lmax[k] - lmax[m] + (lr if lr > ld else ld))
            zeta = math.exp(lmin[k] - lmin[m] + (lr if lr < ld else ld))
            lo = (zeta - ratio) / zeta
            hi = (ratio - gamma) / gamma
            exc = lo if lo > hi else hi
            if exc > worst:
                worst = exc
            if exc > slack:
                violations += 1
    return violations, worst
