"""Finite and limit-periodic continued fractions K(beta_n | alpha_n).

Provides backward evaluation of finite fractions, truncated tails f^(n) with a
depth-doubling Cauchy stopping rule, the critical tail sequence f_k, the
periodic fixed point omega, and the fluctuation sequences delta_k / epsilon_k
whose ratio limits drive the convergence dichotomy for normalized matrix
products.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NonConvergenceError

__all__ = [
    "CFCoeffs",
    "TailEstimate",
    "backward_eval",
    "tail",
    "critical_tail",
    "critical_tail_array",
    "periodic_fixed_point",
    "delta_epsilon",
]

DEPTH_CAP = 2 ** 20


@dataclass(frozen=True)
class CFCoeffs:
    """Positive coefficient streams alpha_k, beta_k, k >= 1.

    ``alpha_inf``/``beta_inf`` record the limits when the fraction is known to
    be limit periodic; tail evaluation assumes (but cannot verify from a finite
    prefix) that the coefficients actually converge to them.
    """

    alpha: Callable[[int], float]
    beta: Callable[[int], float]
    alpha_inf: Optional[float] = None
    beta_inf: Optional[float] = None

    @classmethod
    def constant(cls, alpha: float, beta: float) -> "CFCoeffs":
        return cls(alpha=lambda k: alpha, beta=lambda k: beta,
                   alpha_inf=alpha, beta_inf=beta)


@dataclass(frozen=True)
class TailEstimate:
    value: float
    depth_used: int
    est_error: float


def backward_eval(c: CFCoeffs, start: int, stop: int) -> float:
    """beta_start/(alpha_start + beta_{start+1}/(... + beta_stop/alpha_stop)).

    Exact (up to rounding) backward recursion; positive coefficients keep every
    intermediate denominator strictly positive.
    """
    if start > stop:
        raise ValueError(f"need start <= stop, got {start} > {stop}")
    x = 0.0
    for k in range(stop, start - 1, -1):
        den = c.alpha(k) + x
        assert den > 0.0, "denominator vanished despite positive coefficients"
        x = c.beta(k) / den
    return x


def tail(c: CFCoeffs, n: int, tol: float, depth_cap: int = DEPTH_CAP) -> TailEstimate:
    """The n-th tail f^(n) = K_{k=n+1}^infinity (beta_k | alpha_k).

    Evaluates truncations at doubling depths until two successive values agree
    within tol.  No convergence rate is assumed beyond what the Cauchy test
    observes; the reported error is the last inter-depth difference.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    depth = 16
    prev = backward_eval(c, n + 1, n + depth)
    while True:
        depth *= 2
        cur = backward_eval(c, n + 1, n + depth)
        err = abs(cur - prev)
        if err < tol:
            return TailEstimate(value=cur, depth_used=depth, est_error=err)
        if depth >= depth_cap:
            raise NonConvergenceError(
                f"tail at n={n} did not reach tol={tol} within depth {depth_cap} "
                f"(last delta {err:.3e})"
            )
        prev = cur


def critical_tail(c: CFCoeffs, k: int) -> float:
    """Critical tail f_k: f_1 = beta_1/alpha_1, f_k = beta_k/(alpha_k + f_{k-1})."""
    if k < 1:
        raise ValueError("k must be >= 1")
    f = c.beta(1) / c.alpha(1)
    for j in range(2, k + 1):
        f = c.beta(j) / (c.alpha(j) + f)
    return f


def critical_tail_array(c: CFCoeffs, k_max: int) -> np.ndarray:
    """f_1..f_k_max in one forward pass; index 0 is unused (NaN)."""
    out = np.full(k_max + 1, np.nan)
    f = c.beta(1) / c.alpha(1)
    out[1] = f
    for j in range(2, k_max + 1):
        f = c.beta(j) / (c.alpha(j) + f)
        out[j] = f
    return out


def periodic_fixed_point(alpha_inf: float, beta_inf: float) -> float:
    """Positive root omega of omega(alpha + omega) = beta."""
    if alpha_inf <= 0.0 or beta_inf <= 0.0:
        raise ValueError("alpha_inf and beta_inf must be positive")
    return 0.5 * (np.sqrt(alpha_inf * alpha_inf + 4.0 * beta_inf) - alpha_inf)


def delta_epsilon(c: CFCoeffs, omega: Callable[[int], float], k_max: int) -> dict:
    """Fluctuation sequences around a comparison sequence omega_k.

        delta_k = beta_k - omega_k (alpha_k + omega_{k-1}),   k >= 2
        epsilon_k = f_k - omega_k,                            k >= 1

    plus the forward ratio sequences delta_k/delta_{k+1} and
    epsilon_k/epsilon_{k+1}.  Ratios with an exactly-zero denominator are
    reported as NaN with the index listed in ``undefined`` — the exactly
    periodic case produces them legitimately and they are data, not errors.

    The conventional choice omega_k = periodic_fixed_point(alpha_{k+1},
    beta_{k+1}) (coefficients one index ahead) makes delta capture the
    coefficient fluctuation; any positive sequence is accepted.
    """
    if k_max < 3:
        raise ValueError("k_max must be >= 3")
    f = critical_tail_array(c, k_max)
    om = np.array([np.nan] + [omega(k) for k in range(1, k_max + 1)])
    delta = np.full(k_max + 1, np.nan)
    for k in range(2, k_max + 1):
        delta[k] = c.beta(k) - om[k] * (c.alpha(k) + om[k - 1])
    eps = f - om
    undefined = []

    def _ratios(x, lo):
        r = np.full(k_max + 1, np.nan)
        for k in range(lo, k_max):
            if x[k + 1] == 0.0:
                undefined.append(k)
            else:
                r[k] = x[k] / x[k + 1]
        return r

    return {
        "delta": delta,
        "epsilon": eps,
        "delta_ratio": _ratios(delta, 2),
        "epsilon_ratio": _ratios(eps, 1),
        "undefined": undefined,
    }
