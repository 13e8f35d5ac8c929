"""Numerical verification instruments for the limit laws.

Every asymptotic statement under test carries an unknown constant, so the
checks here test *shape*, not value: windowed spreads for convergence of
sequences, log-log slope fits for power laws, and ratio-of-ratios (second
differences in log-log) for laws with slowly varying corrections, which cancel
the constant exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import perturb, walk_exact

__all__ = [
    "SeriesDiagnostic",
    "convergence_check",
    "local_exponent",
    "asymptote_ratio",
    "sto_check",
    "pce_check",
    "rho_product_ratio",
]

CONVERGED = "converged"
NOT_CONVERGED = "not-converged"
INCONCLUSIVE = "inconclusive"


@dataclass
class SeriesDiagnostic:
    checkpoints: list  # [(index, value)]
    verdict: str
    limit_est: float = math.nan
    spread: float = math.nan
    detail: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.verdict == CONVERGED


def convergence_check(series: Callable[[int], float],
                      k_checkpoints: Sequence[int], tol: float,
                      window: int = 3) -> SeriesDiagnostic:
    """Converged iff the max-min spread over the last ``window`` checkpoints < tol."""
    ks = sorted(k_checkpoints)
    if len(ks) < 3 or any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError("need >= 3 strictly increasing checkpoints")
    vals = [float(series(k)) for k in ks]
    tail = vals[-window:]
    spread = max(tail) - min(tail)
    if not all(math.isfinite(v) for v in vals):
        verdict = INCONCLUSIVE
    else:
        verdict = CONVERGED if spread < tol else NOT_CONVERGED
    return SeriesDiagnostic(
        checkpoints=list(zip(ks, vals)), verdict=verdict,
        limit_est=vals[-1], spread=spread,
    )


def local_exponent(n: np.ndarray, value: np.ndarray,
                   n_lo: int, n_hi: int) -> tuple:
    """Least-squares slope of log(value) vs log(n) over [n_lo, n_hi], with stderr."""
    n = np.asarray(n, dtype=float)
    value = np.asarray(value, dtype=float)
    if n_hi / n_lo < 4:
        raise ValueError("window must span at least a factor of 4")
    sel = (n >= n_lo) & (n <= n_hi)
    if np.count_nonzero(sel) < 3:
        raise ValueError("window contains fewer than 3 points")
    if np.any(value[sel] <= 0.0):
        raise ValueError("values must be positive in the fit window")
    x = np.log(n[sel])
    y = np.log(value[sel])
    coeffs = np.polyfit(x, y, 1)
    slope = coeffs[0]
    fit = np.polyval(coeffs, x)
    dof = max(x.size - 2, 1)
    sigma2 = float(np.sum((y - fit) ** 2)) / dof
    sxx = float(np.sum((x - x.mean()) ** 2))
    stderr = math.sqrt(sigma2 / sxx) if sxx > 0 else math.inf
    return float(slope), stderr


def asymptote_ratio(n: np.ndarray, value: np.ndarray,
                    predicted: Callable[[float], float],
                    tol: float = 0.05) -> SeriesDiagnostic:
    """Shape test against a predicted form with unknown constant.

    Evaluates r(n) = value(n)/predicted(n) at the given (geometric)
    checkpoints; Converged iff the ratio-of-ratios across the final two
    checkpoints is within tol of 1.  A wrong power law makes the ratio drift
    geometrically and fails; the constant cancels.
    """
    n = np.asarray(n)
    value = np.asarray(value, dtype=float)
    if n.size < 3:
        raise ValueError("need at least 3 checkpoints")
    if np.any(value <= 0.0):
        raise ValueError("values must be positive")
    ratios = value / np.array([predicted(float(x)) for x in n])
    rr = float(ratios[-1] / ratios[-2])
    verdict = CONVERGED if abs(rr - 1.0) < tol else NOT_CONVERGED
    return SeriesDiagnostic(
        checkpoints=list(zip(n.tolist(), ratios.tolist())), verdict=verdict,
        limit_est=float(ratios[-1]), spread=abs(rr - 1.0),
        detail={"ratio_of_ratios": rr},
    )


def sto_check(sigma: Callable[[int], float], n_max: int,
              tol: float = 1e-2, n_checkpoints: int = 12) -> SeriesDiagnostic:
    """Check sigma_2...sigma_n / sum_{i=1}^n sigma_2...sigma_i -> 0.

    The i = 1 term of the denominator is the empty product 1.  Products are
    accumulated in log space so geometric growth cannot overflow.
    """
    if n_max < 10:
        raise ValueError("n_max must be >= 10")
    cps = np.unique(np.geomspace(10, n_max, n_checkpoints).astype(int))
    log_prod = 0.0
    log_sum = 0.0  # log of sum_{i=1}^{n} of the products, starts at the i=1 term
    out = []
    it = iter(cps.tolist())
    nxt = next(it)
    for k in range(2, n_max + 1):
        log_prod += math.log(sigma(k))
        log_sum = np.logaddexp(log_sum, log_prod)
        if k == nxt:
            out.append((k, math.exp(log_prod - log_sum)))
            nxt = next(it, None)
            if nxt is None:
                break
    last = out[-1][1]
    verdict = CONVERGED if last < tol else NOT_CONVERGED
    return SeriesDiagnostic(checkpoints=out, verdict=verdict,
                            limit_est=last, spread=last)


def pce_check(model: walk_exact.WalkModel, checkpoints: Sequence[int],
              rel_tol: float = 0.05) -> SeriesDiagnostic:
    """Ratio of exact 1 - P_n(1, n+1, +) to its xi-product expression.

    The expression is xi_2...xi_n / sum_{s=2}^{n+1} xi_2...xi_{s-1}; the ratio
    should stabilize to a positive constant.  Converged iff the relative
    spread over the last three checkpoints is < rel_tol.
    """
    if model.family != "12":
        raise ValueError("pce_check applies to the (1,2) walk")
    cps = sorted(int(c) for c in checkpoints)
    n_top = cps[-1]
    xis = walk_exact.xi_array(model, n_top + 1)
    log_x = np.zeros(n_top + 2)  # log xi_2...xi_i, empty at i = 1
    log_x[2:] = np.cumsum(np.log(xis[2: n_top + 2]))
    log_x[1] = 0.0
    out = []
    for n in cps:
        exact = walk_exact.down_prob_12(model, n)
        log_den = np.logaddexp.reduce(log_x[1: n + 1])  # sum_{s=2}^{n+1} of xi_2..xi_{s-1}
        expr = math.exp(log_x[n] - log_den)
        out.append((n, exact / expr))
    tail = [v for _, v in out[-3:]]
    spread = (max(tail) - min(tail)) / min(tail)
    verdict = CONVERGED if spread < rel_tol else NOT_CONVERGED
    return SeriesDiagnostic(checkpoints=out, verdict=verdict,
                            limit_est=out[-1][1], spread=spread)


def rho_product_ratio(model: walk_exact.WalkModel, checkpoints: Sequence[int],
                      tol: float = 0.01) -> SeriesDiagnostic:
    """Shape test of prod rho(N_k) against the closed-form growth law.

    For a parametric model the spectral-radius product should follow
    asymptote(params, n, s) with s = +1 when the effective (2,1)-drift is
    downward.  Tested by ratio-of-ratios like ``asymptote_ratio``.
    """
    if not model.is_parametric:
        raise ValueError("rho_product_ratio needs a parametric model")
    cps = np.asarray(sorted(int(c) for c in checkpoints))
    n_top = int(cps[-1])
    th = model.theta_array(n_top)
    with np.errstate(invalid="ignore"):
        log_rho = np.log(0.5 * (th + np.sqrt(th * th + 4.0 * th)))
    cum = np.zeros(n_top + 1)
    cum[2:] = np.cumsum(log_rho[2:])
    # rho(N_k) = 1 -+ 3 r_k for q = 2/3 +- r: the product grows iff the
    # (2,1)-drift points down.
    q_plus = (model.params.sign == +1) == (model.family == "21")
    s = -1 if q_plus else +1
    values = np.exp(cum[cps])
    return asymptote_ratio(
        cps, values, lambda x: perturb.asymptote(model.params, int(x), s), tol
    )
