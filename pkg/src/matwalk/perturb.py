"""Iterated-logarithm drift perturbations.

The perturbation family is

    lam(K, i, B) = 1/i + 1/(i log i) + ... + 1/(i log i ... log_{K-2} i)
                   + B/(i log i ... log_{K-1} i),

with log_0 i = i and log_j i = log(log_{j-1} i) (natural logs throughout; any
fixed base only rescales constants that are unknown anyway).  The walk modules
add r_i = lam(K, i, B)/3 to a critical base probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NotDefinedError

__all__ = [
    "PerturbParams",
    "iterated_log",
    "lam",
    "i_zero",
    "r",
    "r_array",
    "asymptote",
    "r_increment_rate",
    "r_increment_limit",
]


@dataclass(frozen=True)
class PerturbParams:
    """Parameters (K, B, sign) of one perturbation family.

    ``sign`` is the direction in which downstream walk models apply r_i to
    their base probability; it does not affect r_i itself.
    """

    K: int
    B: float
    sign: int = +1

    def __post_init__(self):
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if self.sign not in (+1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")


def iterated_log(j: int, x: float) -> float:
    """j-fold natural logarithm; log_0 x = x.

    Raises NotDefinedError as soon as an intermediate value leaves the domain
    of log (i.e. is <= 0).
    """
    if j < 0:
        raise ValueError("j must be >= 0")
    v = float(x)
    for _ in range(j):
        if v <= 0.0:
            raise NotDefinedError(f"iterated log undefined: intermediate value {v} <= 0")
        v = math.log(v)
    return v


def lam(params: PerturbParams, i: int) -> float:
    """The drift term lam(K, i, B).

    Requires log_0 i, ..., log_{K-1} i all defined and strictly positive.
    """
    K, B = params.K, params.B
    logs = []
    v = float(i)
    for _ in range(K):
        if v <= 0.0:
            raise NotDefinedError(f"lam(K={K}, i={i}) undefined: an iterated log is <= 0")
        logs.append(v)
        v = math.log(v)
    total = 0.0
    prod = 1.0
    for j in range(K - 1):
        prod *= logs[j]
        total += 1.0 / prod
    prod *= logs[K - 1]
    total += B / prod
    return total


@lru_cache(maxsize=None)
def i_zero(params: PerturbParams) -> int:
    """Smallest i >= 2 with log_{K-1} i > 0 and |lam(K, i, B)| < 1."""
    i = 2
    while True:
        try:
            if iterated_log(params.K - 1, i) > 0.0 and abs(lam(params, i)) < 1.0:
                return i
        except NotDefinedError:
            pass
        i += 1
        if i > 10**9:  # lam -> 0, so this is unreachable for sane K
            raise RuntimeError("i_zero scan did not terminate")


def r(params: PerturbParams, i: int) -> float:
    """Perturbation r_i = lam(K, i, B)/3 for i >= i_0, clamped to r_{i_0} below."""
    if i < 1:
        raise ValueError("i must be >= 1")
    i0 = i_zero(params)
    if i < i0:
        i = i0
    return lam(params, i) / 3.0


def r_array(params: PerturbParams, i_max: int) -> np.ndarray:
    """Vectorized r_i for i = 0..i_max (index 0 unused, set to r_{i_0}).

    Uses the same floating-point evaluation order as the scalar ``r`` so the
    two agree bit for bit.
    """
    K, B = params.K, params.B
    i0 = i_zero(params)
    i = np.arange(i_max + 1, dtype=np.float64)
    i[: i0] = float(i0)  # clamp below i_0 (and give indices 0/1 a valid value)

    total = np.zeros_like(i)
    prod = np.ones_like(i)
    v = i.copy()
    with np.errstate(invalid="ignore", divide="ignore"):
        for j in range(K - 1):
            prod = prod * v
            total = total + 1.0 / prod
            v = np.log(v)
        prod = prod * v
        total = total + B / prod
    out = total / 3.0
    if not np.all(np.isfinite(out)):
        raise NotDefinedError("r_array hit an undefined iterated log; check i_0 clamping")
    return out


def asymptote(params: PerturbParams, n: int, exponent_sign: int) -> float:
    """Closed-form growth law (n log n ... log_{K-2} n (log_{K-1} n)^B)^(+-1).

    For K = 1 the prefix product is empty and the value is (n^B)^(+-1).
    """
    if exponent_sign not in (+1, -1):
        raise ValueError("exponent_sign must be +1 or -1")
    K, B = params.K, params.B
    logs = []
    v = float(n)
    for _ in range(K):
        if v <= 0.0:
            raise NotDefinedError(f"asymptote undefined at n={n} for K={K}")
        logs.append(v)
        v = math.log(v)
    log_val = 0.0
    for j in range(K - 1):
        log_val += math.log(logs[j])
    log_val += B * math.log(logs[K - 1])
    return math.exp(exponent_sign * log_val)


def r_increment_rate(params: PerturbParams, n: int) -> float:
    """3 n^2 (r_n - r_{n+1}); converges to ``r_increment_limit``."""
    if n < i_zero(params):
        raise ValueError(f"n must be >= i_0 = {i_zero(params)}")
    return 3.0 * n * n * (r(params, n) - r(params, n + 1))


def r_increment_limit(params: PerturbParams) -> float:
    """Limit of 3 n^2 (r_n - r_{n+1}).

    The leading increment comes from the 1/i term for K >= 2 and from the
    B/i term for K = 1, so the limit is 1 for K >= 2 and B for K = 1.
    """
    return 1.0 if params.K >= 2 else params.B
