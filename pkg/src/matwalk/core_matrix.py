"""Overflow-free arithmetic on products of nonnegative 2x2 matrices.

Matrices have the shape [[a, b], [d, 0]] with a, b, d > 0.  Long products
A_k ... A_m are carried as a pair (bounded 2x2 entries, accumulated log of the
spectral-radius product): the raw products grow or shrink geometrically and
overflow doubles for k of a few thousand, while the normalized entries stay
O(1) whenever the coefficients have bounded variation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DegenerateEntryError

__all__ = [
    "PosMat2",
    "CoeffSequence",
    "NormalizedProduct",
    "spectral_radius",
    "product_step",
    "normalized_entry",
    "normalized_product",
    "product_spectral_ratio",
    "eigen_bounds",
    "check_b1",
]


@dataclass(frozen=True)
class PosMat2:
    """A matrix [[a, b], [d, 0]] with strictly positive a, b, d."""

    a: float
    b: float
    d: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and self.d > 0):
            raise ValueError(f"PosMat2 entries must be strictly positive, got {self}")

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.d, 0.0]])


def spectral_radius(m: PosMat2) -> float:
    """Largest eigenvalue (a + sqrt(a^2 + 4 b d)) / 2; always > 0."""
    return 0.5 * (m.a + math.sqrt(m.a * m.a + 4.0 * m.b * m.d))


@dataclass(frozen=True)
class CoeffSequence:
    """A deterministic source of PosMat2 factors indexed by k.

    ``kind`` tags the origin (Constant, ExplicitTable, LampertiTheta, Callable)
    for serialization; evaluation always goes through ``fn``.
    """

    kind: str
    fn: Callable[[int], PosMat2]
    k_min: int = 1
    k_max: Optional[int] = None  # None = unbounded

    def matrix(self, k: int) -> PosMat2:
        if k < self.k_min or (self.k_max is not None and k > self.k_max):
            raise IndexError(f"index {k} outside sequence range [{self.k_min}, {self.k_max}]")
        return self.fn(k)

    @classmethod
    def constant(cls, a: float, b: float, d: float) -> "CoeffSequence":
        m = PosMat2(a, b, d)
        return cls(kind="Constant", fn=lambda k: m)

    @classmethod
    def from_table(cls, triples: Sequence[tuple], k_min: int = 1) -> "CoeffSequence":
        mats = [PosMat2(float(a), float(b), float(d)) for a, b, d in triples]
        return cls(
            kind="ExplicitTable",
            fn=lambda k: mats[k - k_min],
            k_min=k_min,
            k_max=k_min + len(mats) - 1,
        )

    @classmethod
    def from_csv(cls, path) -> "CoeffSequence":
        """Load an explicit table from a CSV file with header k,a,b,d.

        The k column must be contiguous and ascending from 1.
        """
        triples = []
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            required = {"k", "a", "b", "d"}
            if reader.fieldnames is None or not required.issubset(reader.fieldnames):
                raise ValueError(f"expected CSV header with columns {sorted(required)}")
            for expected_k, row in enumerate(reader, start=1):
                if int(row["k"]) != expected_k:
                    raise ValueError(
                        f"k column must be contiguous ascending from 1; got {row['k']} "
                        f"where {expected_k} was expected"
                    )
                triples.append((row["a"], row["b"], row["d"]))
        if not triples:
            raise ValueError("empty coefficient table")
        return cls.from_table(triples, k_min=1)


@dataclass(frozen=True)
class NormalizedProduct:
    """A_k ... A_m divided by prod of spectral radii, plus the log of that product.

    Reconstruction: e_i A_k...A_m e_j^t = entries[i-1, j-1] * exp(log_scale).
    ``k_to == k_from - 1`` encodes the empty product (identity, log_scale 0).
    """

    entries: np.ndarray
    log_scale: float
    k_from: int
    k_to: int

    @classmethod
    def identity(cls, m: int) -> "NormalizedProduct":
        return cls(entries=np.eye(2), log_scale=0.0, k_from=m, k_to=m - 1)

    @property
    def length(self) -> int:
        return self.k_to - self.k_from + 1


def product_step(state: NormalizedProduct, nxt: PosMat2) -> NormalizedProduct:
    """Left-multiply by the next factor and renormalize by its spectral radius."""
    rho = spectral_radius(nxt)
    entries = (nxt.as_array() @ state.entries) / rho
    k = state.k_to + 1
    new = NormalizedProduct(entries, state.log_scale + math.log(rho), state.k_from, k)
    # A product of >= 2 factors has all four entries strictly positive; a single
    # factor has a zero only at (2,2).  Anything else is floating-point underflow.
    for i in range(2):
        for j in range(2):
            if entries[i, j] == 0.0 and not (new.length == 1 and i == 1 and j == 1):
                raise DegenerateEntryError(k, (i + 1, j + 1))
    return new


def normalized_product(seq: CoeffSequence, m: int, k: int) -> NormalizedProduct:
    """A_k ... A_m over prod of spectral radii, built by repeated product_step."""
    if m > k:
        raise ValueError(f"need m <= k, got m={m}, k={k}")
    state = NormalizedProduct.identity(m)
    for j in range(m, k + 1):
        state = product_step(state, seq.matrix(j))
    return state


def normalized_entry(seq: CoeffSequence, m: int, k: int, i: int, j: int) -> float:
    """e_i A_k...A_m e_j^t / (rho(A_k)...rho(A_m)) for i, j in {1, 2}."""
    if i not in (1, 2) or j not in (1, 2):
        raise ValueError("i and j must be 1 or 2")
    return float(normalized_product(seq, m, k).entries[i - 1, j - 1])


def _rho_2x2(mat: np.ndarray) -> float:
    """Largest eigenvalue of a nonnegative 2x2 matrix (real by Perron-Frobenius)."""
    tr = mat[0, 0] + mat[1, 1]
    det = mat[0, 0] * mat[1, 1] - mat[0, 1] * mat[1, 0]
    disc = tr * tr - 4.0 * det
    if disc < 0.0:  # only roundoff can push it below zero
        disc = 0.0
    return 0.5 * (tr + math.sqrt(disc))


def product_spectral_ratio(seq: CoeffSequence, m: int, k: int) -> float:
    """rho(A_k...A_m) / (rho(A_k)...rho(A_m)); the scale factor cancels."""
    return _rho_2x2(normalized_product(seq, m, k).entries)


def eigen_bounds(seq: CoeffSequence, m: int, k: int) -> tuple:
    """Two-sided telescoping bounds (zeta, gamma) on product_spectral_ratio.

    Uses the comparison vectors v_n = (rho(A_n), d_n):

        gamma = prod_{n=m+1}^{k} max(rho_n/rho_{n-1}, d_n/d_{n-1})
                * max(rho_m/rho_k, d_m/d_k)

    and zeta the same with min in both places; zeta <= ratio <= gamma.
    """
    if m > k:
        raise ValueError(f"need m <= k, got m={m}, k={k}")
    mats = [seq.matrix(n) for n in range(m, k + 1)]
    rho = [spectral_radius(x) for x in mats]
    d = [x.d for x in mats]
    log_gamma = 0.0
    log_zeta = 0.0
    for n in range(1, len(mats)):
        lr = math.log(rho[n] / rho[n - 1])
        ld = math.log(d[n] / d[n - 1])
        log_gamma += max(lr, ld)
        log_zeta += min(lr, ld)
    lr = math.log(rho[0] / rho[-1])
    ld = math.log(d[0] / d[-1])
    return math.exp(log_zeta + min(lr, ld)), math.exp(log_gamma + max(lr, ld))


def check_b1(seq: CoeffSequence, horizon: int) -> dict:
    """Bounded-variation diagnostic over the prefix [k_min, horizon].

    Returns the running minimum of the coefficients and the accumulated total
    variation sum_{k} |a_k - a_{k-1}| + |b_k - b_{k-1}| + |d_k - d_{k-1}|.
    Judging summability from the finite prefix is left to the caller.
    """
    if horizon < seq.k_min + 1:
        raise ValueError("horizon must cover at least two indices")
    prev = seq.matrix(seq.k_min)
    sigma_min = min(prev.a, prev.b, prev.d)
    variation = 0.0
    for k in range(seq.k_min + 1, horizon + 1):
        cur = seq.matrix(k)
        sigma_min = min(sigma_min, cur.a, cur.b, cur.d)
        variation += abs(cur.a - prev.a) + abs(cur.b - prev.b) + abs(cur.d - prev.d)
        prev = cur
    return {"sigma_min": sigma_min, "variation_sum": variation}
