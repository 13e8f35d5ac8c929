"""Exact probabilities for (2,1) and (1,2) random walks.

Both chains live on the nonnegative integers and start excursions at 2:

* family "21": up +1 with probability q_k, down -2 with probability p_k;
* family "12": up +2 with probability p_k, down -1 with probability q_k.

theta_k = p_k/q_k parametrizes the matrices N_k = [[theta_k, theta_k], [1, 0]]
through which every hitting probability below is expressed.  All long sums of
matrix-product entries are accumulated in log space (the terms span hundreds
of orders of magnitude away from criticality).
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from . import contfrac, perturb
from ._kernels import prod12_log_rows, prod21_log_e1
from .core_matrix import CoeffSequence, PosMat2
from .errors import (
    CancellationWarning,
    InvalidProbabilityError,
    UnsupportedModelError,
    ZeroDenominatorError,
)

__all__ = [
    "WalkModel",
    "MaxDistribution",
    "RecurrenceClass",
    "theta",
    "n_matrix",
    "escape_prob_21",
    "max_dist_21",
    "max_dist_table_21",
    "max_dist_12",
    "max_dist_table_12",
    "down_prob_12",
    "hitting_split_12",
    "hitting_ratio",
    "xi",
    "xi_finite",
    "xi_array",
    "escape_bounds_12",
    "down_prob_bounds_12",
    "xi_inverse_vs_product",
    "classify",
    "max_dist",
    "max_dist_table",
]

BASE_Q_21 = 2.0 / 3.0  # critical up-probability of the (2,1) walk
BASE_P_12 = 1.0 / 3.0  # critical up-probability of the (1,2) walk


class RecurrenceClass(Enum):
    TRANSIENT = "transient"
    NULL_RECURRENT = "null-recurrent"
    POSITIVE_RECURRENT = "positive-recurrent"


@dataclass(frozen=True)
class WalkModel:
    """A walk family plus either Lamperti parameters or an explicit q-table.

    For parametric models the perturbation r_k applies to the family's own
    base probability: q_k = 2/3 + sign*r_k (family 21) or p_k = 1/3 + sign*r_k
    (family 12).  Table models list q_k (the probability of the +-1 step)
    starting at k = 2; the last row extends to all larger k.
    """

    family: str
    params: Optional[perturb.PerturbParams] = None
    q_table: Optional[tuple] = None

    def __post_init__(self):
        if self.family not in ("21", "12"):
            raise ValueError(f"family must be '21' or '12', got {self.family!r}")
        if (self.params is None) == (self.q_table is None):
            raise ValueError("exactly one of params / q_table must be given")
        if self.q_table is not None:
            for q in self.q_table:
                if not (0.0 < q < 1.0):
                    raise InvalidProbabilityError(f"table q={q} outside (0, 1)")

    @classmethod
    def lamperti(cls, family: str, K: int, B: float, sign: int) -> "WalkModel":
        return cls(family=family, params=perturb.PerturbParams(K=K, B=B, sign=sign))

    @classmethod
    def from_table(cls, family: str, q_values) -> "WalkModel":
        return cls(family=family, q_table=tuple(float(q) for q in q_values))

    @classmethod
    def constant(cls, family: str, q: float) -> "WalkModel":
        return cls.from_table(family, [q])

    @classmethod
    def from_csv(cls, family: str, path) -> "WalkModel":
        """Load a q-table from a CSV file with header k,q, k contiguous from 2."""
        values = []
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"k", "q"}.issubset(reader.fieldnames):
                raise ValueError("expected CSV header with columns k,q")
            for expected_k, row in enumerate(reader, start=2):
                if int(row["k"]) != expected_k:
                    raise ValueError(
                        f"k column must be contiguous ascending from 2; got {row['k']}"
                    )
                values.append(float(row["q"]))
        if not values:
            raise ValueError("empty walk table")
        return cls.from_table(family, values)

    @property
    def is_parametric(self) -> bool:
        return self.params is not None

    def q_array(self, k_max: int) -> np.ndarray:
        """q_k for k = 0..k_max (indices below 2 are fill, never used)."""
        if self.params is not None:
            r = perturb.r_array(self.params, k_max)
            if self.family == "21":
                q = BASE_Q_21 + self.params.sign * r
            else:
                q = 1.0 - (BASE_P_12 + self.params.sign * r)
        else:
            tab = np.asarray(self.q_table)
            idx = np.minimum(np.maximum(np.arange(k_max + 1) - 2, 0), len(tab) - 1)
            q = tab[idx]
        if not np.all((q[2:] > 0.0) & (q[2:] < 1.0)):
            raise InvalidProbabilityError("derived q_k left (0, 1)")
        return q

    def q(self, k: int) -> float:
        return float(self.q_array(k)[k])

    def p(self, k: int) -> float:
        return 1.0 - self.q(k)

    def up_prob_array(self, k_max: int) -> np.ndarray:
        """Probability of the family's up-step at each state."""
        q = self.q_array(k_max)
        return q if self.family == "21" else 1.0 - q

    def theta_array(self, k_max: int) -> np.ndarray:
        q = self.q_array(k_max)
        return (1.0 - q) / q

    def cf_coeffs(self) -> contfrac.CFCoeffs:
        """Continued-fraction coefficients (alpha = 1, beta_k = 1/theta_k)."""
        return contfrac.CFCoeffs(
            alpha=lambda k: 1.0,
            beta=lambda k: 1.0 / theta(self, k),
            alpha_inf=1.0,
            beta_inf=(2.0 if self.is_parametric else 1.0 / theta_limit(self)),
        )

    def coeff_sequence(self) -> CoeffSequence:
        kind = "LampertiTheta" if self.is_parametric else "ExplicitTable"
        return CoeffSequence(kind=kind, fn=lambda k: n_matrix(self, k), k_min=2)

    def to_config(self) -> dict:
        cfg = {"family": self.family}
        if self.params is not None:
            cfg.update(K=self.params.K, B=self.params.B, sign=self.params.sign)
        else:
            cfg.update(q_table=list(self.q_table))
        return cfg


def theta_limit(model: WalkModel) -> float:
    if model.is_parametric:
        return 0.5
    q = model.q_table[-1]
    return (1.0 - q) / q


def theta(model: WalkModel, k: int) -> float:
    """theta_k = p_k / q_k for k >= 2."""
    if k < 2:
        raise ValueError("theta is defined for k >= 2")
    return float(model.theta_array(k)[k])


def n_matrix(model: WalkModel, k: int) -> PosMat2:
    t = theta(model, k)
    return PosMat2(t, t, 1.0)


# ---------------------------------------------------------------------------
# (2,1) walk: everything reduces to y_s = e1 N_s ... N_{m+1} e1^t, one forward
# sweep anchored at the left index.
# ---------------------------------------------------------------------------


def _log1p_sumexp(log_terms: np.ndarray) -> float:
    """log(1 + sum exp(log_terms)); the 1 is the empty-product term."""
    if log_terms.size == 0:
        return 0.0
    return float(np.logaddexp(0.0, np.logaddexp.reduce(log_terms)))


def escape_prob_21(model: WalkModel, m: int, k: int, n: int) -> float:
    """Probability the (2,1) walk from k falls to [0, m] before reaching [n, inf).

        P_k(m, n, -) = sum_{s=k}^{n-1} y_s / (1 + sum_{s=m+1}^{n-1} y_s),

    with y_s = e1 N_s ... N_{m+1} e1^t and y_m = 1 the empty product.
    """
    if not (0 < m <= k <= n):
        raise ValueError("need 0 < m <= k <= n")
    if k == n:
        return 0.0
    log_y = prod21_log_e1(model.theta_array(n), m, n)
    log_num = np.logaddexp.reduce(log_y[k: n])
    log_den = np.logaddexp.reduce(log_y[m: n])
    return float(math.exp(log_num - log_den))


def _log_dist_21(model: WalkModel, n_max: int) -> np.ndarray:
    """log P(M=n, D<inf) for n = 2..n_max in one O(n_max) sweep."""
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    log_y = prod21_log_e1(model.theta_array(n_max), 1, n_max)
    # log(1 + S_n) with S_n = sum_{s=2}^n y_s; S_1 is the empty sum
    log_1p_s = np.zeros(n_max + 1)
    if n_max >= 2:
        acc = np.logaddexp.accumulate(log_y[2:])
        log_1p_s[2:] = np.logaddexp(0.0, acc)
    out = np.full(n_max + 1, np.nan)
    for n in range(2, n_max + 1):
        out[n] = log_y[n] - log_1p_s[n - 1] - log_1p_s[n]
    return out


def max_dist_21(model: WalkModel, n: int) -> float:
    """P(M = n, D < inf) for the (2,1) walk.

        [1 / (1 + sum_{s=2}^{n-1} y_s)] * [y_n / (1 + sum_{s=2}^{n} y_s)]

    with y_s = e1 N_s ... N_2 e1^t and the empty sum = 0 at n = 2.
    """
    return float(math.exp(_log_dist_21(model, n)[n]))


# ---------------------------------------------------------------------------
# (1,2) walk: formulas anchor the product at the right index (N_{n-1} or N_n),
# so each n needs its own backward sweep.
# ---------------------------------------------------------------------------


def down_prob_12(model: WalkModel, n: int) -> float:
    """1 - P_n(1, n+1, +): from n, fall below 2 before reaching above n.

        = 1 / (1 + sum_{s=2}^{n} e1 N_s ... N_n e1^t).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    log_y1, _ = prod12_log_rows(model.theta_array(n), n)
    return float(math.exp(-_log1p_sumexp(log_y1[2: n + 1])))


def hitting_split_12(model: WalkModel, n: int) -> tuple:
    """(P_2^n, P_2^{n+1}, P_2) for escapes of the (1,2) walk from 2 to [n, inf).

    P_2 = P_2(1, n, +) is the total escape probability; P_2^j is the part
    arriving exactly at j in {n, n+1}.  Exact formulas:

        P_2      = Y1(2) / (1 + sum_{s=2}^{n-1} Y1(s)),
        P_2^n    = R * Y1(2) - Y2(2),   R = (1 + sum Y2(s)) / (1 + sum Y1(s)),
        P_2^{n+1} = P_2 - P_2^n,

    with Yj(s) = e1 N_s ... N_{n-1} ej^t.  The subtraction in P_2^n loses
    relative precision ~1/n; a CancellationWarning fires when more than half
    the significant digits are gone.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if n == 2:
        # From 2 the first up-jump lands at 4 >= n, so escape is immediate and
        # always "at n": P_2^2(1,2,+) = 1 by convention.
        return 1.0, 0.0, 1.0
    log_y1, log_y2 = prod12_log_rows(model.theta_array(n - 1), n - 1)
    log_s1 = _log1p_sumexp(log_y1[2: n])
    log_s2 = _log1p_sumexp(log_y2[2: n])
    p2_total = math.exp(log_y1[2] - log_s1)
    la = log_s2 - log_s1 + log_y1[2]
    lb = log_y2[2]
    if la <= lb:
        p2n = 0.0
    else:
        gap = la - lb
        if gap < 1e-8 and n > 3:
            warnings.warn(
                f"P_2^n(1,{n},+) lost more than half its digits to cancellation",
                CancellationWarning,
                stacklevel=2,
            )
        p2n = math.exp(lb + math.log(math.expm1(gap)))
    p2n = min(p2n, p2_total)
    return p2n, p2_total - p2n, p2_total


def max_dist_12(model: WalkModel, n: int) -> float:
    """P(M = n, D < inf) = P_2^n(1, n, +) * (1 - P_n(1, n+1, +))."""
    p2n, _, _ = hitting_split_12(model, n)
    if p2n == 0.0:
        return 0.0
    return p2n * down_prob_12(model, n)


def hitting_ratio(model: WalkModel, n: int) -> float:
    """P_2^n(1,n,+) / P_2^{n+1}(1,n,+); tends to 2 for the Lamperti families."""
    if n < 3:
        raise ValueError("n must be >= 3")
    p2n, p2n1, _ = hitting_split_12(model, n)
    if p2n1 == 0.0:
        raise ZeroDenominatorError(f"P_2^{n + 1}(1,{n},+) is exactly 0")
    return p2n / p2n1


def max_dist(model: WalkModel, n: int) -> float:
    return max_dist_21(model, n) if model.family == "21" else max_dist_12(model, n)


# ---------------------------------------------------------------------------
# Continued-fraction tails xi_n and the bounds built from them.
# ---------------------------------------------------------------------------


def xi_finite(model: WalkModel, s: int, n: int) -> float:
    """Finite tail xi_{s,n} = (1/theta_s)/(1 + (1/theta_{s+1})/(1 + ...(1/theta_n)))."""
    if not (2 <= s <= n):
        raise ValueError("need 2 <= s <= n")
    return contfrac.backward_eval(model.cf_coeffs(), s, n)


def xi(model: WalkModel, n: int, tol: float = 1e-12) -> contfrac.TailEstimate:
    """Infinite tail xi_n = lim_{m->inf} xi_{n,m}."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return contfrac.tail(model.cf_coeffs(), n - 1, tol)


def xi_array(model: WalkModel, n_max: int, tol: float = 1e-12) -> np.ndarray:
    """xi_s for s = 2..n_max via one backward pass (index < 2 is NaN).

    The pass starts from a truncation buffer past n_max that doubles until two
    successive evaluations of xi_{n_max} agree within tol, then recurses
    downward: every smaller index inherits at least that accuracy because the
    backward map is a contraction for positive coefficients.
    """
    c = model.cf_coeffs()
    buf = 64
    prev = contfrac.backward_eval(c, n_max, n_max + buf)
    while True:
        buf *= 2
        cur = contfrac.backward_eval(c, n_max, n_max + buf)
        if abs(cur - prev) < tol:
            break
        if buf > contfrac.DEPTH_CAP:
            raise contfrac.NonConvergenceError(
                f"xi_array tail buffer exceeded {contfrac.DEPTH_CAP} without converging"
            )
        prev = cur
    th = model.theta_array(n_max)
    out = np.full(n_max + 1, np.nan)
    out[n_max] = cur
    x = cur
    for s in range(n_max - 1, 1, -1):
        x = (1.0 / th[s]) / (1.0 + x)
        out[s] = x
    return out


def escape_bounds_12(model: WalkModel, m: int, k: int, n: int,
                     xis: Optional[np.ndarray] = None) -> tuple:
    """Two-sided bounds on P_k(m, n, -) for the (1,2) walk:

        sum_{i=k}^{n-1} X_i / (1 + sum_{i=m+1}^{n-1} X_i)
          <= P_k(m,n,-) <=
        sum_{i=k}^{n} X_i / (1 + sum_{i=m+1}^{n} X_i),

    where X_i = xi_{m+1} ... xi_i (empty product = 1 at i = m).
    """
    if not (1 <= m <= k <= n):
        raise ValueError("need 1 <= m <= k <= n")
    if xis is None:
        xis = xi_array(model, n + 1)
    log_x = np.zeros(n + 1)  # log X_i for i = m..n
    log_x[m + 1: n + 1] = np.cumsum(np.log(xis[m + 1: n + 1]))
    def _frac(hi):
        num = log_x[k: hi + 1]
        if num.size == 0:
            return 0.0
        log_num = np.logaddexp.reduce(num)
        log_den = np.logaddexp.reduce(log_x[m: hi + 1])
        return float(math.exp(log_num - log_den))
    return _frac(n - 1), _frac(n)


def down_prob_bounds_12(model: WalkModel, n: int,
                        xis: Optional[np.ndarray] = None) -> tuple:
    """xi-product bounds sandwiching the exact 1 - P_n(1, n+1, +):

        X_n / (1 + sum_{i=2}^{n} X_i) <= . <= (X_n + X_{n+1}) / (1 + sum_{i=2}^{n+1} X_i)

    with X_i = xi_2 ... xi_i.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if xis is None:
        xis = xi_array(model, n + 1)
    log_x = np.concatenate(([0.0], np.cumsum(np.log(xis[2: n + 2]))))  # i = 1..n+1
    log_den_low = np.logaddexp(0.0, np.logaddexp.reduce(log_x[1: n]))  # 1 + sum_{i=2}^{n}
    log_den_up = np.logaddexp(0.0, np.logaddexp.reduce(log_x[1: n + 1]))
    low = math.exp(log_x[n - 1] - log_den_low)
    up = math.exp(np.logaddexp(log_x[n - 1], log_x[n]) - log_den_up)
    return float(low), float(up)


def xi_inverse_vs_product(model: WalkModel, n: int,
                          xis: Optional[np.ndarray] = None) -> float:
    """(xi_2 ... xi_n) * (e1 N_2 ... N_n e1^t); stabilizes to a constant."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if xis is None:
        xis = xi_array(model, n)
    log_y1, _ = prod12_log_rows(model.theta_array(n), n)
    return float(math.exp(np.sum(np.log(xis[2: n + 1])) + log_y1[2]))


# ---------------------------------------------------------------------------
# Recurrence classification.
# ---------------------------------------------------------------------------


def classify(model: WalkModel) -> RecurrenceClass:
    """Recurrence class of the model's own chain, from the (K, B, sign) table.

    The table is keyed on the direction of the *drift of the (2,1) chain*:
    q = 2/3 + r corresponds to sign +1 for family 21 and sign -1 for family 12
    (adjoint chains share the same q sequence).  For K = 1 flipping that
    direction is the same as negating B.
    """
    if not model.is_parametric:
        raise UnsupportedModelError(
            "classification applies only to parametric (K, B, sign) models"
        )
    K, B = model.params.K, model.params.B
    q_plus = (model.params.sign == +1) == (model.family == "21")
    if K == 1:
        b_eff = B if q_plus else -B
        if b_eff > 1:
            y, yp = RecurrenceClass.TRANSIENT, RecurrenceClass.POSITIVE_RECURRENT
        elif b_eff < -1:
            y, yp = RecurrenceClass.POSITIVE_RECURRENT, RecurrenceClass.TRANSIENT
        else:
            y = yp = RecurrenceClass.NULL_RECURRENT
    else:
        if B > 1:
            if q_plus:
                y, yp = RecurrenceClass.TRANSIENT, RecurrenceClass.POSITIVE_RECURRENT
            else:
                y, yp = RecurrenceClass.POSITIVE_RECURRENT, RecurrenceClass.TRANSIENT
        else:
            y = yp = RecurrenceClass.NULL_RECURRENT
    return y if model.family == "21" else yp


# ---------------------------------------------------------------------------
# Distribution tables.
# ---------------------------------------------------------------------------


@dataclass
class MaxDistribution:
    """Table n -> P(M = n, D < inf) with the model config attached."""

    family: str
    n: np.ndarray
    prob: np.ndarray
    log_prob: np.ndarray
    config: dict = field(default_factory=dict)

    @property
    def mass(self) -> float:
        return float(np.sum(self.prob))

    def __post_init__(self):
        if np.any(self.prob < 0.0) or self.mass > 1.0 + 1e-10:
            raise ValueError("distribution entries must be probabilities with mass <= 1")


def max_dist_table_21(model: WalkModel, n_max: int) -> MaxDistribution:
    """Full table in O(n_max) via one shared sweep."""
    log_p = _log_dist_21(model, n_max)[2:]
    return MaxDistribution(
        family="21",
        n=np.arange(2, n_max + 1),
        prob=np.exp(log_p),
        log_prob=log_p,
        config=model.to_config(),
    )


def max_dist_table_12(model: WalkModel, n_max: int, n_values=None) -> MaxDistribution:
    """Table for the (1,2) walk; each entry costs its own O(n) backward sweep.

    ``n_values`` restricts the table to a subset of n (e.g. a geometric grid)
    to keep the total cost linear when only the shape is needed.
    """
    ns = np.arange(2, n_max + 1) if n_values is None else np.asarray(sorted(n_values))
    probs = np.array([max_dist_12(model, int(n)) for n in ns])
    with np.errstate(divide="ignore"):
        log_p = np.log(probs)
    return MaxDistribution(
        family="12", n=ns, prob=probs, log_prob=log_p, config=model.to_config()
    )


def max_dist_table(model: WalkModel, n_max: int, n_values=None) -> MaxDistribution:
    if model.family == "21":
        dist = max_dist_table_21(model, n_max)
        if n_values is not None:
            ns = np.asarray(sorted(n_values))
            sel = ns - 2
            dist = MaxDistribution(
                family="21", n=ns, prob=dist.prob[sel], log_prob=dist.log_prob[sel],
                config=dist.config,
            )
        return dist
    return max_dist_table_12(model, n_max, n_values)
