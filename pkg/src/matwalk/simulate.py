"""Monte Carlo simulation of excursions and hitting splits.

Every excursion owns an RNG stream (xoshiro256++) derived only from the run
seed and the excursion's global index, so results are bit-identical for any
worker count and never decrease when a cap is raised: each excursion replays
the same draw sequence and the cap checks happen before each draw.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._kernels import simulate_excursions, simulate_hitting
from .walk_exact import WalkModel

__all__ = ["SimConfig", "SimOutcome", "EmpiricalDist", "run_excursion",
           "empirical_max_dist", "empirical_hitting"]

RETURNED = "returned"
STEP_CENSORED = "step-censored"
HEIGHT_CENSORED = "height-censored"


def _jumps(family: str) -> tuple:
    return (1, 2) if family == "21" else (2, 1)


@dataclass(frozen=True)
class SimConfig:
    excursions: int
    seed: int
    step_cap: int = 10 ** 8
    height_cap: int = 10 ** 6
    workers: int = 1

    def __post_init__(self):
        if self.excursions < 1 or self.step_cap < 1 or self.height_cap < 2:
            raise ValueError("excursions and caps must be positive")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class SimOutcome:
    maximum: int
    status: str  # returned / step-censored / height-censored


@dataclass
class EmpiricalDist:
    """counts[n] excursions returned with maximum n; censored ones counted apart."""

    counts: np.ndarray
    censored_step: int
    censored_height: int
    total: int
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if int(self.counts.sum()) + self.censored_step + self.censored_height != self.total:
            raise ValueError("counts + censored must equal total")

    def prob(self, n: int) -> float:
        """Estimate of P(M = n, D < inf) — censored runs stay in the denominator."""
        return float(self.counts[n]) / self.total


def run_excursion(model: WalkModel, seed: int, index: int = 0,
                  step_cap: int = 10 ** 8, height_cap: int = 10 ** 6) -> SimOutcome:
    """Simulate one excursion from 2 until the state drops below 2 or a cap binds."""
    up_jump, down_jump = _jumps(model.family)
    up = model.up_prob_array(height_cap)
    counts, cs, ch = simulate_excursions(
        up, up_jump, down_jump, 1, seed, index, step_cap, height_cap
    )
    if cs:
        return SimOutcome(maximum=-1, status=STEP_CENSORED)
    if ch:
        return SimOutcome(maximum=-1, status=HEIGHT_CENSORED)
    return SimOutcome(maximum=int(np.nonzero(counts)[0][0]), status=RETURNED)


def empirical_max_dist(model: WalkModel, cfg: SimConfig) -> EmpiricalDist:
    """Aggregate cfg.excursions excursions, parallel over contiguous index chunks.

    The partition into workers only affects scheduling; the merged counts are
    identical for every worker count because streams are per-excursion.
    """
    up_jump, down_jump = _jumps(model.family)
    up = model.up_prob_array(cfg.height_cap)
    bounds = np.linspace(0, cfg.excursions, cfg.workers + 1).astype(np.int64)

    def _chunk(w):
        lo, hi = int(bounds[w]), int(bounds[w + 1])
        if hi == lo:
            return np.zeros(cfg.height_cap + 1, dtype=np.int64), 0, 0
        return simulate_excursions(up, up_jump, down_jump, hi - lo, cfg.seed,
                                   lo, cfg.step_cap, cfg.height_cap)

    if cfg.workers == 1:
        parts = [_chunk(0)]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(_chunk, range(cfg.workers)))
    counts = np.sum([p[0] for p in parts], axis=0)
    cs = sum(p[1] for p in parts)
    ch = sum(p[2] for p in parts)
    return EmpiricalDist(
        counts=counts, censored_step=cs, censored_height=ch,
        total=cfg.excursions,
        config={"model": model.to_config(), "excursions": cfg.excursions,
                "seed": cfg.seed, "step_cap": cfg.step_cap,
                "height_cap": cfg.height_cap, "workers": cfg.workers},
    )


def empirical_hitting(model: WalkModel, m: int, n: int, trials: int,
                      seed: int) -> dict:
    """Frequencies of hitting [n, inf) at n, at n+1, or [0, m] first, from 2.

    The region is finite, so every trial terminates and the three frequencies
    sum to 1.
    """
    up_jump, down_jump = _jumps(model.family)
    at_n, at_n1, at_low = simulate_hitting(
        model.up_prob_array(n), up_jump, down_jump, m, n, trials, seed, 0
    )
    return {"at_n": at_n / trials, "at_n_plus_1": at_n1 / trials,
            "at_low": at_low / trials, "trials": trials}
