"""matwalk: excursion maxima of (2,1)/(1,2) random walks with vanishing drift.

Exact distributions via normalized products of nonnegative 2x2 matrices and
limit-periodic continued fractions, cross-validated by brute-force linear
solves and reproducible Monte Carlo.
"""

from ._kernels import IS_COMPILED
from .contfrac import CFCoeffs, TailEstimate, backward_eval, critical_tail, \
    delta_epsilon, periodic_fixed_point, tail
from .core_matrix import CoeffSequence, NormalizedProduct, PosMat2, check_b1, \
    eigen_bounds, normalized_entry, normalized_product, product_spectral_ratio, \
    product_step, spectral_radius
from .perturb import PerturbParams, asymptote, i_zero, iterated_log, lam, r, \
    r_array, r_increment_limit, r_increment_rate
from .simulate import EmpiricalDist, SimConfig, SimOutcome, empirical_hitting, \
    empirical_max_dist, run_excursion
from .walk_exact import MaxDistribution, RecurrenceClass, WalkModel, classify, \
    escape_bounds_12, escape_prob_21, hitting_ratio, max_dist, max_dist_12, \
    max_dist_21, max_dist_table, xi, xi_array, xi_finite, xi_inverse_vs_product

__version__ = "0.1.0"
