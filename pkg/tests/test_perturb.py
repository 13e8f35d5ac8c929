import math

import numpy as np
import pytest

from matwalk import perturb
from matwalk.errors import NotDefinedError
from matwalk.perturb import PerturbParams


def test_iterated_log_identity_and_chain():
    assert perturb.iterated_log(0, 7.0) == 7.0
    assert perturb.iterated_log(1, math.e) == pytest.approx(1.0)
    assert perturb.iterated_log(2, math.e) == pytest.approx(0.0, abs=1e-15)


def test_iterated_log_leaves_domain():
    with pytest.raises(NotDefinedError):
        perturb.iterated_log(3, math.e)  # log_2 e = 0, one more log undefined
    with pytest.raises(ValueError):
        perturb.iterated_log(-1, 2.0)


def test_lam_k1_is_b_over_i():
    assert perturb.lam(PerturbParams(K=1, B=10.0), 2) == pytest.approx(5.0)
    assert perturb.lam(PerturbParams(K=1, B=-3.0), 6) == pytest.approx(-0.5)


def test_lam_k2_adds_log_term():
    got = perturb.lam(PerturbParams(K=2, B=1.0), 10)
    assert got == pytest.approx(1.0 / 10 + 1.0 / (10 * math.log(10)))
    assert perturb.lam(PerturbParams(K=2, B=0.0), 10) == pytest.approx(0.1)


def test_params_validation():
    with pytest.raises(ValueError):
        PerturbParams(K=0, B=1.0)
    with pytest.raises(ValueError):
        PerturbParams(K=1, B=1.0, sign=2)


def test_i_zero_first_admissible_index():
    assert perturb.i_zero(PerturbParams(K=1, B=1.0)) == 2
    assert perturb.i_zero(PerturbParams(K=1, B=5.0)) == 6  # |5/i| < 1 first at 6
    assert perturb.i_zero(PerturbParams(K=2, B=0.0)) == 2


def test_r_clamps_below_i_zero():
    params = PerturbParams(K=1, B=5.0)
    i0 = perturb.i_zero(params)
    for i in range(1, i0):
        assert perturb.r(params, i) == perturb.r(params, i0)
    assert perturb.r(PerturbParams(K=1, B=1.0), 9) == pytest.approx(1.0 / 27)


def test_r_array_bitwise_matches_scalar():
    for params in (PerturbParams(K=1, B=5.0), PerturbParams(K=2, B=1.5),
                   PerturbParams(K=3, B=-2.0)):
        arr = perturb.r_array(params, 200)
        for i in range(1, 201):
            assert arr[i] == perturb.r(params, i)


def test_asymptote_closed_forms():
    p1 = PerturbParams(K=1, B=2.0)
    assert perturb.asymptote(p1, 100, +1) == pytest.approx(10_000.0)
    assert perturb.asymptote(p1, 100, -1) == pytest.approx(1e-4)
    p2 = PerturbParams(K=2, B=1.0)
    assert perturb.asymptote(p2, 100, +1) == pytest.approx(100.0 * math.log(100.0))
    with pytest.raises(ValueError):
        perturb.asymptote(p1, 100, 0)


def test_increment_rate_exact_k1():
    # K = 1: 3 n^2 (r_n - r_{n+1}) = B n / (n + 1) exactly
    params = PerturbParams(K=1, B=1.0)
    assert perturb.r_increment_rate(params, 99) == pytest.approx(0.99)
    assert perturb.r_increment_limit(params) == 1.0
    assert perturb.r_increment_rate(PerturbParams(K=1, B=0.0), 50) == 0.0


def test_increment_rate_limit_k2():
    params = PerturbParams(K=2, B=0.0)
    assert perturb.r_increment_limit(params) == 1.0
    assert perturb.r_increment_rate(params, 10 ** 6) == pytest.approx(1.0, abs=1e-2)
    with pytest.raises(ValueError):
        perturb.r_increment_rate(params, 1)


def test_r_array_finite_for_deep_logs():
    arr = perturb.r_array(PerturbParams(K=3, B=2.0), 10 ** 5)
    assert np.all(np.isfinite(arr))
    # perturbation vanishes at infinity
    assert abs(arr[10 ** 5]) < abs(arr[100]) < 1.0 / 3.0
