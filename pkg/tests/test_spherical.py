from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linstruct.boundary import diagnose_boundary, finite_threshold_instance
from linstruct.errors import DimensionMismatch, MuAtEigenvalue, NonPositiveRadius, OutOfRange
from linstruct.resolvent import g_value
from linstruct.spectral import GeneralOperator, Instance, random_instance
from linstruct.spherical import (
    EXTERIOR,
    HARD_CASE,
    INTERIOR,
    brute_force_candidates,
    brute_force_max,
    eval_J,
    gamma_prime,
    gamma_value,
    invert_g,
    maximize_on_sphere,
    secular_value,
    wellposedness_check,
)

GOLDEN = Instance.from_arrays(np.diag([2.0, 1.0]), [0.0, 1.0])
NEG = Instance.from_arrays(np.diag([1.0, -3.0]), [1.0, 0.0])
R2 = GeneralOperator([[1.0, 1.0], [-1.0, 1.0]])


def test_eval_J_examples():
    assert eval_J(R2, [1.0, 0.0], [-1.0, 0.0]) == 3.0
    assert eval_J(np.diag([5.0, -2.0]), [1.0, 1.0], [0.0, 0.0]) == 0.0
    assert eval_J(GOLDEN.T, GOLDEN.z, [0.0, -1.0]) == 3.0
    with pytest.raises(DimensionMismatch):
        eval_J(GOLDEN.T, GOLDEN.z, [1.0])


def test_secular_examples():
    assert secular_value(GOLDEN, 3.0) == pytest.approx(0.25, rel=1e-15)
    inst = Instance.from_arrays(np.diag([2.0, 1.0]), [1.0, 1.0])
    assert secular_value(inst, 4.0) == pytest.approx(1 / 4 + 1 / 9, rel=1e-15)
    with pytest.raises(MuAtEigenvalue):
        secular_value(inst, 2.0)


def test_invert_g_examples():
    assert invert_g(GOLDEN, 0.25) == pytest.approx(3.0, rel=1e-14)
    mu = invert_g(NEG, 0.25 - 1e-6)
    assert 3.0 < mu < 3.0 + 1e-5
    assert g_value(NEG, mu) == pytest.approx(0.25 - 1e-6, rel=1e-12)


def test_invert_g_small_radius_asymptotics():
    inst = random_instance(5, 1)
    for r in (1e-6, 1e-8, 1e-10):
        assert invert_g(inst, r) * math.sqrt(r) / inst.z_norm == pytest.approx(1.0, rel=1e-2)


def test_invert_g_domain():
    with pytest.raises(NonPositiveRadius):
        invert_g(GOLDEN, 0.0)
    with pytest.raises(OutOfRange) as exc:
        invert_g(GOLDEN, 1.0)
    assert exc.value.theta == 1.0


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.integers(0, 10**6), st.floats(1e-4, 0.99))
def test_invert_g_round_trip(n, seed, frac):
    inst = random_instance(n, seed) if seed % 2 else finite_threshold_instance(max(n, 2), seed)
    theta = diagnose_boundary(inst).theta
    r = frac * (theta if math.isfinite(theta) else 10 * inst.z_norm**2)
    mu = invert_g(inst, r)
    assert mu > inst.op_norm
    assert g_value(inst, mu) == pytest.approx(r, rel=1e-11)


def test_maximize_examples():
    s = maximize_on_sphere(GOLDEN, 0.25)
    assert s.regime == INTERIOR and s.well_posed
    assert np.allclose(s.x_hat, [0.0, -0.5], atol=1e-14)
    assert s.multiplier == pytest.approx(3.0) and s.gamma == pytest.approx(1.25)

    s = maximize_on_sphere(GOLDEN, 4.0)
    assert s.regime == HARD_CASE and not s.well_posed
    assert s.multiplier == 2.0 and s.gamma == pytest.approx(9.0, abs=1e-12)
    assert np.allclose(np.abs(s.x_hat), [math.sqrt(3), 1.0]) and s.x_hat[1] == pytest.approx(-1.0)

    s = maximize_on_sphere(NEG, 0.01)
    assert np.allclose(s.x_hat, [-0.1, 0.0], atol=1e-14)
    assert s.multiplier == pytest.approx(11.0) and s.gamma == pytest.approx(0.21)


def test_gamma_and_derivative_example():
    assert gamma_value(GOLDEN, 0.25) == pytest.approx(1.25, rel=1e-14)
    assert gamma_prime(GOLDEN, 0.25) == pytest.approx(3.0, rel=1e-14)


def test_exterior_regime_when_norm_is_negative_eigenvalue():
    # ||T|| = 3 comes from -3; past theta the multiplier lies in ]1, 3]
    s = maximize_on_sphere(NEG, 1.0)
    assert s.regime == EXTERIOR and s.well_posed
    assert 1.0 < s.multiplier <= 3.0
    x, val = brute_force_max(NEG.T, NEG.z, 1.0)
    assert val == pytest.approx(s.gamma, abs=1e-10)


def test_brute_force_examples():
    x, val = brute_force_max(R2, [1.0, 0.0], 1.0)
    assert np.allclose(x, [-1.0, 0.0], atol=1e-8) and val == pytest.approx(3.0, abs=1e-12)
    x, val = brute_force_max(GOLDEN.T, GOLDEN.z, 0.25)
    assert np.linalg.norm(x - maximize_on_sphere(GOLDEN, 0.25).x_hat) <= 1e-8
    x, val = brute_force_max(-np.eye(2), [0.0, 1.0], 1.0)
    assert np.allclose(x, [0.0, -1.0], atol=1e-8) and val == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(12))
def test_solver_matches_oracle(seed):
    n = 2 + seed % 6
    inst = random_instance(n, seed)
    for r in (0.1, 1.0, 5.0):
        s = maximize_on_sphere(inst, r)
        assert abs(np.linalg.norm(s.x_hat) ** 2 - r) <= 1e-10 * r
        assert s.euler_residual <= 1e-9 * (1 + inst.z_norm)
        x, val = brute_force_max(inst.T, inst.z, r, iterations=1000)
        assert val <= s.gamma + 1e-10 * (1 + abs(s.gamma))
        assert val == pytest.approx(s.gamma, abs=1e-8 * (1 + abs(s.gamma)))
        assert np.linalg.norm(x - s.x_hat) <= 1e-5


def test_hard_case_restarts_find_both_maximizers():
    cands = brute_force_candidates(GOLDEN.T, GOLDEN.z, 4.0, restarts=16)
    best = max(c.value for c in cands)
    tops = [c.x for c in cands if c.value >= best - 1e-8]
    signs = {round(float(np.sign(x[0]))) for x in tops}
    assert signs == {-1, 1}
    assert all(abs(abs(x[0]) - math.sqrt(3)) < 1e-6 for x in tops)


def test_wellposedness_identity_at_a_point():
    s = maximize_on_sphere(GOLDEN, 0.25)
    x = np.array([0.5, 0.0])
    e = x - s.x_hat
    lhs = s.gamma - eval_J(GOLDEN.T, GOLDEN.z, x)
    rhs = e @ (s.multiplier * e - GOLDEN.T.matrix @ e)
    assert lhs == pytest.approx(rhs, abs=1e-15)


def _scale(inst):
    theta = diagnose_boundary(inst).theta
    return theta if math.isfinite(theta) else inst.z_norm**2


def test_wellposedness_random_instance():
    inst = random_instance(5, 42)
    rep = wellposedness_check(inst, 0.5 * _scale(inst), samples=1000, seed=1)
    assert rep.ok and rep.violations == 0 and rep.samples == 1000
    assert rep.max_identity_error <= 1e-9 * (1 + abs(rep.gamma))


def test_gamma_prime_matches_finite_difference():
    inst = random_instance(6, 5)
    for r in np.array([0.01, 0.3, 0.9]) * _scale(inst):
        h = 1e-4 * r
        fd = (gamma_value(inst, r + h) - gamma_value(inst, r - h)) / (2 * h)
        assert fd == pytest.approx(gamma_prime(inst, r), rel=1e-6)


def test_maximize_rejects_bad_radius():
    with pytest.raises(NonPositiveRadius):
        maximize_on_sphere(GOLDEN, -1.0)
    with pytest.raises(NonPositiveRadius):
        brute_force_max(GOLDEN.T, GOLDEN.z, 0.0)
