from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linstruct.errors import IterationCapExceeded, LambdaTooSmall
from linstruct.resolvent import (
    contraction_cap,
    contraction_resolvent,
    g_curve,
    g_value,
    spectral_resolvent,
)
from linstruct.spectral import Instance, random_instance

GOLDEN = Instance.from_arrays(np.diag([2.0, 1.0]), [0.0, 1.0])
NEG = Instance.from_arrays(np.diag([1.0, -3.0]), [1.0, 0.0])


def test_spectral_closed_forms():
    assert np.allclose(spectral_resolvent(GOLDEN, 3.0).v_hat, [0.0, -0.5], atol=1e-15)
    assert np.allclose(spectral_resolvent(NEG, 4.0).v_hat, [-1 / 3, 0.0], atol=1e-15)
    zero = Instance.from_arrays(np.zeros((2, 2)), [1.0, 0.0])
    sol = spectral_resolvent(zero, 1.0)
    assert np.allclose(sol.v_hat, [-1.0, 0.0])
    assert sol.residual <= 1e-10 * 2


def test_contraction_examples():
    sol = contraction_resolvent(GOLDEN, 3.0, 1e-12)
    assert np.allclose(sol.v_hat, [0.0, -0.5], atol=1e-11)
    zero = Instance.from_arrays(np.zeros((2, 2)), [1.0, 0.0])
    sol = contraction_resolvent(zero, 2.0)
    assert np.array_equal(sol.v_hat, [-0.5, 0.0])
    # first step lands on the fixed point; the second confirms it
    assert sol.steps[1] == 0.0


def test_lambda_must_exceed_norm():
    for lam in (2.0, 1.5, -5.0):
        with pytest.raises(LambdaTooSmall):
            spectral_resolvent(GOLDEN, lam)
        with pytest.raises(LambdaTooSmall):
            contraction_resolvent(GOLDEN, lam)
        with pytest.raises(LambdaTooSmall):
            g_value(GOLDEN, lam)


def test_iteration_cap(monkeypatch):
    import linstruct.resolvent as resolvent

    monkeypatch.setattr(resolvent, "contraction_cap", lambda q, tol, first: 3)
    with pytest.raises(IterationCapExceeded):
        resolvent.contraction_resolvent(GOLDEN, 2.1)


def test_contraction_cap_grows_near_norm():
    assert contraction_cap(0.999, 1e-12, 1.0) > contraction_cap(0.5, 1e-12, 1.0)
    assert contraction_cap(0.0, 1e-12, 1.0) >= 1


def test_g_examples():
    assert g_value(GOLDEN, 3.0) == pytest.approx(0.25, rel=1e-15)
    assert g_value(NEG, 4.0) == pytest.approx(1 / 9, rel=1e-15)


def test_g_matches_resolvent_norm():
    inst = random_instance(5, 4)
    lam = inst.op_norm * 1.5
    v = spectral_resolvent(inst, lam).v_hat
    assert g_value(inst, lam) == pytest.approx(v @ v, rel=1e-12)


def test_g_large_lambda_asymptotics():
    inst = random_instance(4, 9)
    pts = g_curve(inst, inst.op_norm + 1.0, 1e6, 50)
    g = np.array([p[1] for p in pts])
    assert np.all(np.diff(g) < 0)
    assert g[-1] * 1e12 == pytest.approx(inst.z_norm**2, rel=1e-5)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.integers(0, 10**6), st.floats(1.01, 5.0))
def test_backends_agree(n, seed, ratio):
    inst = random_instance(n, seed)
    lam = ratio * inst.op_norm
    tol = 1e-12
    a = spectral_resolvent(inst, lam)
    b = contraction_resolvent(inst, lam, tol)
    assert np.linalg.norm(a.v_hat - b.v_hat) <= 10 * tol * lam / (lam - inst.op_norm)
    assert a.residual <= 1e-10 * (1 + inst.z_norm)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**6), st.floats(1.05, 4.0))
def test_resolvent_minimizes_shifted_energy(n, seed, ratio):
    # v solves T v - lam v = z iff it minimizes lam ||x||^2 - J(x), a strongly convex
    # function, so for every x:  lam||x||^2 - J(x) - (lam||v||^2 - J(v)) >= (lam - ||T||) ||x - v||^2
    inst = random_instance(n, seed)
    lam = ratio * inst.op_norm
    v = spectral_resolvent(inst, lam).v_hat
    a, z = inst.T.matrix, inst.z

    def f(x):
        return lam * x @ x - (x @ (a @ x) - 2 * z @ x)

    rng = np.random.default_rng(seed)
    for _ in range(20):
        x = v + rng.standard_normal(n) * 10 ** rng.uniform(-3, 1)
        d = x - v
        assert f(x) - f(v) >= (lam - inst.op_norm) * (d @ d) - 1e-9 * (1 + abs(f(v)))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**6), st.floats(1.0, 4.0))
def test_shifted_gradient_is_strongly_monotone(n, seed, ratio):
    # <grad(lam Phi - J)(x) - grad(lam Phi - J)(v), x - v> >= 2 (lam - ||T||) ||x - v||^2
    inst = random_instance(n, seed)
    lam = ratio * inst.op_norm
    a, z = inst.T.matrix, inst.z

    def grad(x):
        return 2 * lam * x - (2 * a @ x - 2 * z)

    rng = np.random.default_rng(seed)
    for _ in range(20):
        x, v = rng.standard_normal((2, n)) * 10 ** rng.uniform(-2, 2)
        d = x - v
        lhs = (grad(x) - grad(v)) @ d
        assert lhs >= 2 * (lam - inst.op_norm) * (d @ d) - 1e-12 * (1 + lam) * (d @ d) - 1e-12


def test_g_strictly_decreasing_on_grid():
    inst = random_instance(6, 2)
    lams = inst.op_norm + np.geomspace(1e-4, 1e2, 60)
    g = [g_value(inst, lam) for lam in lams]
    assert np.all(np.diff(g) < 0)
