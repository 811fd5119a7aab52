"""Radius sweeps of the value curve gamma, their audit, and the two counterexamples."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .boundary import diagnose_boundary
from .errors import OutOfRange, TooFewSamples
from .spectral import GeneralOperator, Instance, SymmetricOperator
from .spherical import (
    brute_force_candidates,
    brute_force_max,
    gamma_value,
    invert_g,
    maximize_on_sphere,
)

FD_REL_STEP = 1e-4
CONCAVITY_TOL = 1e-12


@dataclass(frozen=True)
class CurveSample:
    r: float
    gamma: float
    gamma_prime: float
    g_inverse: float
    euler_residual: float
    fd_gamma_prime: float
    regime: str = "Interior"


def _fd_derivative(f, r: float, h: float, upper: float) -> float:
    if r + h < upper:
        return (f(r + h) - f(r - h)) / (2.0 * h)
    # one-sided, second order, when the forward node would leave the range
    return (3.0 * f(r) - 4.0 * f(r - h) + f(r - 2.0 * h)) / (2.0 * h)


def sample_radii(inst: Instance, radii, rel_step: float = FD_REL_STEP, allow_beyond: bool = False) -> list[CurveSample]:
    """Evaluate gamma, its multiplier and a central difference at each radius.

    Radii at or past theta raise OutOfRange unless ``allow_beyond`` is set, in
    which case they are solved as trust-region problems and ``g_inverse`` is NaN.
    """
    theta = diagnose_boundary(inst).theta
    radii = [float(r) for r in radii]
    if not allow_beyond:
        bad = [r for r in radii if not 0.0 < r < theta]
        if bad:
            raise OutOfRange(f"radius {bad[0]!r} outside ]0, theta[ with theta={theta!r}", theta=theta)
    upper = math.inf if allow_beyond else theta
    out = []
    for r in radii:
        sol = maximize_on_sphere(inst, r)
        g_inv = invert_g(inst, r, theta) if r < theta else math.nan
        fd = _fd_derivative(lambda s: gamma_value(inst, s), r, rel_step * r, upper)
        out.append(CurveSample(r, sol.gamma, sol.multiplier, g_inv, sol.euler_residual, fd, sol.regime))
    return out


def sample_curve(inst: Instance, r_min: float, r_max: float, steps: int, allow_beyond: bool = False) -> list[CurveSample]:
    """Geometric grid of ``steps`` radii in ``[r_min, r_max]``."""
    if steps < 3:
        raise TooFewSamples(f"need at least 3 grid points, got {steps}")
    if not 0.0 < r_min < r_max:
        raise OutOfRange(f"need 0 < r_min < r_max, got {r_min!r}, {r_max!r}")
    return sample_radii(inst, np.geomspace(r_min, r_max, steps), allow_beyond=allow_beyond)


def second_divided_differences(r, y) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    y = np.asarray(y, dtype=float)
    s = np.diff(y) / np.diff(r)
    return 2.0 * np.diff(s) / (r[2:] - r[:-2])


@dataclass(frozen=True)
class AuditReport:
    monotone_gamma: bool
    strictly_concave: bool
    monotone_g: bool
    derivative_match: float
    inverse_match: float
    euler_max_residual: float
    samples: list[CurveSample] = field(repr=False)

    @property
    def all_true(self) -> bool:
        return self.monotone_gamma and self.strictly_concave and self.monotone_g


def audit_curve(samples: list[CurveSample], concavity_tol: float = CONCAVITY_TOL) -> AuditReport:
    """Check monotonicity, strict concavity and derivative consistency.

    ``monotone_g`` tests that g decreases: along increasing r the sampled
    ``g^{-1}(r)`` must strictly decrease (NaN entries past theta are skipped).
    ``derivative_match`` is the largest relative gap between the multiplier
    and the central difference of gamma.
    """
    if len(samples) < 3:
        raise TooFewSamples(f"need at least 3 samples, got {len(samples)}")
    r = np.array([s.r for s in samples])
    if np.any(np.diff(r) <= 0.0):
        raise ValueError("samples must be sorted by strictly increasing r")
    gam = np.array([s.gamma for s in samples])
    gp = np.array([s.gamma_prime for s in samples])
    ginv = np.array([s.g_inverse for s in samples])
    fd = np.array([s.fd_gamma_prime for s in samples])
    finite = ginv[np.isfinite(ginv)]
    inv_gap = np.abs(gp - ginv)[np.isfinite(ginv)] / (1.0 + np.abs(finite))
    return AuditReport(
        monotone_gamma=bool(np.all(np.diff(gam) > 0.0)),
        strictly_concave=bool(np.all(second_divided_differences(r, gam) < -concavity_tol)),
        monotone_g=bool(np.all(np.diff(finite) < 0.0)),
        derivative_match=float(np.max(np.abs(gp - fd) / np.abs(gp))),
        inverse_match=float(inv_gap.max()) if inv_gap.size else 0.0,
        euler_max_residual=float(max(s.euler_residual for s in samples)),
        samples=list(samples),
    )


# ---------------------------------------------------------------------------
# counterexamples

R2_OPERATOR = np.array([[1.0, 1.0], [-1.0, 1.0]])
R2_Z = np.array([1.0, 0.0])


@dataclass(frozen=True)
class R2Row:
    r: float
    x_hat: np.ndarray
    gamma: float
    gamma_closed: float
    fd_gamma_prime: float
    euler_residual: np.ndarray
    expected_residual: np.ndarray


def counterexample_r2(radii=(0.25, 1.0, 4.0), restarts: int = 8, seed: int = 0) -> list[R2Row]:
    """Non-symmetric map (t, s) -> (t + s, s - t) on R^2 with z = (1, 0).

    Everything is computed with the brute-force oracle, since the spectral
    machinery presumes symmetry.  The Euler residual ``T x - gamma'(r) x - z``
    uses the central difference of the oracle's gamma.
    """
    op = GeneralOperator(R2_OPERATOR)

    def best(r):
        return brute_force_max(op, R2_Z, r, restarts=restarts, seed=seed)

    rows = []
    for r in radii:
        x, val = best(r)
        h = FD_REL_STEP * r
        fd = (best(r + h)[1] - best(r - h)[1]) / (2.0 * h)
        resid = op.matrix @ x - fd * x - R2_Z
        rows.append(
            R2Row(float(r), x, val, r + 2.0 * math.sqrt(r), fd, resid, np.array([0.0, math.sqrt(r)]))
        )
    return rows


def l2_operator(n: int) -> np.ndarray:
    """Truncation of the l2 map ``x -> (0, x_2, x_3, ...)``: ``diag(0, 1, ..., 1)``."""
    d = np.ones(n)
    d[0] = 0.0
    return np.diag(d)


def l2_instance(n: int, z_index: int) -> Instance:
    if n < 4:
        raise ValueError("truncation dimension must be at least 4")
    if z_index not in (1, 2):
        raise ValueError("z_index must be 1 or 2")
    z = np.zeros(n)
    z[z_index - 1] = 1.0
    return Instance(SymmetricOperator(l2_operator(n)), z)


def l2_closed_form(r: np.ndarray, z_index: int) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if z_index == 1:
        return np.where(r <= 1.0, 2.0 * np.sqrt(r), r + 1.0)
    return r + 2.0 * np.sqrt(r)


def l2_stated_curve(r: np.ndarray) -> np.ndarray:
    """The value ``r - 2 sqrt(r)`` claimed for the z = e_2 variant when r >= 4."""
    return np.asarray(r) - 2.0 * np.sqrt(r)


DEFAULT_L2_RADII = tuple(np.unique(np.concatenate([np.geomspace(0.05, 20.0, 37), [1.0, 4.0]])))


@dataclass(frozen=True)
class L2Report:
    n: int
    z_index: int
    theta: float
    radii: np.ndarray
    gamma: np.ndarray
    closed_form: np.ndarray
    max_closed_form_error: float
    second_differences: np.ndarray
    strictly_concave: bool
    affine_interval: tuple[float, float] | None
    well_posed_at_4: bool
    distinct_maximizers_at_4: int
    oracle_max_gap: float
    stated_curve_gap: float | None
    note: str


def _distinct(cands, best_value: float, value_tol: float = 1e-9, point_tol: float = 1e-3) -> list[np.ndarray]:
    reps: list[np.ndarray] = []
    for c in cands:
        if c.value < best_value - value_tol * (1.0 + abs(best_value)):
            continue
        if all(np.linalg.norm(c.x - p) > point_tol for p in reps):
            reps.append(c.x)
    return reps


def _affine_interval(radii, sdd, tol):
    mask = sdd >= -tol
    if not mask.any():
        return None
    idx = np.flatnonzero(mask)
    return float(radii[idx[0]]), float(radii[idx[-1] + 2])


def counterexample_l2(n: int = 8, z_index: int = 1, radii=DEFAULT_L2_RADII, restarts: int = 8, seed: int = 0) -> L2Report:
    """Symmetric but non-compact example, truncated to R^n.

    ``z_index=1`` puts z on the kernel of T: theta = 1 and gamma has the
    affine tail ``r + 1``.  ``z_index=2`` is the literal data of the classical
    example; the computed curve is ``r + 2 sqrt(r)``, which is reported next
    to the stated ``r - 2 sqrt(r)``.
    """
    inst = l2_instance(n, z_index)
    radii = np.asarray(radii, dtype=float)
    sols = [maximize_on_sphere(inst, r) for r in radii]
    gam = np.array([s.gamma for s in sols])
    closed = l2_closed_form(radii, z_index)
    sdd = second_divided_differences(radii, gam)
    theta = diagnose_boundary(inst).theta

    # r = theta itself is skipped: the maximum is degenerate there and ascent is sublinear
    probe = [r for r in (0.25, 0.5, 2.0, 4.0, 9.0) if radii.min() <= r <= radii.max()]
    oracle_gap = 0.0
    for r in probe:
        _, val = brute_force_max(inst.T, inst.z, r, restarts=restarts, seed=seed)
        oracle_gap = max(oracle_gap, abs(val - gamma_value(inst, r)))
    cands = brute_force_candidates(inst.T, inst.z, 4.0, restarts=restarts, seed=seed)
    best = max(c.value for c in cands)
    distinct = len(_distinct(cands, best))

    stated_gap = None
    if z_index == 2:
        tail = radii >= 4.0
        stated_gap = float(np.max(np.abs(gam[tail] - l2_stated_curve(radii[tail])))) if tail.any() else None
        note = (
            "z = e_2: computed gamma(r) = r + 2 sqrt(r) (attained at -sqrt(r) e_2), strictly concave; "
            "it disagrees with the stated r - 2 sqrt(r) for r >= 4"
        )
    else:
        note = "z = e_1: theta = 1, gamma(r) = 2 sqrt(r) on ]0, 1] and r + 1 beyond, maximizers non-unique for r > 1"
    return L2Report(
        n=n,
        z_index=z_index,
        theta=theta,
        radii=radii,
        gamma=gam,
        closed_form=closed,
        max_closed_form_error=float(np.max(np.abs(gam - closed))),
        second_differences=sdd,
        strictly_concave=bool(np.all(sdd < -CONCAVITY_TOL)),
        affine_interval=_affine_interval(radii, sdd, CONCAVITY_TOL),
        well_posed_at_4=maximize_on_sphere(inst, 4.0).well_posed,
        distinct_maximizers_at_4=distinct,
        oracle_max_gap=oracle_gap,
        stated_curve_gap=stated_gap,
        note=note,
    )


def l2_truncation_gap(n: int, z_index: int, radii=DEFAULT_L2_RADII) -> float:
    """Largest ``|gamma_n - gamma_2n|`` over the radii."""
    a = l2_instance(n, z_index)
    b = l2_instance(2 * n, z_index)
    return float(max(abs(gamma_value(a, r) - gamma_value(b, r)) for r in radii))

