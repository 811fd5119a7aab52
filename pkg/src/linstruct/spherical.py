"""Maximizing ``J(x) = <T x - 2 z, x>`` over the sphere ``||x||^2 = r``.

For ``r`` below the threshold theta the maximizer is the resolvent solution at
the shift ``mu = g^{-1}(r) > ||T||``, found from the secular equation
``sum_i zs_i^2 / (lam_i - mu)^2 = r``.  Past theta the problem is an ordinary
trust-region subproblem: the multiplier lies in ``[lam_max, ||T||]`` and, in the
hard case ``mu = lam_max``, the maximizer picks up a top-eigenvector component
whose sign is free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary import diagnose_boundary, eig_tol, shifted_min_norm
from .errors import DimensionMismatch, MuAtEigenvalue, NonPositiveRadius, OutOfRange
from .spectral import Instance, _matrix_of

INTERIOR = "Interior"
EXTERIOR = "Exterior"
HARD_CASE = "HardCase"

BISECT_RTOL = 1e-13
SECULAR_RTOL = 1e-12
ARMIJO = 0.5


def eval_J(op, z, x) -> float:
    a = _matrix_of(op)
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    if not (a.shape[1] == x.shape[0] == z.shape[0]):
        raise DimensionMismatch(f"operator {a.shape}, z {z.shape}, x {x.shape}")
    return float(x @ (a @ x) - 2.0 * (z @ x))


def secular_value(inst: Instance, mu: float) -> float:
    lam = inst.spectrum.eigenvalues
    if np.min(np.abs(mu - lam)) <= 1e-12 * (1.0 + inst.op_norm):
        raise MuAtEigenvalue(f"mu={mu!r} coincides with an eigenvalue of T")
    if mu < lam[0]:
        raise OutOfRange(f"mu={mu!r} lies below the top eigenvalue {lam[0]!r}")
    return float(np.sum((inst.z_spectral / (lam - mu)) ** 2))


def secular_derivative(inst: Instance, mu: float) -> float:
    """``d/dmu`` of the secular sum: ``-2 sum zs_i^2 / (mu - lam_i)^3``."""
    d = mu - inst.spectrum.eigenvalues
    return float(-2.0 * np.sum(inst.z_spectral**2 / d**3))


class _Secular:
    """The secular sum written in the offset ``t = mu - floor``.

    Working with ``t`` instead of ``mu`` keeps full relative precision when
    the multiplier sits just above an eigenvalue.
    """

    def __init__(self, inst: Instance, floor: float):
        self.floor = floor
        self.d = np.maximum(floor - inst.spectrum.eigenvalues, 0.0)
        self.w = inst.z_spectral**2

    def value(self, t: float) -> float:
        return float(np.sum(self.w / (self.d + t) ** 2))

    def slope(self, t: float) -> float:
        return float(-2.0 * np.sum(self.w / (self.d + t) ** 3))

    def solve(self, r: float, z_norm: float) -> float:
        """Offset ``t > 0`` with ``value(t) = r``; OutOfRange if none is representable."""
        t_hi = z_norm / math.sqrt(r)
        while self.value(t_hi) > r:
            t_hi *= 2.0
        t_lo = t_hi
        while self.value(t_lo) <= r:
            t_lo *= 0.1
            if self.floor + t_lo == self.floor or t_lo < 1e-300:
                raise OutOfRange(f"radius {r!r} is not reached above the shift {self.floor!r}")
        while t_hi > t_lo * (1.0 + BISECT_RTOL):
            mid = math.sqrt(t_lo * t_hi)
            if mid <= t_lo or mid >= t_hi:
                break
            if self.value(mid) > r:
                t_lo = mid
            else:
                t_hi = mid
        # Newton on 1/sqrt(value) - 1/sqrt(r), which is close to linear in t
        t = 0.5 * (t_lo + t_hi)
        best_t, best_err = t, abs(self.value(t) - r)
        for _ in range(6):
            gv = self.value(t)
            phi = 1.0 / math.sqrt(gv) - 1.0 / math.sqrt(r)
            dphi = -0.5 * gv**-1.5 * self.slope(t)
            t_next = t - phi / dphi
            if not t_next > 0.0:
                break
            err = abs(self.value(t_next) - r)
            if err >= best_err:
                break
            t, best_t, best_err = t_next, t_next, err
            if best_err <= 0.1 * SECULAR_RTOL * r:
                break
        return best_t


def _check_radius(r: float) -> None:
    if not r > 0.0:
        raise NonPositiveRadius(f"radius must be positive, got {r!r}")


def invert_g(inst: Instance, r: float, theta: float | None = None) -> float:
    """The unique ``mu > ||T||`` with ``g(mu) = r``; defined for ``0 < r < theta``."""
    _check_radius(r)
    if theta is None:
        theta = diagnose_boundary(inst).theta
    if r >= theta:
        raise OutOfRange(f"radius {r!r} is not below theta={theta!r}", theta=theta)
    sec = _Secular(inst, inst.op_norm)
    return inst.op_norm + sec.solve(r, inst.z_norm)


@dataclass(frozen=True, eq=False)
class SphericalSolution:
    """Maximizer of J on the sphere of squared radius ``r``.

    ``regime`` is Interior for ``r < theta``.  Past theta it is Exterior
    when the multiplier still exceeds the top eigenvalue (unique maximizer,
    only possible when ``||T||`` is attained by a negative eigenvalue) and
    HardCase when the multiplier equals the top eigenvalue.
    """

    r: float
    x_hat: np.ndarray
    multiplier: float
    gamma: float
    regime: str
    euler_residual: float
    well_posed: bool
    theta: float


def _solution(inst, r, x, mu, regime, well_posed, theta) -> SphericalSolution:
    a = inst.T.matrix
    res = float(np.linalg.norm(a @ x - mu * x - inst.z))
    return SphericalSolution(
        float(r), x, float(mu), eval_J(a, inst.z, x), regime, res, bool(well_posed), float(theta)
    )


def maximize_on_sphere(inst: Instance, r: float) -> SphericalSolution:
    _check_radius(r)
    theta = diagnose_boundary(inst).theta
    lam = inst.spectrum.eigenvalues
    q = inst.spectrum.eigenvectors
    zs = inst.z_spectral
    if r < theta:
        floor = inst.op_norm
        regime = INTERIOR
    else:
        floor = float(lam[0])
        regime = EXTERIOR
        coeff, block = shifted_min_norm(inst, floor)
        if coeff is not None and r >= float(np.sum(coeff**2)):
            t = math.sqrt(max(r - float(np.sum(coeff**2)), 0.0))
            top = int(np.flatnonzero(block)[0])
            coeff = coeff.copy()
            coeff[top] += t
            x = q @ coeff
            unique = t <= 1e-12 * math.sqrt(r)
            return _solution(inst, r, x, floor, HARD_CASE, unique, theta)
    sec = _Secular(inst, floor)
    t = sec.solve(r, inst.z_norm)
    x = q @ (-zs / (sec.d + t))
    return _solution(inst, r, x, floor + t, regime, True, theta)


def gamma_value(inst: Instance, r: float) -> float:
    return maximize_on_sphere(inst, r).gamma


def gamma_prime(inst: Instance, r: float) -> float:
    return invert_g(inst, r)


@dataclass(frozen=True, eq=False)
class Candidate:
    x: np.ndarray
    value: float
    iterations: int


def _ascend(a, sym, z, x, r, step0, iterations):
    """Projected gradient ascent on the sphere with Armijo backtracking.

    A trial step is accepted when ``J(y) >= J(x) + 0.5 <grad, y - x>``,
    halving otherwise.  The first trial step is ``step0``; later ones begin at
    twice the previous accepted step.  Once no trial step improves the value,
    fixed steps are taken for as long as successive moves keep shrinking.
    """
    radius = math.sqrt(r)
    val = float(x @ (a @ x) - 2.0 * (z @ x))
    step = 0.5 * step0
    accepted = step0
    it = 0
    for it in range(1, iterations + 1):
        grad = sym @ x - 2.0 * z
        step *= 2.0
        improved = False
        for _ in range(60):
            y = x + step * grad
            ny = np.linalg.norm(y)
            if ny > 0.0:
                y *= radius / ny
                val_y = float(y @ (a @ y) - 2.0 * (z @ y))
                if val_y > val and val_y >= val + ARMIJO * float(grad @ (y - x)):
                    improved = True
                    break
            step *= 0.5
        if not improved:
            break
        x, val, accepted = y, val_y, step
    # Value comparisons stall near sqrt(eps); finish with fixed steps while the moves shrink.
    step = accepted
    move = math.inf
    for _ in range(iterations):
        y = x + step * (sym @ x - 2.0 * z)
        y *= radius / np.linalg.norm(y)
        new_move = float(np.linalg.norm(y - x))
        if new_move >= move:
            break
        x, move = y, new_move
        if move <= 4.0 * np.finfo(float).eps * radius:
            break
    val = float(x @ (a @ x) - 2.0 * (z @ x))
    return x, val, it


def brute_force_candidates(
    op, z, r: float, restarts: int = 8, seed: int = 0, iterations: int = 200
) -> list[Candidate]:
    """Local maximizers of J on the sphere from ``restarts`` random starts.

    Works for any square operator (symmetric or not): the gradient of
    ``<A x, x> - 2 <z, x>`` is ``(A + A^T) x - 2 z``.  In dimension 2 an extra
    candidate is seeded from the best point of a 10^6-point angular grid.
    """
    _check_radius(r)
    a = _matrix_of(op)
    z = np.asarray(z, dtype=float)
    sym = a + a.T
    step0 = 1.0 / (2.0 * float(np.linalg.norm(a, 2)) + 1.0)
    rng = np.random.default_rng(seed)
    radius = math.sqrt(r)
    starts = []
    for _ in range(restarts):
        x0 = rng.standard_normal(a.shape[0])
        starts.append(x0 * (radius / np.linalg.norm(x0)))
    if a.shape[0] == 2:
        ang = np.linspace(0.0, 2.0 * math.pi, 10**6, endpoint=False)
        pts = radius * np.stack([np.cos(ang), np.sin(ang)])
        vals = np.einsum("ik,ik->k", pts, a @ pts) - 2.0 * (z @ pts)
        starts.append(pts[:, int(np.argmax(vals))].copy())
    out = []
    for x0 in starts:
        x, val, it = _ascend(a, sym, z, x0, r, step0, iterations)
        out.append(Candidate(x, val, it))
    return out


def brute_force_max(op, z, r: float, restarts: int = 8, seed: int = 0, iterations: int = 200):
    """Best point and value over :func:`brute_force_candidates`."""
    cands = brute_force_candidates(op, z, r, restarts, seed, iterations)
    best = max(cands, key=lambda c: c.value)
    return best.x, best.value


@dataclass(frozen=True, eq=False)
class WellPosednessReport:
    r: float
    multiplier: float
    gamma: float
    samples: int
    max_identity_error: float
    max_bound_violation: float
    violations: int

    @property
    def ok(self) -> bool:
        return self.violations == 0


def wellposedness_check(inst: Instance, r: float, samples: int = 1000, seed: int = 0) -> WellPosednessReport:
    """Audit the quadratic-growth identity around the spherical maximizer.

    For x on the sphere, ``gamma(r) - J(x) = <(mu I - T)(x - xh), x - xh>``
    which is at least ``(mu - lam_max) ||x - xh||^2``.  Half of the samples
    are uniform on the sphere, half are small perturbations of the maximizer.
    """
    mu = invert_g(inst, r)
    sol = maximize_on_sphere(inst, r)
    a = inst.T.matrix
    z = inst.z
    xh = sol.x_hat
    lam_max = inst.spectrum.lambda_max
    rng = np.random.default_rng(seed)
    radius = math.sqrt(r)
    tol = 1e-9 * (1.0 + abs(sol.gamma))
    worst_id = 0.0
    worst_bound = 0.0
    bad = 0
    for k in range(samples):
        d = rng.standard_normal(inst.dim)
        if k % 2:
            d = xh + rng.uniform(1e-4, 1e-1) * radius * d / np.linalg.norm(d)
        x = d * (radius / np.linalg.norm(d))
        e = x - xh
        lhs = sol.gamma - eval_J(a, z, x)
        rhs = float(e @ (mu * e - a @ e))
        id_err = abs(lhs - rhs)
        bound_gap = (mu - lam_max) * float(e @ e) - lhs
        worst_id = max(worst_id, id_err)
        worst_bound = max(worst_bound, bound_gap)
        if id_err > tol or bound_gap > tol:
            bad += 1
    return WellPosednessReport(float(r), float(mu), sol.gamma, samples, worst_id, max(worst_bound, 0.0), bad)

