"""1D Dirichlet problem ``-u'' = mu (u + phi)`` on ]0, 1[ and its reduction to the sphere problem.

The grid has ``n`` interior nodes and spacing ``h = 1/(n+1)``; the stiffness
matrix is ``A = tridiag(-1, 2, -1) / h^2``.  With the discrete energy product
``h u^T A v`` and the discrete L2 pairing ``h u^T v``, the substitution
``x = K^{1/2} u`` (``K = h A``) turns

    maximize  h (u^T u + 2 phi^T u)   subject to  h u^T A u = r

into maximizing ``<T x - 2 z, x>`` on ``||x||^2 = r`` with ``T = A^{-1}`` and
``z = -sqrt(h) A^{-1/2} phi``.  The reduction is exact at the discrete level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import solve_banded

from .boundary import diagnose_boundary
from .curves import AuditReport, audit_curve, sample_radii
from .errors import InputError, MuOutOfRange, OutOfRange, ZeroPhi
from .spectral import Instance, Spectrum, SymmetricOperator, eigendecompose, from_eigenpairs
from .spherical import maximize_on_sphere

MU_MARGIN = 1e-10


def stiffness_matrix(n: int) -> np.ndarray:
    h = 1.0 / (n + 1)
    a = 2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    return a / h**2


def lambda1_closed_form(n: int) -> float:
    h = 1.0 / (n + 1)
    return (2.0 / h**2) * (1.0 - math.cos(math.pi * h))


def nodes(n: int) -> np.ndarray:
    return np.arange(1, n + 1) / (n + 1)


def phi_preset(name: str, n: int) -> np.ndarray:
    """``one`` is the constant 1; ``eigK`` is the K-th discrete eigenvector ``sin(K pi x)``."""
    x = nodes(n)
    if name == "one":
        return np.ones(n)
    if name.startswith("eig") and name[3:].isdigit() and 1 <= int(name[3:]) <= n:
        return np.sin(int(name[3:]) * math.pi * x)
    raise InputError(f"unknown phi preset {name!r}")


@dataclass(frozen=True, eq=False)
class EnergyTransform:
    sqrt_K: np.ndarray
    inv_sqrt_K: np.ndarray
    abstract_T: SymmetricOperator
    abstract_z: np.ndarray
    instance: Instance

    def to_abstract(self, u) -> np.ndarray:
        return self.sqrt_K @ np.asarray(u, dtype=float)

    def from_abstract(self, x) -> np.ndarray:
        return self.inv_sqrt_K @ np.asarray(x, dtype=float)


@dataclass(frozen=True, eq=False)
class DirichletProblem:
    n: int
    h: float
    phi: np.ndarray
    stiffness: np.ndarray
    lambda1: float
    stiffness_spectrum: Spectrum

    @cached_property
    def transform(self) -> EnergyTransform:
        spec = self.stiffness_spectrum
        a = spec.eigenvalues
        v = spec.eigenvectors
        h = self.h
        sqrt_k = from_eigenpairs(np.sqrt(h * a), v)
        inv_sqrt_k = from_eigenpairs(1.0 / np.sqrt(h * a), v)
        t = SymmetricOperator(from_eigenpairs(1.0 / a, v))
        z = -math.sqrt(h) * (v @ ((v.T @ self.phi) / np.sqrt(a)))
        # eigenvalues of A^{-1} are 1/a; reverse to keep them descending
        t_spec = Spectrum(1.0 / a[::-1], v[:, ::-1])
        return EnergyTransform(sqrt_k, inv_sqrt_k, t, z, Instance(t, z, t_spec))

    @cached_property
    def delta(self) -> float:
        """Threshold of the reduced instance: inf of the energy over solutions at ``mu = lambda1``."""
        return diagnose_boundary(self.transform.instance).theta

    def energy(self, u) -> float:
        u = np.asarray(u, dtype=float)
        return float(self.h * u @ (self.stiffness @ u))

    def phi_functional(self, u) -> float:
        u = np.asarray(u, dtype=float)
        return float(self.h * (u @ u + 2.0 * self.phi @ u))


def build_problem(n: int, phi_fn) -> DirichletProblem:
    """Assemble the grid problem; ``phi_fn`` is a callable on the nodes or an array of samples."""
    if n < 3:
        raise InputError("need at least 3 interior nodes")
    phi = phi_fn(nodes(n)) if callable(phi_fn) else phi_fn
    phi = np.array(np.broadcast_to(np.asarray(phi, dtype=float), (n,)))
    if not np.all(np.isfinite(phi)):
        raise InputError("phi has non-finite samples")
    if not np.any(phi != 0.0):
        raise ZeroPhi("phi must not vanish identically")
    phi.setflags(write=False)
    a = stiffness_matrix(n)
    a.setflags(write=False)
    spec = eigendecompose(a)
    return DirichletProblem(n, 1.0 / (n + 1), phi, a, spec.lambda_min, spec)


@dataclass(frozen=True, eq=False)
class DirichletSolution:
    mu: float
    u: np.ndarray
    psi: float
    pde_residual: float


def solve_u_mu(p: DirichletProblem, mu: float) -> DirichletSolution:
    """``u = mu (A - mu I)^{-1} phi`` by a banded solve."""
    if not 0.0 < mu < p.lambda1 * (1.0 - MU_MARGIN):
        raise MuOutOfRange(f"mu={mu!r} must lie in ]0, lambda1[ with lambda1={p.lambda1!r}")
    n = p.n
    off = -1.0 / p.h**2
    bands = np.empty((3, n))
    bands[0, :] = off
    bands[1, :] = 2.0 / p.h**2 - mu
    bands[2, :] = off
    u = mu * solve_banded((1, 1), bands, p.phi)
    au = p.stiffness @ u
    res = float(np.linalg.norm(au - mu * (u + p.phi)))
    return DirichletSolution(float(mu), u, float(p.h * u @ au), res)


def psi_value(p: DirichletProblem, mu: float) -> float:
    return solve_u_mu(p, mu).psi


def invert_psi(p: DirichletProblem, r: float) -> float:
    """``mu`` in ]0, lambda1[ with ``psi(mu) = r``, by bisection on the increasing psi.

    Uses only PDE-side solves, so it is independent of the reduced sphere problem
    (apart from the range check against delta).
    """
    if not r > 0.0:
        raise OutOfRange(f"radius must be positive, got {r!r}")
    if r >= p.delta:
        raise OutOfRange(f"radius {r!r} is not below delta={p.delta!r}", theta=p.delta)
    lo, hi = 0.0, p.lambda1 * (1.0 - 2.0 * MU_MARGIN)
    if psi_value(p, hi) <= r:
        raise OutOfRange(f"radius {r!r} is not reached for mu below lambda1 within the solver margin")
    while hi - lo > 2.0 * np.finfo(float).eps * hi:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if psi_value(p, mid) < r:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def default_r_grid(p: DirichletProblem, steps: int = 20) -> np.ndarray:
    """Geometric grid between psi(0.05 lambda1) and psi(0.95 lambda1), kept below delta."""
    r_lo = psi_value(p, 0.05 * p.lambda1)
    r_hi = psi_value(p, 0.95 * p.lambda1)
    if np.isfinite(p.delta):
        r_hi = min(r_hi, 0.95 * p.delta)
        r_lo = min(r_lo, 0.01 * r_hi)
    return np.geomspace(r_lo, r_hi, steps)


@dataclass(frozen=True)
class EtaRow:
    r: float
    eta: float
    eta_prime: float
    mu: float
    euler_residual: float
    w_u_gap: float
    product_gap: float


@dataclass(frozen=True)
class EtaReport:
    lambda1: float
    delta: float
    audit: AuditReport
    rows: list[EtaRow]

    @property
    def max_euler_residual(self) -> float:
        return max(row.euler_residual for row in self.rows)

    @property
    def max_w_u_gap(self) -> float:
        return max(row.w_u_gap for row in self.rows)

    @property
    def max_product_gap(self) -> float:
        return max(row.product_gap for row in self.rows)


def maximizer(p: DirichletProblem, r: float) -> np.ndarray:
    """Grid function ``w_r`` maximizing the phi functional on the energy sphere."""
    tr = p.transform
    return tr.from_abstract(maximize_on_sphere(tr.instance, r).x_hat)


def eta_curve(p: DirichletProblem, r_grid=None) -> EtaReport:
    """Audit eta on a radius grid and match it against PDE-side solutions.

    eta and eta' come from the reduced sphere problem; mu = psi^{-1}(r) and
    u_mu come from banded solves of the PDE.  Each row records
    ``||w_r - u_mu||``, ``|eta'(r) mu - 1|`` and the residual of
    ``A w = (u + phi) / eta'(r)``.
    """
    if r_grid is None:
        r_grid = default_r_grid(p)
    r_grid = np.asarray(r_grid, dtype=float)
    inst = p.transform.instance
    samples = sample_radii(inst, r_grid)
    rows = []
    for s in samples:
        w = maximizer(p, s.r)
        mu = invert_psi(p, s.r)
        u = solve_u_mu(p, mu).u
        euler = float(np.linalg.norm(p.stiffness @ w - (w + p.phi) / s.gamma_prime))
        rows.append(
            EtaRow(s.r, s.gamma, s.gamma_prime, mu, euler, float(np.linalg.norm(w - u)), abs(s.gamma_prime * mu - 1.0))
        )
    return EtaReport(p.lambda1, p.delta, audit_curve(samples), rows)


def continuity_profile(p: DirichletProblem, r: float, dr: float, halvings: int = 3) -> list[float]:
    """``||w_{r+dr} - w_r||`` in the energy norm for dr, dr/2, ..."""
    w = maximizer(p, r)
    out = []
    for k in range(halvings + 1):
        out.append(math.sqrt(p.energy(maximizer(p, r + dr / 2**k) - w)))
    return out
