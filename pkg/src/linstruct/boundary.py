"""The boundary equation ``T x - ||T|| x = z``, its threshold, and global maxima of J."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .spectral import Instance, SymmetricOperator, from_eigenpairs, random_orthogonal

EMPTY = "Empty"
SINGLETON = "Singleton"
AFFINE = "Affine"


def eig_tol(inst: Instance) -> float:
    """Two eigenvalues closer than this are treated as equal."""
    return 1e-9 * (1.0 + inst.op_norm)


def z_tol(inst: Instance) -> float:
    """A spectral coordinate of ``z`` below this counts as zero."""
    return 1e-10 * inst.z_norm


@dataclass(frozen=True, eq=False)
class BoundaryDiagnosis:
    norm_is_eigenvalue: bool
    v_kind: str
    theta: float
    min_norm_solution: np.ndarray | None
    kernel_dim: int

    @property
    def theta_finite(self) -> bool:
        return np.isfinite(self.theta)


def shifted_min_norm(inst: Instance, shift: float):
    """Minimum-norm solution of ``T x - shift x = z`` in spectral coordinates.

    Returns ``(x, block)`` where ``block`` flags the eigenvalues equal to
    ``shift``; ``x`` is None when ``z`` has weight on that block.
    """
    lam = inst.spectrum.eigenvalues
    zs = inst.z_spectral
    block = np.abs(lam - shift) <= eig_tol(inst)
    if np.any(np.abs(zs[block]) > z_tol(inst)):
        return None, block
    coeff = np.zeros_like(zs)
    coeff[~block] = zs[~block] / (lam[~block] - shift)
    return coeff, block


def diagnose_boundary(inst: Instance) -> BoundaryDiagnosis:
    coeff, block = shifted_min_norm(inst, inst.op_norm)
    kernel_dim = int(block.sum())
    if coeff is None:
        return BoundaryDiagnosis(True, EMPTY, float("inf"), None, kernel_dim)
    x = inst.spectrum.eigenvectors @ coeff
    x.setflags(write=False)
    kind = AFFINE if kernel_dim else SINGLETON
    return BoundaryDiagnosis(kernel_dim > 0, kind, float(np.sum(coeff**2)), x, kernel_dim)


@dataclass(frozen=True, eq=False)
class MaxClassification:
    has_global_max: bool
    witness: np.ndarray | None
    t_nonpositive: bool


def classify_global_max(inst: Instance, tol: float | None = None) -> MaxClassification:
    """Decide whether J has a global (equivalently, local) maximum.

    That happens exactly when ``T x = z`` is solvable and ``<T x, x> <= 0``
    for every x.  The witness is the pseudo-inverse solution of ``T x = z``,
    reported whenever it exists, even if T is not negative semidefinite.
    """
    if tol is None:
        tol = eig_tol(inst)
    lam = inst.spectrum.eigenvalues
    zs = inst.z_spectral
    t_nonpositive = bool(lam[0] <= tol)
    kernel = np.abs(lam) <= tol
    witness = None
    if not np.any(np.abs(zs[kernel]) > z_tol(inst)):
        coeff = np.zeros_like(zs)
        coeff[~kernel] = zs[~kernel] / lam[~kernel]
        witness = inst.spectrum.eigenvectors @ coeff
    return MaxClassification(witness is not None and t_nonpositive, witness, t_nonpositive)


def positive_instance_generator(n: int, seed: int) -> Instance:
    """Random positive semidefinite T with z weighted on its top eigenvector.

    For such a pair the boundary equation has no solution, so the threshold
    is infinite.
    """
    if n < 2:
        raise InputError("n must be at least 2")
    rng = np.random.default_rng(seed)
    evals = np.sort(rng.uniform(0.0, 1.0, n))[::-1]
    evals[0] += rng.uniform(0.1, 1.0)
    if rng.random() < 0.25:
        evals[-1] = 0.0
    q = random_orthogonal(n, rng)
    zs = rng.standard_normal(n)
    zs[0] = np.copysign(0.5 + abs(zs[0]), zs[0])
    return Instance(SymmetricOperator(from_eigenpairs(evals, q)), q @ zs)


def finite_threshold_instance(n: int, seed: int, gap: float = 0.2) -> Instance:
    """Random T whose norm is a simple eigenvalue with z orthogonal to it.

    The norm is carried by the top or the bottom eigenvalue (chosen at random)
    and the rest of the spectrum stays ``gap * (1 + ||T||)`` away from it, so
    the threshold is finite and g approaches it at a controlled rate.
    """
    if n < 2:
        raise InputError("n must be at least 2")
    rng = np.random.default_rng(seed)
    q = random_orthogonal(n, rng)
    norm = 1.0 + rng.uniform(0.0, 1.0)
    room = norm - gap * (1.0 + norm)
    evals = rng.uniform(-room, room, n)
    k = 0 if rng.random() < 0.5 else n - 1
    evals[k] = norm if k == 0 else -norm
    zs = rng.standard_normal(n)
    zs[k] = 0.0
    return Instance(SymmetricOperator(from_eigenpairs(evals, q)), q @ zs)
