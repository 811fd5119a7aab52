"""Dense linear-algebra substrate: operators, cyclic Jacobi, problem instances.

Vectors are plain one-dimensional ``float64`` arrays.  Operators wrap a
read-only square matrix; :class:`SymmetricOperator` refuses input that is not
symmetric to within ``1e-12 * (1 + max|A_ij|)`` instead of symmetrizing it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AsymmetricOperator,
    ConvergenceError,
    DimensionMismatch,
    InputError,
    ZeroZ,
)

SYMMETRY_RTOL = 1e-12
JACOBI_MAX_SWEEPS = 100
JACOBI_OFF_RTOL = 1e-14


def as_vector(x, name: str = "vector") -> np.ndarray:
    """Validate and copy ``x`` into a read-only 1-D float array."""
    v = np.array(x, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise InputError(f"{name} must be a non-empty 1-D sequence, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InputError(f"{name} has non-finite entries")
    v.setflags(write=False)
    return v


def _as_square(matrix, name: str) -> np.ndarray:
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise InputError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError(f"{name} has non-finite entries")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GeneralOperator:
    """Arbitrary linear map on R^n, stored densely."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _as_square(self.matrix, "operator"))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class SymmetricOperator(GeneralOperator):
    def __post_init__(self):
        super().__post_init__()
        a = self.matrix
        asym = np.abs(a - a.T)
        worst = float(asym.max())
        if worst > SYMMETRY_RTOL * (1.0 + float(np.abs(a).max())):
            i, j = np.unravel_index(int(asym.argmax()), asym.shape)
            raise AsymmetricOperator(
                f"|T[{i}][{j}] - T[{j}][{i}]| = {worst:.3e} exceeds symmetry tolerance",
                location=f"T[{i}][{j}]",
            )


def _matrix_of(op) -> np.ndarray:
    if isinstance(op, GeneralOperator):
        return op.matrix
    return np.asarray(op, dtype=float)


def apply(op, x) -> np.ndarray:
    a = _matrix_of(op)
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or a.shape[1] != x.shape[0]:
        raise DimensionMismatch(f"operator is {a.shape[0]}x{a.shape[1]} but vector has shape {x.shape}")
    return a @ x


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues in descending order; ``eigenvectors[:, i]`` pairs with ``eigenvalues[i]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[-1])

    def residuals(self, a) -> tuple[float, float]:
        """Return ``(||Q^T Q - I||_max, ||A - Q diag Q^T||_max)``."""
        a = _matrix_of(a)
        q = self.eigenvectors
        ortho = np.abs(q.T @ q - np.eye(q.shape[1])).max()
        recon = np.abs(a - (q * self.eigenvalues) @ q.T).max()
        return float(ortho), float(recon)


def _off_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def eigendecompose(op) -> Spectrum:
    """Cyclic Jacobi eigensolver for a dense symmetric matrix.

    Sweeps the strict upper triangle row by row, annihilating each pivot with
    a plane rotation, until the off-diagonal Frobenius norm drops below
    ``1e-14 * ||A||_F``.  Raises :class:`ConvergenceError` after 100 sweeps.
    """
    a = np.array(_matrix_of(op), dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    target = JACOBI_OFF_RTOL * float(np.linalg.norm(a))
    sweeps = 0
    while _off_norm(a) > target:
        if sweeps == JACOBI_MAX_SWEEPS:
            raise ConvergenceError(
                f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps (off-norm {_off_norm(a):.3e})"
            )
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app, aqq = a[p, p], a[q, q]
                # pivot already negligible against both diagonal entries
                if abs(app) + 100.0 * abs(apq) == abs(app) and abs(aqq) + 100.0 * abs(apq) == abs(aqq):
                    a[p, q] = a[q, p] = 0.0
                    continue
                tau = (aqq - app) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
    evals = np.diag(a).copy()
    order = np.argsort(-evals, kind="stable")
    evals = evals[order]
    vecs = v[:, order]
    evals.setflags(write=False)
    vecs.setflags(write=False)
    return Spectrum(evals, vecs, sweeps)


def operator_norm(spec: Spectrum) -> float:
    return max(abs(spec.lambda_max), abs(spec.lambda_min))


@dataclass(frozen=True, eq=False)
class Instance:
    """A symmetric operator ``T`` with a non-zero right-hand side ``z``.

    The spectrum, ``||T||`` and the spectral coordinates ``Q^T z`` are computed
    once at construction.
    """

    T: SymmetricOperator
    z: np.ndarray
    spectrum: Spectrum = field(default=None, repr=False)
    op_norm: float = field(init=False)
    z_spectral: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.T, SymmetricOperator):
            object.__setattr__(self, "T", SymmetricOperator(self.T))
        z = as_vector(self.z, "z")
        if z.shape[0] != self.T.dim:
            raise DimensionMismatch(f"z has {z.shape[0]} entries but T is {self.T.dim}x{self.T.dim}")
        if not np.any(z != 0.0):
            raise ZeroZ("z must be non-zero", location="z")
        object.__setattr__(self, "z", z)
        spec = self.spectrum if self.spectrum is not None else eigendecompose(self.T)
        object.__setattr__(self, "spectrum", spec)
        object.__setattr__(self, "op_norm", operator_norm(spec))
        zs = spec.eigenvectors.T @ z
        zs.setflags(write=False)
        object.__setattr__(self, "z_spectral", zs)

    @classmethod
    def from_arrays(cls, T, z) -> "Instance":
        return cls(SymmetricOperator(T), z)

    @property
    def dim(self) -> int:
        return self.T.dim

    @property
    def z_norm(self) -> float:
        return float(np.linalg.norm(self.z))


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def from_eigenpairs(eigenvalues, q: np.ndarray) -> np.ndarray:
    """Assemble ``Q diag(eigenvalues) Q^T``, symmetric to the last bit."""
    a = (q * np.asarray(eigenvalues, dtype=float)) @ q.T
    return 0.5 * (a + a.T)


def random_instance(n: int, seed: int | np.random.Generator, scale: float = 1.0) -> Instance:
    """Gaussian symmetric ``T`` (GOE-style) and Gaussian ``z``."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n))
    a = scale * (g + g.T) / 2.0
    z = rng.standard_normal(n)
    return Instance(SymmetricOperator(a), z)
