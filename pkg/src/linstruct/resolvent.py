"""Solutions of ``T x - lam x = z`` for ``lam > ||T||`` and the curve ``g(lam) = ||x||^2``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IterationCapExceeded, LambdaTooSmall
from .spectral import Instance


@dataclass(frozen=True, eq=False)
class ResolventSolution:
    lam: float
    v_hat: np.ndarray
    residual: float
    iterations: int = 0
    steps: tuple[float, ...] = ()


def lambda_margin(inst: Instance) -> float:
    return 1e-12 * (1.0 + inst.op_norm)


def check_lambda(inst: Instance, lam: float) -> None:
    if not lam > inst.op_norm + lambda_margin(inst):
        raise LambdaTooSmall(float(lam), inst.op_norm)


def _residual(inst: Instance, lam: float, v: np.ndarray) -> float:
    return float(np.linalg.norm(inst.T.matrix @ v - lam * v - inst.z))


def spectral_resolvent(inst: Instance, lam: float) -> ResolventSolution:
    check_lambda(inst, lam)
    spec = inst.spectrum
    coeff = inst.z_spectral / (spec.eigenvalues - lam)
    v = spec.eigenvectors @ coeff
    return ResolventSolution(float(lam), v, _residual(inst, lam, v))


def contraction_cap(q: float, tol: float, first_step: float) -> int:
    """Iteration budget for ``x <- (T x - z) / lam`` with contraction ratio ``q``.

    ``first_step`` is ``||z|| / lam``, the size of the step out of ``x0 = 0``.
    """
    if q <= 0.0:
        return 1 + 64
    needed = math.log(tol * (1.0 - q) / max(first_step, 1.0)) / math.log(q)
    return max(math.ceil(needed), 0) + 64


def contraction_resolvent(inst: Instance, lam: float, tol: float = 1e-12) -> ResolventSolution:
    """Banach fixed-point iteration ``x <- (T x - z) / lam`` started at zero.

    Stops once a step has norm ``<= tol``; the returned ``steps`` are the norms
    of every step taken, so the observed contraction ratio can be audited.
    """
    check_lambda(inst, lam)
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    a = inst.T.matrix
    z = inst.z
    q = inst.op_norm / lam
    cap = contraction_cap(q, tol, inst.z_norm / lam)
    x = np.zeros_like(z)
    steps = []
    for k in range(1, cap + 1):
        x_new = (a @ x - z) / lam
        step = float(np.linalg.norm(x_new - x))
        steps.append(step)
        x = x_new
        if step <= tol:
            return ResolventSolution(float(lam), x, _residual(inst, lam, x), k, tuple(steps))
    raise IterationCapExceeded(f"no step below tol={tol:g} after {cap} iterations (q={q:.6g})")


def g_value(inst: Instance, lam: float) -> float:
    """``||v_lam||^2`` evaluated through the spectral sum, without forming a solve."""
    check_lambda(inst, lam)
    d = inst.spectrum.eigenvalues - lam
    return float(np.sum((inst.z_spectral / d) ** 2))


def g_curve(inst: Instance, lam_from: float, lam_to: float, steps: int) -> list[tuple[float, float]]:
    lams = np.linspace(lam_from, lam_to, steps)
    return [(float(lam), g_value(inst, lam)) for lam in lams]
