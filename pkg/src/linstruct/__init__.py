"""Resolvent curves, spherical maxima and their audit for ``T x - lam x = z``.

``T`` is a symmetric matrix standing in for a compact symmetric operator and
``z`` is non-zero.  The package computes ``g(lam) = ||v_lam||^2`` for
``lam > ||T||``, the threshold ``theta``, the maximizer of
``J(x) = <T x - 2 z, x>`` on ``||x||^2 = r`` and the value curve ``gamma``,
then checks the structural relations between them.
"""

from .boundary import (
    BoundaryDiagnosis,
    MaxClassification,
    classify_global_max,
    diagnose_boundary,
    finite_threshold_instance,
    positive_instance_generator,
)
from .curves import (
    AuditReport,
    CurveSample,
    audit_curve,
    counterexample_l2,
    counterexample_r2,
    sample_curve,
    sample_radii,
)
from .dirichlet import build_problem, eta_curve, invert_psi, psi_value, solve_u_mu
from .errors import DomainError, InputError, LinstructError
from .resolvent import ResolventSolution, contraction_resolvent, g_value, spectral_resolvent
from .spectral import (
    GeneralOperator,
    Instance,
    Spectrum,
    SymmetricOperator,
    apply,
    eigendecompose,
    operator_norm,
)
from .spherical import (
    SphericalSolution,
    brute_force_max,
    eval_J,
    gamma_prime,
    gamma_value,
    invert_g,
    maximize_on_sphere,
    secular_value,
    wellposedness_check,
)

__version__ = "0.1.0"
