"""Induced electric dipole coupling in the Dirac equation.

Gamma-matrix algebra, field tensors, the nonminimal coupling and its
Hamiltonian reduction, geometric phases and holonomies around a line charge,
and finite-difference diagnostics of the phase-factor substitution.
"""

__version__ = "0.1.0"

from .spinor import (
    GammaBasis,
    anticommutator,
    build_gamma_basis,
    clifford_sign,
    commutator,
    decompose_on_commuting_basis,
    exp_i,
    maxabs,
    principal_eigenphases,
    sigma_tensor,
)
from .fields import (
    Custom,
    DipoleParams,
    FieldDomainError,
    Uniform,
    Wei,
    eval_fields,
    field_tensor,
    lambda_from_volume_charge,
    moment_tensor,
)
from .coupling import (
    closed_form_potential,
    contraction_term,
    effective_inverse_square,
    magnetic_dipole_hamiltonian,
    verify_dipole_reduction,
    verify_reduction,
)
from .holonomy import (
    LoopPath,
    PhaseResult,
    TimeLeg,
    analytic_phase,
    anandan_integrand,
    compute_phase,
    induced_integrand,
    loop_phase_integral,
    path_ordered_holonomy,
    scalar_ab_phase,
)
from .factorization import (
    PolarGrid,
    SpinorField,
    apply_full_operator,
    apply_reduced_operator,
    azimuthal_cancellation_residual,
    full_factorization_residual,
    phase_factor_field,
)
