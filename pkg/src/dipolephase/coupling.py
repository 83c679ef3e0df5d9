"""Nonminimal induced-moment coupling and its Hamiltonian reductions.

The covariant equation is written ``m psi = i gamma^mu d_mu psi - C psi +
T psi`` with ``C`` the induced-moment contraction and ``T = (mu/2)
Sigma^{bn} F_{bn}``. Multiplying through by ``gamma^0`` isolates
``i d_t psi``, so the interaction enters the Hamiltonian as ``beta C`` and
``-beta T``. The functions below compute both sides of that reduction
independently: brute-force index sums on one side, explicit cross and dot
products on the other.
"""

from dataclasses import dataclass

import numpy as np

from .fields import DipoleParams, FieldDomainError, Wei, field_tensor, moment_tensor
from .spinor import build_gamma_basis, maxabs, sigma_tensor


@dataclass(frozen=True)
class PotentialMatrix:
    value: np.ndarray
    e: tuple = None
    b: tuple = None
    params: object = None


def contraction_term(f, k, basis):
    """``(1/4) eta^{ab} K_{mu a} F_{b nu} gamma^mu gamma^nu`` by explicit loops."""
    eta = np.diag(basis.metric)
    out = np.zeros((4, 4), dtype=complex)
    for mu in range(4):
        for nu in range(4):
            coeff = 0.0
            for a in range(4):
                for b in range(4):
                    coeff += eta[a, b] * k[mu, a] * f[b, nu]
            if coeff:
                out += coeff * (basis.gamma[mu] @ basis.gamma[nu])
    return 0.25 * out


def closed_form_potential(e, b, params, basis=None):
    """Non-derivative Hamiltonian terms of the induced-moment coupling.

    ``V = (1/4) beta alpha.[(alpha_pol + chi) E x B] - (1/2)(alpha_pol E^2 + chi B^2) beta``

    Because ``beta alpha^i`` is anti-Hermitian, the cross-field term is the
    anti-Hermitian part of ``V`` and the field-squared term its Hermitian part.

    ``e`` and ``b`` may carry leading batch dimensions ``(..., 3)``; the
    value then has shape ``(..., 4, 4)``.
    """
    if basis is None:
        basis = build_gamma_basis()
    e = np.asarray(e, dtype=float)
    b = np.asarray(b, dtype=float)
    cross = (params.alpha_pol + params.chi) * np.cross(e, b)
    beta_alpha = np.stack([basis.beta @ a for a in basis.alpha])
    squares = params.alpha_pol * np.sum(e * e, axis=-1) + params.chi * np.sum(b * b, axis=-1)
    value = 0.25 * np.einsum("...i,ijk->...jk", cross, beta_alpha) - 0.5 * np.multiply.outer(
        squares, basis.beta
    )
    if e.ndim == 1:
        return PotentialMatrix(value=value, e=tuple(e), b=tuple(b), params=params)
    return PotentialMatrix(value=value, params=params)


def verify_reduction(e, b, params, basis=None):
    """Max-abs gap between ``beta C`` (index sum) and the closed-form potential."""
    if basis is None:
        basis = build_gamma_basis()
    c = contraction_term(field_tensor(e, b), moment_tensor(e, b, params), basis)
    v = closed_form_potential(e, b, params, basis).value
    return maxabs(basis.beta @ c - v)


def magnetic_dipole_hamiltonian(e, b, mu, basis=None):
    """``i mu beta alpha.E - mu beta Sigma.B``."""
    if basis is None:
        basis = build_gamma_basis()
    e = np.asarray(e, dtype=float)
    b = np.asarray(b, dtype=float)
    alpha_e = sum(e[i] * basis.alpha[i] for i in range(3))
    sigma_b = sum(b[i] * basis.sigma[i] for i in range(3))
    value = 1j * mu * basis.beta @ alpha_e - mu * basis.beta @ sigma_b
    return PotentialMatrix(value=value, e=tuple(e), b=tuple(b))


def dipole_tensor_term(f, mu, basis):
    """``(mu/2) Sigma^{bn} F_{bn}`` summed over all 16 index pairs."""
    out = np.zeros((4, 4), dtype=complex)
    for b in range(4):
        for n in range(4):
            if f[b, n]:
                out += f[b, n] * sigma_tensor(basis, b, n)
    return 0.5 * mu * out


def verify_dipole_reduction(e, b, mu, basis=None):
    """Max-abs gap between ``-beta T`` and :func:`magnetic_dipole_hamiltonian`."""
    if basis is None:
        basis = build_gamma_basis()
    t = dipole_tensor_term(field_tensor(e, b), mu, basis)
    h = magnetic_dipole_hamiltonian(e, b, mu, basis).value
    return maxabs(-basis.beta @ t - h)


def effective_inverse_square(params, config, r):
    """Scalar coefficient of ``beta`` in the local field-squared term.

    For the Wei configuration this is ``-(1/2) alpha_pol lam^2 / r^2 - (1/2)
    chi B0^2``; the first piece is the attractive inverse-square potential and
    the second is constant in r.
    """
    if not isinstance(config, Wei):
        raise TypeError("effective_inverse_square needs a Wei configuration")
    if not r > 0:
        raise FieldDomainError(f"r must be positive, got {r!r}")
    return -0.5 * params.alpha_pol * config.lam**2 / r**2 - 0.5 * params.chi * config.b0**2


def random_reduction_sweep(draws, seed, basis=None):
    """Worst-case deviations of both reductions over seeded random inputs.

    Fields are drawn from ``[-1, 1]^3`` and ``alpha_pol``, ``chi``, ``mu``
    from ``[-1, 1]``.
    """
    if basis is None:
        basis = build_gamma_basis()
    rng = np.random.default_rng(seed)
    worst_induced = 0.0
    worst_dipole = 0.0
    for _ in range(draws):
        e = rng.uniform(-1, 1, 3)
        b = rng.uniform(-1, 1, 3)
        alpha_pol, chi, mu = rng.uniform(-1, 1, 3)
        params = DipoleParams(alpha_pol=alpha_pol, chi=chi, mu=mu)
        worst_induced = max(worst_induced, verify_reduction(e, b, params, basis))
        worst_dipole = max(worst_dipole, verify_dipole_reduction(e, b, mu, basis))
    return worst_induced, worst_dipole
