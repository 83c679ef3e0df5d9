"""Loop integrals and path-ordered holonomies of matrix-valued phase integrands.

An integrand is a callable ``point -> (3, 4, 4)`` array ``W`` such that the
phase matrix is ``Phi = oint W . dr``. Points are cylindrical ``(r, phi, z)``
and the three slots of ``W`` are Cartesian components.

The closed forms for the line-charge configuration are

* induced dipole:   ``-(pi/2)(alpha_pol + chi) lam B0 beta``
* Aharonov-Casher:  ``2 pi mu lam beta Sigma^3``
* scalar AB leg:    ``mu B0 tau beta Sigma^3``

The scalar Aharonov-Bohm term keeps the ``beta`` that multiplies the time
integral in the general Anandan phase. The fully evaluated expression it is
usually quoted alongside prints that term as ``mu B0 tau Sigma^3`` without
``beta``; the two differ only on the lower spinor components.
"""

from dataclasses import dataclass, field
import math
from typing import Callable

import numpy as np

from .fields import Wei, eval_fields
from .spinor import (
    IDENTITY,
    LEVI_CIVITA,
    build_gamma_basis,
    decompose_on_commuting_basis,
    exp_i,
    maxabs,
    principal_eigenphases,
)

SCALAR_AB_NOTE = (
    "scalar Aharonov-Bohm term carries beta: mu*B0*tau*beta*Sigma^3 "
    "(the evaluated closed form is often printed without beta)"
)


def _uniform(s):
    return s


@dataclass(frozen=True)
class LoopPath:
    """Circle of radius ``radius`` about the z axis in the plane ``z``.

    ``parametrization`` maps ``[0, 1]`` monotonically onto ``[0, 1]``; the
    angle at parameter ``s`` is ``start + 2 pi * orientation * g(s)``.
    """

    radius: float = 1.0
    segments: int = 1000
    orientation: int = 1
    z: float = 0.0
    start: float = 0.0
    parametrization: Callable = field(default=_uniform, compare=False)

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError(f"loop radius must be positive and finite, got {self.radius!r}")
        if self.orientation not in (1, -1):
            raise ValueError(f"orientation must be +1 or -1, got {self.orientation!r}")
        if int(self.segments) != self.segments or self.segments < 1:
            raise ValueError(f"need at least one segment, got {self.segments!r}")

    def node_angles(self):
        s = np.linspace(0.0, 1.0, int(self.segments) + 1)
        g = np.array([self.parametrization(x) for x in s], dtype=float)
        if abs(g[0]) > 1e-15 or abs(g[-1] - 1.0) > 1e-15 or np.any(np.diff(g) <= 0):
            raise ValueError("parametrization must increase strictly from 0 to 1")
        return self.start + 2.0 * np.pi * self.orientation * g

    def segment_steps(self):
        """Yield ``(midpoint, dr)`` per segment, in traversal order.

        ``dr`` is the tangent at the angular midpoint times the angle step, so
        the sum is the midpoint rule for ``int W(r(phi)) . r'(phi) dphi``.
        """
        angles = self.node_angles()
        for a0, a1 in zip(angles[:-1], angles[1:]):
            mid = 0.5 * (a0 + a1)
            step = a1 - a0
            tangent = self.radius * np.array([-math.sin(mid), math.cos(mid), 0.0])
            yield (self.radius, mid, self.z), tangent * step


@dataclass(frozen=True)
class TimeLeg:
    tau: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.tau) and self.tau >= 0):
            raise ValueError(f"tau must be finite and non-negative, got {self.tau!r}")


@dataclass
class PhaseResult:
    phi: np.ndarray
    holonomy: np.ndarray
    eigenphases: np.ndarray
    coefficients: tuple
    ordering_discrepancy: float = 0.0
    commutator_bound: float = 0.0
    notes: tuple = ()

    @property
    def c_identity(self):
        return self.coefficients[0]

    @property
    def c_beta(self):
        return self.coefficients[1]

    @property
    def c_sigma3(self):
        return self.coefficients[2]

    @property
    def c_betasigma3(self):
        return self.coefficients[3]

    @property
    def remainder_norm(self):
        return self.coefficients[4]


def induced_integrand(config, params, basis=None):
    """``W_i = (1/4) beta [(alpha_pol + chi) E x B]_i``.

    Only the cross-field term appears; the E^2 and B^2 pieces of the
    potential are local and never enter a loop integral.
    """
    if basis is None:
        basis = build_gamma_basis()
    weight = 0.25 * (params.alpha_pol + params.chi)
    beta = basis.beta

    def integrand(point):
        e, b = eval_fields(config, point)
        v = weight * np.cross(e, b)
        return np.stack([v[i] * beta for i in range(3)])

    return integrand


def _sigma_cross(e, basis):
    # (Sigma x E)_i = eps_ijk Sigma^j E_k
    return np.einsum("ijk,k,jab->iab", LEVI_CIVITA, e, np.stack(basis.sigma))


def anandan_integrand(config, params, basis=None):
    """``W_i = beta [mu (Sigma x E) + (1/4) alpha_pol (E x B)]_i``."""
    if basis is None:
        basis = build_gamma_basis()
    beta = basis.beta

    def integrand(point):
        e, b = eval_fields(config, point)
        v = 0.25 * params.alpha_pol * np.cross(e, b)
        inner = params.mu * _sigma_cross(e, basis) + v[:, None, None] * IDENTITY
        return np.einsum("ab,ibc->iac", beta, inner)

    return integrand


def total_integrand(config, params, basis=None):
    """Anandan integrand plus the susceptibility cross term."""
    if basis is None:
        basis = build_gamma_basis()
    anandan = anandan_integrand(config, params, basis)
    chi_weight = 0.25 * params.chi
    beta = basis.beta

    def integrand(point):
        w = anandan(point)
        if chi_weight:
            e, b = eval_fields(config, point)
            v = chi_weight * np.cross(e, b)
            w = w + np.stack([v[i] * beta for i in range(3)])
        return w

    return integrand


def segment_generators(path, integrand):
    """``W(midpoint) . dr`` for each segment, in traversal order."""
    return [np.einsum("i,ijk->jk", dr, integrand(point)) for point, dr in path.segment_steps()]


def loop_phase_integral(path, integrand):
    """Midpoint-rule loop integral ``oint W . dr``."""
    total = np.zeros((4, 4), dtype=complex)
    for g in segment_generators(path, integrand):
        total = total + g
    return total


def ordered_product(generators):
    """``exp(i g_N) ... exp(i g_1)``: later segments multiply on the left."""
    u = IDENTITY.copy()
    for g in generators:
        u = exp_i(1.0, g) @ u
    return u


def path_ordered_holonomy(path, integrand):
    return ordered_product(segment_generators(path, integrand))


def max_pairwise_commutator(generators, limit=2000):
    """Largest ``||[g_a, g_b]||`` over segment pairs.

    Exact over all pairs up to ``limit`` generators; beyond that an evenly
    spaced subset of ``limit`` generators is checked.
    """
    g = np.asarray(generators, dtype=complex)
    if len(g) > limit:
        g = g[np.linspace(0, len(g) - 1, limit).astype(int)]
    worst = 0.0
    for a in range(len(g) - 1):
        rest = g[a + 1 :]
        c = g[a] @ rest - rest @ g[a]
        worst = max(worst, float(np.max(np.abs(c))))
    return worst


def scalar_ab_phase(config, mu, leg, basis=None):
    """``mu beta (Sigma . B) tau`` for a static field felt during the time leg."""
    if basis is None:
        basis = build_gamma_basis()
    _, b = eval_fields(config, (1.0, 0.0, 0.0))
    sigma_b = sum(b[i] * basis.sigma[i] for i in range(3))
    return mu * leg.tau * (basis.beta @ sigma_b)


def _result(phi, holonomy, basis, ordering_discrepancy=0.0, commutator_bound=0.0, notes=()):
    return PhaseResult(
        phi=phi,
        holonomy=holonomy,
        eigenphases=principal_eigenphases(holonomy),
        coefficients=decompose_on_commuting_basis(phi, basis),
        ordering_discrepancy=ordering_discrepancy,
        commutator_bound=commutator_bound,
        notes=tuple(notes),
    )


def analytic_phase(config, params, leg=None, basis=None):
    """Closed-form phase matrix for the line-charge configuration."""
    if not isinstance(config, Wei):
        raise TypeError("closed-form phases exist only for the Wei configuration")
    if basis is None:
        basis = build_gamma_basis()
    if leg is None:
        leg = TimeLeg()
    lam, b0 = config.lam, config.b0
    beta_sigma3 = basis.beta @ basis.sigma[2]
    phi = (
        2.0 * np.pi * params.mu * lam * beta_sigma3
        - 0.5 * np.pi * (params.alpha_pol + params.chi) * lam * b0 * basis.beta
        + params.mu * b0 * leg.tau * beta_sigma3
    )
    notes = (SCALAR_AB_NOTE,) if params.mu and leg.tau else ()
    return _result(phi, exp_i(1.0, phi), basis, notes=notes)


def compute_phase(path, config, params, leg=None, basis=None):
    """Numerical phase matrix and holonomy for a loop plus optional time leg.

    ``ordering_discrepancy`` is ``||U_ordered - exp(i Phi)||``; it vanishes
    when all segment generators commute and otherwise the ordered product is
    the result to trust.
    """
    if basis is None:
        basis = build_gamma_basis()
    if leg is None:
        leg = TimeLeg()
    generators = segment_generators(path, total_integrand(config, params, basis))
    phi_loop = np.zeros((4, 4), dtype=complex)
    for g in generators:
        phi_loop = phi_loop + g
    u_loop = ordered_product(generators)

    time_phase = scalar_ab_phase(config, params.mu, leg, basis)
    phi = phi_loop + time_phase
    holonomy = exp_i(1.0, time_phase) @ u_loop
    discrepancy = maxabs(holonomy - exp_i(1.0, phi))
    bound = max_pairwise_commutator(generators + [time_phase])
    notes = (SCALAR_AB_NOTE,) if params.mu and leg.tau else ()
    return _result(phi, holonomy, basis, discrepancy, bound, notes)
