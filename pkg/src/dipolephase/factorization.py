"""Planar cylindrical Dirac operators on a polar grid and phase-factor diagnostics.

The operators act on 4-spinor fields sampled on ``r_min <= r <= r_max`` and
periodic ``phi``, with ``p_z = 0``::

    H  psi = m beta psi - i alpha^1 (d_r + 1/(2r)) psi - i (alpha^2 / r) d_phi psi + V psi
    H0 psi = same, with V replaced by its local field-squared part

``alpha^1`` and ``alpha^2`` act along ``r_hat`` and ``phi_hat``, so the
potential is assembled from field components in the local
``(r_hat, phi_hat, z_hat)`` frame. ``1/(2r)`` is the scale-factor correction of
cylindrical coordinates. Derivatives are fourth-order finite differences:
periodic central in ``phi``, central in the radial interior and one-sided on
the two radial boundary rows.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .coupling import closed_form_potential
from .fields import Wei, eval_fields, to_local_frame
from .spinor import build_gamma_basis, exp_i, maxabs


class GridError(ValueError):
    """Grid unusable for the fourth-order stencils."""


@dataclass(frozen=True)
class PolarGrid:
    r_min: float
    r_max: float
    nr: int
    nphi: int

    def __post_init__(self):
        if not self.r_min > 0:
            raise GridError(f"r_min must be positive (line charge on the axis), got {self.r_min!r}")
        if not self.r_max > self.r_min:
            raise GridError("r_max must exceed r_min")
        if self.nr < 5:
            raise GridError(f"radial stencil needs nr >= 5, got {self.nr}")
        if self.nphi < 6 or self.nphi % 2:
            raise GridError(f"nphi must be even and >= 6, got {self.nphi}")

    @property
    def r(self):
        return np.linspace(self.r_min, self.r_max, self.nr)

    @property
    def phi(self):
        return 2.0 * np.pi * np.arange(self.nphi) / self.nphi

    @property
    def dr(self):
        return (self.r_max - self.r_min) / (self.nr - 1)

    @property
    def dphi(self):
        return 2.0 * np.pi / self.nphi

    def mesh(self):
        return np.meshgrid(self.r, self.phi, indexing="ij")

    def refined(self, factor=2):
        return PolarGrid(
            self.r_min, self.r_max, (self.nr - 1) * factor + 1, self.nphi * factor
        )


@dataclass
class SpinorField:
    """Spinor samples of shape ``(nr, nphi, 4)``."""

    values: np.ndarray
    grid: PolarGrid

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        expected = (self.grid.nr, self.grid.nphi, 4)
        if self.values.shape != expected:
            raise GridError(f"field shape {self.values.shape} does not match grid {expected}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("spinor field has non-finite entries")

    def __add__(self, other):
        return SpinorField(self.values + other.values, self.grid)

    def __sub__(self, other):
        return SpinorField(self.values - other.values, self.grid)

    def __rmul__(self, scalar):
        return SpinorField(scalar * self.values, self.grid)


@dataclass(frozen=True)
class ManufacturedSpinor:
    """Analytic spinor field with exact first derivatives.

    Each callable takes broadcastable ``(r, phi)`` arrays and returns an array
    of shape ``(..., 4)``.
    """

    value: Callable
    d_r: Callable
    d_phi: Callable

    def sample(self, grid):
        r, phi = grid.mesh()
        return SpinorField(self.value(r, phi), grid)


def azimuthal_mode(profile, d_profile, ell, spinor):
    """``f(r) exp(i ell phi) s`` with ``f'`` supplied."""
    s = np.asarray(spinor, dtype=complex)

    def value(r, phi):
        return (profile(r) * np.exp(1j * ell * phi))[..., None] * s

    def d_r(r, phi):
        return (d_profile(r) * np.exp(1j * ell * phi))[..., None] * s

    def d_phi(r, phi):
        return (1j * ell * profile(r) * np.exp(1j * ell * phi))[..., None] * s

    return ManufacturedSpinor(value, d_r, d_phi)


def gaussian_ring_mode(center, width, ell, spinor):
    """Azimuthal mode with a Gaussian radial profile centred on ``center``."""

    def f(r):
        return np.exp(-(((r - center) / width) ** 2))

    def df(r):
        return -2.0 * (r - center) / width**2 * f(r)

    return azimuthal_mode(f, df, ell, spinor)


def random_manufactured(rng, ell_max=3):
    """Sum of two random modes with smooth radial profiles."""
    modes = []
    for _ in range(2):
        spinor = rng.normal(size=4) + 1j * rng.normal(size=4)
        ell = int(rng.integers(-ell_max, ell_max + 1))
        k = float(rng.uniform(0.5, 2.0))
        shift = float(rng.uniform(0, 2 * np.pi))
        modes.append(
            azimuthal_mode(
                lambda r, k=k, shift=shift: np.sin(k * r + shift) + 2.0,
                lambda r, k=k, shift=shift: k * np.cos(k * r + shift),
                ell,
                spinor,
            )
        )

    def combine(attr):
        return lambda r, phi: sum(getattr(m, attr)(r, phi) for m in modes)

    return ManufacturedSpinor(combine("value"), combine("d_r"), combine("d_phi"))


# Fourth-order first-derivative weights (times 1/(12 h)).
_EDGE0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0])
_EDGE1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0])


def radial_derivative(values, h):
    """Fourth-order ``d/dr`` along axis 0."""
    v = np.asarray(values)
    out = np.empty_like(v)
    out[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)
    pad = (slice(None),) + (None,) * (v.ndim - 1)
    e0, e1 = _EDGE0[pad], _EDGE1[pad]
    out[0] = np.sum(e0 * v[:5], axis=0) / (12.0 * h)
    out[1] = np.sum(e1 * v[:5], axis=0) / (12.0 * h)
    out[-1] = -np.sum(e0 * v[::-1][:5], axis=0) / (12.0 * h)
    out[-2] = -np.sum(e1 * v[::-1][:5], axis=0) / (12.0 * h)
    return out


def azimuthal_derivative(values, h):
    """Fourth-order periodic ``d/dphi`` along axis 1."""
    v = np.asarray(values)
    return (
        np.roll(v, 2, axis=1)
        - 8.0 * np.roll(v, 1, axis=1)
        + 8.0 * np.roll(v, -1, axis=1)
        - np.roll(v, -2, axis=1)
    ) / (12.0 * h)


def local_field_arrays(grid, config):
    """``(E, B)`` at every node in the ``(r_hat, phi_hat, z_hat)`` frame."""
    r, phi = grid.mesh()
    shape = r.shape + (3,)
    if isinstance(config, Wei):
        e = np.zeros(shape)
        e[..., 0] = config.lam / r
        b = np.zeros(shape)
        b[..., 2] = config.b0
        return e, b
    e = np.empty(shape)
    b = np.empty(shape)
    for i in range(r.shape[0]):
        for j in range(r.shape[1]):
            ec, bc = eval_fields(config, (r[i, j], phi[i, j], 0.0))
            e[i, j] = to_local_frame(ec, phi[i, j])
            b[i, j] = to_local_frame(bc, phi[i, j])
    return e, b


def _potential_split(grid, config, params, basis):
    """Per-node cross-field and field-squared parts of the potential."""
    e, b = local_field_arrays(grid, config)
    full = closed_form_potential(e, b, params, basis).value
    squares = params.alpha_pol * np.sum(e * e, axis=-1) + params.chi * np.sum(b * b, axis=-1)
    local = -0.5 * np.multiply.outer(squares, basis.beta)
    return full - local, local


def _apply(m, v):
    return np.einsum("ij,...j->...i", m, v)


def _apply_nodes(m, v):
    return np.einsum("...ij,...j->...i", m, v)


def _kinetic(values, grid, params, basis):
    r = grid.r[:, None, None]
    d_r = radial_derivative(values, grid.dr)
    d_phi = azimuthal_derivative(values, grid.dphi)
    return (
        params.m * _apply(basis.beta, values)
        - 1j * _apply(basis.alpha[0], d_r + values / (2.0 * r))
        - 1j * _apply(basis.alpha[1], d_phi) / r
    )


def apply_full_operator(field, config, params, basis=None):
    """Discrete ``H psi`` including the cross-field potential."""
    if basis is None:
        basis = build_gamma_basis()
    grid = field.grid
    cross, local = _potential_split(grid, config, params, basis)
    out = _kinetic(field.values, grid, params, basis) + _apply_nodes(cross + local, field.values)
    return SpinorField(out, grid)


def apply_reduced_operator(field, config, params, basis=None):
    """Discrete ``H0 psi``: the cross-field term is dropped."""
    if basis is None:
        basis = build_gamma_basis()
    grid = field.grid
    _, local = _potential_split(grid, config, params, basis)
    out = _kinetic(field.values, grid, params, basis) + _apply_nodes(local, field.values)
    return SpinorField(out, grid)


def exact_operator(psi, grid, config, params, basis=None, reduced=False):
    """``H psi`` (or ``H0 psi``) at grid nodes using analytic derivatives."""
    if basis is None:
        basis = build_gamma_basis()
    r, phi = grid.mesh()
    v = psi.value(r, phi)
    cross, local = _potential_split(grid, config, params, basis)
    pot = local if reduced else cross + local
    rr = r[..., None]
    out = (
        params.m * _apply(basis.beta, v)
        - 1j * _apply(basis.alpha[0], psi.d_r(r, phi) + v / (2.0 * rr))
        - 1j * _apply(basis.alpha[1], psi.d_phi(r, phi)) / rr
        + _apply_nodes(pot, v)
    )
    return SpinorField(out, grid)


def inner_product(a, b):
    """``sum conj(a) . b r dr dphi`` over the grid."""
    grid = a.grid
    weight = grid.r[:, None] * grid.dr * grid.dphi
    return complex(np.sum(weight * np.sum(a.values.conj() * b.values, axis=-1)))


def convergence_sweep(psi, grid, config, params, levels=4, reduced=False, basis=None):
    """Max-abs discretisation error of the operator over successive refinements.

    Returns ``(spacings, errors, slope)`` with ``slope`` the least-squares
    log-log slope of error against radial spacing.
    """
    if basis is None:
        basis = build_gamma_basis()
    op = apply_reduced_operator if reduced else apply_full_operator
    spacings, errors = [], []
    for _ in range(levels):
        discrete = op(psi.sample(grid), config, params, basis)
        exact = exact_operator(psi, grid, config, params, basis, reduced=reduced)
        spacings.append(grid.dr)
        errors.append(maxabs(discrete.values - exact.values))
        grid = grid.refined()
    slope = float(np.polyfit(np.log(spacings), np.log(errors), 1)[0])
    return spacings, errors, slope


def phase_rate(config, params):
    """Angular rate ``c`` of the open-path phase ``Phi(phi) = c phi beta``."""
    if not isinstance(config, Wei):
        raise TypeError("phase factor is defined for the Wei configuration only")
    return -0.25 * (params.alpha_pol + params.chi) * config.lam * config.b0


def phase_factor_field(grid, config, params, basis=None):
    """``exp(i c phi beta)`` at every node, shape ``(nr, nphi, 4, 4)``.

    At ``phi = 2 pi`` the exponent is the full closed-loop phase.
    """
    if basis is None:
        basis = build_gamma_basis()
    c = phase_rate(config, params)
    per_angle = np.stack([exp_i(c * phi, basis.beta) for phi in grid.phi])
    return np.broadcast_to(per_angle, (grid.nr,) + per_angle.shape).copy()


@dataclass
class FactorizationReport:
    """Per-term split of ``H(U psi0) - U H0(psi0)`` with ``U = exp(i Phi(phi))``.

    ``terms`` holds per-node residual spinors, ``norms`` their max-abs norms.
    Only ``cross_term`` (phase derivative against the cross-field potential)
    is expected to vanish; ``radial`` and ``azimuthal_transport`` are nonzero
    in general because ``beta`` anticommutes with ``alpha^1`` and ``alpha^2``.
    """

    terms: dict
    norms: dict
    total: float


def _phase_pieces(grid, config, params, basis):
    c = phase_rate(config, params)
    u = phase_factor_field(grid, config, params, basis)
    du = 1j * c * np.einsum("ij,...jk->...ik", basis.beta, u)
    return u, du


def azimuthal_cancellation_residual(psi0, grid, config, params, basis=None):
    """Max-abs of ``-i (alpha^2/r) (dU/dphi) psi0 + V_cross U psi0`` over the grid."""
    return factorization_residual(psi0, grid, config, params, basis).norms["cross_term"]


def factorization_residual(psi0, grid, config, params, basis=None):
    """Evaluate ``H(U psi0) - U H0(psi0)`` term by term with exact derivatives."""
    if basis is None:
        basis = build_gamma_basis()
    r, phi = grid.mesh()
    rr = r[..., None]
    v = psi0.value(r, phi)
    dv_r = psi0.d_r(r, phi)
    dv_phi = psi0.d_phi(r, phi)
    u, du = _phase_pieces(grid, config, params, basis)
    cross, local = _potential_split(grid, config, params, basis)
    beta, a1, a2 = basis.beta, basis.alpha[0], basis.alpha[1]

    def U(x):
        return _apply_nodes(u, x)

    radial_arg = dv_r + v / (2.0 * rr)
    terms = {
        "mass": params.m * (_apply(beta, U(v)) - U(_apply(beta, v))),
        "radial": -1j * (_apply(a1, U(radial_arg)) - U(_apply(a1, radial_arg))),
        "azimuthal_transport": -1j * (_apply(a2, U(dv_phi)) - U(_apply(a2, dv_phi))) / rr,
        "field_squared": _apply_nodes(local, U(v)) - U(_apply_nodes(local, v)),
        "cross_term": -1j * _apply(a2, _apply_nodes(du, v)) / rr + _apply_nodes(cross, U(v)),
    }
    norms = {k: maxabs(t) for k, t in terms.items()}
    total = maxabs(sum(terms.values()))
    return FactorizationReport(terms=terms, norms=norms, total=total)


def full_factorization_residual(psi0, grid, config, params, basis=None):
    return factorization_residual(psi0, grid, config, params, basis)
