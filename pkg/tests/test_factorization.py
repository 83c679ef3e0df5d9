import math

import numpy as np
import pytest

from dipolephase.fields import DipoleParams, Uniform, Wei
from dipolephase.factorization import (
    GridError,
    PolarGrid,
    SpinorField,
    apply_full_operator,
    apply_reduced_operator,
    azimuthal_cancellation_residual,
    azimuthal_derivative,
    azimuthal_mode,
    convergence_sweep,
    exact_operator,
    full_factorization_residual,
    gaussian_ring_mode,
    inner_product,
    phase_factor_field,
    phase_rate,
    radial_derivative,
    random_manufactured,
)
from dipolephase.holonomy import analytic_phase
from dipolephase.spinor import IDENTITY, build_gamma_basis, exp_i, maxabs

basis = build_gamma_basis()
GRID = PolarGrid(0.5, 3.0, 21, 32)
WEI = Wei(1.0, 1.0)
CONSTANT = azimuthal_mode(np.ones_like, np.zeros_like, 0, [1, 0, 0, 0])
SMOOTH = azimuthal_mode(lambda r: np.sin(1.3 * r) + 2, lambda r: 1.3 * np.cos(1.3 * r), 2, [1, 0.5j, 0.2, -0.3])


class TestGrid:
    @pytest.mark.parametrize(
        "args", [(0.0, 1.0, 10, 8), (1.0, 0.5, 10, 8), (0.5, 1.0, 4, 8), (0.5, 1.0, 10, 7), (0.5, 1.0, 10, 4)]
    )
    def test_rejects(self, args):
        with pytest.raises(GridError):
            PolarGrid(*args)

    def test_refined(self):
        g = GRID.refined()
        assert g.nr == 41 and g.nphi == 64 and g.dr == pytest.approx(GRID.dr / 2)

    def test_field_shape_checked(self):
        with pytest.raises(GridError):
            SpinorField(np.zeros((3, 3, 4)), GRID)


class TestStencils:
    def test_polynomial_exact_radially(self):
        # fourth-order stencils differentiate quartics exactly
        r = GRID.r
        v = (r**4 - 2 * r**3 + r)[:, None, None] * np.ones((1, 3, 2))
        d = radial_derivative(v, GRID.dr)
        assert np.allclose(d[:, 0, 0], 4 * r**3 - 6 * r**2 + 1, atol=1e-10)

    def test_periodic_fourier_mode(self):
        phi = GRID.phi
        v = np.exp(3j * phi)[None, :, None] * np.ones((2, 1, 1))
        d = azimuthal_derivative(v, GRID.dphi)
        # modified wavenumber of the five-point stencil
        h = GRID.dphi
        k_eff = (8 * math.sin(3 * h) - math.sin(6 * h)) / (6 * h)
        assert np.allclose(d, 1j * k_eff * v, atol=1e-12)


class TestOperators:
    def test_zero_field(self):
        zero = SpinorField(np.zeros((GRID.nr, GRID.nphi, 4)), GRID)
        params = DipoleParams(m=1.0, alpha_pol=1.0)
        assert maxabs(apply_full_operator(zero, WEI, params, basis).values) == 0
        assert maxabs(apply_reduced_operator(zero, WEI, params, basis).values) == 0

    def test_constant_spinor_by_hand(self):
        s = np.array([1, 0, 0, 0], dtype=complex)
        field = CONSTANT.sample(GRID)
        out = apply_full_operator(field, WEI, DipoleParams(m=1.0), basis).values
        for i, r in enumerate(GRID.r):
            expected = basis.beta @ s - 1j * basis.alpha1 @ s / (2 * r)
            assert np.allclose(out[i], expected[None, :], atol=1e-12)

    def test_reduced_equals_full_without_coupling(self):
        field = SMOOTH.sample(GRID)
        params = DipoleParams(m=0.7)
        full = apply_full_operator(field, WEI, params, basis).values
        red = apply_reduced_operator(field, WEI, params, basis).values
        assert np.array_equal(full, red)

    def test_difference_is_cross_term(self):
        field = SMOOTH.sample(GRID)
        params = DipoleParams(m=0.7, alpha_pol=1.3)
        diff = apply_full_operator(field, WEI, params, basis).values - apply_reduced_operator(field, WEI, params, basis).values
        r = GRID.r[:, None, None]
        coeff = -0.25 * 1.3 * WEI.lam * WEI.b0
        expected = np.einsum("ij,...j->...i", basis.beta @ basis.alpha2, field.values) * coeff / r
        assert maxabs(diff - expected) < 1e-13

    def test_linear(self):
        rng = np.random.default_rng(0)
        a = SpinorField(rng.normal(size=(GRID.nr, GRID.nphi, 4)), GRID)
        b = SpinorField(rng.normal(size=(GRID.nr, GRID.nphi, 4)) * 1j, GRID)
        params = DipoleParams(m=1.0, alpha_pol=0.4)
        lhs = apply_full_operator(a + 2.0 * b, WEI, params, basis).values
        rhs = apply_full_operator(a, WEI, params, basis).values + 2.0 * apply_full_operator(b, WEI, params, basis).values
        assert maxabs(lhs - rhs) < 1e-12 * maxabs(lhs)

    def test_uniform_config_accepted(self):
        cfg = Uniform(e=(0.3, 0.0, 0.0), b=(0.0, 0.0, 2.0))
        params = DipoleParams(m=1.0, alpha_pol=1.0)
        discrete = apply_full_operator(SMOOTH.sample(GRID.refined()), cfg, params, basis).values
        exact = exact_operator(SMOOTH, GRID.refined(), cfg, params, basis).values
        assert maxabs(discrete - exact) < 1e-3

    @pytest.mark.parametrize("reduced", [False, True])
    def test_fourth_order_convergence(self, reduced):
        params = DipoleParams(m=1.0, alpha_pol=1.0)
        _, errors, slope = convergence_sweep(SMOOTH, PolarGrid(0.5, 3.0, 11, 16), WEI, params, 4, reduced, basis)
        assert errors[-1] < errors[0]
        assert abs(slope - 4.0) <= 0.2

    def test_hermiticity_proxy_reduced(self):
        # with the cylindrical measure r dr dphi the reduced operator is
        # symmetric up to discretisation error for fields vanishing at the edges
        params = DipoleParams(m=1.0, alpha_pol=0.8)
        a = gaussian_ring_mode(1.75, 0.25, 1, [1, 0.3j, 0, 0.2])
        b = gaussian_ring_mode(1.8, 0.2, 1, [0, 1, -0.5, 0.1j])
        gaps = []
        grid = PolarGrid(0.5, 3.0, 21, 16)
        for _ in range(3):
            fa, fb = a.sample(grid), b.sample(grid)
            ha = apply_reduced_operator(fa, WEI, params, basis)
            hb = apply_reduced_operator(fb, WEI, params, basis)
            gaps.append(abs(inner_product(fa, hb) - inner_product(ha, fb)))
            grid = grid.refined()
        assert gaps[2] < gaps[1] < gaps[0]
        assert gaps[2] < 1e-4

    def test_cross_term_is_anti_hermitian(self):
        params = DipoleParams(m=1.0, alpha_pol=0.8)
        a = gaussian_ring_mode(1.75, 0.25, 1, [1, 0.3j, 0, 0.2]).sample(GRID)
        b = gaussian_ring_mode(1.8, 0.2, 1, [0, 1, -0.5, 0.1j]).sample(GRID)
        full_gap = inner_product(a, apply_full_operator(b, WEI, params, basis)) - inner_product(
            apply_full_operator(a, WEI, params, basis), b
        )
        red_gap = inner_product(a, apply_reduced_operator(b, WEI, params, basis)) - inner_product(
            apply_reduced_operator(a, WEI, params, basis), b
        )
        cross_b = apply_full_operator(b, WEI, params, basis) - apply_reduced_operator(b, WEI, params, basis)
        assert abs(full_gap - red_gap - 2 * inner_product(a, cross_b)) < 1e-12


class TestPhaseFactor:
    def test_identity_at_zero_angle(self):
        u = phase_factor_field(GRID, WEI, DipoleParams(alpha_pol=1.0), basis)
        assert maxabs(u[:, 0] - IDENTITY) == 0

    def test_full_turn(self):
        c = phase_rate(WEI, DipoleParams(alpha_pol=1.0))
        assert maxabs(exp_i(c * 2 * math.pi, basis.beta) + 1j * basis.beta) < 1e-13

    def test_consistent_with_holonomy(self):
        params = DipoleParams(alpha_pol=0.7, chi=0.2)
        cfg = Wei(1.3, 0.6)
        assert phase_rate(cfg, params) * 2 * math.pi == pytest.approx(analytic_phase(cfg, params).c_beta, rel=1e-14)

    def test_rejects_non_wei(self):
        with pytest.raises(TypeError):
            phase_factor_field(GRID, Uniform(), DipoleParams(alpha_pol=1.0), basis)


class TestCancellation:
    def test_zero_polarizability(self):
        assert azimuthal_cancellation_residual(SMOOTH, GRID, WEI, DipoleParams(m=1.0), basis) == 0

    def test_constant_spinor(self):
        grid = PolarGrid(1.0, 2.0, 5, 8)
        assert azimuthal_cancellation_residual(CONSTANT, grid, WEI, DipoleParams(alpha_pol=1.0), basis) < 1e-12

    def test_random_manufactured(self):
        rng = np.random.default_rng(2024)
        for _ in range(10):
            psi = random_manufactured(rng)
            lam, b0 = rng.uniform(0.1, 3, 2)
            params = DipoleParams(m=1.0, alpha_pol=rng.uniform(-2, 2), chi=rng.uniform(-1, 1))
            assert azimuthal_cancellation_residual(psi, GRID, Wei(lam, b0), params, basis) < 1e-12

    def test_cancelling_pieces_are_individually_large(self):
        # guard against a trivially-zero residual: the phase-derivative piece
        # alone is |c| / r_min = 0.5 here
        params = DipoleParams(alpha_pol=1.0)
        u = phase_factor_field(GRID, WEI, params, basis)
        c = phase_rate(WEI, params)
        du = 1j * c * np.einsum("ij,...jk->...ik", basis.beta, u)
        r, phi = GRID.mesh()
        piece = -1j * np.einsum("ij,...jk,...k->...i", basis.alpha2, du, CONSTANT.value(r, phi)) / r[..., None]
        assert maxabs(piece) == pytest.approx(0.5, rel=1e-12)
        assert azimuthal_cancellation_residual(CONSTANT, GRID, WEI, params, basis) < 1e-12


class TestFullResidual:
    def test_zero_polarizability(self):
        report = full_factorization_residual(SMOOTH, GRID, WEI, DipoleParams(m=1.0), basis)
        assert all(v == 0 for v in report.norms.values())
        assert report.total == 0

    def test_radial_vanishes_where_phase_is_identity(self):
        report = full_factorization_residual(CONSTANT, GRID, WEI, DipoleParams(m=1.0, alpha_pol=1.0), basis)
        assert maxabs(report.terms["radial"][:, 0]) == 0
        assert report.norms["radial"] > 0.1

    def test_radial_closed_form(self):
        # for a constant spinor only the 1/(2r) piece survives:
        # |[alpha^1, U]| = 2 |sin(c phi)|
        report = full_factorization_residual(CONSTANT, GRID, WEI, DipoleParams(m=1.0, alpha_pol=1.0), basis)
        c = phase_rate(WEI, DipoleParams(alpha_pol=1.0))
        expected = np.max(np.abs(np.sin(c * GRID.phi))) * 2 / (2 * GRID.r_min)
        assert report.norms["radial"] == pytest.approx(expected, rel=1e-12)

    def test_golden_constant_spinor(self):
        report = full_factorization_residual(
            CONSTANT, PolarGrid(0.5, 3.0, 11, 16), WEI, DipoleParams(m=1.0, alpha_pol=1.0), basis
        )
        golden = {
            "mass": 0.0,
            "radial": 1.9903694533443943,
            "azimuthal_transport": 0.0,
            "field_squared": 0.0,
            "cross_term": 0.0,
        }
        for key, value in golden.items():
            assert report.norms[key] == pytest.approx(value, abs=1e-12)
        assert report.total == pytest.approx(1.9903694533443943, abs=1e-12)

    def test_transport_nonzero_for_angular_dependence(self):
        report = full_factorization_residual(SMOOTH, GRID, WEI, DipoleParams(m=1.0, alpha_pol=1.0), basis)
        assert report.norms["azimuthal_transport"] > 0.1
        assert report.norms["mass"] == 0
        assert report.norms["field_squared"] < 1e-14
