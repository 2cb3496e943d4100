"""Grid, weighted quadrature, gradient split, Hardy, elliptic operator."""

import math

import numpy as np
import pytest
from scipy.special import betaln

from logwave.model import ModelParams
from logwave.quad import (
    FieldState,
    ModeField,
    RadialGrid,
    ball_integral_exact_poly,
    ball_volume,
    elliptic_operator,
    gradient_split,
    hardy_check,
    integrate_ball,
    random_mode_field,
    sphere_area,
)
from logwave.simvars import SimilarityFrame

P3M1 = ModelParams(3, -1.0)


def grid3(npts=48):
    return RadialGrid(3, npts=npts)


class TestQuadrature:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_ball_volume(self, n):
        g = RadialGrid(n, npts=32)
        ones = np.ones(g.npts)
        res = g.integrate(ones, 0.0)
        exact = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
        assert res.value == pytest.approx(exact, abs=1e-10)
        assert res.converged

    @pytest.mark.parametrize("eta", [0.25, 0.5, 1.0])
    def test_weighted_volume_beta(self, eta):
        # int_B (1-|y|^2)^eta dy = (|S^{n-1}|/2) B(n/2, eta+1)
        g = grid3()
        res = g.integrate(np.ones(g.npts), eta)
        exact = 0.5 * sphere_area(3) * math.exp(betaln(1.5, eta + 1.0))
        assert res.value == pytest.approx(exact, abs=1e-8)

    def test_disc_with_eta1(self):
        g = RadialGrid(2, npts=24)
        res = integrate_ball(np.ones(g.npts), "rho_eta", g, eta=1.0)
        assert res.value == pytest.approx(math.pi / 2, rel=1e-12)

    def test_weight_cancellation(self):
        # field (1-r^2) against rho/(1-|y|^2) equals the plain rho integral
        g = grid3()
        s = 20.0
        res1 = integrate_ball(1.0 - g.u, "rho_over_1my2", g, params=P3M1, s=s)
        res2 = integrate_ball(np.ones(g.npts), "rho", g, params=P3M1, s=s)
        # floor set by barycentric extrapolation to the singular-rule nodes
        assert res1.value == pytest.approx(res2.value, rel=1e-10)

    def test_divergent_weight_flagged(self):
        g = grid3()
        a0 = ModelParams(3, 0.0, theorem_mode=False)
        res = integrate_ball(np.ones(g.npts), "rho_over_1my2", g, params=a0, s=20.0)
        assert res.divergent and not res.converged

    def test_matches_exact_poly_oracle(self):
        # machinery vs the closed-form Beta oracle on random polynomials
        rng = np.random.default_rng(0)
        g = grid3()
        for e in (-0.9, -0.5, 0.0, 0.37, 1.5):
            coeffs = rng.uniform(-1, 1, 5)
            vals = np.polynomial.polynomial.polyval(g.u, coeffs)
            exact = ball_integral_exact_poly(coeffs, e, 3)
            assert g.integrate(vals, e).value == pytest.approx(exact, rel=1e-12)

    def test_unresolved_field_flagged(self):
        g = RadialGrid(3, npts=24)
        rough = np.sin(200.0 * g.u)  # far beyond the grid resolution
        assert not g.integrate(rough, 0.0).converged

    def test_interpolation_spectral(self):
        g = grid3()
        f = np.cos(math.pi * g.u / 2) * np.exp(g.u)
        ut = np.linspace(0.01, 0.99, 313)
        err = np.max(np.abs(g.interpolate(f, ut) - np.cos(math.pi * ut / 2) * np.exp(ut)))
        assert err < 1e-12


class TestGradientSplit:
    def test_radial_field_no_tangential(self):
        g = grid3()
        sp = gradient_split(np.sin(g.u), g)
        assert np.all(sp.tangential_amp == 0.0)
        # w = sin(u):  w_r = 2r cos(u)
        np.testing.assert_allclose(sp.radial_amp, 2 * g.r * np.cos(g.u), rtol=1e-9)

    def test_constant_field(self):
        g = grid3()
        sp = gradient_split(np.ones(g.npts), g)
        assert np.max(np.abs(sp.radial_amp)) < 1e-10

    def test_mode1_identities(self):
        # w = r cos(theta):  |grad w|^2 = 1,  y.grad w = r cos(theta)
        g = RadialGrid(2, npts=24)
        fld = ModeField(np.array([1.0]), m=1)
        sp = gradient_split(fld, g)
        for theta in (0.0, 0.4, 1.1):
            np.testing.assert_allclose(sp.grad_sq(theta), np.ones(g.npts), atol=1e-12)
            np.testing.assert_allclose(
                sp.y_dot_grad(g.r, theta), g.r * math.cos(theta), atol=1e-12
            )

    @pytest.mark.parametrize("m", [0, 1, 2])
    def test_pointwise_split_identities(self, m):
        # |y|^2|grad w|^2-(y.grad w)^2 = |y|^2|grad_th w|^2  and the (1-|y|^2) form
        g = RadialGrid(2, npts=24)
        fld = random_mode_field(np.random.default_rng(m), m)
        sp = gradient_split(fld, g)
        u = g.u
        for theta in (0.2, 0.9):
            g2 = sp.grad_sq(theta)
            yd = sp.y_dot_grad(g.r, theta)
            t2 = sp.tangential_sq(theta)
            r2 = sp.radial_part_sq(theta)
            scale = np.max(np.abs(g2)) + 1.0
            np.testing.assert_allclose(u * g2 - yd**2, u * t2, atol=1e-10 * scale)
            np.testing.assert_allclose(g2 - yd**2, t2 + (1 - u) * r2, atol=1e-8 * scale)


class TestHardy:
    def test_zero_field(self):
        g = grid3()
        rep = hardy_check(np.zeros(g.npts), 0.5, g)
        assert rep.lhs == rep.rhs == rep.slack == 0.0

    def test_constant_field_oracle(self):
        # h = 1, eta = 1, n = 3: lhs = int |y|^2 dy = 4pi/5, rhs = 3 int (1-r^2) = 8pi/5
        g = grid3()
        rep = hardy_check(np.ones(g.npts), 1.0, g)
        assert rep.lhs == pytest.approx(4 * math.pi / 5, rel=1e-10)
        assert rep.rhs == pytest.approx(8 * math.pi / 5, rel=1e-10)
        assert rep.slack >= 0

    def test_random_bumps(self):
        g = grid3(64)
        rng = np.random.default_rng(2)
        for k in range(60):
            h = rng.uniform(0.2, 2.0) * np.exp(
                -(((g.u - rng.uniform(0, 0.9)) / rng.uniform(0.1, 0.5)) ** 2)
            )
            eta = (0.1, 0.5, 1.0)[k % 3]
            rep = hardy_check(h, eta, g)
            scale = abs(rep.lhs) + abs(rep.rhs) + 1
            assert rep.slack >= -1e-8 * scale
            assert rep.corollary_slack >= -1e-8 * scale


class TestElliptic:
    def test_constant_is_killed(self):
        g = grid3()
        out = elliptic_operator(np.ones(g.npts), 0.3, g)
        assert np.max(np.abs(out)) < 1e-9

    def test_hand_oracle_quadratic(self):
        # w = 1 - r^2, weight exponent 0 (flat), n = 3:
        # div((1-r^2) grad w - ...) = -2n + 2(n+2) r^2
        g = grid3()
        out = elliptic_operator(1.0 - g.u, 0.0, g)
        np.testing.assert_allclose(out, -6.0 + 10.0 * g.u, atol=1e-9)

    def test_symbolic_oracle(self):
        # general exponent via sympy on the closed radial form
        sympy = pytest.importorskip("sympy")
        r, e = sympy.symbols("r e", positive=True)
        n = 3
        w = sympy.cos(sympy.pi * r**2 / 2)
        rho = (1 - r**2) ** sympy.Rational(3, 10)
        expr = sympy.simplify(
            sympy.diff(r ** (n - 1) * rho * (1 - r**2) * sympy.diff(w, r), r)
            / (rho * r ** (n - 1))
        )
        g = grid3(64)
        out = elliptic_operator(np.cos(math.pi * g.u / 2), 0.3, g)
        fn = sympy.lambdify(r, expr, "numpy")
        np.testing.assert_allclose(out, fn(g.r), rtol=1e-7, atol=1e-8)

    def test_tensor_grid_fd_oracle(self):
        # unreduced divergence form div(rho grad w - rho (y.grad w)y)/rho on a
        # 2D tensor grid, 4th-order FD, against the radial reduction
        n, e = 2, 0.4
        W = lambda u: np.cos(math.pi * u / 2.0)
        dW = lambda u: -math.pi / 2 * np.sin(math.pi * u / 2.0)

        def V(x, z):
            u = x * x + z * z
            fac = 2.0 * dW(u) * (1 - u) ** (e + 1.0)
            return fac * x, fac * z

        def div_fd(x, z, h=1e-3):
            c = [1.0, -8.0, 8.0, -1.0]
            xs = [x + 2 * h, x + h, x - h, x - 2 * h]
            zs = [z + 2 * h, z + h, z - h, z - 2 * h]
            dvx = sum(ci * V(xi, z)[0] for ci, xi in zip(c, xs)) / (-12.0 * h)
            dvz = sum(ci * V(x, zi)[1] for ci, zi in zip(c, zs)) / (-12.0 * h)
            return dvx + dvz

        g = RadialGrid(n, npts=48)
        out = elliptic_operator(W(g.u), e, g)
        for xp, zp in [(0.3, 0.2), (0.1, 0.5), (0.45, 0.45)]:
            u = xp * xp + zp * zp
            rho = (1 - u) ** e
            val = div_fd(xp, zp) / rho
            here = g.interpolate(out, np.array([u])).item()
            assert here == pytest.approx(val, rel=1e-7, abs=1e-7)

    def test_symmetry_with_degenerate_weight(self):
        # int (Lw) v rho dy = int (Lv) w rho dy (no boundary term: rho(1-r^2) -> 0)
        g = grid3(64)
        rng = np.random.default_rng(4)
        e = 0.12
        for _ in range(5):
            w = np.polynomial.polynomial.polyval(g.u, rng.uniform(-1, 1, 5))
            v = np.polynomial.polynomial.polyval(g.u, rng.uniform(-1, 1, 5))
            lw = elliptic_operator(w, e, g)
            lv = elliptic_operator(v, e, g)
            i1 = g.integrate(lw * v, e).value
            i2 = g.integrate(lv * w, e).value
            assert i1 == pytest.approx(i2, rel=1e-7, abs=1e-9)

    def test_refinement_convergence(self):
        # spectral design order: error collapses fast with node count
        target = lambda u: np.cos(3 * math.pi * u) * np.exp(u)
        exact_grid = RadialGrid(3, npts=96)
        ref = elliptic_operator(target(exact_grid.u), 0.2, exact_grid)
        errs = []
        for npts in (12, 24, 48):
            g = RadialGrid(3, npts=npts)
            out = elliptic_operator(target(g.u), 0.2, g)
            ref_here = exact_grid.interpolate(ref, g.u)
            errs.append(np.max(np.abs(out - ref_here)))
        # one doubling drops the error by ~1e8 before hitting roundoff
        assert errs[1] < 1e-6 * errs[0]
        assert errs[2] < 1e-7


class TestFieldState:
    def make_state(self, npts=48):
        g = grid3(npts)
        fr = SimilarityFrame(0.0, math.exp(-14.0), P3M1)
        w = 2.0 + 0.1 * np.exp(-((g.u - 0.3) ** 2) / 0.05)
        z = 0.01 * np.ones(npts)
        return FieldState(w, z, 20.0, g, fr)

    def test_energy_norm_finite(self):
        st = self.make_state()
        res = st.energy_norm_sq()
        assert res.converged and math.isfinite(res.value) and res.value > 0

    def test_h1l2_norm_constant_field(self):
        st = self.make_state()
        st.w[:] = 2.0
        st.dw_ds[:] = 0.0
        h1, l2 = st.h1_l2_norms()
        assert h1 == pytest.approx(2.0 * math.sqrt(ball_volume(3)), rel=1e-9)
        assert l2 == 0.0

    def test_boundary_extrapolation(self):
        g = grid3(48)
        vals = 1.0 - g.u  # vanishes at the boundary
        assert g.boundary_value(vals) == pytest.approx(0.0, abs=1e-10)
        v, ok = g.boundary_value_checked(np.cos(g.u))
        assert ok and v == pytest.approx(math.cos(1.0), rel=1e-8)
