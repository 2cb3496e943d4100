"""Nonlinearity family: direct-quadrature oracles, closed-form constants,
splitting identity, and tail asymptotics."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from logwave.model import (
    AppendixBoundReport,
    ModelParams,
    antiderivative_f,
    appendix_bound_check,
    build_nonlinearity_table,
    f1,
    f2,
    fit_appendix_constant,
    kappa,
    nonlinearity,
    psi,
    scaled_potential,
)
from logwave.simvars import log_weight_phi


def f_oracle(u: float, params: ModelParams) -> float:
    """Independent oracle: adaptive quadrature of the defining integral."""
    val, _ = quad(
        lambda v: v**params.p_c * math.log(v * v + 2.0) ** params.a,
        0.0,
        abs(u),
        limit=400,
        epsabs=0.0,
        epsrel=1e-13,
    )
    return val


P3M1 = ModelParams(3, -1.0)
TABLE = build_nonlinearity_table(P3M1)


class TestParams:
    def test_pc_values(self):
        assert ModelParams(3, -1.0).p_c == 3.0
        assert ModelParams(2, -1.0).p_c == 5.0
        assert ModelParams(5, -1.0).p_c == 2.0

    def test_validation(self):
        with pytest.raises(ValueError):
            ModelParams(1, -1.0)
        with pytest.raises(ValueError):
            ModelParams(3, 0.5)  # theorem mode demands a < 0
        ModelParams(3, 0.5, theorem_mode=False)  # exploratory is fine


class TestNonlinearity:
    def test_origin_and_units(self):
        assert nonlinearity(0.0, P3M1) == 0.0
        assert nonlinearity(1.0, ModelParams(3, -2.0, theorem_mode=False).__class__(3, 0.0, False)) == pytest.approx(1.0)
        # frozen oracle: 1/ln 3
        assert nonlinearity(1.0, P3M1) == pytest.approx(0.9102392266268373, rel=1e-14)

    def test_odd(self):
        us = np.linspace(-8.0, 8.0, 41)
        np.testing.assert_allclose(nonlinearity(-us, P3M1), -nonlinearity(us, P3M1), rtol=1e-14)

    def test_saturation_flag(self):
        val, sat = nonlinearity(1e300, P3M1, return_flag=True)
        assert sat and math.isfinite(val)


class TestAntiderivative:
    def test_zero_and_even(self):
        assert antiderivative_f(0.0, TABLE) == 0.0
        assert antiderivative_f(-3.0, TABLE) == antiderivative_f(3.0, TABLE)

    def test_against_quadrature_oracle(self):
        # frozen from the oracle: int_0^2 v^3 / ln(v^2+2) dv
        frozen = 2.7089975252815255
        assert f_oracle(2.0, P3M1) == pytest.approx(frozen, rel=1e-12)
        assert antiderivative_f(2.0, TABLE) == pytest.approx(frozen, rel=1e-10)

    @pytest.mark.parametrize("u", [0.01, 0.3, 1.0, 2.0, 7.7, 31.0, 1e3, 5e5, 2e7])
    def test_table_matches_oracle_samples(self, u):
        assert antiderivative_f(u, TABLE) == pytest.approx(f_oracle(u, P3M1), rel=1e-10)

    @pytest.mark.parametrize("n,a", [(2, -0.5), (4, -2.0)])
    def test_other_parameter_sets(self, n, a):
        params = ModelParams(n, a)
        table = build_nonlinearity_table(params)
        for u in (0.5, 3.0, 111.0):
            assert table.f(u) == pytest.approx(f_oracle(u, params), rel=1e-10)

    def test_increasing(self):
        us = np.linspace(0.01, 50.0, 300)
        vals = antiderivative_f(us, TABLE)
        assert np.all(np.diff(vals) > 0)

    def test_derivative_consistency(self):
        # d/du f = nonlinearity, central differences away from 0
        for u in (0.5, 1.7, 4.0, 40.0, 1e4):
            h = 1e-5 * max(u, 1.0)
            fd = (antiderivative_f(u + h, TABLE) - antiderivative_f(u - h, TABLE)) / (2 * h)
            assert fd == pytest.approx(nonlinearity(u, P3M1), rel=1e-7)


class TestSplitting:
    def test_f1_values(self):
        assert f1(0.0, P3M1) == 0.0
        assert f1(1.0, P3M1) == pytest.approx(0.10356693121127786, rel=1e-14)
        assert f1(2.0, ModelParams(3, 0.0, theorem_mode=False)) == 0.0

    def test_splitting_identity(self):
        # f = |u|^(p+1) ln^a(u^2+2)/(p+1) + f1 + f2 at 1e-12 relative
        p, a = P3M1.p_c, P3M1.a
        for u in (0.2, 1.0, 3.0, 42.0, 9e3, 1e6, 1e9):
            main = abs(u) ** (p + 1) * math.log(u * u + 2.0) ** a / (p + 1)
            lhs = main + f1(u, P3M1) + f2(u, TABLE)
            assert lhs == pytest.approx(antiderivative_f(u, TABLE), rel=1e-12)

    def test_f2_oracle_value(self):
        # frozen: defining combination with the quadrature oracle at u=5
        assert f2(5.0, TABLE) == pytest.approx(1.5849961813965603, rel=1e-9)

    def test_f2_tail_ratio_converges(self):
        # frozen oracle sweep: ratio to |u|^(p+1) ln^(a-2) approaches 4a(a-1)/(p+1)^3
        frozen = {1e3: 0.14098837147691262, 1e4: 0.13646421921226604, 1e5: 0.13393896435637806}
        limit = 4 * P3M1.a * (P3M1.a - 1) / (P3M1.p_c + 1) ** 3
        prev = math.inf
        for u, expected in frozen.items():
            ratio = f2(u, TABLE) / (u**4 * math.log(u * u + 2.0) ** (P3M1.a - 2))
            assert ratio == pytest.approx(expected, rel=1e-6)
            assert abs(ratio - limit) < abs(prev - limit)
            prev = ratio
        assert prev == pytest.approx(limit, rel=0.1)

    def test_tail_dominance_trend(self):
        # f (p+1) / (|u|^(p+1) ln^a(u^2+2)) -> 1, monotone over decades
        p, a = P3M1.p_c, P3M1.a
        prev = math.inf
        for u in (1e2, 1e3, 1e4, 1e5, 1e6):
            ratio = antiderivative_f(u, TABLE) * (p + 1) / (u ** (p + 1) * math.log(u * u + 2) ** a)
            assert abs(ratio - 1.0) < abs(prev - 1.0)
            prev = ratio
        assert 0.9 <= prev <= 1.1


class TestKappaPsi:
    def test_closed_forms(self):
        assert kappa(ModelParams(3, 0.0, theorem_mode=False)) == pytest.approx(math.sqrt(2), rel=1e-14)
        assert kappa(P3M1) == pytest.approx(2.0, rel=1e-14)
        assert kappa(ModelParams(2, -1.0)) == pytest.approx(0.75**0.25, rel=1e-14)

    def test_kappa_consistency_identity(self):
        # kappa^(p-1) (4/(p-1))^a = 2(p+1)/(p-1)^2 for random (n, a)
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = int(rng.integers(2, 8))
            a = float(-rng.uniform(0.05, 3.0))
            params = ModelParams(n, a)
            p = params.p_c
            lhs = kappa(params) ** (p - 1) * (4.0 / (p - 1)) ** a
            assert lhs == pytest.approx(2 * (p + 1) / (p - 1) ** 2, rel=1e-12)

    def test_psi_values(self):
        p0 = ModelParams(3, 0.0, theorem_mode=False)
        assert psi(0.0, math.exp(-1.0), p0) == pytest.approx(math.e, rel=1e-13)
        assert psi(0.0, math.exp(-4.0), P3M1) == pytest.approx(2 * math.e**4, rel=1e-13)
        # n=2, a=-2: exponents are -2/(p-1) = -1/2 and -a/(p-1) = +1/2
        val = psi(0.0, 0.5, ModelParams(2, -2.0))
        assert val == pytest.approx(0.5**-0.5 * math.log(2.0) ** 0.5, rel=1e-13)

    def test_psi_domain(self):
        with pytest.raises(ValueError):
            psi(0.0, 1.5, P3M1)
        with pytest.raises(ValueError):
            psi(2.0, 1.0, P3M1)


class TestScaledPotential:
    def test_zero(self):
        assert scaled_potential(0.0, 30.0, 20.0, TABLE) == 0.0

    def test_matches_direct_at_moderate_s(self):
        # at small s, phi is representable: compare to the direct formula
        params = P3M1
        s = 2.0
        lp = log_weight_phi(s, params)
        phi = math.exp(lp)
        for w in (0.3, 1.0, 2.0):
            direct = s ** (-params.a) * f_oracle(phi * w, params) / phi ** (params.p_c + 1)
            assert scaled_potential(w, lp, s, TABLE) == pytest.approx(direct, rel=1e-9)

    def test_large_s_finite(self):
        lp = log_weight_phi(500.0, P3M1)  # phi overflows double here
        val = scaled_potential(2.0, lp, 500.0, TABLE)
        assert math.isfinite(val) and val > 0


class TestAppendixBounds:
    def test_zero_slack(self):
        rep = appendix_bound_check(0.0, 10.0, P3M1, "equiv5", constant=0.0, eps=0.1)
        assert rep.slack >= 0.0

    def test_fitted_constants_finite(self):
        for which in ("equiv1", "equiv2", "equiv3", "equiv6"):
            c = fit_appendix_constant(which, P3M1, table=TABLE)
            assert math.isfinite(c) and c > 0

    def test_equiv1_two_sided(self):
        # lhs/rhs ratio bounded between fitted 1/C and C across the sweep
        c = fit_appendix_constant("equiv1", P3M1, table=TABLE)
        for z in np.geomspace(1e-3, 1e6, 25):
            rep = appendix_bound_check(z, 20.0, P3M1, "equiv1", constant=c, table=TABLE)
            assert rep.slack >= 0.0

    def test_equiv5_with_fitted_constant(self):
        eps = 0.05
        c = fit_appendix_constant("equiv5", P3M1, eps=eps, table=TABLE)
        assert math.isfinite(c)
        for z in (0.0, 0.5, 3.0, 1e2, 1e5):
            rep = appendix_bound_check(z, 25.0, P3M1, "equiv5", constant=c * 1.000001 + 1e-12, eps=eps, table=TABLE)
            assert rep.slack >= -1e-9 * (abs(rep.lhs) + 1)

    def test_equiv6_sample(self):
        c = fit_appendix_constant("equiv6", P3M1, table=TABLE)
        rep = appendix_bound_check(10.0, 20.0, P3M1, "equiv6", constant=c * 1.000001, table=TABLE)
        assert rep.slack >= 0.0

    def test_preconditions(self):
        with pytest.raises(ValueError):
            appendix_bound_check(1.0, 0.5, P3M1, "equiv5")
        with pytest.raises(ValueError):
            appendix_bound_check(1.0, 5.0, ModelParams(3, 0.0, theorem_mode=False), "equiv6")
