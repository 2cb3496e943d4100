"""Similarity frame: weight functions, transforms, cones."""

import math

import numpy as np
import pytest

from logwave.model import ModelParams, kappa
from logwave.ode import integrate_ode
from logwave.simvars import (
    SimilarityFrame,
    log_phi2w2p2,
    log_weight_phi,
    phi_saturates,
    weight_alpha,
    weight_gamma,
    weight_phi,
    weight_rho,
)

P3M1 = ModelParams(3, -1.0)


class TestWeights:
    def test_alpha(self):
        assert weight_alpha(10.0, P3M1) == pytest.approx(0.05, rel=1e-14)
        assert weight_alpha(1e4, P3M1) < weight_alpha(10.0, P3M1)
        assert weight_alpha(7.0, ModelParams(3, 0.0, theorem_mode=False)) == 0.0
        with pytest.raises(ValueError):
            weight_alpha(0.0, P3M1)

    def test_alpha_gamma_scaled_bounded(self):
        # s*gamma -> a(p+5)/(p-1)^2 = -2 here; s*alpha = -a/(p-1) = 1/2
        ss = np.geomspace(10.0, 1e4, 50)
        for s in ss:
            assert weight_alpha(s, P3M1) > 0
            assert abs(weight_gamma(s, P3M1)) * s <= 2.5
            assert weight_alpha(s, P3M1) * s <= 1.0

    def test_gamma_value(self):
        # a(p+5)/((p-1)^2 s) - a(p+a-1)/((p-1)^2 s^2) at n=3, a=-1, s=10
        assert weight_gamma(10.0, P3M1) == pytest.approx(-0.2 + 0.0025, rel=1e-13)
        assert weight_gamma(3.0, ModelParams(3, 0.0, theorem_mode=False)) == 0.0

    def test_phi(self):
        assert weight_phi(10.0, P3M1) == pytest.approx(math.e**10 * 10**0.5, rel=1e-13)
        assert weight_phi(1.0, ModelParams(3, 0.0, theorem_mode=False)) == pytest.approx(math.e)
        assert weight_phi(1.0, P3M1) >= 1.0

    def test_log_phi_exact(self):
        p = P3M1.p_c
        for s in (1.0, 17.0, 350.0, 5e4):
            res = log_weight_phi(s, P3M1) - 2 * s / (p - 1) + P3M1.a / (p - 1) * math.log(s)
            assert res == pytest.approx(0.0, abs=1e-12 * max(1.0, 2 * s / (p - 1)))

    def test_phi_overflow(self):
        assert phi_saturates(800.0, P3M1)
        with pytest.raises(OverflowError):
            weight_phi(800.0, P3M1)
        assert math.isfinite(log_weight_phi(800.0, P3M1))

    def test_rho(self):
        assert weight_rho(0.0, 10.0, P3M1) == 1.0
        assert weight_rho(0.6, 10.0, P3M1) == pytest.approx(0.64**0.05, rel=1e-13)
        assert weight_rho(0.9, None, P3M1, eta=1.0) == pytest.approx(0.19, rel=1e-13)
        with pytest.raises(ValueError):
            weight_rho(1.0, 10.0, P3M1)

    def test_log_phi2w2p2(self):
        lp = log_weight_phi(5.0, P3M1)
        phi = math.exp(lp)
        for w in (0.0, 1e-8, 0.3, 2.0):
            assert log_phi2w2p2(lp, w) == pytest.approx(math.log(phi**2 * w**2 + 2.0), rel=1e-12)
        # far beyond double range, the value is exactly the linear form
        assert log_phi2w2p2(800.0, 2.0) == pytest.approx(1600.0 + 2 * math.log(2.0), rel=1e-14)


class TestFrame:
    def make(self, T0=0.05):
        return SimilarityFrame(x0=0.0, T0=T0, params=P3M1, delta0=0.5)

    def test_s_monotone_and_floor(self):
        fr = self.make()
        ts = np.linspace(0.0, 0.049, 30)
        ss = [fr.s_of_t(t) for t in ts]
        assert np.all(np.diff(ss) > 0)
        assert min(ss) >= fr.s_min
        assert fr.default_s0() == 15.0

    def test_round_trip(self):
        fr = self.make()
        rng = np.random.default_rng(3)
        for _ in range(25):
            t = rng.uniform(0.0, 0.049)
            x = rng.uniform(-0.9, 0.9) * (fr.T0 - t)
            u, ut, ux = rng.normal(size=3)
            y, s, w, dw = fr.to_similarity(x, t, u, ut, ux)
            x2, t2, u2, ut2 = fr.from_similarity(y, s, w, dw, ux)
            assert x2 == pytest.approx(x, abs=1e-12)
            assert t2 == pytest.approx(t, abs=1e-12)
            assert u2 == pytest.approx(u, rel=1e-12, abs=1e-12)
            assert ut2 == pytest.approx(ut, rel=1e-10, abs=1e-10)

    def test_center_normalization(self):
        # at x = x0 with u = psi(t), w is exactly 1
        fr = self.make()
        t = 0.03
        s = fr.s_of_t(t)
        phi = weight_phi(s, P3M1)
        y, s2, w, _ = fr.to_similarity(0.0, t, phi, 0.0, 0.0)
        assert (y, w) == (0.0, pytest.approx(1.0, rel=1e-14))

    def test_chain_rule_against_finite_differences(self):
        # smooth synthetic u(x,t); dw/ds from the transform vs centered FD in s
        fr = self.make(T0=0.04)

        def u_fn(x, t):
            return math.sin(3 * x + 0.5) * (1.0 + 5 * t) + 2 * x * x

        def ut_fn(x, t):
            return 5 * math.sin(3 * x + 0.5)

        def ux_fn(x, t):
            return 3 * math.cos(3 * x + 0.5) * (1.0 + 5 * t) + 4 * x

        y_fix = 0.37
        s0 = fr.s_of_t(0.02)
        ds = 1e-5

        def w_at(s):
            t = fr.t_of_s(s)
            x = fr.x0 + y_fix * (fr.T0 - t)
            _, _, w, dw = fr.to_similarity(x, t, u_fn(x, t), ut_fn(x, t), ux_fn(x, t))
            return w, dw

        wm, _ = w_at(s0 - ds)
        wp, _ = w_at(s0 + ds)
        _, dw0 = w_at(s0)
        fd = (wp - wm) / (2 * ds)
        assert dw0 == pytest.approx(fd, rel=1e-6)

    def test_ode_profile_transform_approaches_kappa(self):
        # feed the integrated blow-up ODE through the transform; w -> kappa_a
        params = P3M1
        traj = integrate_ode(10.0, 0.0, params)
        fr = SimilarityFrame(x0=0.0, T0=traj.T_est, params=params, delta0=0.5)
        devs = []
        for s in (10.0, 14.0, 18.0):
            t = fr.t_of_s(s)
            v = traj.value(t)
            _, _, w, _ = fr.to_similarity(0.0, t, v, 0.0, 0.0)
            devs.append(abs(w - kappa(params)))
        assert devs[-1] < devs[0]
        assert devs[-1] < 0.25

    def test_cone_domain_errors(self):
        fr = self.make()
        with pytest.raises(ValueError):
            fr.to_similarity(0.06, 0.01, 1.0, 0.0, 0.0)  # outside the cone
        with pytest.raises(ValueError):
            fr.to_similarity(0.0, 0.06, 1.0, 0.0, 0.0)  # past T0

    def test_t_star(self):
        fr = SimilarityFrame(x0=0.0, T0=0.1, params=P3M1, delta0=0.5)
        assert fr.t_star(0.0) == pytest.approx(0.1)
        assert fr.t_star(0.1) == pytest.approx(0.05)
        ds = [fr.t_star(x) for x in np.linspace(0.0, 0.15, 10)]
        assert np.all(np.diff(ds) < 0)
        with pytest.raises(ValueError):
            fr.t_star(1.0)

    def test_frame_validation(self):
        with pytest.raises(ValueError):
            SimilarityFrame(0.0, -1.0, P3M1)
        with pytest.raises(ValueError):
            SimilarityFrame(0.0, 0.1, P3M1, delta0=1.5)
