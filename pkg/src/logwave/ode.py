"""The space-independent blow-up ODE  v'' = |v|^(p_c-1) v ln^a(v^2 + 2).

Integration runs in two phases: an adaptive embedded pair in physical time t
until |v| crosses a moderate switch level, then a change of independent
variable to x = ln|v| (where the blow-up is a finite smooth interval) up to
very large caps.  The blow-up time is estimated from cap-crossing times at
increasing caps, corrected by inverting the asymptotic rate factor; the
reported uncertainty is the drift between the two deepest caps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .model import ModelParams, kappa, nonlinearity, psi

__all__ = ["OdeControls", "OdeTrajectory", "integrate_ode", "rate_ratio", "invert_rate_factor"]


@dataclass(frozen=True)
class OdeControls:
    rtol: float = 1e-12
    atol: float = 1e-14
    v_switch: float = 1e4
    cap: float = 1e12
    n_caps: int = 4
    horizon: float = 100.0


@dataclass
class OdeTrajectory:
    """Sampled trajectory with blow-up time estimate and dense evaluators."""

    params: ModelParams
    t: np.ndarray
    v: np.ndarray
    dv: np.ndarray
    T_est: float | None
    T_uncertainty: float | None
    cap_times: list
    blew_up: bool
    sign: float
    controls: OdeControls
    _sol_t: object = field(default=None, repr=False)
    _sol_x: object = field(default=None, repr=False)
    _x_range: tuple = field(default=(0.0, 0.0), repr=False)

    def value(self, t: float) -> float:
        """v(t) through the dense output of the appropriate phase."""
        if self._sol_x is not None:
            x0, x1 = self._x_range
            t0 = float(self._sol_x(x0)[0])
            t1 = float(self._sol_x(x1)[0])
            if t0 <= t <= t1:
                xr = brentq(lambda x: float(self._sol_x(x)[0]) - t, x0, x1, xtol=1e-15, rtol=8.9e-16)
                return self.sign * math.exp(xr)
        return self.sign * float(self._sol_t.sol(t)[0])


def invert_rate_factor(level: float, params: ModelParams) -> float:
    """delta with delta^(-2/(p-1)) (-ln delta)^(-a/(p-1)) = level (Newton in ln delta)."""
    p, a = params.p_c, params.a
    if level <= 1.0:
        raise ValueError("level must exceed 1")
    x = -(p - 1) / 2.0 * math.log(level)
    target = math.log(level)
    for _ in range(100):
        g = -2.0 / (p - 1) * x - a / (p - 1) * math.log(-x) - target
        dg = -2.0 / (p - 1) - a / ((p - 1) * x)
        dx = -g / dg
        x += dx
        if abs(dx) <= 1e-15 * abs(x):
            break
    return math.exp(x)


def integrate_ode(
    v0: float, v1: float, params: ModelParams, controls: OdeControls | None = None
) -> OdeTrajectory:
    """Integrate the blow-up ODE from (v(0), v'(0)) = (v0, v1).

    Bounded-over-the-horizon solutions are reported as non-blow-up (T_est is
    None), never as an error.
    """
    if v0 == 0.0 and v1 == 0.0:
        raise ValueError("initial data (0, 0) is the trivial equilibrium")
    ctrl = controls or OdeControls()

    def rhs(t, y):
        return [y[1], nonlinearity(y[0], params)]

    def hit_pos(t, y):
        return y[0] - ctrl.v_switch

    def hit_neg(t, y):
        return y[0] + ctrl.v_switch

    hit_pos.terminal = True
    hit_pos.direction = 1
    hit_neg.terminal = True
    hit_neg.direction = -1

    sol = solve_ivp(
        rhs,
        (0.0, ctrl.horizon),
        [float(v0), float(v1)],
        method="DOP853",
        rtol=ctrl.rtol,
        atol=ctrl.atol,
        events=(hit_pos, hit_neg),
        dense_output=True,
    )
    pos_hit = sol.t_events[0].size > 0
    neg_hit = sol.t_events[1].size > 0
    if not pos_hit and not neg_hit:
        return OdeTrajectory(
            params=params,
            t=sol.t,
            v=sol.y[0],
            dv=sol.y[1],
            T_est=None,
            T_uncertainty=None,
            cap_times=[],
            blew_up=False,
            sign=1.0,
            controls=ctrl,
            _sol_t=sol,
        )
    sign = 1.0 if pos_hit else -1.0
    ts = float(sol.t_events[0][0] if pos_hit else sol.t_events[1][0])
    vs, zs = sol.sol(ts)
    vs, zs = sign * float(vs), sign * float(zs)

    # phase 2 in x = ln v (odd symmetry folds the negative branch)
    def rhs_x(x, y):
        t, z = y
        v = math.exp(x)
        return [v / z, v * nonlinearity(v, params) / z]

    x0, x1 = math.log(vs), math.log(ctrl.cap)
    sol2 = solve_ivp(
        rhs_x,
        (x0, x1),
        [ts, zs],
        method="DOP853",
        rtol=ctrl.rtol,
        atol=1e-300,
        dense_output=True,
    )
    caps = np.geomspace(ctrl.cap / 10.0 ** (2 * (ctrl.n_caps - 1)), ctrl.cap, ctrl.n_caps)
    cap_times = []
    T_samples = []
    kap = kappa(params)
    for c in caps:
        xc = math.log(c)
        if xc < x0:
            continue
        tc = float(sol2.sol(xc)[0])
        cap_times.append((float(c), tc))
        T_samples.append(tc + invert_rate_factor(c / kap, params))
    T_est = T_samples[-1]
    unc = abs(T_samples[-1] - T_samples[-2]) if len(T_samples) > 1 else math.inf

    # samples for monotonicity/convexity diagnostics (phase-1 grid)
    return OdeTrajectory(
        params=params,
        t=sol.t,
        v=sign * sol.y[0],
        dv=sign * sol.y[1],
        T_est=T_est,
        T_uncertainty=unc,
        cap_times=cap_times,
        blew_up=True,
        sign=sign,
        controls=ctrl,
        _sol_t=sol,
        _sol_x=sol2.sol,
        _x_range=(x0, x1),
    )


def rate_ratio(traj: OdeTrajectory, deltas=None) -> np.ndarray:
    """Series of (T_est - t, v(t)/(kappa_a psi_{T_est}(t))) at log-spaced T - t."""
    if traj.T_est is None:
        raise ValueError("trajectory did not blow up; no rate to compare")
    params = traj.params
    kap = kappa(params)
    if deltas is None:
        deltas = np.geomspace(1e-1, 1e-8, 15)
    out = []
    for d in deltas:
        t_at = traj.T_est - d
        if t_at < 0:
            continue
        v_at = traj.sign * traj.value(t_at)  # fold the odd symmetry back
        ratio = v_at / (kap * psi(t_at, traj.T_est, params))
        out.append((d, ratio))
    return np.array(out)
