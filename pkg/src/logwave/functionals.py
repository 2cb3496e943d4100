"""Energy and Lyapunov functionals of the rescaled field.

Every functional is a weighted ball integral of (w, dw/ds) at a slice s; the
nonlinear potential enters through the scaled antiderivative

    s^(-a) f(phi w) / phi^(p_c+1)

which is evaluated with the log-guarded machinery of :mod:`model`.  Snapshot
keys follow the conventional short symbols (E, J, G, L, E0, E_eta, ...).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import ModelParams, NonlinearityTable, nonlinear_density_log, scaled_potential
from .quad import FieldState, IntegralResult, RadialGrid, sphere_area
from .simvars import log_phi2w2p2, log_weight_phi, weight_alpha, weight_gamma

__all__ = [
    "FunctionalConstants",
    "FunctionalSnapshot",
    "Evaluator",
    "eval_E",
    "eval_J",
    "eval_L",
    "eval_E0",
    "eval_eta_family",
    "eval_pohozaev_family",
    "eval_N_eta",
    "eval_poly_family",
    "boundary_trace_dissipation",
    "snapshot",
]


@dataclass(frozen=True)
class FunctionalConstants:
    """Shift constants and exponents entering the composite functionals.

    theta1/theta2/theta4 are 'sufficiently large' shifts pinned by
    calibration; nu is the small mixing weight of the almost-linear-bound
    functional and must satisfy 0 < nu < (p_c - 1)/160 in theorem mode.
    """

    theta1: float = 4.0
    theta2: float = 8.0
    theta4: float = 8.0
    nu: float = 0.005
    eta_list: tuple = (0.1, 0.25, 0.5)

    def validate(self, params: ModelParams) -> None:
        if params.theorem_mode:
            hi = (params.p_c - 1.0) / 160.0
            if not 0.0 < self.nu < hi:
                raise ValueError(f"nu={self.nu} outside theorem-mode range (0, {hi:.5f})")
        for eta in self.eta_list:
            if not 0.0 < eta < 1.0:
                raise ValueError(f"eta={eta} outside (0, 1)")


@dataclass
class FunctionalSnapshot:
    """All functional values at one slice, keyed by symbol."""

    s: float
    values: dict
    constants: FunctionalConstants
    converged: bool
    divergent_keys: tuple = ()

    def __getitem__(self, key: str) -> float:
        return self.values[key]


class Evaluator:
    """Shared per-slice machinery (derivatives, weights, nonlinear terms)."""

    def __init__(self, state: FieldState, table: NonlinearityTable):
        self.state = state
        self.table = table
        self.params = state.params
        self.grid = state.grid
        self.s = state.s
        self.alpha = weight_alpha(self.s, self.params)
        self.gamma = weight_gamma(self.s, self.params)
        self.ln_phi = log_weight_phi(self.s, self.params)
        self.w = state.w
        self.z = state.dw_ds
        self.wu = self.grid.d1 @ self.w
        # |grad w|^2 - (y.grad w)^2 = (1-u) w_r^2 = 4u(1-u) w_u^2 for radial w
        self.grad_defect_over_1mu = 4.0 * self.grid.u * self.wu**2
        self.grad_sq = 4.0 * self.grid.u * self.wu**2
        self.y_dot_grad = 2.0 * self.grid.u * self.wu
        self.nl_potential = scaled_potential(self.w, self.ln_phi, self.s, table)
        self.log_arg = log_phi2w2p2(self.ln_phi, self.w)
        self.nl_density = nonlinear_density_log(self.w, self.log_arg, self.s, self.params)
        self._flags: list[IntegralResult] = []

    def integral(self, values: np.ndarray, exponent: float) -> float:
        res = self.grid.integrate(values, exponent)
        self._flags.append(res)
        return res.value

    @property
    def all_converged(self) -> bool:
        return all(r.converged for r in self._flags)

    @property
    def any_divergent(self) -> bool:
        return any(r.divergent for r in self._flags)

    # -- core functionals (weight rho = (1-u)^alpha(s)) -------------------
    def E(self, exponent: float | None = None) -> float:
        """Energy with weight (1-u)^exponent (defaults to alpha(s))."""
        e = self.alpha if exponent is None else exponent
        p = self.params.p_c
        cE = (p + 1) / (p - 1) ** 2
        val = 0.5 * self.integral(self.z**2, e)
        val += 0.5 * self.integral(self.grad_defect_over_1mu, e + 1.0)
        val += (cE - 0.5 * self.gamma) * self.integral(self.w**2, e)
        val -= self.integral(self.nl_potential, e)
        return val

    def J(self) -> float:
        s = self.s
        pref = 1.0 / (s * math.sqrt(s))
        return (
            -pref * self.integral(self.w * self.z, self.alpha)
            + 0.5 * self.params.n * pref * self.integral(self.w**2, self.alpha)
        )

    def G(self) -> float:
        return self.E() + self.J()

    def L(self, theta1: float) -> float:
        return math.exp((self.params.p_c + 3.0) / math.sqrt(self.s)) * self.G() + theta1 / self.s

    def E0(self) -> float:
        return self.E(exponent=0.0)

    # -- eta family --------------------------------------------------------
    def eta_family(self, eta: float, theta2: float) -> dict:
        p, n = self.params.p_c, self.params.n
        al, ga, s = self.alpha, self.gamma, self.s
        E_eta = self.E(exponent=eta)
        I_eta = -(eta - al) * self.integral(self.w * self.z, eta) + 0.5 * (n - 2 * al) * (
            eta - al
        ) * self.integral(self.w**2, eta)
        H_eta = E_eta + I_eta
        decay = math.exp(-eta * (p + 3.0) * s / 2.0)
        return {
            "E_eta": E_eta,
            "I_eta": I_eta,
            "H_eta": H_eta,
            "curlyE_eta": (H_eta + theta2) * decay,
        }

    def pohozaev_family(self, eta: float) -> dict:
        n = self.params.n
        M_eta = self.integral(self.y_dot_grad * self.z + self.y_dot_grad**2, eta)
        M_half = self.integral(self.y_dot_grad * self.z + self.y_dot_grad**2, 0.5 + eta)
        J_sing = (
            -self.integral(self.w * (self.z + 2.0 * self.y_dot_grad), eta - 0.5)
            - 0.5 * n * self.integral(self.w**2, eta - 0.5)
        )
        return {
            "M_eta": M_eta,
            "J_eta_singular": J_sing,
            "curlyL_eta": M_half + (0.5 + eta) * J_sing,
        }

    def N_eta(self, eta: float) -> float:
        dens = self.grad_sq + self.z**2 + self.w**2 + self.nl_density
        return self.integral(dens, eta)

    def poly_family(self, nu: float, theta4: float) -> dict:
        n, a, s = self.params.n, self.params.a, self.s
        F_poly = -self.alpha * self.integral(self.w * self.z, self.alpha) + 0.5 * self.alpha * n * self.integral(
            self.w**2, self.alpha
        )
        P_poly = self.E() + nu * F_poly
        expo = a * n * nu / 2.0
        return {
            "F_poly": F_poly,
            "P_poly": P_poly,
            "curlyF": s**expo * P_poly + theta4 * s ** (expo - 5.0),
        }

    def boundary_trace_dissipation(self) -> tuple[float, bool]:
        val, ok = self.grid.boundary_value_checked(self.z)
        return sphere_area(self.params.n) * val * val, ok

    def singular_nonlinear(self, eta: float) -> float:
        """s^(-a) int |w|^(p+1) ln^a(phi^2 w^2+2) rho_eta / sqrt(1-|y|^2)."""
        return self.integral(self.nl_density, eta - 0.5)

    def dissipation_density(self) -> float:
        """int (dw/ds)^2 rho/(1-|y|^2) dy (the Lyapunov dissipation density)."""
        return self.integral(self.z**2, self.alpha - 1.0)


# -- spec-level operation wrappers ------------------------------------------


def eval_E(state: FieldState, table: NonlinearityTable) -> float:
    return Evaluator(state, table).E()


def eval_J(state: FieldState, table: NonlinearityTable) -> float:
    return Evaluator(state, table).J()


def eval_L(state: FieldState, table: NonlinearityTable, theta1: float) -> float:
    return Evaluator(state, table).L(theta1)


def eval_E0(state: FieldState, table: NonlinearityTable) -> float:
    return Evaluator(state, table).E0()


def eval_eta_family(state: FieldState, table: NonlinearityTable, eta: float, theta2: float) -> dict:
    return Evaluator(state, table).eta_family(eta, theta2)


def eval_pohozaev_family(state: FieldState, table: NonlinearityTable, eta: float) -> dict:
    return Evaluator(state, table).pohozaev_family(eta)


def eval_N_eta(state: FieldState, table: NonlinearityTable, eta: float) -> float:
    return Evaluator(state, table).N_eta(eta)


def eval_poly_family(state: FieldState, table: NonlinearityTable, nu: float, theta4: float) -> dict:
    return Evaluator(state, table).poly_family(nu, theta4)


def boundary_trace_dissipation(state: FieldState) -> float:
    val, _ = state.grid.boundary_value_checked(state.dw_ds)
    return sphere_area(state.params.n) * val * val


def snapshot(
    state: FieldState, table: NonlinearityTable, constants: FunctionalConstants
) -> FunctionalSnapshot:
    """Evaluate the full functional family at one slice."""
    constants.validate(state.params)
    ev = Evaluator(state, table)
    vals: dict = {}
    E = ev.E()
    J = ev.J()
    G = E + J
    vals["E"] = E
    vals["J"] = J
    vals["G"] = G
    vals["L"] = math.exp((ev.params.p_c + 3.0) / math.sqrt(ev.s)) * G + constants.theta1 / ev.s
    vals["E0"] = ev.E0()
    for eta in constants.eta_list:
        fam = ev.eta_family(eta, constants.theta2)
        fam.update(ev.pohozaev_family(eta))
        fam["N_eta"] = ev.N_eta(eta)
        fam["nl_singular"] = ev.singular_nonlinear(eta)
        for key, v in fam.items():
            vals[f"{key}@{eta:g}"] = v
    vals.update(ev.poly_family(constants.nu, constants.theta4))
    bt, bt_ok = ev.boundary_trace_dissipation()
    vals["boundary_trace_sq"] = bt
    vals["dissipation_density"] = ev.dissipation_density()
    # component integrals and norms
    vals["kinetic"] = 0.5 * ev.integral(ev.z**2, ev.alpha)
    vals["gradient"] = 0.5 * ev.integral(ev.grad_defect_over_1mu, ev.alpha + 1.0)
    vals["potential"] = ev.integral(ev.w**2, ev.alpha)
    vals["nonlinear_potential"] = ev.integral(ev.nl_potential, ev.alpha)
    h1, l2 = state.h1_l2_norms()
    vals["h1_norm"] = h1
    vals["l2_norm_dsw"] = l2
    vals["h1l2"] = h1 + l2
    vals["h1l2_sq"] = h1 * h1 + l2 * l2
    vals["w_max"] = float(np.max(np.abs(state.w)))
    vals["h_energy_sq"] = state.energy_norm_sq().value
    div_keys = ("dissipation_density",) if ev.any_divergent else ()
    return FunctionalSnapshot(
        s=ev.s,
        values=vals,
        constants=constants,
        converged=ev.all_converged and bt_ok,
        divergent_keys=div_keys,
    )
