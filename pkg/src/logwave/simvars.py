"""Similarity frames: the change of variables to the unit ball, and the
scalar weight functions that enter every energy integrand.

Physical space (x, t, u) maps to (y, s, w) through

    y = (x - x0)/(T0 - t),   s = -ln(T0 - t),   u = psi_T0(t) w(y, s),

with psi_T0(t) = phi(s).  phi overflows double precision near s ~ 350, so it
is carried logarithmically everywhere; ln(phi^2 w^2 + 2) has a dedicated
guarded evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ModelParams

__all__ = [
    "SimilarityFrame",
    "weight_alpha",
    "weight_gamma",
    "weight_phi",
    "log_weight_phi",
    "phi_saturates",
    "weight_rho",
    "log_phi2w2p2",
    "DEFAULT_S0_FLOOR",
]

# standing assumption: runs start deep enough that -ln(T0 - t) is large
DEFAULT_S0_FLOOR = 15.0

_LN_REAL_MAX = math.log(np.finfo(float).max)


def weight_alpha(s: float, params: ModelParams) -> float:
    """-a/((p_c - 1) s); positive exactly when a < 0."""
    if s <= 0:
        raise ValueError(f"weight_alpha needs s > 0, got {s}")
    return -params.a / ((params.p_c - 1) * s)


def weight_gamma(s: float, params: ModelParams) -> float:
    """a(p_c+5)/((p_c-1)^2 s) - a(p_c+a-1)/((p_c-1)^2 s^2)."""
    if s <= 0:
        raise ValueError(f"weight_gamma needs s > 0, got {s}")
    p, a = params.p_c, params.a
    return a * (p + 5) / ((p - 1) ** 2 * s) - a * (p + a - 1) / ((p - 1) ** 2 * s * s)


def log_weight_phi(s: float, params: ModelParams) -> float:
    """ln phi(s) = 2s/(p_c-1) - (a/(p_c-1)) ln s, exact."""
    if s <= 0:
        raise ValueError(f"log_weight_phi needs s > 0, got {s}")
    p, a = params.p_c, params.a
    return 2.0 * s / (p - 1) - a / (p - 1) * math.log(s)


def phi_saturates(s: float, params: ModelParams) -> bool:
    return log_weight_phi(s, params) > _LN_REAL_MAX


def weight_phi(s: float, params: ModelParams) -> float:
    """phi(s) = exp(2s/(p_c-1)) s^(-a/(p_c-1)); >= 1 for s >= 1.

    Raises OverflowError beyond double range; use log_weight_phi there
    (every internal consumer works with the logarithm).
    """
    lp = log_weight_phi(s, params)
    if lp > _LN_REAL_MAX:
        raise OverflowError(
            f"phi({s}) exceeds double range (ln phi = {lp:.1f}); use log_weight_phi"
        )
    return math.exp(lp)


def weight_rho(r, s: float | None, params: ModelParams, eta: float | None = None):
    """(1 - r^2)^alpha(s), or (1 - r^2)^eta when eta is given; in (0, 1]."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0) or np.any(r_arr >= 1):
        raise ValueError("weight_rho needs 0 <= r < 1")
    expo = eta if eta is not None else weight_alpha(s, params)
    out = (1.0 - r_arr**2) ** expo
    if np.isscalar(r):
        return float(out)
    return out


def log_phi2w2p2(ln_phi: float, w):
    """ln(phi^2 w^2 + 2) without forming phi; vectorized, >= ln 2."""
    w_arr = np.asarray(w, dtype=float)
    out = np.full(w_arr.shape, math.log(2.0))
    aw = np.abs(w_arr)
    nz = aw > 0
    A = np.full(w_arr.shape, -np.inf)
    A[nz] = 2.0 * ln_phi + 2.0 * np.log(aw[nz])
    big = A > 40.0
    mid = (~big) & (A > -40.0)
    out[big] = A[big]
    if np.any(mid):
        out[mid] = np.log(np.exp(A[mid]) + 2.0)
    if np.isscalar(w):
        return float(out)
    return out


@dataclass(frozen=True)
class SimilarityFrame:
    """Base point, scaled blow-up time, and the non-characteristic slope.

    ``x0`` is a radial scalar offset (0 in pure radial runs).  delta0 in
    (0,1) bounds the local blow-up graph: t_star(x) = T0 - delta0 |x - x0|.
    """

    x0: float
    T0: float
    params: ModelParams
    delta0: float = 0.5

    def __post_init__(self) -> None:
        if not self.T0 > 0:
            raise ValueError("T0 must be positive")
        if not 0.0 < self.delta0 < 1.0:
            raise ValueError("delta0 must lie in (0, 1)")

    @property
    def s_min(self) -> float:
        return -math.log(self.T0)

    def default_s0(self, floor: float = DEFAULT_S0_FLOOR) -> float:
        return max(self.s_min, floor)

    def s_of_t(self, t: float) -> float:
        if t >= self.T0:
            raise ValueError(f"t={t} is past the frame time T0={self.T0}")
        return -math.log(self.T0 - t)

    def t_of_s(self, s: float) -> float:
        return self.T0 - math.exp(-s)

    def t_star(self, x: float) -> float:
        """Local blow-up-time lower envelope T0 - delta0 |x - x0|."""
        d = abs(x - self.x0)
        if d > self.T0 / self.delta0:
            raise ValueError("point outside the domain of the cone envelope")
        return self.T0 - self.delta0 * d

    # -- transforms -----------------------------------------------------
    def to_similarity(self, x: float, t: float, u, du_dt, du_dx):
        """Map (x, t, u, u_t, u_x) to (y, s, w, w_s).

        The w_s formula is the chain rule through the rate factor and the
        shrinking spatial frame:

            w_s = (T0 - t)(u_t - y u_x)/phi(s) - (2/(p_c-1) + alpha(s)) w.
        """
        if t >= self.T0:
            raise ValueError("t must precede T0")
        delta = self.T0 - t
        y = (x - self.x0) / delta
        if abs(y) >= 1.0:
            raise ValueError(f"point lies outside the backward cone (|y|={abs(y):.3f})")
        s = -math.log(delta)
        lp = log_weight_phi(s, self.params)
        if lp > _LN_REAL_MAX:
            raise OverflowError("phi overflow; transform not representable at this s")
        phi = math.exp(lp)
        w = np.asarray(u, dtype=float) / phi
        drift = 2.0 / (self.params.p_c - 1) + weight_alpha(s, self.params)
        dw_ds = delta * (np.asarray(du_dt, dtype=float) - y * np.asarray(du_dx, dtype=float)) / phi - drift * w
        if np.isscalar(u):
            return y, s, float(w), float(dw_ds)
        return y, s, w, dw_ds

    def from_similarity(self, y: float, s: float, w, dw_ds, du_dx):
        """Inverse of :meth:`to_similarity`; needs the spatial slope u_x."""
        if abs(y) >= 1.0:
            raise ValueError("y must lie in the open unit ball")
        delta = math.exp(-s)
        t = self.T0 - delta
        x = self.x0 + y * delta
        phi = weight_phi(s, self.params)
        u = np.asarray(w, dtype=float) * phi
        drift = 2.0 / (self.params.p_c - 1) + weight_alpha(s, self.params)
        du_dt = (np.asarray(dw_ds, dtype=float) + drift * np.asarray(w, dtype=float)) * phi / delta + y * np.asarray(du_dx, dtype=float)
        if np.isscalar(w):
            return x, t, float(u), float(du_dt)
        return x, t, u, du_dt
