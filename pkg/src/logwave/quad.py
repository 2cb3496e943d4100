"""Radial grids on the unit ball and quadrature robust to the degenerate
boundary weights (1-|y|^2)^e with e > -1.

Smooth radial fields are even in r, so everything is parameterized by
u = r^2: nodes are Gauss-Jacobi points in u (clustering at the light-cone
boundary u = 1), interpolation and differentiation are barycentric in u, and
every weighted ball integral

    int_B F(|y|) (1 - |y|^2)^e dy
        = (|S^{n-1}|/2) int_0^1 F(sqrt(u)) (1-u)^e u^{n/2-1} du

is evaluated with a Jacobi rule matched exactly to the exponent e, so the
boundary singularity is absorbed by the rule and only the smooth factor is
interpolated.  Low azimuthal modes in n=2 (for the tangential-gradient
identities) are carried as polynomial profiles times r^m cos(m theta).
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import betaln, gamma as _gamma, roots_jacobi

from .model import ModelParams
from .simvars import SimilarityFrame, weight_alpha

__all__ = [
    "sphere_area",
    "ball_volume",
    "jacobi_rule",
    "ball_integral_exact_poly",
    "RadialGrid",
    "IntegralResult",
    "FieldState",
    "integrate_ball",
    "weight_exponent",
    "WEIGHT_KINDS",
    "gradient_split",
    "GradientSplit",
    "hardy_check",
    "HardyReport",
    "elliptic_operator",
    "ModeField",
    "random_mode_field",
]


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n."""
    return 2.0 * math.pi ** (n / 2) / _gamma(n / 2)


def ball_volume(n: int) -> float:
    return sphere_area(n) / n


def _jacobi_eval(x: np.ndarray, alpha: float, beta: float, deg: int):
    """(P_deg^{(alpha,beta)}(x), P'_deg(x)) by the three-term recurrence."""
    p_prev = np.ones_like(x)
    if deg == 0:
        return p_prev, np.zeros_like(x)
    p = (alpha + 1.0) + (alpha + beta + 2.0) * (x - 1.0) / 2.0
    for k in range(2, deg + 1):
        c = 2.0 * k + alpha + beta
        a1 = 2.0 * k * (k + alpha + beta) * (c - 2.0)
        a2 = (c - 1.0) * (alpha * alpha - beta * beta)
        a3 = (c - 2.0) * (c - 1.0) * c
        a4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c
        p, p_prev = ((a2 + a3 * x) * p - a4 * p_prev) / a1, p
    # derivative via the shifted-parameter identity
    dp, _ = _jacobi_eval(x, alpha + 1.0, beta + 1.0, deg - 1)
    return p, 0.5 * (deg + alpha + beta + 1.0) * dp


@lru_cache(maxsize=512)
def _jacobi_rule_cached(e_key: float, beta_key: float, npts: int):
    """Gauss-Jacobi rule on [0,1], Newton-polished.

    scipy's nodes drift to ~1e-10 relative accuracy for exponents near -1
    (exactly the singular boundary weights used here); two Newton sweeps on
    the recurrence restore machine precision, and the weights are rebuilt
    from the derivative values with exact total-mass normalization.
    """
    x, _ = roots_jacobi(npts, e_key, beta_key)
    for _ in range(3):
        p, dp = _jacobi_eval(x, e_key, beta_key, npts)
        step = p / dp
        x = x - step
        if np.max(np.abs(step)) < 1e-15:
            break
    _, dp = _jacobi_eval(x, e_key, beta_key, npts)
    raw = 1.0 / ((1.0 - x * x) * dp * dp)
    mass = math.exp(
        (e_key + beta_key + 1.0) * math.log(2.0) + betaln(e_key + 1.0, beta_key + 1.0)
    )
    w = raw * (mass / raw.sum())
    u = (x + 1.0) / 2.0
    w = w * 2.0 ** (-(e_key + beta_key + 1.0))
    return u, w


def jacobi_rule(exponent: float, n: int, npts: int):
    """Nodes/weights in u for the measure (1-u)^exponent u^(n/2-1) du on [0,1]."""
    if exponent <= -1.0:
        raise ValueError(f"weight exponent {exponent} is not integrable")
    return _jacobi_rule_cached(round(float(exponent), 12), n / 2 - 1.0, npts)


def ball_integral_exact_poly(coeffs, exponent: float, n: int) -> float:
    """Exact weighted ball integral of a polynomial in u = r^2.

    sum_j c_j int_B u^j (1-u)^e dy via Beta functions; serves as an
    independent closed-form oracle for the quadrature machinery.
    """
    total = 0.0
    for j, c in enumerate(np.atleast_1d(coeffs)):
        if c != 0.0:
            total += c * math.exp(betaln(n / 2 + j, exponent + 1.0))
    return 0.5 * sphere_area(n) * total


# ---------------------------------------------------------------------------
# barycentric interpolation / differentiation
# ---------------------------------------------------------------------------


def _bary_weights(x: np.ndarray) -> np.ndarray:
    n = len(x)
    logs = np.zeros(n)
    signs = np.ones(n)
    for j in range(n):
        d = x[j] - np.delete(x, j)
        logs[j] = -np.sum(np.log(np.abs(d)))
        signs[j] = np.prod(np.sign(d))
    logs -= logs.max()
    return signs * np.exp(logs)


def _interp_matrix(x: np.ndarray, w: np.ndarray, xt: np.ndarray) -> np.ndarray:
    M = np.zeros((len(xt), len(x)))
    for i, t in enumerate(xt):
        d = t - x
        hit = np.flatnonzero(np.abs(d) < 1e-14)
        if hit.size:
            M[i, hit[0]] = 1.0
        else:
            c = w / d
            M[i] = c / c.sum()
    return M


def _diff_matrix(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    n = len(x)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                D[i, j] = (w[j] / w[i]) / (x[i] - x[j])
        D[i, i] = -np.sum(D[i])
    return D


@dataclass(frozen=True)
class IntegralResult:
    """Quadrature value with a resolution-doubling error estimate."""

    value: float
    error: float
    converged: bool
    divergent: bool = False

    def __float__(self) -> float:
        return self.value


class RadialGrid:
    """Gauss-Jacobi collocation grid in u = r^2 on the open unit ball.

    Nodes are interior (largest node r_max < 1); boundary traces are obtained
    by polynomial extrapolation of configurable order.  Immutable after
    construction; all operator matrices and quadrature rules are cached.
    """

    def __init__(
        self,
        n: int,
        npts: int = 64,
        node_exponent: float = -0.5,
        quad_npts: int | None = None,
        extrap_order: int = 4,
        conv_rtol: float = 1e-6,
        conv_atol: float = 1e-12,
    ):
        if n < 2:
            raise ValueError("dimension must be >= 2")
        self.n = int(n)
        self.npts = int(npts)
        self.node_exponent = float(node_exponent)
        self.quad_npts = int(quad_npts) if quad_npts is not None else 2 * self.npts
        self.extrap_order = int(extrap_order)
        self.conv_rtol = conv_rtol
        self.conv_atol = conv_atol
        self.u, _ = jacobi_rule(self.node_exponent, self.n, self.npts)
        self.r = np.sqrt(self.u)
        self._bw = _bary_weights(self.u)
        self._d1: np.ndarray | None = None
        self._d2: np.ndarray | None = None
        self._rules: OrderedDict = OrderedDict()
        self._coarse_idx = np.arange(0, self.npts, 2)
        self._bw_coarse = _bary_weights(self.u[self._coarse_idx])

    # -- differentiation (in u) -----------------------------------------
    @property
    def d1(self) -> np.ndarray:
        if self._d1 is None:
            self._d1 = _diff_matrix(self.u, self._bw)
        return self._d1

    @property
    def d2(self) -> np.ndarray:
        if self._d2 is None:
            self._d2 = self.d1 @ self.d1
        return self._d2

    def deriv_r(self, values: np.ndarray) -> np.ndarray:
        """d/dr of an even field given by nodal values (w_r = 2 r w_u)."""
        return 2.0 * self.r * (self.d1 @ values)

    def interpolate(self, values: np.ndarray, u_targets: np.ndarray) -> np.ndarray:
        return _interp_matrix(self.u, self._bw, np.asarray(u_targets, dtype=float)) @ values

    # -- quadrature -------------------------------------------------------
    def _rule(self, exponent: float):
        key = round(float(exponent), 12)
        if key not in self._rules:
            uq, wq = jacobi_rule(key, self.n, self.quad_npts)
            scale = 0.5 * sphere_area(self.n)
            Mfull = _interp_matrix(self.u, self._bw, uq)
            Mcoarse = _interp_matrix(self.u[self._coarse_idx], self._bw_coarse, uq)
            self._rules[key] = (uq, wq * scale, Mfull, Mcoarse)
            if len(self._rules) > 256:
                self._rules.popitem(last=False)
        return self._rules[key]

    def integrate(self, values: np.ndarray, exponent: float) -> IntegralResult:
        """int_B field (1-|y|^2)^exponent dy with the matched Jacobi rule.

        The error estimate compares the full-grid interpolant against the
        half-grid one; divergent exponents (<= -1) are flagged, never
        silently evaluated.
        """
        if exponent <= -1.0 + 1e-12:
            return IntegralResult(math.nan, math.inf, False, divergent=True)
        uq, wq, Mfull, Mcoarse = self._rule(exponent)
        full = float(wq @ (Mfull @ values))
        coarse = float(wq @ (Mcoarse @ values[self._coarse_idx]))
        err = abs(full - coarse)
        ok = err <= max(self.conv_atol, self.conv_rtol * abs(full))
        return IntegralResult(full, err, ok)

    def quad_points(self, exponent: float):
        """(u nodes, scaled weights, interpolation matrix) of the matched rule."""
        uq, wq, Mfull, _ = self._rule(exponent)
        return uq, wq, Mfull

    # -- boundary extrapolation ------------------------------------------
    def boundary_value(self, values: np.ndarray, order: int | None = None) -> float:
        """Extrapolated value at u = 1 from the last (order+1) nodes."""
        k = (order if order is not None else self.extrap_order) + 1
        xs = 1.0 - self.u[-k:]
        coef = P.polyfit(xs, values[-k:], k - 1)
        return float(coef[0])

    def boundary_value_checked(self, values: np.ndarray, rel_tol: float = 0.05):
        """(value, flag): orders 3 and 4 compared; flagged beyond rel_tol."""
        v3 = self.boundary_value(values, order=3)
        v4 = self.boundary_value(values, order=4)
        scale = max(abs(v3), abs(v4), 1e-300)
        return v4, abs(v4 - v3) <= rel_tol * scale + 1e-12


# ---------------------------------------------------------------------------
# weight vocabulary
# ---------------------------------------------------------------------------

WEIGHT_KINDS = (
    "one",
    "rho",
    "rho_eta",
    "rho_over_1my2",
    "rho_eta_over_sqrt",
    "rho_eta_over_1my2",
)


def weight_exponent(
    weight: str,
    *,
    params: ModelParams | None = None,
    s: float | None = None,
    eta: float | None = None,
) -> float:
    """Total (1-|y|^2) exponent of a named weight."""
    if weight == "one":
        return 0.0
    if weight == "rho":
        return weight_alpha(s, params)
    if weight == "rho_eta":
        return float(eta)
    if weight == "rho_over_1my2":
        return weight_alpha(s, params) - 1.0
    if weight == "rho_eta_over_sqrt":
        return float(eta) - 0.5
    if weight == "rho_eta_over_1my2":
        return float(eta) - 1.0
    raise ValueError(f"unknown weight {weight!r}; expected one of {WEIGHT_KINDS}")


def integrate_ball(
    field_values: np.ndarray,
    weight: str,
    grid: RadialGrid,
    *,
    params: ModelParams | None = None,
    s: float | None = None,
    eta: float | None = None,
) -> IntegralResult:
    """Weighted integral over the unit ball of a gridded radial field."""
    e = weight_exponent(weight, params=params, s=s, eta=eta)
    return grid.integrate(np.asarray(field_values, dtype=float), e)


# ---------------------------------------------------------------------------
# field state
# ---------------------------------------------------------------------------


@dataclass
class FieldState:
    """(w, dw/ds) on a radial grid at slice s, tied to a similarity frame."""

    w: np.ndarray
    dw_ds: np.ndarray
    s: float
    grid: RadialGrid
    frame: SimilarityFrame

    def copy(self) -> "FieldState":
        return FieldState(self.w.copy(), self.dw_ds.copy(), self.s, self.grid, self.frame)

    @property
    def params(self) -> ModelParams:
        return self.frame.params

    def energy_norm_sq(self) -> IntegralResult:
        """Membership integral of the weighted energy space:
        int ((dw/ds)^2 + |grad w|^2 (1-|y|^2) + w^2) rho dy."""
        g = self.grid
        al = weight_alpha(self.s, self.params)
        wu = g.d1 @ self.w
        base = g.integrate(self.dw_ds**2 + self.w**2, al)
        grad = g.integrate(4.0 * g.u * wu**2, al + 1.0)
        return IntegralResult(
            base.value + grad.value,
            base.error + grad.error,
            base.converged and grad.converged,
            base.divergent or grad.divergent,
        )

    def h1_l2_norms(self) -> tuple[float, float]:
        """Unweighted (||w||_{H^1(B)}, ||dw/ds||_{L^2(B)})."""
        g = self.grid
        wu = g.d1 @ self.w
        h1sq = g.integrate(self.w**2 + 4.0 * g.u * wu**2, 0.0).value
        l2sq = g.integrate(self.dw_ds**2, 0.0).value
        return math.sqrt(max(h1sq, 0.0)), math.sqrt(max(l2sq, 0.0))


# ---------------------------------------------------------------------------
# low-mode test fields (n = 2) and the gradient split
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModeField:
    """w(y) = r^m h(r^2) cos(m theta) with polynomial profile h.

    m = 0 gives smooth radial fields in any dimension; m >= 1 is the n = 2
    single-Fourier-mode family used to exercise every tangential term.
    """

    h_coeffs: np.ndarray
    m: int
    n: int = 2

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("mode index must be >= 0")
        if self.m > 0 and self.n != 2:
            raise ValueError("nonzero modes are only supported in n = 2")
        object.__setattr__(self, "h_coeffs", np.asarray(self.h_coeffs, dtype=float))

    # profile g(r) = r^m h(u) and derived radial amplitudes (u = r^2)
    def h(self, u):
        return P.polyval(np.asarray(u, dtype=float), self.h_coeffs)

    def dh(self, u):
        return P.polyval(np.asarray(u, dtype=float), P.polyder(self.h_coeffs))

    def g(self, r):
        r = np.asarray(r, dtype=float)
        return r**self.m * self.h(r * r)

    def dg(self, r):
        """g'(r) = r^(m-1) (m h + 2 u h')."""
        r = np.asarray(r, dtype=float)
        u = r * r
        amp = self.m * self.h(u) + 2.0 * u * self.dh(u)
        if self.m == 0:
            return 2.0 * r * self.dh(u)
        return r ** (self.m - 1) * amp

    def value(self, r, theta=0.0):
        return self.g(r) * np.cos(self.m * np.asarray(theta, dtype=float))

    # even polynomial amplitudes in u (exact integrand algebra)
    def gp1(self) -> np.ndarray:
        """coefficients of g'(r)/r^(m-1) as a polynomial in u."""
        return P.polyadd(self.m * self.h_coeffs, 2.0 * _shift(P.polyder(self.h_coeffs)))

    def gpp2(self) -> np.ndarray:
        """coefficients of g''(r)/r^(m-2) as a polynomial in u."""
        hp = P.polyder(self.h_coeffs)
        hpp = P.polyder(hp)
        out = self.m * (self.m - 1) * self.h_coeffs
        out = P.polyadd(out, (4 * self.m + 2) * _shift(hp))
        return P.polyadd(out, 4.0 * _shift(_shift(hpp)))


def _shift(coeffs: np.ndarray, k: int = 1) -> np.ndarray:
    """Multiply a u-polynomial by u^k."""
    return np.concatenate([np.zeros(k), np.atleast_1d(coeffs)])


def _unshift(coeffs: np.ndarray) -> np.ndarray:
    """Divide a u-polynomial by u (requires zero constant term)."""
    c = np.atleast_1d(coeffs)
    if abs(c[0]) > 1e-12 * (np.max(np.abs(c)) + 1e-300):
        raise ValueError("polynomial is not divisible by u")
    return c[1:] if len(c) > 1 else np.zeros(1)


def random_mode_field(rng: np.random.Generator, m: int, n: int = 2, degree: int = 4) -> ModeField:
    """Random polynomial-in-r^2 profile with coefficients in [-1, 1]."""
    return ModeField(rng.uniform(-1.0, 1.0, size=degree + 1), m, n)


@dataclass(frozen=True)
class GradientSplit:
    """Radial/tangential split of the gradient at the grid nodes.

    ``radial_amp`` multiplies cos(m theta) e_r, ``tangential_amp`` multiplies
    -sin(m theta) e_theta; for radial fields the tangential part vanishes
    identically.
    """

    radial_amp: np.ndarray
    tangential_amp: np.ndarray
    m: int

    def grad_sq(self, theta: float) -> np.ndarray:
        c, sn = math.cos(self.m * theta), math.sin(self.m * theta)
        return (self.radial_amp * c) ** 2 + (self.tangential_amp * sn) ** 2

    def y_dot_grad(self, r: np.ndarray, theta: float) -> np.ndarray:
        return r * self.radial_amp * math.cos(self.m * theta)

    def tangential_sq(self, theta: float) -> np.ndarray:
        return (self.tangential_amp * math.sin(self.m * theta)) ** 2

    def radial_part_sq(self, theta: float) -> np.ndarray:
        return (self.radial_amp * math.cos(self.m * theta)) ** 2


def gradient_split(field, grid: RadialGrid) -> GradientSplit:
    """Split grad w into radial and tangential parts at the grid nodes.

    Accepts a ModeField (derivatives taken analytically) or a nodal value
    array of a radial field (spectral differentiation in u).
    """
    if isinstance(field, ModeField):
        r = grid.r
        radial = field.dg(r)
        if field.m == 0:
            tang = np.zeros_like(r)
        else:
            tang = field.m * field.g(r) / r
        return GradientSplit(radial, tang, field.m)
    values = np.asarray(field, dtype=float)
    return GradientSplit(grid.deriv_r(values), np.zeros_like(values), 0)


# ---------------------------------------------------------------------------
# Hardy-type inequalities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HardyReport:
    eta: float
    lhs: float
    rhs: float
    slack: float
    corollary_lhs: float
    corollary_rhs: float
    corollary_slack: float
    converged: bool


def hardy_check(h_values: np.ndarray, eta: float, grid: RadialGrid) -> HardyReport:
    """Weighted Hardy inequality and its boundary-singular corollary.

    Main:  int h^2 |y|^2 rho_eta/(1-|y|^2)
             <= (1/eta^2) int |grad h|^2 (1-|y|^2) rho_eta + (n/eta) int h^2 rho_eta.
    Corollary: int h^2 rho_eta/(1-|y|^2)
             <= (1/eta^2) int |grad h|^2 (1-|y|^2) rho_eta + (n/eta + 1) int h^2 rho_eta.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    h = np.asarray(h_values, dtype=float)
    g = grid
    hu = g.d1 @ h
    grad_sq = 4.0 * g.u * hu**2
    lhs_r = g.integrate(h**2 * g.u, eta - 1.0)
    grad_r = g.integrate(grad_sq, eta + 1.0)
    mass_r = g.integrate(h**2, eta)
    lhs = lhs_r.value
    rhs = grad_r.value / eta**2 + g.n / eta * mass_r.value
    cor_lhs = g.integrate(h**2, eta - 1.0)
    cor_rhs = grad_r.value / eta**2 + (g.n / eta + 1.0) * mass_r.value
    ok = lhs_r.converged and grad_r.converged and mass_r.converged and cor_lhs.converged
    return HardyReport(
        eta=eta,
        lhs=lhs,
        rhs=rhs,
        slack=rhs - lhs,
        corollary_lhs=cor_lhs.value,
        corollary_rhs=cor_rhs,
        corollary_slack=cor_rhs - cor_lhs.value,
        converged=ok,
    )


# ---------------------------------------------------------------------------
# degenerate elliptic operator (radial reduction)
# ---------------------------------------------------------------------------


def elliptic_operator(values: np.ndarray, weight_exp: float, grid: RadialGrid) -> np.ndarray:
    """(1/(rho r^(n-1))) d_r( r^(n-1) rho (1-r^2) d_r w ) with rho = (1-r^2)^weight_exp.

    This is the radial reduction of div(rho grad w - rho (y.grad w) y)/rho.
    In u = r^2:  L w = 4u(1-u) w_uu + (2n(1-u) - 4(weight_exp+1) u) w_u.
    Collocation at interior nodes; the operator degenerates at u = 1, so no
    boundary condition is imposed there.
    """
    w = np.asarray(values, dtype=float)
    g = grid
    wu = g.d1 @ w
    wuu = g.d2 @ w
    return 4.0 * g.u * (1.0 - g.u) * wuu + (2.0 * g.n * (1.0 - g.u) - 4.0 * (weight_exp + 1.0) * g.u) * wu
