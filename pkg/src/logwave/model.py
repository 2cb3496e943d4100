"""Problem parameters and the nonlinearity family.

The equation under study is the semilinear wave equation

    u_tt = Lap(u) + |u|^(p-1) u ln^a(u^2 + 2),   p = p_c = 1 + 4/(n-1),

together with its antiderivative f(u) = int_0^u |v|^(p-1) v ln^a(v^2+2) dv
and the splitting f = |u|^(p+1) ln^a(u^2+2)/(p+1) + f1 + f2.  The blow-up
amplitude kappa_a and the rate factor psi_T are the explicit constants of the
space-independent blow-up ODE.

f has no closed form; ``NonlinearityTable`` holds a piecewise-Chebyshev
interpolant on dyadic intervals with an asymptotic tail expansion, accurate to
better than 1e-10 relative everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.integrate import quad

__all__ = [
    "ModelParams",
    "NonlinearityTable",
    "build_nonlinearity_table",
    "nonlinearity",
    "antiderivative_f",
    "f1",
    "f2",
    "kappa",
    "psi",
    "log_psi",
    "scaled_potential",
    "nonlinear_density_log",
    "appendix_bound_check",
    "fit_appendix_constant",
    "AppendixBoundReport",
    "SaturationError",
]

# |x| beyond which |x|^(p+1) overflows double precision for any n >= 2
_LOG_REAL_MAX = math.log(np.finfo(float).max)


class SaturationError(OverflowError):
    """Raised when a requested value exceeds double-precision range."""


@dataclass(frozen=True)
class ModelParams:
    """Dimension n, log exponent a, and the derived conformal power p_c.

    ``theorem_mode`` gates a < 0.  Exploratory runs may set any real a with
    theorem_mode=False; verification reports then carry an out-of-scope
    marker.
    """

    n: int
    a: float
    theorem_mode: bool = True

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"spatial dimension must be an integer >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "a", float(self.a))
        if self.theorem_mode and not self.a < 0:
            raise ValueError(
                f"a={self.a} requires a < 0 in theorem mode; "
                "pass theorem_mode=False for exploratory runs"
            )

    @property
    def p_c(self) -> float:
        return 1.0 + 4.0 / (self.n - 1)


def nonlinearity(u, params: ModelParams, return_flag: bool = False):
    """|u|^(p_c - 1) u ln^a(u^2 + 2); odd in u, zero at the origin.

    Overflow is reported through the saturation flag (value clamped to the
    largest finite double), never as a silent infinity.
    """
    p = params.p_c
    a = params.a
    u_arr = np.asarray(u, dtype=float)
    au = np.abs(u_arr)
    out = np.zeros_like(u_arr)
    sat = np.zeros(u_arr.shape, dtype=bool)
    nz = au > 0
    if np.any(nz):
        lau = np.log(au[nz])
        # ln(u^2+2) guarded against u^2 overflow
        with np.errstate(over="ignore", under="ignore"):
            L = np.where(
                lau > 30.0,
                2.0 * lau + np.log1p(2.0 * np.exp(-np.minimum(2.0 * lau, 745.0))),
                np.log(au[nz] ** 2 + 2.0),
            )
        logmag = p * lau + a * np.log(L)
        over = logmag > _LOG_REAL_MAX
        vals = np.where(over, np.finfo(float).max, np.exp(np.minimum(logmag, _LOG_REAL_MAX)))
        out[nz] = np.sign(u_arr[nz]) * vals
        sat[nz] = over
    if np.isscalar(u):
        out = float(out)
        sat = bool(sat)
    if return_flag:
        return out, sat
    return out


def kappa(params: ModelParams) -> float:
    """Amplitude constant of the blow-up ODE profile."""
    p = params.p_c
    a = params.a
    return (2.0 ** (1 - 2 * a) * (p + 1) / (p - 1) ** (2 - a)) ** (1.0 / (p - 1))


def psi(t: float, T: float, params: ModelParams) -> float:
    """Rate factor (T-t)^(-2/(p-1)) (-ln(T-t))^(-a/(p-1)); needs 0 < T-t < 1."""
    return math.exp(log_psi(t, T, params))


def log_psi(t: float, T: float, params: ModelParams) -> float:
    """ln psi_T(t), exact linear-plus-log form."""
    delta = T - t
    if not 0.0 < delta < 1.0:
        raise ValueError(f"psi requires 0 < T - t < 1, got T - t = {delta}")
    p = params.p_c
    s = -math.log(delta)
    return 2.0 / (p - 1) * s - params.a / (p - 1) * math.log(s)


# ---------------------------------------------------------------------------
# antiderivative table
# ---------------------------------------------------------------------------


def _asym_coeffs(params: ModelParams, nterms: int = 12) -> np.ndarray:
    """Coefficients of the large-|u| expansion
    f(u) = |u|^(p+1)/(p+1) * ln^a(u^2+2) * sum_k c_k ln^(-k)(u^2+2).

    Obtained by repeated integration by parts of the defining integral;
    c_0 = 1 and c_{k+1} = -2 (a - k) c_k / (p + 1).
    """
    p, a = params.p_c, params.a
    c = [1.0]
    for k in range(nterms - 1):
        c.append(c[-1] * (-2.0) * (a - k) / (p + 1))
    return np.array(c)


@dataclass
class NonlinearityTable:
    """Piecewise-Chebyshev interpolant of f with an asymptotic tail.

    On each dyadic interval the smooth reduced function h(u) = f(u)/u^(p+1)
    is stored (h is analytic through u=0, unlike f for non-integer p_c).
    Beyond ``u_switch`` the integration-by-parts expansion is used; the two
    branches are required to agree at the seam to ``seam_rtol``.  Immutable
    after construction.
    """

    params: ModelParams
    u_switch: float
    edges: np.ndarray
    cheb_coeffs: list
    asym_coeffs: np.ndarray
    seam_residual: float

    # -- reduced function h = f/u^(p+1) --------------------------------
    def _h(self, au: np.ndarray) -> np.ndarray:
        out = np.empty_like(au)
        idx = np.searchsorted(self.edges, au, side="right") - 1
        idx = np.clip(idx, 0, len(self.cheb_coeffs) - 1)
        for k in np.unique(idx):
            m = idx == k
            lo, hi = self.edges[k], self.edges[k + 1]
            x = 2.0 * (au[m] - lo) / (hi - lo) - 1.0
            out[m] = C.chebval(x, self.cheb_coeffs[k])
        return out

    def _log_f_asym_from_log(self, lau: np.ndarray) -> np.ndarray:
        """ln f(u) from ln|u|, valid for |u| >= u_switch (works far beyond
        double range since only ln|u| enters)."""
        p, a = self.params.p_c, self.params.a
        # ln(u^2 + 2) for huge u; exp underflows harmlessly for very large lau
        with np.errstate(under="ignore"):
            L = 2.0 * lau + np.log1p(2.0 * np.exp(-np.minimum(2.0 * lau, 745.0)))
        series = np.zeros_like(L)
        for k in range(len(self.asym_coeffs)):
            series = series + self.asym_coeffs[k] / L**k
        return (p + 1) * lau + a * np.log(L) - math.log(p + 1) + np.log(series)

    def f(self, u, return_flag: bool = False):
        """Antiderivative f(u); even, f(0)=0, increasing for u > 0."""
        u_arr = np.asarray(u, dtype=float)
        au = np.abs(u_arr)
        out = np.zeros_like(au)
        sat = np.zeros(au.shape, dtype=bool)
        core = (au > 0) & (au <= self.u_switch)
        tail = au > self.u_switch
        if np.any(core):
            p = self.params.p_c
            out[core] = self._h(au[core]) * au[core] ** (p + 1)
        if np.any(tail):
            lf = self._log_f_asym_from_log(np.log(au[tail]))
            over = lf > _LOG_REAL_MAX
            sat[tail] = over
            out[tail] = np.where(over, np.finfo(float).max, np.exp(np.minimum(lf, _LOG_REAL_MAX)))
        if np.isscalar(u):
            out = float(out)
            sat = bool(sat)
        if return_flag:
            return out, sat
        return out

    def log_f_from_log(self, lau) -> np.ndarray:
        """ln f(|u|) given ln|u|; |u| itself may exceed double range."""
        lau = np.asarray(lau, dtype=float)
        out = np.empty_like(lau)
        core = lau <= math.log(self.u_switch)
        if np.any(core):
            au = np.exp(lau[core])
            p = self.params.p_c
            out[core] = np.log(self._h(au)) + (p + 1) * lau[core]
        if np.any(~core):
            out[~core] = self._log_f_asym_from_log(lau[~core])
        return out

    def f2(self, u):
        """Remainder f - |u|^(p+1) ln^a(u^2+2)/(p+1) - f1.

        Inside the table range the defining combination is used; in the tail
        the expansion with the first two terms removed.
        """
        u_arr = np.asarray(u, dtype=float)
        au = np.abs(u_arr)
        p, a = self.params.p_c, self.params.a
        out = np.zeros_like(au)
        core = (au > 0) & (au <= self.u_switch)
        tail = au > self.u_switch
        if np.any(core):
            x = au[core]
            L = np.log(x * x + 2.0)
            main = x ** (p + 1) * L**a / (p + 1)
            out[core] = self.f(x) - main - f1(x, self.params)
        if np.any(tail):
            x = au[tail]
            L = 2.0 * np.log(x)
            series = np.zeros_like(L)
            for k in range(2, len(self.asym_coeffs)):
                series = series + self.asym_coeffs[k] / L**k
            out[tail] = x ** (p + 1) * L**a / (p + 1) * series
        if np.isscalar(u):
            return float(out)
        return out


def f1(u, params: ModelParams):
    """-2a/(p_c+1)^2 |u|^(p_c+1) ln^(a-1)(u^2+2); sign that of -a."""
    p, a = params.p_c, params.a
    u_arr = np.asarray(u, dtype=float)
    au = np.abs(u_arr)
    out = np.zeros_like(au)
    nz = au > 0
    if np.any(nz):
        L = np.log(au[nz] ** 2 + 2.0)
        out[nz] = -2.0 * a / (p + 1) ** 2 * au[nz] ** (p + 1) * L ** (a - 1)
    if np.isscalar(u):
        return float(out)
    return out


@lru_cache(maxsize=16)
def _table_cache(n: int, a: float, theorem_mode: bool, u_switch: float, degree: int):
    return _build_table(ModelParams(n, a, theorem_mode), u_switch, degree)


def build_nonlinearity_table(
    params: ModelParams, u_switch: float = 2.0**24, degree: int = 24, seam_rtol: float = 1e-8
) -> NonlinearityTable:
    """Build (or fetch from cache) the interpolant table for f."""
    table = _table_cache(params.n, params.a, params.theorem_mode, float(u_switch), degree)
    if table.seam_residual > seam_rtol:
        raise RuntimeError(
            f"table/asymptotic seam residual {table.seam_residual:.2e} exceeds {seam_rtol:.2e}"
        )
    return table


def _build_table(params: ModelParams, u_switch: float, degree: int) -> NonlinearityTable:
    p, a = params.p_c, params.a

    def integrand(v):
        return v**p * math.log(v * v + 2.0) ** a

    # dyadic edges: [0, 1, 2, 4, ..., >= u_switch]
    edges = [0.0, 1.0]
    while edges[-1] < u_switch:
        edges.append(edges[-1] * 2.0)
    u_switch = edges[-1]
    edges = np.array(edges)

    # Chebyshev fit of h = f/u^(p+1) on each interval; node values of f by
    # cumulative adaptive quadrature from the interval's left edge.
    coeffs = []
    f_left = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        xs = np.cos(np.pi * (np.arange(degree + 1) + 0.5) / (degree + 1))  # Chebyshev pts
        us = lo + (xs + 1) * (hi - lo) / 2.0
        order = np.argsort(us)
        us_sorted = us[order]
        fvals_sorted = np.empty_like(us_sorted)
        prev_u, prev_f = lo, f_left
        for i, uu in enumerate(us_sorted):
            val, _ = quad(integrand, prev_u, uu, limit=200, epsabs=0.0, epsrel=1e-13)
            prev_f = prev_f + val
            prev_u = uu
            fvals_sorted[i] = prev_f
        val, _ = quad(integrand, prev_u, hi, limit=200, epsabs=0.0, epsrel=1e-13)
        f_left = prev_f + val
        fvals = np.empty_like(fvals_sorted)
        fvals[order] = fvals_sorted
        h = fvals / us ** (p + 1)
        # interpolate h at the Chebyshev points
        ck = _cheb_fit_points(xs, h, degree)
        coeffs.append(ck)

    table = NonlinearityTable(
        params=params,
        u_switch=float(u_switch),
        edges=edges,
        cheb_coeffs=coeffs,
        asym_coeffs=_asym_coeffs(params),
        seam_residual=0.0,
    )
    # seam check: interpolant vs tail expansion at the switch point
    lf_asym = table._log_f_asym_from_log(np.array([math.log(u_switch)])).item()
    f_core = table._h(np.array([u_switch])).item() * u_switch ** (p + 1)
    res = abs(math.exp(lf_asym) - f_core) / f_core
    table.seam_residual = res
    return table


def _cheb_fit_points(xs: np.ndarray, vals: np.ndarray, degree: int) -> np.ndarray:
    """Chebyshev coefficients interpolating (xs, vals) at first-kind points."""
    V = C.chebvander(xs, degree)
    return np.linalg.solve(V, vals)


def antiderivative_f(u, table: NonlinearityTable, return_flag: bool = False):
    """f(u) through the table (even in u)."""
    return table.f(u, return_flag=return_flag)


def f2(u, table: NonlinearityTable):
    """Second remainder of the f splitting; ~ C |u|^(p+1) ln^(a-2) at infinity."""
    return table.f2(u)


# ---------------------------------------------------------------------------
# scaled combinations used by the energy integrands (phi enters only via ln)
# ---------------------------------------------------------------------------


def scaled_potential(w, ln_phi: float, s: float, table: NonlinearityTable) -> np.ndarray:
    """exp(-2(p+1)s/(p-1)) s^(2a/(p-1)) f(phi w)  ==  s^(-a) f(phi w)/phi^(p+1).

    Evaluated entirely in log space so that phi far beyond double range is
    harmless.  Finite (O(|w|^(p+1))) even when f(phi w) itself overflows.
    """
    params = table.params
    p, a = params.p_c, params.a
    w_arr = np.asarray(w, dtype=float)
    aw = np.abs(w_arr)
    out = np.zeros_like(aw)
    nz = aw > 0
    if np.any(nz):
        lx = ln_phi + np.log(aw[nz])
        lf = table.log_f_from_log(lx)
        lval = lf - (p + 1) * ln_phi - a * math.log(s)
        out[nz] = np.where(lval < -740.0, 0.0, np.exp(np.maximum(lval, -745.0)))
    if np.isscalar(w):
        return float(out)
    return out


def nonlinear_density_log(w, log_arg, s: float, params: ModelParams) -> np.ndarray:
    """s^(-a) |w|^(p_c+1) L^a with L = ln(phi^2 w^2 + 2) supplied as ``log_arg``."""
    p, a = params.p_c, params.a
    w_arr = np.asarray(w, dtype=float)
    aw = np.abs(w_arr)
    out = np.zeros_like(aw)
    nz = aw > 0
    if np.any(nz):
        out[nz] = np.exp(
            -a * math.log(s) + (p + 1) * np.log(aw[nz]) + a * np.log(np.asarray(log_arg)[nz])
        )
    return out


# ---------------------------------------------------------------------------
# elementary-bound checks (tail comparisons between f, f1, f2 and the
# leading density), with fitted rather than assumed constants
# ---------------------------------------------------------------------------

_APPENDIX_KINDS = ("equiv1", "equiv2", "equiv3", "equiv5", "equiv6")


@dataclass(frozen=True)
class AppendixBoundReport:
    which: str
    z: float
    s: float
    lhs: float
    rhs: float
    slack: float
    constant_used: float


def _log_phi2w2p2_scalar(ln_phi: float, z: float) -> float:
    if z == 0.0:
        return math.log(2.0)
    A = 2.0 * ln_phi + 2.0 * math.log(abs(z))
    if A > 40.0:
        return A
    if A < -40.0:
        return math.log(2.0)
    return math.log(math.exp(A) + 2.0)


def appendix_bound_check(
    z: float,
    s: float,
    params: ModelParams,
    which: str,
    constant: float = 1.0,
    eps: float = 0.1,
    table: NonlinearityTable | None = None,
) -> AppendixBoundReport:
    """Evaluate one elementary tail bound at (z, s) with a given constant.

    The bounds compare f, f1, f2 at phi(s) z against the leading density
    s^(-a) |z|^(p+1) ln^a(phi^2 z^2 + 2); slack = rhs - lhs.  Large-argument
    sides are evaluated in a normalized form (divided by 1 + leading term) so
    that both sides stay in double range.
    """
    if which not in _APPENDIX_KINDS:
        raise ValueError(f"unknown bound kind {which!r}")
    if s < 1.0:
        raise ValueError("bounds are stated for s >= 1")
    if which in ("equiv5", "equiv6") and not params.a < 0:
        raise ValueError(f"{which} requires a < 0")
    p, a = params.p_c, params.a
    if table is None:
        table = build_nonlinearity_table(params)
    ln_phi = 2.0 * s / (p - 1) - a / (p - 1) * math.log(s)
    L = _log_phi2w2p2_scalar(ln_phi, z)

    if which in ("equiv1", "equiv2", "equiv3"):
        # normalized: lhs = F(phi z) / (1 + s^(-m) |phi z|^(p+1) L^a), rhs = C
        power = {"equiv1": 0, "equiv2": 1, "equiv3": 2}[which]
        if z == 0.0:
            lmain = -math.inf
        else:
            lmain = (p + 1) * (ln_phi + math.log(abs(z))) + a * math.log(L) - power * math.log(s)
        lden = np.logaddexp(0.0, lmain)
        if z == 0.0:
            lhs = 0.0
        elif which == "equiv1":
            lhs = math.exp(table.log_f_from_log(ln_phi + math.log(abs(z))) - lden)
        elif which == "equiv2":
            lf1 = (
                math.log(2.0 * abs(a) / (p + 1) ** 2)
                + (p + 1) * (ln_phi + math.log(abs(z)))
                + (a - 1) * math.log(L)
            ) if a != 0 else -math.inf
            lhs = math.exp(lf1 - lden) if np.isfinite(lf1) else 0.0
        else:
            # |f2| via the tail series with two leading terms removed
            cs = table.asym_coeffs
            series = sum(cs[k] / L**k for k in range(2, len(cs)))
            lf2 = (
                (p + 1) * (ln_phi + math.log(abs(z)))
                + a * math.log(L)
                - math.log(p + 1)
                + math.log(abs(series))
            )
            lhs = math.exp(lf2 - lden)
        rhs = constant
        return AppendixBoundReport(which, z, s, lhs, rhs, rhs - lhs, constant)

    if which == "equiv5":
        lhs = z * z
        density = math.exp(
            -a * math.log(s) + (p + 1) * math.log(abs(z)) + a * math.log(L)
        ) if z != 0 else 0.0
        rhs = eps * density + constant
        return AppendixBoundReport(which, z, s, lhs, rhs, rhs - lhs, constant)

    # equiv6
    lhs = math.exp(-a * math.log(s) + (p + 1) * math.log(abs(z)) + a * math.log(L)) if z else 0.0
    rhs = constant * abs(z) ** (p + 1) + constant * math.exp(-s)
    return AppendixBoundReport(which, z, s, lhs, rhs, rhs - lhs, constant)


def fit_appendix_constant(
    which: str,
    params: ModelParams,
    s_values=None,
    z_values=None,
    eps: float = 0.1,
    table: NonlinearityTable | None = None,
) -> float:
    """Smallest constant making slack >= 0 over the sweep grid.

    A certified envelope over the sample set: the sup of the constant-free
    ratio, never an assumed value.
    """
    if s_values is None:
        s_values = np.array([1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 200.0, 1000.0])
    if z_values is None:
        z_values = np.concatenate([[0.0], np.geomspace(1e-3, 1e6, 40)])
    if table is None:
        table = build_nonlinearity_table(params)
    worst = 0.0
    p, a = params.p_c, params.a
    for s in s_values:
        for z in z_values:
            rep = appendix_bound_check(z, float(s), params, which, constant=0.0, eps=eps, table=table)
            if which == "equiv1":
                worst = max(worst, rep.lhs)
                # lower side: leading density <= C (1 + f)
                if z != 0.0:
                    ln_phi = 2.0 * s / (p - 1) - a / (p - 1) * math.log(s)
                    L = _log_phi2w2p2_scalar(ln_phi, z)
                    lmain = (p + 1) * (ln_phi + math.log(abs(z))) + a * math.log(L)
                    lf = table.log_f_from_log(np.array([ln_phi + math.log(abs(z))])).item()
                    worst = max(worst, math.exp(lmain - np.logaddexp(0.0, lf)))
            elif which in ("equiv2", "equiv3"):
                worst = max(worst, rep.lhs)
            elif which == "equiv5":
                # C(eps) = sup (z^2 - eps * density)
                worst = max(worst, rep.lhs - rep.rhs)
            elif z != 0.0:
                denom = abs(z) ** (params.p_c + 1) + math.exp(-s)
                worst = max(worst, rep.lhs / denom)
    return worst
