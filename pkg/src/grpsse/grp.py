"""Analytic resolution of the generalized Riemann problem at one interface.

The solver works in primitive variables V = (rho, v), which obey
V_t + J V_r = H in smooth regions. Given the two one-sided limits and slopes
at an interface it returns the Riemann value U* at xi = 0 together with the
instantaneous time derivative (dU/dt)*.

Only the configuration "left rarefaction / right shock" is resolved directly;
the others go through the reflection r - r0 -> r0 - r, v -> -v. Under that map
H_1 is odd and H_2 even in v, so the reflected problem carries the source -H.
The flag ``GrpInput.source_sign`` tracks this.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .eos import BarotropicEos
from .errors import GrpError
from .riemann import (
    WaveFan,
    WaveKind,
    fan_state_left,
    lambda_minus,
    lambda_plus,
    phi_partials,
    sample,
    solve_star,
)
from .state import ConservativeState, PrimitiveState, dcons_dprim

ACOUSTIC_TOL = 1e-9
SONIC_TOL = 1e-13
QUAD_NODES = 4
QUAD_MAX_NODES = 1024
QUAD_RTOL = 1e-12


@dataclass(frozen=True)
class GrpInput:
    """Piecewise-linear data at one interface.

    ``dv_left`` and ``dv_right`` are primitive slopes (rho', v').
    """

    v_left: PrimitiveState
    v_right: PrimitiveState
    dv_left: tuple
    dv_right: tuple
    a_star: float
    b_star: float
    r0: float
    kappa: float
    eos: BarotropicEos
    source_sign: float = 1.0

    @property
    def metric_factor(self) -> float:
        return math.sqrt(self.a_star * self.b_star)


@dataclass(frozen=True)
class LinearPair:
    """One linear relation a (drho/dt)* + b (dv/dt)* = d."""

    a: float
    b: float
    d: float


@dataclass(frozen=True)
class SourceTerms:
    h1: float
    h2: float
    s_minus: float
    s_plus: float


def source_terms(V: PrimitiveState, a_metric: float, b_metric: float, r: float,
                 kappa: float, eos: BarotropicEos, sign: float = 1.0) -> SourceTerms:
    """Source H of the primitive system and the characteristic combinations s-/+.

    ``sign`` = -1 gives the source of the reflected problem.
    """
    rho, v = V.rho, V.v
    c2 = eos.sigma2
    c = eos.sigma
    p = c2 * rho
    h = rho + p
    v2 = v * v
    fac = -sign * math.sqrt(a_metric * b_metric) / (r * (1.0 - v2 * c2))
    kr2 = kappa * r * r / (2.0 * a_metric)
    h1 = fac * 2.0 * v * h * (1.0 - 0.5 * kr2 * h)
    h2 = fac * (1.0 - v2) * (
        -2.0 * v2 * c2
        + (1.0 - a_metric) * (1.0 - v2 * c2) / (2.0 * a_metric)
        + kr2 * (p + rho * v2 * c2)
    )
    q = h2 / (1.0 - v2)
    w = c * h1 / h
    return SourceTerms(h1, h2, q + w, q - w)


def primitive_jacobian(V: PrimitiveState, metric_factor: float, eos: BarotropicEos) -> np.ndarray:
    """Coefficient matrix J of V_t + J V_r = H."""
    c2 = eos.sigma2
    h = V.rho * (1.0 + c2)
    v = V.v
    fac = metric_factor / (1.0 - v * v * c2)
    diag = v * (1.0 - c2)
    return fac * np.array([[diag, h], [(1.0 - v * v) ** 2 * c2 / h, diag]])


def smooth_time_derivative(V: PrimitiveState, slope, a_metric, b_metric, r, kappa,
                           eos: BarotropicEos, sign: float = 1.0) -> tuple[float, float]:
    """V_t = H - J V_r for smooth data."""
    src = source_terms(V, a_metric, b_metric, r, kappa, eos, sign)
    jac = primitive_jacobian(V, math.sqrt(a_metric * b_metric), eos)
    drho, dv = slope
    return (src.h1 - jac[0, 0] * drho - jac[0, 1] * dv,
            src.h2 - jac[1, 0] * drho - jac[1, 1] * dv)


# -- rarefaction ----------------------------------------------------------------

@lru_cache(maxsize=None)
def _gauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def _char_log_integral(w: float, sigma: float) -> float:
    """Antiderivative of m / (lambda_+ - lambda_-) across a left fan, in w = beta / m."""
    return ((sigma - 1.0) ** 2 * math.log1p(w) - (sigma + 1.0) ** 2 * math.log1p(-w)) / (4.0 * sigma)


def _fan_source_weight(beta: float, inp: GrpInput, fan: WaveFan) -> float:
    """(s_- / (lambda_+ - lambda_-)) at fan slope beta."""
    st = fan_state_left(beta, fan)
    m = fan.metric_factor
    src = source_terms(st, inp.a_star, inp.b_star, inp.r0, inp.kappa, inp.eos, inp.source_sign)
    return src.s_minus / (lambda_plus(st.v, m, fan.sigma) - beta)


def initial_dpsi_minus(inp: GrpInput) -> float:
    """(D_- psi_- / Dt) at the left state, from the initial data.

    Uses D_- = D_+ + (lambda_- - lambda_+) d/dr and D_+ psi_- = s_-.
    """
    st = inp.v_left
    eos = inp.eos
    m = inp.metric_factor
    src = source_terms(st, inp.a_star, inp.b_star, inp.r0, inp.kappa, eos, inp.source_sign)
    drho, dv = inp.dv_left
    dpsi_dr = dv / (1.0 - st.v * st.v) + eos.sigma * drho / (st.rho * (1.0 + eos.sigma2))
    lm = lambda_minus(st.v, m, eos.sigma)
    lp = lambda_plus(st.v, m, eos.sigma)
    return src.s_minus + (lm - lp) * dpsi_dr


def dpsi_minus_in_fan(inp: GrpInput, fan: WaveFan, beta_end: float) -> float:
    """D_- psi_- / Dt along alpha = 0 of the left fan, evaluated at slope ``beta_end``.

    Integrates the linear ODE in beta exactly: the exponent in closed form, the
    source convolution by Gauss-Legendre quadrature refined by doubling.
    """
    sigma = fan.sigma
    m = fan.metric_factor
    beta_l = lambda_minus(inp.v_left.v, m, sigma)
    g_end = _char_log_integral(beta_end / m, sigma)
    d0 = initial_dpsi_minus(inp)
    decay = math.exp(-(g_end - _char_log_integral(beta_l / m, sigma)))
    if beta_end == beta_l:
        return d0
    half = 0.5 * (beta_end - beta_l)
    mid = 0.5 * (beta_end + beta_l)

    def quad(n):
        x, w = _gauss(n)
        total = 0.0
        for xi, wi in zip(x, w):
            b = mid + half * xi
            total += wi * _fan_source_weight(b, inp, fan) * math.exp(-(g_end - _char_log_integral(b / m, sigma)))
        return total * half

    n = QUAD_NODES
    prev = quad(n)
    while n < QUAD_MAX_NODES:
        n *= 2
        cur = quad(n)
        scale = abs(cur) + abs(d0 * decay)
        if abs(cur - prev) <= QUAD_RTOL * scale or scale == 0.0:
            prev = cur
            break
        prev = cur
    return d0 * decay + prev


def rarefaction_pair_left(inp: GrpInput, fan: WaveFan) -> LinearPair:
    """Linear relation contributed by a left rarefaction."""
    if fan.left_wave is not WaveKind.RAREFACTION:
        raise GrpError("left wave is not a rarefaction")
    eos = inp.eos
    st = fan.star
    m = fan.metric_factor
    sigma = eos.sigma
    a = sigma / (st.rho * (1.0 + eos.sigma2))
    b = 1.0 / (1.0 - st.v * st.v)
    lm = lambda_minus(st.v, m, sigma)
    lp = lambda_plus(st.v, m, sigma)
    src = source_terms(st, inp.a_star, inp.b_star, inp.r0, inp.kappa, eos, inp.source_sign)
    dpsi = dpsi_minus_in_fan(inp, fan, lm)
    d = (lp * dpsi - lm * src.s_minus) / (lp - lm)
    return LinearPair(a, b, d)


# -- shock ----------------------------------------------------------------------

def shock_pi(V: PrimitiveState, speed: float, a_metric, b_metric, r, kappa,
             eos: BarotropicEos, sign: float = 1.0) -> tuple[float, float]:
    """Remainder (Pi_1, Pi_2) in M V_t = (v^2 - c^2) D_s V / Dt + Pi.

    Evaluated as -(s / m) N H, where N is J with the off-diagonal signs
    flipped and the metric factor removed.
    """
    src = source_terms(V, a_metric, b_metric, r, kappa, eos, sign)
    c2 = eos.sigma2
    h = V.rho * (1.0 + c2)
    v = V.v
    diag = v * (1.0 - c2)
    off = (1.0 - v * v) ** 2 * c2 / h
    k = -speed / math.sqrt(a_metric * b_metric)
    return k * (diag * src.h1 - h * src.h2), k * (-off * src.h1 + diag * src.h2)


def shock_pair_right(inp: GrpInput, fan: WaveFan) -> LinearPair:
    """Linear relation contributed by a right shock."""
    if fan.right_wave is not WaveKind.SHOCK:
        raise GrpError("right wave is not a shock")
    eos = inp.eos
    c2 = eos.sigma2
    st, rs = fan.star, inp.v_right
    m = fan.metric_factor
    s = fan.shock_speeds[1]
    h_star = st.rho * (1.0 + c2)
    big_k = st.v * st.v - c2 - s * st.v * (1.0 - c2) / m
    den = (1.0 - st.v * rs.v) ** 2
    ell = (rs.v * rs.v - 1.0) / den
    phi_r, phi_rb = phi_partials(st.rho, rs.rho, eos)
    a = phi_r * big_k + ell * s * (1.0 - st.v * st.v) ** 2 * c2 / (m * h_star)
    b = phi_r * s * h_star / m + ell * big_k

    pi1, pi2 = shock_pi(st, s, inp.a_star, inp.b_star, inp.r0, inp.kappa, eos, inp.source_sign)
    rt, vt = smooth_time_derivative(rs, inp.dv_right, inp.a_star, inp.b_star, inp.r0,
                                    inp.kappa, eos, inp.source_sign)
    ds_rho = rt + s * inp.dv_right[0]
    ds_v = vt + s * inp.dv_right[1]
    d = (phi_r * pi1 + ell * pi2
         + (st.v * st.v - c2) * ((st.v * st.v - 1.0) / den * ds_v - phi_rb * ds_rho))
    return LinearPair(a, b, d)


# -- assembly -------------------------------------------------------------------

def solve_nonsonic(left: LinearPair, right: LinearPair) -> tuple[float, float]:
    det = left.a * right.b - right.a * left.b
    scale = abs(left.a * right.b) + abs(right.a * left.b)
    if abs(det) <= 1e-300 or abs(det) <= 1e-14 * scale:
        raise GrpError(f"singular GRP system (det={det:.3e})")
    return ((left.d * right.b - right.d * left.b) / det,
            (left.a * right.d - right.a * left.d) / det)


def solve_sonic(inp: GrpInput, fan: WaveFan) -> tuple[float, float]:
    """Time derivatives when the t-axis lies inside the left rarefaction."""
    if fan.left_wave is not WaveKind.RAREFACTION:
        raise GrpError("sonic branch needs a left rarefaction")
    m = fan.metric_factor
    head, tail = fan.fan_edges[0]
    tol = SONIC_TOL * m
    if head > tol or tail < -tol:
        raise GrpError("t-axis is outside the left fan")
    eos = inp.eos
    st = fan_state_left(0.0, fan)
    dpsi = dpsi_minus_in_fan(inp, fan, 0.0)
    src = source_terms(st, inp.a_star, inp.b_star, inp.r0, inp.kappa, eos, inp.source_sign)
    h = st.rho * (1.0 + eos.sigma2)
    return (h / (2.0 * eos.sigma) * (dpsi - src.s_plus),
            0.5 * (1.0 - st.v * st.v) * (dpsi + src.s_plus))


def solve_acoustic(inp: GrpInput) -> tuple[float, float]:
    """Time derivatives when the side limits coincide and only linear waves emerge."""
    st = inp.v_left
    eos = inp.eos
    c = eos.sigma
    m = inp.metric_factor
    lm = lambda_minus(st.v, m, c)
    lp = lambda_plus(st.v, m, c)
    if lm >= 0.0:
        return smooth_time_derivative(st, inp.dv_left, inp.a_star, inp.b_star, inp.r0,
                                      inp.kappa, eos, inp.source_sign)
    if lp <= 0.0:
        return smooth_time_derivative(inp.v_right, inp.dv_right, inp.a_star, inp.b_star,
                                      inp.r0, inp.kappa, eos, inp.source_sign)
    src = source_terms(st, inp.a_star, inp.b_star, inp.r0, inp.kappa, eos, inp.source_sign)
    h = st.rho * (1.0 + eos.sigma2)
    g = h / (c * (1.0 - st.v * st.v))
    rl, vl = inp.dv_left
    rr, vr = inp.dv_right
    rho_t = -0.5 * (lp * rl + lm * rr + g * (lp * vl - lm * vr)) + src.h1
    v_t = -0.5 * (lp * vl + lm * vr + (lp * rl - lm * rr) / g) + src.h2
    return rho_t, v_t


def reflect(inp: GrpInput) -> GrpInput:
    """Mirror the data about the interface: sides swap, v -> -v, rho' -> -rho'."""
    return replace(
        inp,
        v_left=PrimitiveState(inp.v_right.rho, -inp.v_right.v),
        v_right=PrimitiveState(inp.v_left.rho, -inp.v_left.v),
        dv_left=(-inp.dv_right[0], inp.dv_right[1]),
        dv_right=(-inp.dv_left[0], inp.dv_left[1]),
        source_sign=-inp.source_sign,
    )


def mirror_fan(fan: WaveFan) -> WaveFan:
    """Riemann solution of the reflected data, built without re-solving."""
    def flip(st):
        return PrimitiveState(st.rho, -st.v)

    sl, sr = fan.shock_speeds
    el, er = fan.fan_edges
    return WaveFan(
        left=flip(fan.right),
        right=flip(fan.left),
        star=flip(fan.star),
        left_wave=fan.right_wave,
        right_wave=fan.left_wave,
        shock_speeds=(None if sr is None else -sr, None if sl is None else -sl),
        fan_edges=(None if er is None else (-er[1], -er[0]),
                   None if el is None else (-el[1], -el[0])),
        metric_factor=fan.metric_factor,
        sigma=fan.sigma,
    )


def _mirror_pair(pair: LinearPair) -> LinearPair:
    return LinearPair(pair.a, -pair.b, pair.d)


def is_acoustic(inp: GrpInput) -> bool:
    l, r = inp.v_left, inp.v_right
    jump = math.hypot(l.rho - r.rho, l.v - r.v)
    return jump <= ACOUSTIC_TOL * (math.hypot(l.rho, l.v) + 1e-300)


def resolve_primitive(inp: GrpInput, fan: WaveFan | None = None):
    """Riemann value at xi = 0 and (drho/dt, dv/dt) there.

    Returns ``(state, rho_t, v_t)``.
    """
    if fan is None:
        fan = solve_star(inp.v_left, inp.v_right, inp.metric_factor, inp.eos)
    if is_acoustic(inp):
        # the Riemann value stays exact; only the derivatives use the linear theory
        rt, vt = solve_acoustic(inp)
        return sample(fan, 0.0), rt, vt
    m = fan.metric_factor
    tol = SONIC_TOL * m
    args = (inp.a_star, inp.b_star, inp.r0, inp.kappa, inp.eos, inp.source_sign)

    if fan.left_wave is WaveKind.SHOCK:
        if fan.shock_speeds[0] > 0.0:
            return (inp.v_left,) + smooth_time_derivative(inp.v_left, inp.dv_left, *args)
    else:
        head, tail = fan.fan_edges[0]
        if head > tol:
            return (inp.v_left,) + smooth_time_derivative(inp.v_left, inp.dv_left, *args)
        if tail >= -tol:
            return (fan_state_left(0.0, fan),) + solve_sonic(inp, fan)

    if fan.right_wave is WaveKind.SHOCK:
        if fan.shock_speeds[1] < 0.0:
            return (inp.v_right,) + smooth_time_derivative(inp.v_right, inp.dv_right, *args)
    else:
        tail, head = fan.fan_edges[1]
        if head < -tol:
            return (inp.v_right,) + smooth_time_derivative(inp.v_right, inp.dv_right, *args)
        if tail <= tol:
            rinp, rfan = reflect(inp), mirror_fan(fan)
            st = fan_state_left(0.0, rfan)
            rt, vt = solve_sonic(rinp, rfan)
            return PrimitiveState(st.rho, -st.v), rt, -vt

    rinp = rfan = None
    if fan.left_wave is WaveKind.RAREFACTION:
        left = rarefaction_pair_left(inp, fan)
    else:
        rinp, rfan = reflect(inp), mirror_fan(fan)
        left = _mirror_pair(shock_pair_right(rinp, rfan))
    if fan.right_wave is WaveKind.SHOCK:
        right = shock_pair_right(inp, fan)
    else:
        if rinp is None:
            rinp, rfan = reflect(inp), mirror_fan(fan)
        right = _mirror_pair(rarefaction_pair_left(rinp, rfan))
    rt, vt = solve_nonsonic(left, right)
    return (fan.star, rt, vt)


def cons_time_derivative(V: PrimitiveState, drho_dt: float, dv_dt: float,
                         eos: BarotropicEos) -> np.ndarray:
    """Chain rule from (rho_t, v_t) to (T00_t, T01_t)."""
    (j00, j01), (j10, j11) = dcons_dprim(V.rho, V.v, eos.sigma)
    return np.array([j00 * drho_dt + j01 * dv_dt, j10 * drho_dt + j11 * dv_dt])


def resolve(inp: GrpInput) -> tuple[ConservativeState, np.ndarray]:
    """Riemann value U* and time derivative (dU/dt)* at the interface."""
    st, rt, vt = resolve_primitive(inp)
    s2 = inp.eos.sigma2
    w2 = 1.0 / (1.0 - st.v * st.v)
    hh = (1.0 + s2) * st.rho * w2
    return (ConservativeState(hh - s2 * st.rho, hh * st.v),
            cons_time_derivative(st, rt, vt, inp.eos))
