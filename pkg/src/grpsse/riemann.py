"""Exact Riemann solver for the homogeneous system with a frozen metric factor.

Wave curves are parametrized by x = ln(rho) and the rapidity y = atanh(v).
Through a state K the left (lambda_-) curve reads y = y_K - G(x; x_K) and
the right (lambda_+) curve y = y_K + G(x; x_K), where

    G(x; x_K) = k (x - x_K)            x <= x_K   (rarefaction)
    G(x; x_K) = atanh(Phi(rho, rho_K)) x >  x_K   (shock)

with k = sigma / (1 + sigma**2). G is C^1 and strictly increasing, so the star
density is the unique root of a strictly decreasing scalar function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .eos import BarotropicEos
from .errors import DomainError, RiemannError
from .state import PrimitiveState

RHO_FLOOR = 1e-14
RHO_CEIL = 1e14
_X_MIN = math.log(RHO_FLOOR)
_X_MAX = math.log(RHO_CEIL)


class WaveKind(str, Enum):
    SHOCK = "shock"
    RAREFACTION = "rarefaction"


# -- jump function ------------------------------------------------------------

def _phi_ratio(qm1: float, sigma: float) -> float:
    """Phi as a function of q = rho / rho_bar, given q - 1."""
    s2 = sigma * sigma
    q = 1.0 + qm1
    return sigma * qm1 / math.sqrt((q + s2) * (1.0 + s2 * q))


def _dphi_ratio(q: float, sigma: float) -> float:
    s2 = sigma * sigma
    d = s2 * q * q + (1.0 + s2 * s2) * q + s2
    dd = 2.0 * s2 * q + 1.0 + s2 * s2
    return sigma * (d - 0.5 * (q - 1.0) * dd) / (d * math.sqrt(d))


def phi_jump(rho: float, rho_bar: float, eos: BarotropicEos) -> float:
    """Shock strength Phi(rho, rho_bar) = (v - v_bar) / (1 - v v_bar) across a shock."""
    if rho <= 0.0 or rho_bar <= 0.0:
        raise DomainError("densities must be positive")
    p, pb = eos.sigma2 * rho, eos.sigma2 * rho_bar
    return math.sqrt((p - pb) * (rho - rho_bar) / ((rho + pb) * (rho_bar + p)))


def phi_partials(rho: float, rho_bar: float, eos: BarotropicEos) -> tuple[float, float]:
    """Partial derivatives (Phi_rho, Phi_rho_bar) for rho != rho_bar.

    Delta = sqrt((p - p_bar) / (rho - rho_bar)) is sigma exactly for this law; it
    is taken as such rather than from the difference quotient, which loses all
    digits for weak shocks.
    """
    if rho == rho_bar:
        raise DomainError("Phi partials are singular for coincident densities")
    s2 = eos.sigma2
    p, pb = s2 * rho, s2 * rho_bar
    delta = eos.sigma
    den = 2.0 * ((rho + pb) * (rho_bar + p)) ** 1.5
    phi_r = (rho_bar + pb) * (s2 / delta * (rho + pb) + delta * (rho_bar + p)) / den
    phi_rb = -(rho + p) * (s2 / delta * (rho_bar + p) + delta * (rho + pb)) / den
    if rho < rho_bar:
        # Phi carries |rho - rho_bar|; the displayed forms assume rho > rho_bar
        phi_r, phi_rb = -phi_r, -phi_rb
    return phi_r, phi_rb


def wave_curve(x: float, x_k: float, sigma: float) -> tuple[float, float]:
    """G(x; x_K) and its derivative in x."""
    k = sigma / (1.0 + sigma * sigma)
    d = x - x_k
    if d <= 0.0:
        return k * d, k
    qm1 = math.expm1(d)
    phi = _phi_ratio(qm1, sigma)
    q = qm1 + 1.0
    return math.atanh(phi), q * _dphi_ratio(q, sigma) / (1.0 - phi * phi)


# -- fan ----------------------------------------------------------------------

@dataclass(frozen=True)
class WaveFan:
    """Self-similar solution of one Riemann problem.

    ``shock_speeds`` and ``fan_edges`` hold one entry per side, None where the
    wave on that side is of the other kind.
    """

    left: PrimitiveState
    right: PrimitiveState
    star: PrimitiveState
    left_wave: WaveKind
    right_wave: WaveKind
    shock_speeds: tuple
    fan_edges: tuple
    metric_factor: float
    sigma: float

    @property
    def leftmost_speed(self) -> float:
        if self.left_wave is WaveKind.SHOCK:
            return self.shock_speeds[0]
        return self.fan_edges[0][0]

    @property
    def rightmost_speed(self) -> float:
        if self.right_wave is WaveKind.SHOCK:
            return self.shock_speeds[1]
        return self.fan_edges[1][1]

    @property
    def left_tail(self) -> float:
        """Speed of the trailing edge of the left wave (equals the head for a shock)."""
        if self.left_wave is WaveKind.SHOCK:
            return self.shock_speeds[0]
        return self.fan_edges[0][1]

    @property
    def right_tail(self) -> float:
        if self.right_wave is WaveKind.SHOCK:
            return self.shock_speeds[1]
        return self.fan_edges[1][0]


def lambda_minus(v: float, m: float, sigma: float) -> float:
    return m * (v - sigma) / (1.0 - v * sigma)


def lambda_plus(v: float, m: float, sigma: float) -> float:
    return m * (v + sigma) / (1.0 + v * sigma)


def shock_speed(star: PrimitiveState, side: PrimitiveState, m: float, sigma: float,
                family: int) -> float:
    """Coordinate speed of the shock joining ``star`` to the pre-shock state ``side``.

    The pre-shock fluid crosses the front at the relative speed
    u = sigma sqrt((q + sigma^2) / (1 + sigma^2 q)), q = rho* / rho_side, which
    follows from the jump conditions without cancellation for weak shocks; the
    front velocity is then the relativistic sum of v_side and -/+ u.
    """
    s2 = sigma * sigma
    q = star.rho / side.rho
    u = sigma * math.sqrt((q + s2) / (1.0 + s2 * q))
    if family > 0:
        return m * (side.v + u) / (1.0 + side.v * u)
    return m * (side.v - u) / (1.0 - side.v * u)


def _star_root(xl, yl, xr, yr, sigma):
    """Solve y_L - G(x; x_L) = y_R + G(x; x_R) for x = ln(rho*)."""
    k = sigma / (1.0 + sigma * sigma)

    def f(x):
        gl, dgl = wave_curve(x, xl, sigma)
        gr, dgr = wave_curve(x, xr, sigma)
        return yl - yr - gl - gr, -(dgl + dgr)

    x_lo = min(xl, xr)
    f_lo, _ = f(x_lo)
    if f_lo <= 0.0:
        # both rarefactions: f is linear below min(x_L, x_R)
        x = 0.5 * (yl - yr) / k + 0.5 * (xl + xr)
        if x < _X_MIN:
            raise RiemannError(f"star density below {RHO_FLOOR:g}: vacuum forms")
        return x
    x_hi = max(xl, xr)
    f_hi, _ = f(x_hi)
    if f_hi >= 0.0:
        step = 1.0
        x_lo, f_lo = x_hi, f_hi
        while True:
            x_hi = x_lo + step
            if x_hi > _X_MAX:
                raise RiemannError(f"star density above {RHO_CEIL:g}")
            f_hi, _ = f(x_hi)
            if f_hi < 0.0:
                break
            x_lo, f_lo = x_hi, f_hi
            step *= 2.0
    # safeguarded Newton on [x_lo, x_hi] with f(x_lo) > 0 > f(x_hi)
    x = x_lo - f_lo * (x_hi - x_lo) / (f_hi - f_lo)
    for _ in range(100):
        fx, dfx = f(x)
        if fx == 0.0:
            return x
        if fx > 0.0:
            x_lo = x
        else:
            x_hi = x
        x_new = x - fx / dfx
        if not x_lo < x_new < x_hi:
            x_new = 0.5 * (x_lo + x_hi)
        if abs(x_new - x) <= 4e-16 * max(1.0, abs(x)):
            return x_new
        x = x_new
    raise RiemannError("star-state iteration did not converge")


def solve_star(left: PrimitiveState, right: PrimitiveState, metric_factor: float,
               eos: BarotropicEos) -> WaveFan:
    """Exact solution of the Riemann problem with data (left, right)."""
    sigma = eos.sigma
    m = metric_factor
    for st in (left, right):
        if not st.is_valid():
            raise DomainError(f"inadmissible state {st}")
    xl, xr = math.log(left.rho), math.log(right.rho)
    yl, yr = math.atanh(left.v), math.atanh(right.v)
    if xl == xr and yl == yr:
        x, y = xl, yl
    else:
        x = _star_root(xl, yl, xr, yr, sigma)
        gl, _ = wave_curve(x, xl, sigma)
        gr, _ = wave_curve(x, xr, sigma)
        # both curves give y*; average the two roundings
        y = 0.5 * ((yl - gl) + (yr + gr))
    star = PrimitiveState(math.exp(x), math.tanh(y))

    speeds = [None, None]
    edges = [None, None]
    if x > xl:
        lw = WaveKind.SHOCK
        speeds[0] = shock_speed(star, left, m, sigma, -1)
    else:
        lw = WaveKind.RAREFACTION
        edges[0] = (lambda_minus(left.v, m, sigma), lambda_minus(star.v, m, sigma))
    if x > xr:
        rw = WaveKind.SHOCK
        speeds[1] = shock_speed(star, right, m, sigma, +1)
    else:
        rw = WaveKind.RAREFACTION
        edges[1] = (lambda_plus(star.v, m, sigma), lambda_plus(right.v, m, sigma))
    fan = WaveFan(left, right, star, lw, rw, tuple(speeds), tuple(edges), m, sigma)
    _check_entropy(fan)
    return fan


def _check_entropy(fan: WaveFan) -> None:
    m, sigma = fan.metric_factor, fan.sigma
    tol = 1e-10 * m
    if fan.left_wave is WaveKind.SHOCK:
        s = fan.shock_speeds[0]
        if not (lambda_minus(fan.left.v, m, sigma) + tol > s > lambda_minus(fan.star.v, m, sigma) - tol):
            raise RiemannError("left shock violates the Lax condition")
    if fan.right_wave is WaveKind.SHOCK:
        s = fan.shock_speeds[1]
        if not (lambda_plus(fan.star.v, m, sigma) + tol > s > lambda_plus(fan.right.v, m, sigma) - tol):
            raise RiemannError("right shock violates the Lax condition")


def fan_state_left(xi: float, fan: WaveFan) -> PrimitiveState:
    """State inside a left rarefaction at slope xi (lambda_- = xi)."""
    sigma = fan.sigma
    k = sigma / (1.0 + sigma * sigma)
    w = xi / fan.metric_factor
    v = (sigma + w) / (1.0 + sigma * w)
    psi = math.atanh(fan.left.v) + k * math.log(fan.left.rho)
    return PrimitiveState(math.exp((psi - math.atanh(v)) / k), v)


def fan_state_right(xi: float, fan: WaveFan) -> PrimitiveState:
    """State inside a right rarefaction at slope xi (lambda_+ = xi)."""
    sigma = fan.sigma
    k = sigma / (1.0 + sigma * sigma)
    w = xi / fan.metric_factor
    v = (w - sigma) / (1.0 - sigma * w)
    psi = math.atanh(fan.right.v) - k * math.log(fan.right.rho)
    return PrimitiveState(math.exp((math.atanh(v) - psi) / k), v)


def sample(fan: WaveFan, xi: float) -> PrimitiveState:
    """Self-similar solution at xi = (r - r0) / t."""
    if fan.left_wave is WaveKind.SHOCK:
        if xi < fan.shock_speeds[0]:
            return fan.left
    else:
        head, tail = fan.fan_edges[0]
        if xi <= head:
            return fan.left
        if xi < tail:
            return fan_state_left(xi, fan)
    if fan.right_wave is WaveKind.SHOCK:
        if xi > fan.shock_speeds[1]:
            return fan.right
    else:
        tail, head = fan.fan_edges[1]
        if xi >= head:
            return fan.right
        if xi > tail:
            return fan_state_right(xi, fan)
    return fan.star
