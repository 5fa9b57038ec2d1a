"""Test problems with exact solutions: accretion, FRW-1, FRW-2, TOV and the
matched FRW-1/TOV shock and time-reversal models.

Every exact evaluator maps arrays (t, r) to (rho, v, A, B).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError

KAPPA_GR = 8.0 * math.pi
SIGMA_RAD = 1.0 / math.sqrt(3.0)

Evaluator = Callable[[float, np.ndarray], tuple]


def _as_arrays(t, r):
    return float(t), np.asarray(r, dtype=float)


# -- exact solutions ----------------------------------------------------------

def frw1_exact(t, r, sigma=SIGMA_RAD, kappa=KAPPA_GR):
    """Conformally flat FRW cosmology in Schwarzschild coordinates; valid for t < 0 too."""
    t, r = _as_arrays(t, r)
    xi = r / t
    if np.any(np.abs(xi) >= 1.0) or np.any(r <= 0.0):
        raise DomainError("FRW-1 needs 0 < r < |t|")
    v = xi / (1.0 + np.sqrt(1.0 - xi * xi))
    rho = 16.0 * v * v / (3.0 * (1.0 + sigma * sigma) ** 2 * kappa * r * r)
    a = 1.0 - v * v
    return rho, v, a, 1.0 / a


def frw2_exact(t, r, sigma=SIGMA_RAD, kappa=KAPPA_GR, psi0=1.0):
    """Second Schwarzschild-coordinate form of the FRW cosmology."""
    t, r = _as_arrays(t, r)
    disc = t ** 4 - r * r * psi0 ** 4
    if np.any(disc < 0.0):
        raise DomainError("FRW-2 needs t**4 >= r**2 psi0**4")
    tt = (t * t + np.sqrt(disc)) / (2.0 * psi0 * psi0)
    v = r / (2.0 * tt)
    rho = 4.0 / (3.0 * (1.0 + sigma * sigma) ** 2 * kappa * tt * tt)
    psi = psi0 * np.sqrt(tt / (4.0 * tt * tt + r * r))
    a = 1.0 - v * v
    return rho, v, a, 1.0 / (psi * psi * a)


def tov_gamma(sigma=SIGMA_RAD, kappa=KAPPA_GR):
    """Density coefficient of the singular isothermal sphere, rho = gamma / r**2."""
    s2 = sigma * sigma
    return 4.0 * s2 / (kappa * (1.0 + 6.0 * s2 + s2 * s2))


def tov_exact(t, r, sigma=SIGMA_RAD, kappa=KAPPA_GR, b0=1.0):
    """Static singular isothermal sphere."""
    _, r = _as_arrays(t, r)
    if np.any(r <= 0.0):
        raise DomainError("TOV needs r > 0")
    gamma = tov_gamma(sigma, kappa)
    s2 = sigma * sigma
    rho = gamma / (r * r)
    return rho, np.zeros_like(r), np.full_like(r, 1.0 - kappa * gamma), b0 * r ** (4.0 * s2 / (1.0 + s2))


def accretion_speed2(r, sigma=0.1, mass=1.0):
    """Squared infall speed on the supersonic branch of the steady accretion flow."""
    a = sigma * sigma / (1.0 - sigma * sigma)
    w_crit = a / (1.0 + a)
    out = np.empty_like(r)
    for i, ri in enumerate(r):
        if ri <= 2.0 * mass:
            raise DomainError("accretion flow is defined outside the horizon only")
        rhs = math.log(1.0 - 2.0 * mass / ri) + 4.0 * a * math.log(2.0 * mass / ri)

        def g(w):
            return math.log1p(-w) + a * math.log(w) - rhs

        lo, hi = w_crit, 1.0 - 1e-16
        if g(lo) < 0.0:
            raise DomainError(f"no steady accretion flow through r={ri:g}")
        out[i] = brentq(g, lo, hi, xtol=1e-16, rtol=1e-15, maxiter=200)
    return out


def accretion_exact(t, r, sigma=0.1, d0=1.6e-2, mass=1.0):
    """Steady accretion onto a Schwarzschild black hole without self-gravity."""
    _, r = _as_arrays(t, r)
    r = np.atleast_1d(r)
    w = accretion_speed2(r, sigma, mass)
    v = -np.sqrt(w)
    a = 1.0 - 2.0 * mass / r
    rho = d0 * (1.0 - w) / (-v * r * r * a)
    return rho, v, a, a.copy()


# -- problem catalogue ----------------------------------------------------------

@dataclass
class ProblemSpec:
    """Everything the driver needs to run one test case.

    ``left_state`` and ``right_state`` give (rho, v, A, B) used for ghost cells
    and metric seeds on each side; ``exact`` is the whole-domain solution when
    one is known. A boundary kind of "extrapolate" copies the first interior
    cell with zero slope instead.
    """

    name: str
    sigma: float
    kappa: float
    r_min: float
    r_max: float
    t_start: float
    t_end: float
    initial: Callable[[np.ndarray], tuple]
    left_state: Evaluator
    right_state: Evaluator
    exact: Evaluator | None = None
    left_boundary: str = "exact"
    right_boundary: str = "exact"
    interface: float | None = None
    params: dict = field(default_factory=dict)

    def metric_seed(self, t: float) -> tuple[float, float]:
        """(M, ln B) at r_min."""
        r = np.array([self.r_min])
        _, _, a, b = self.left_state(t, r)
        return float(self.r_min * (1.0 - a[0]) / 2.0), float(math.log(b[0]))

    def initial_metric(self, r_iface: np.ndarray):
        """Interface (A, B) of the initial data where they are known in closed form."""
        if self.interface is None:
            src = self.exact or self.left_state
            _, _, a, b = src(self.t_start, r_iface)
            return a, b
        left = r_iface < self.interface
        _, _, al, bl = self.left_state(self.t_start, np.where(left, r_iface, self.interface))
        _, _, ar, br = self.right_state(self.t_start, np.where(left, self.interface, r_iface))
        return np.where(left, al, ar), np.where(left, bl, br)


def accretion(sigma=0.1, d0=1.6e-2, r_min=2.2, r_max=20.2, t_end=160.0, rho_floor=1e-8):
    def ex(t, r):
        return accretion_exact(t, r, sigma, d0)

    def init(r):
        return np.full_like(r, rho_floor), np.zeros_like(r)

    return ProblemSpec("accretion", sigma, 0.0, r_min, r_max, 0.0, t_end, init,
                       left_state=ex, right_state=ex, exact=ex, left_boundary="extrapolate",
                       params={"d0": d0, "rho_floor": rho_floor})


def _smooth(name, fn, sigma, kappa, t0, t1, r_min, r_max, **kw):
    def ex(t, r):
        return fn(t, r, sigma, kappa, **kw)

    def init(r):
        rho, v, _, _ = ex(t0, r)
        return rho, v

    return ProblemSpec(name, sigma, kappa, r_min, r_max, t0, t1, init, ex, ex, exact=ex, params=dict(kw))


def frw1(sigma=SIGMA_RAD, kappa=KAPPA_GR, t_start=15.0, t_end=16.0, r_min=3.0, r_max=7.0):
    return _smooth("frw1", frw1_exact, sigma, kappa, t_start, t_end, r_min, r_max)


def frw2(sigma=SIGMA_RAD, kappa=KAPPA_GR, t_start=15.0, t_end=16.0, r_min=3.0, r_max=7.0, psi0=1.0):
    return _smooth("frw2", frw2_exact, sigma, kappa, t_start, t_end, r_min, r_max, psi0=psi0)


def tov(sigma=SIGMA_RAD, kappa=KAPPA_GR, t_start=15.0, t_end=16.0, r_min=3.0, r_max=7.0, b0=1.0):
    return _smooth("tov", tov_exact, sigma, kappa, t_start, t_end, r_min, r_max, b0=b0)


def matched_parameters(r0=5.0, sigma=SIGMA_RAD, kappa=KAPPA_GR):
    """(v0, t0, B0) that glue FRW-1 (inside) to TOV (outside) continuously at r0."""
    gamma = tov_gamma(sigma, kappa)
    v0 = math.sqrt(kappa * gamma)
    t0 = r0 * (1.0 + v0 * v0) / (2.0 * v0)
    s2 = sigma * sigma
    b0 = r0 ** (-4.0 * s2 / (1.0 + s2)) / (1.0 - v0 * v0)
    return v0, t0, b0


def _matched(name, r0, sigma, kappa, r_min, r_max, duration, reverse):
    v0, t0, b0 = matched_parameters(r0, sigma, kappa)
    if reverse:
        t0 = -t0

    def left(t, r):
        return frw1_exact(t, r, sigma, kappa)

    def right(t, r):
        return tov_exact(t, r, sigma, kappa, b0)

    def init(r):
        inner = r < r0
        rl, vl, _, _ = left(t0, np.where(inner, r, r0))
        rr, vr, _, _ = right(t0, np.where(inner, r0, r))
        return np.where(inner, rl, rr), np.where(inner, vl, vr)

    return ProblemSpec(name, sigma, kappa, r_min, r_max, t0, t0 + duration, init, left, right,
                       interface=r0, params={"r0": r0, "v0": v0, "b0": b0})


def shock_model(r0=5.0, sigma=SIGMA_RAD, kappa=KAPPA_GR, r_min=3.0, r_max=7.0, duration=1.0):
    return _matched("shock", r0, sigma, kappa, r_min, r_max, duration, reverse=False)


def time_reversal(r0=5.0, sigma=SIGMA_RAD, kappa=KAPPA_GR, r_min=3.0, r_max=7.0, duration=1.0):
    return _matched("timereversal", r0, sigma, kappa, r_min, r_max, duration, reverse=True)


PROBLEMS = {
    "accretion": accretion,
    "frw1": frw1,
    "frw2": frw2,
    "tov": tov,
    "shock": shock_model,
    "timereversal": time_reversal,
}


def get_problem(name: str, **overrides) -> ProblemSpec:
    try:
        factory = PROBLEMS[name]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; choose from {', '.join(PROBLEMS)}") from None
    return factory(**overrides)


shock_model_init = shock_model
time_reversal_init = time_reversal
