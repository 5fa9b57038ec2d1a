"""Discrete integration of the metric equations on cell interfaces.

The mass function M and log-lapse ln B live on interfaces, so the metric is
single valued there and cells see its linear interpolant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HorizonError


@dataclass(frozen=True)
class MetricSlice:
    """Interface values of M, A = 1 - 2M/r and ln B."""

    m: np.ndarray
    a: np.ndarray
    ln_b: np.ndarray
    r: np.ndarray

    @property
    def b(self) -> np.ndarray:
        return np.exp(self.ln_b)

    @property
    def lapse_factor(self) -> np.ndarray:
        """sqrt(A B) per interface."""
        return np.sqrt(self.a * self.b)

    def cell_average(self):
        """Cell values (A_j, B_j) as the mean of the two bounding interfaces."""
        b = self.b
        return 0.5 * (self.a[:-1] + self.a[1:]), 0.5 * (b[:-1] + b[1:])

    @classmethod
    def from_mass(cls, m, ln_b, r, time=None) -> "MetricSlice":
        m = np.asarray(m, dtype=float)
        a = 1.0 - 2.0 * m / r
        check_horizon(a, ln_b, time)
        return cls(m, a, np.asarray(ln_b, dtype=float), r)


def check_horizon(a, ln_b, time=None) -> None:
    bad = ~((a > 0.0) & (a <= 1.0 + 1e-12) & np.isfinite(ln_b))
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise HorizonError(f"metric left the admissible range, A={a[i]:.6e}", index=i, time=time)


def lnb_gradient(a, r, t11, kappa):
    """(ln B)_r = (1 - A) / (A r) + kappa r T11 / A."""
    return ((1.0 - a) / r + kappa * r * t11) / a


def half_step(slice_: MetricSlice, t01_rp, t11_half, dt, kappa, seed=None, time=None) -> MetricSlice:
    """Metric at t^{n+1/2}.

    M advances locally with dM/dt = -kappa r^2 sqrt(AB) T01 / 2 evaluated on
    the Riemann values; ln B is rebuilt by the trapezoidal rule from the left
    end. ``seed`` = (M, ln B) at the first interface overrides both there.
    """
    r = slice_.r
    m = slice_.m - 0.25 * dt * kappa * r * r * slice_.lapse_factor * t01_rp
    if seed is not None:
        m = m.copy()
        m[0] = seed[0]
    a = 1.0 - 2.0 * m / r
    check_horizon(a, slice_.ln_b, time)
    g = lnb_gradient(a, r, t11_half, kappa)
    dr = r[1] - r[0]
    lnb0 = slice_.ln_b[0] if seed is None else seed[1]
    ln_b = np.empty_like(m)
    ln_b[0] = lnb0
    ln_b[1:] = lnb0 + np.cumsum(0.5 * dr * (g[:-1] + g[1:]))
    return MetricSlice(m, a, ln_b, r)


def full_step(r, t00_cells, t11_cells, kappa, seed, time=None) -> MetricSlice:
    """Metric at t^{n+1} from cell averages, by the midpoint rule in space.

    ``seed`` = (M, ln B) at the first interface.
    """
    dr = r[1] - r[0]
    rc = 0.5 * (r[:-1] + r[1:])
    m = np.empty_like(r)
    m[0] = seed[0]
    m[1:] = seed[0] + np.cumsum(0.5 * dr * kappa * rc * rc * t00_cells)
    a = 1.0 - 2.0 * m / r
    check_horizon(a, np.zeros_like(a), time)
    ac = 0.5 * (a[:-1] + a[1:])
    ln_b = np.empty_like(r)
    ln_b[0] = seed[1]
    ln_b[1:] = seed[1] + np.cumsum(dr * lnb_gradient(ac, rc, t11_cells, kappa))
    return MetricSlice(m, a, ln_b, r)
