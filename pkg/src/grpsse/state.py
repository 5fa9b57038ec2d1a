"""Fluid states, conversions, fluxes and characteristic structure.

All array-level helpers accept scalars or numpy arrays of matching shape; the
dataclass wrappers are thin conveniences used by the per-interface solvers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eos import BarotropicEos
from .errors import UnphysicalStateError


@dataclass(frozen=True)
class PrimitiveState:
    rho: float
    v: float

    @property
    def lorentz2(self) -> float:
        return 1.0 / (1.0 - self.v * self.v)

    def is_valid(self) -> bool:
        return self.rho > 0.0 and abs(self.v) < 1.0


@dataclass(frozen=True)
class ConservativeState:
    t00: float
    t01: float

    def as_array(self) -> np.ndarray:
        return np.array([self.t00, self.t01])


@dataclass(frozen=True)
class EigenDecomposition:
    lambda_minus: float
    lambda_plus: float
    r_minus: np.ndarray
    r_plus: np.ndarray
    r_inverse: np.ndarray

    @property
    def r_matrix(self) -> np.ndarray:
        return np.column_stack([self.r_minus, self.r_plus])


# -- array level ------------------------------------------------------------

def conserved(rho, v, sigma):
    """(T00, T01) from (rho, v) for p = sigma**2 rho."""
    s2 = sigma * sigma
    w2 = 1.0 / (1.0 - v * v)
    h = (1.0 + s2) * rho * w2
    return h - s2 * rho, h * v


def stress11(rho, v, sigma):
    s2 = sigma * sigma
    return rho * (v * v + s2) / (1.0 - v * v)


def is_recoverable(t00, t01, sigma):
    """Elementwise test that (t00, t01) maps to rho > 0, |v| < 1."""
    s2 = sigma * sigma
    t00 = np.asarray(t00, dtype=float)
    t01 = np.asarray(t01, dtype=float)
    b = (1.0 + s2) * t00
    disc = b * b - 4.0 * s2 * t01 * t01
    with np.errstate(invalid="ignore", divide="ignore"):
        v = 2.0 * t01 / (b + np.sqrt(disc))
        rho = t00 - v * t01
    return (t00 > 0.0) & (disc >= 0.0) & (np.abs(v) < 1.0) & (rho > 0.0)


def primitive(t00, t01, sigma, time=None):
    """Invert :func:`conserved` in closed form.

    The velocity is the root with |v| < 1 of
    sigma**2 t01 v**2 - (1 + sigma**2) t00 v + t01 = 0, taken in the
    rationalized form so that small t01 loses no digits; rho = t00 - v t01.
    """
    s2 = sigma * sigma
    t00 = np.asarray(t00, dtype=float)
    t01 = np.asarray(t01, dtype=float)
    b = (1.0 + s2) * t00
    disc = b * b - 4.0 * s2 * t01 * t01
    with np.errstate(invalid="ignore", divide="ignore"):
        v = 2.0 * t01 / (b + np.sqrt(disc))
        rho = t00 - v * t01
    bad = ~((t00 > 0.0) & (disc >= 0.0) & (np.abs(v) < 1.0) & (rho > 0.0))
    if np.any(bad):
        idx = np.flatnonzero(np.atleast_1d(bad))[0]
        raise UnphysicalStateError(
            f"unrecoverable conservative state T00={np.atleast_1d(t00)[idx]:.6e}, "
            f"T01={np.atleast_1d(t01)[idx]:.6e}",
            index=int(idx) if np.ndim(bad) else None,
            time=time,
        )
    if v.ndim == 0:
        return float(rho), float(v)
    return rho, v


def flux_arrays(rho, v, sigma):
    """Physical flux F = (T01, T11) without the metric factor."""
    _, t01 = conserved(rho, v, sigma)
    return t01, stress11(rho, v, sigma)


def char_speeds(v, metric_factor, sigma):
    lm = metric_factor * (v - sigma) / (1.0 - v * sigma)
    lp = metric_factor * (v + sigma) / (1.0 + v * sigma)
    return lm, lp


def source_vector(r, a, b, rho, v, sigma, kappa):
    """Geometric and gravitational source S(r, A, B, U) of the balance law."""
    t00, t01 = conserved(rho, v, sigma)
    t11 = stress11(rho, v, sigma)
    p = sigma * sigma * rho
    m = np.sqrt(a * b)
    s1 = -m * 2.0 * t01 / r
    s2 = -m * (
        2.0 * t11 / r
        + (1.0 - a) / (2.0 * a * r) * (t00 - t11)
        + kappa * r / a * (t00 * t11 - t01 * t01)
        - 2.0 * p / r
    )
    return s1, s2


def dcons_dprim(rho, v, sigma):
    """Jacobian d(T00, T01)/d(rho, v) as ((j00, j01), (j10, j11))."""
    s2 = sigma * sigma
    w2 = 1.0 / (1.0 - v * v)
    h = rho * (1.0 + s2)
    j00 = (1.0 + s2) * w2 - s2
    j01 = 2.0 * v * w2 * w2 * h
    j10 = (1.0 + s2) * w2 * v
    j11 = w2 * w2 * (1.0 + v * v) * h
    return (j00, j01), (j10, j11)


def prim_slopes(rho, v, dt00, dt01, sigma):
    """Primitive slopes (rho', v') from conservative slopes at the state (rho, v)."""
    (j00, j01), (j10, j11) = dcons_dprim(rho, v, sigma)
    det = j00 * j11 - j01 * j10
    drho = (j11 * dt00 - j01 * dt01) / det
    dv = (-j10 * dt00 + j00 * dt01) / det
    return drho, dv


def eigenvectors(v, sigma):
    """Right eigenvector matrix R and its inverse, stacked over the leading axes."""
    v = np.asarray(v, dtype=float)
    c = sigma
    rmat = np.empty(v.shape + (2, 2))
    rmat[..., 0, 0] = 1.0 - v * c
    rmat[..., 1, 0] = v - c
    rmat[..., 0, 1] = 1.0 + v * c
    rmat[..., 1, 1] = v + c
    fac = 1.0 / ((1.0 - v * v) * 2.0 * c)
    rinv = np.empty_like(rmat)
    rinv[..., 0, 0] = fac * (v + c)
    rinv[..., 0, 1] = -fac * (1.0 + v * c)
    rinv[..., 1, 0] = fac * (c - v)
    rinv[..., 1, 1] = fac * (1.0 - v * c)
    return rmat, rinv


# -- value-type wrappers ------------------------------------------------------

def prim_to_cons(state: PrimitiveState, eos: BarotropicEos) -> ConservativeState:
    t00, t01 = conserved(state.rho, state.v, eos.sigma)
    return ConservativeState(float(t00), float(t01))


def cons_to_prim(state: ConservativeState, eos: BarotropicEos) -> PrimitiveState:
    rho, v = primitive(state.t00, state.t01, eos.sigma)
    return PrimitiveState(rho, v)


def flux(state: ConservativeState, eos: BarotropicEos) -> np.ndarray:
    rho, v = primitive(state.t00, state.t01, eos.sigma)
    return np.array(flux_arrays(rho, v, eos.sigma))


def eigen(state: PrimitiveState, a_metric: float, b_metric: float,
          eos: BarotropicEos) -> EigenDecomposition:
    m = math.sqrt(a_metric * b_metric)
    lm, lp = char_speeds(state.v, m, eos.sigma)
    rmat, rinv = eigenvectors(state.v, eos.sigma)
    return EigenDecomposition(float(lm), float(lp), rmat[:, 0].copy(), rmat[:, 1].copy(), rinv)


def riemann_invariants(state: PrimitiveState, eos: BarotropicEos):
    """(psi_minus, psi_plus) = atanh(v) +/- invariant integral."""
    y = math.atanh(state.v)
    q = eos.invariant_integral(state.rho)
    return y + q, y - q
