"""Barotropic equations of state p = p(rho)."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


def _check_density(rho):
    if np.any(np.asarray(rho) <= 0.0):
        raise DomainError("density must be positive")


class EquationOfState(ABC):
    """Interface every barotropic law has to provide."""

    @abstractmethod
    def pressure(self, rho):
        ...

    @abstractmethod
    def sound_speed(self, rho):
        ...

    @abstractmethod
    def dpressure(self, rho):
        """First derivative dp/drho."""

    @abstractmethod
    def invariant_integral(self, rho):
        """Antiderivative of sqrt(p'(w)) / (w + p(w)), zero at rho = 1."""


@dataclass(frozen=True)
class BarotropicEos(EquationOfState):
    """Linear law p = sigma**2 * rho with constant sound speed sigma in (0, 1).

    Examples
    --------
    >>> eos = BarotropicEos(0.5)
    >>> eos.pressure(0.08)
    0.02
    """

    sigma: float

    def __post_init__(self):
        if not 0.0 < self.sigma < 1.0:
            raise DomainError(f"sigma must lie in (0, 1), got {self.sigma!r}")

    @property
    def sigma2(self) -> float:
        return self.sigma * self.sigma

    @property
    def invariant_coefficient(self) -> float:
        """k = sigma / (1 + sigma**2), the slope of the invariant integral in ln(rho)."""
        return self.sigma / (1.0 + self.sigma2)

    def pressure(self, rho):
        _check_density(rho)
        return self.sigma2 * rho

    def dpressure(self, rho):
        _check_density(rho)
        return self.sigma2 * np.ones_like(rho) if np.ndim(rho) else self.sigma2

    def d2pressure(self, rho):
        _check_density(rho)
        return 0.0 * rho

    def sound_speed(self, rho):
        _check_density(rho)
        return self.sigma * np.ones_like(rho) if np.ndim(rho) else self.sigma

    def invariant_integral(self, rho):
        _check_density(rho)
        if np.ndim(rho):
            return self.invariant_coefficient * np.log(rho)
        return self.invariant_coefficient * math.log(rho)

    def genuine_nonlinearity_margin(self, rho):
        """p'' + 2 p' (1 - p') / (rho + p); positive means both fields are genuinely nonlinear."""
        cs2 = self.dpressure(rho)
        return self.d2pressure(rho) + 2.0 * cs2 * (1.0 - cs2) / (rho + self.pressure(rho))
