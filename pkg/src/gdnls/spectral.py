"""Fourier helpers shared by the profile, operator and simulator layers.

All fields live on a uniform periodic grid of N points covering
[-L/2, L/2).  Derivatives are Fourier multipliers; integrals are the
rectangle rule, which is spectrally accurate for smooth periodic data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid: period ``length``, ``points`` a power of two."""

    length: float
    points: int

    def __post_init__(self):
        if self.length <= 0:
            raise DomainError(f"grid length must be positive, got {self.length}")
        n = self.points
        if n < 16 or (n & (n - 1)) != 0:
            raise DomainError(f"grid points must be a power of two >= 16, got {n}")

    @property
    def spacing(self) -> float:
        return self.length / self.points

    @property
    def x(self) -> np.ndarray:
        n = self.points
        return (np.arange(n) - n // 2) * self.spacing

    @property
    def wavenumbers(self) -> np.ndarray:
        """Fourier wavenumbers in FFT order (Nyquist entry negative)."""
        return 2.0 * math.pi * np.fft.fftfreq(self.points, d=self.spacing)

    @property
    def wavenumbers_odd(self) -> np.ndarray:
        """Wavenumbers with the Nyquist mode zeroed, for odd-order derivatives."""
        k = self.wavenumbers.copy()
        k[self.points // 2] = 0.0
        return k


def derivative(values: np.ndarray, grid: Grid, order: int = 1) -> np.ndarray:
    """Spectral derivative of periodic samples."""
    if order % 2 == 1:
        mult = (1j * grid.wavenumbers_odd) ** order
    else:
        mult = (1j * grid.wavenumbers) ** order
    return np.fft.ifft(mult * np.fft.fft(values))

def shift(values: np.ndarray, grid: Grid, s: float) -> np.ndarray:
    """Translate samples by s (not necessarily a grid multiple): u(x) -> u(x - s)."""
    k = grid.wavenumbers_odd
    return np.fft.ifft(np.exp(-1j * k * s) * np.fft.fft(values))


def integrate(values: np.ndarray, grid: Grid) -> complex | float:
    return values.sum() * grid.spacing


def derivative_matrix(grid: Grid, order: int = 1) -> np.ndarray:
    """Dense real matrix of the spectral derivative on nodal values."""
    n = grid.points
    if order % 2 == 1:
        mult = (1j * grid.wavenumbers_odd) ** order
    else:
        mult = (1j * grid.wavenumbers) ** order
    cols = np.fft.ifft(mult[:, None] * np.fft.fft(np.eye(n), axis=0), axis=0)
    return np.ascontiguousarray(cols.real)
