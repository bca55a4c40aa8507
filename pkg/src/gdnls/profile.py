"""Solitary-wave profile construction and parameter derivatives.

The profile is phi(x) = A(x) * exp(i*Theta(x)) with

    A(x) = {(sigma+1)*kappa^2 / (2*sqrt(omega0)*cosh(sigma*kappa*x) - omega1)}^(1/(2*sigma)),
    Theta(x) = omega1*x/2 - (1/(2*sigma+2)) * int_{-inf}^x A(y)^(2*sigma) dy.

The phase integral has an explicit antiderivative (tanh half-angle
substitution), so both amplitude and phase are closed-form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GridTooSmallError
from .params import Omega, _as_omega, _as_sigma, kappa
from .spectral import Grid, derivative

# Tail threshold at the grid boundary; profiles whose amplitude exceeds this
# at x = L/2 are rejected as under-resolved truncations of the real line.
BOUNDARY_AMPLITUDE_TOL = 1e-12

DEFAULT_POINTS = 1024


@dataclass(frozen=True)
class SolitonProfile:
    """Sampled solitary-wave profile on a periodic grid."""

    sigma: float
    omega: Omega
    grid: Grid
    amplitude: np.ndarray
    phase: np.ndarray
    field: np.ndarray


def amplitude_at(sigma, omega, x):
    """Closed-form amplitude; even in x, strictly positive, maximal at 0."""
    s = _as_sigma(sigma)
    w = _as_omega(omega)
    kap = kappa(w)
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore"):
        denom = 2.0 * math.sqrt(w.omega0) * np.cosh(s * kap * x) - w.omega1
        out = ((s + 1.0) * kap**2 / denom) ** (1.0 / (2.0 * s))
    if out.ndim == 0:
        return float(out)
    return out


def phase_at(sigma, omega, x):
    """Closed-form phase, anchored so Theta -> 0 as x -> -inf when omega1 = 0.

    The running integral of A^(2*sigma) evaluates to
    (2*(sigma+1)/sigma) * [arctan(g*tanh(sigma*kappa*x/2)) + arctan(g)]
    with g = sqrt((2*sqrt(omega0)+omega1)/(2*sqrt(omega0)-omega1)).
    """
    s = _as_sigma(sigma)
    w = _as_omega(omega)
    kap = kappa(w)
    sq0 = math.sqrt(w.omega0)
    g = math.sqrt((2.0 * sq0 + w.omega1) / (2.0 * sq0 - w.omega1))
    x = np.asarray(x, dtype=float)
    out = w.omega1 * x / 2.0 - (np.arctan(g * np.tanh(s * kap * x / 2.0)) + math.atan(g)) / s
    if out.ndim == 0:
        return float(out)
    return out


def min_grid_length(sigma, omega, amplitude_tol: float = BOUNDARY_AMPLITUDE_TOL) -> float:
    """Smallest period whose boundary amplitude is below ``amplitude_tol``."""
    s = _as_sigma(sigma)
    w = _as_omega(omega)
    kap = kappa(w)
    c = (w.omega1 + (s + 1.0) * kap**2 * amplitude_tol ** (-2.0 * s)) / (
        2.0 * math.sqrt(w.omega0)
    )
    return 2.0 * math.acosh(c) / (s * kap)


def default_grid(sigma, omega, points: int = DEFAULT_POINTS) -> Grid:
    """Grid meeting the boundary-amplitude bound with margin, plus an
    aliasing floor keeping exp(-sigma*kappa*L/2) under 1e-14."""
    s = _as_sigma(sigma)
    kap = kappa(_as_omega(omega))
    l_amp = 1.08 * min_grid_length(sigma, omega)
    l_alias = 2.0 * math.log(1e14) / (s * kap)
    return Grid(length=max(40.0, l_amp, l_alias), points=points)


def sample_profile(sigma, omega, grid: Grid) -> SolitonProfile:
    s = _as_sigma(sigma)
    w = _as_omega(omega)
    boundary = amplitude_at(s, w, grid.length / 2.0)
    if boundary >= BOUNDARY_AMPLITUDE_TOL:
        raise GridTooSmallError(
            f"boundary amplitude {boundary:.3e} >= {BOUNDARY_AMPLITUDE_TOL}; "
            f"need length >= {min_grid_length(s, w):.3f}",
            min_length=min_grid_length(s, w),
        )
    x = grid.x
    amp = amplitude_at(s, w, x)
    ph = phase_at(s, w, x)
    return SolitonProfile(
        sigma=s,
        omega=w,
        grid=grid,
        amplitude=amp,
        phase=ph,
        field=amp * np.exp(1j * ph),
    )


def stationary_residual(p: SolitonProfile) -> float:
    """Max norm of -u'' + omega0*u + omega1*i*u' - i*|u|^(2*sigma)*u' on the grid."""
    u = p.field
    ux = derivative(u, p.grid, 1)
    uxx = derivative(u, p.grid, 2)
    r = -uxx + p.omega.omega0 * u + p.omega.omega1 * 1j * ux - 1j * np.abs(u) ** (2.0 * p.sigma) * ux
    return float(np.max(np.abs(r)))


def parameter_derivative(sigma, omega, direction, grid: Grid, step: float | None = None) -> np.ndarray:
    """Directional derivative of the profile family along ``direction`` in
    omega-space, by Richardson-extrapolated central differences on a fixed grid."""
    s = _as_sigma(sigma)
    w = _as_omega(omega)
    xi0, xi1 = float(direction[0]), float(direction[1])
    if xi0 == 0.0 and xi1 == 0.0:
        return np.zeros(grid.points, dtype=complex)
    if step is None:
        step = 1e-4 * (1.0 + math.hypot(w.omega0, w.omega1))

    def fields_at(h):
        try:
            plus = sample_profile(s, Omega(w.omega0 + h * xi0, w.omega1 + h * xi1), grid)
            minus = sample_profile(s, Omega(w.omega0 - h * xi0, w.omega1 - h * xi1), grid)
        except DomainError as exc:
            raise DomainError(f"finite-difference stencil leaves the admissible region: {exc}")
        return (plus.field - minus.field) / (2.0 * h)

    d_h = fields_at(step)
    d_h2 = fields_at(step / 2.0)
    return (4.0 * d_h2 - d_h) / 3.0
