"""Discrete conserved quantities, action, symmetry generators, H1 geometry.

All functionals use the real L2 pairing (v, w) = Re int v * conj(w) dx,
discretized by the rectangle rule on the periodic grid, with spectral
derivatives.  The three invariants of the flow are

    E(u)  = 1/2 ||u_x||^2 - 1/(2*(sigma+1)) * (i*u_x, |u|^(2*sigma) u),
    Q0(u) = 1/2 ||u||^2,
    Q1(u) = 1/2 (i*u_x, u),

and the action is S_omega(u) = E + omega0*Q0 + omega1*Q1.  d(omega) is the
action evaluated on the sampled solitary-wave profile; it is the scalar
function whose omega-derivatives drive the whole stability analysis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .params import _as_omega, _as_sigma
from .profile import default_grid, sample_profile
from .spectral import Grid, derivative


@dataclass(frozen=True)
class ComplexField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        if len(self.values) != self.grid.points:
            raise DomainError(
                f"field has {len(self.values)} samples for a grid of {self.grid.points}"
            )


@dataclass(frozen=True)
class ConservedLedger:
    E: float
    Q0: float
    Q1: float
    t: float


def l2_inner(u: ComplexField, v: ComplexField) -> float:
    """Real L2 pairing Re int u * conj(v) dx."""
    return float(np.real(np.vdot(v.values, u.values)) * u.grid.spacing)


def h1_inner(u: ComplexField, v: ComplexField) -> float:
    ux = derivative(u.values, u.grid)
    vx = derivative(v.values, v.grid)
    dot = np.vdot(v.values, u.values) + np.vdot(vx, ux)
    return float(np.real(dot) * u.grid.spacing)


def h1_norm(u: ComplexField) -> float:
    return float(np.sqrt(max(h1_inner(u, u), 0.0)))


def mass(u: ComplexField) -> float:
    return float(0.5 * np.sum(np.abs(u.values) ** 2) * u.grid.spacing)


def momentum(u: ComplexField) -> float:
    ux = derivative(u.values, u.grid)
    return float(0.5 * np.real(np.sum(1j * ux * np.conj(u.values))) * u.grid.spacing)


def energy(u: ComplexField, sigma) -> float:
    s = _as_sigma(sigma)
    v = u.values
    ux = derivative(v, u.grid)
    grad = 0.5 * np.sum(np.abs(ux) ** 2)
    pairing = np.real(np.sum(1j * ux * np.conj(np.abs(v) ** (2.0 * s) * v)))
    return float((grad - pairing / (2.0 * (s + 1.0))) * u.grid.spacing)


def action(u: ComplexField, sigma, omega) -> float:
    w = _as_omega(omega)
    return energy(u, sigma) + w.omega0 * mass(u) + w.omega1 * momentum(u)


def apply_B(j: int, u: ComplexField) -> ComplexField:
    """Symmetry generators: B0 u = u (gauge), B1 u = i*u_x (translation)."""
    if j == 0:
        return ComplexField(u.grid, u.values.copy())
    if j == 1:
        return ComplexField(u.grid, 1j * derivative(u.values, u.grid))
    raise DomainError(f"generator index must be 0 or 1, got {j}")


def conserved_ledger(u: ComplexField, sigma, t: float = 0.0) -> ConservedLedger:
    return ConservedLedger(E=energy(u, sigma), Q0=mass(u), Q1=momentum(u), t=t)


def d_value(sigma, omega, grid: Grid | None = None) -> float:
    """d(omega): action of the sampled profile.

    This is the single independent oracle behind every closed-form
    derivative check in the moments layer; keep it free of any
    quadrature shared with those closed forms.
    """
    s = _as_sigma(sigma)
    w = _as_omega(omega)
    if grid is None:
        grid = default_grid(s, w)
    p = sample_profile(s, w, grid)
    return action(ComplexField(grid, p.field), s, w)
