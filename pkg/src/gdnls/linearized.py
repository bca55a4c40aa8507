"""Real-linear matrix form of the second variation at the profile.

Acting on v with phi the profile,

    S''(phi) v = (-d_xx - i*s*|phi|^(2s-2)*conj(phi)*phi_x - i*|phi|^(2s)*d_x
                  + omega0 + omega1*i*d_x) v
                 - i*s*|phi|^(2s-2)*phi*phi_x * conj(v).

The conj(v) term is conjugate-linear, so the operator is represented as a
2N x 2N real matrix on interleaved (Re, Im) nodal values.  Gauge and
translation invariance put i*phi and -phi_x in the kernel; differentiating
the stationary equation through the family gives S'' psi_hat = -B_xi phi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .functionals import ComplexField
from .profile import SolitonProfile
from .spectral import Grid, derivative, derivative_matrix


@dataclass(frozen=True)
class LinearizedOperator:
    grid: Grid
    matrix: np.ndarray
    profile: SolitonProfile
    asymmetry: float


def realify(v: np.ndarray) -> np.ndarray:
    """Interleave a complex nodal vector as (Re v_0, Im v_0, Re v_1, ...)."""
    out = np.empty(2 * len(v))
    out[0::2] = v.real
    out[1::2] = v.imag
    return out


def unrealify(v: np.ndarray) -> np.ndarray:
    return v[0::2] + 1j * v[1::2]


def assemble(p: SolitonProfile) -> LinearizedOperator:
    """Dense real-linear matrix of the second variation on p's grid."""
    grid = p.grid
    n = grid.points
    s = p.sigma
    phi = p.field
    phi_x = derivative(phi, grid)
    absphi = np.abs(phi)

    d1 = derivative_matrix(grid, 1)
    d2 = derivative_matrix(grid, 2)

    m = absphi ** (2.0 * s)
    g = -1j * s * absphi ** (2.0 * s - 2.0) * np.conj(phi) * phi_x
    h = -1j * s * absphi ** (2.0 * s - 2.0) * phi * phi_x

    # Exact product-rule rearrangement of the transport pair:
    #   -i*m*v' + g*v = -(i/2)*(m*v' + (m*v)') + Re(g)*v,
    # since Im(g) = -m'/2.  Collocation of the naive left-hand side is
    # asymmetric by an O(1) aliasing commutator; this form is symmetric
    # by construction while identical on band-limited fields.
    lin = (
        -d2
        + p.omega.omega0 * np.eye(n)
        + (p.omega.omega1 * 1j) * d1
        - 0.5j * (m[:, None] * d1 + d1 * m[None, :])
        + np.diag(g.real)
    )

    a = np.empty((2 * n, 2 * n))
    a[0::2, 0::2] = lin.real
    a[0::2, 1::2] = -lin.imag
    a[1::2, 0::2] = lin.imag
    a[1::2, 1::2] = lin.real
    idx = np.arange(n)
    a[2 * idx, 2 * idx] += h.real
    a[2 * idx, 2 * idx + 1] += h.imag
    a[2 * idx + 1, 2 * idx] += h.imag
    a[2 * idx + 1, 2 * idx + 1] -= h.real

    asymmetry = float(np.max(np.abs(a - a.T)) / np.max(np.abs(a)))
    return LinearizedOperator(grid=grid, matrix=a, profile=p, asymmetry=asymmetry)


def apply(op: LinearizedOperator, v: ComplexField) -> ComplexField:
    return ComplexField(op.grid, unrealify(op.matrix @ realify(v.values)))


def lowest_spectrum(op: LinearizedOperator, count: int) -> np.ndarray:
    """The ``count`` smallest eigenvalues of the symmetrized matrix.

    Discretization asymmetry is noise; it is removed by (A + A^T)/2 but
    surfaced in ``op.asymmetry``.
    """
    if count < 1 or count > 2 * op.grid.points:
        raise ConvergenceError(f"cannot return {count} eigenvalues")
    sym = 0.5 * (op.matrix + op.matrix.T)
    return np.linalg.eigvalsh(sym)[:count]
