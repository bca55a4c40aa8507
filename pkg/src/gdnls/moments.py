"""Hessian and third-derivative calculus of d(omega), with FD oracles.

Two independent routes are kept for every quantity:

* closed forms assembled from the moment integrals alpha_0, alpha_1 and
  the prefactor kappa_tilde (params layer, adaptive quadrature);
* finite differences of d(omega) = action of the sampled profile
  (functionals layer, spectral grid sums).

At the degenerate line omega1 = 2*z0*sqrt(omega0) the Hessian has a zero
eigenvalue with eigenvector xi = (-omega0 * d_00, d_01); the third
directional derivative of d along xi is the quantity whose non-vanishing
drives the borderline instability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    InconsistentBranchError,
    NotDegenerateError,
    ZeroVectorError,
)
from .functionals import ComplexField, d_value, mass, momentum
from .params import (
    DEFAULT_QUADRATURE,
    Omega,
    QuadratureSpec,
    _as_omega,
    _as_sigma,
    alpha_moments,
    f_sigma,
    find_z0,
    kappa,
    kappa_tilde,
    require_borderline_sigma,
)
from .profile import DEFAULT_POINTS, min_grid_length, sample_profile
from .spectral import Grid

# |det| <= DEGENERACY_TOL * ||H||_F^2 qualifies as a degenerate point.
DEGENERACY_TOL = 1e-6
BRANCH_TOL = 1e-4
HESSIAN_FD_STEP = 1e-3
THEOREM_SIGMA_MIN = 1.5


@dataclass(frozen=True)
class HessianReport:
    d_grad: tuple
    hessian: np.ndarray
    det: float
    eigenvalues: tuple
    eigenvectors: np.ndarray
    f_value: float
    fd_residual: float

    def to_dict(self) -> dict:
        return {
            "d_grad": list(self.d_grad),
            "hessian": self.hessian.tolist(),
            "det": self.det,
            "eigenvalues": list(self.eigenvalues),
            "eigenvectors": self.eigenvectors.tolist(),
            "f_value": self.f_value,
            "fd_residual": self.fd_residual,
        }


@dataclass(frozen=True)
class DegeneracyReport:
    sigma: float
    omega0: float
    z0: float
    omega_star: Omega
    xi: tuple
    branch: str
    nu: float
    nu_fd: float
    nu_reduced: float
    kernel_residual: float
    hessian: np.ndarray
    det: float
    in_theorem_range: bool

    def to_dict(self) -> dict:
        return {
            "sigma": self.sigma,
            "omega0": self.omega0,
            "z0": self.z0,
            "omega_star": [self.omega_star.omega0, self.omega_star.omega1],
            "xi": list(self.xi),
            "branch": self.branch,
            "nu": self.nu,
            "nu_fd": self.nu_fd,
            "nu_reduced": self.nu_reduced,
            "kernel_residual": self.kernel_residual,
            "hessian": self.hessian.tolist(),
            "det": self.det,
            "in_theorem_range": self.in_theorem_range,
        }


def _kappa_tilde_eff(s: float, w: Omega) -> float:
    # Prefactor entering every moment closed form.  Fixed against the
    # independent finite-difference route (and the exact mass identity
    # Q0 = ((s+1)*kappa^2/(2*sqrt(w0)))^(1/s) * alpha0): it differs from
    # kappa_tilde by 2^(-2/s).
    return kappa_tilde(s, w) * 2.0 ** (-2.0 / s)


def hessian_closed(sigma, omega, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> np.ndarray:
    """Closed-form Hessian of d.

    d_00 = kt/sqrt(w0) * (2*w1^2 - 8*(s-1)*w0) * a0 - kt/w0 * kappa^2 * w1 * a1,
    d_01 = 4*kt*w1*(s-2)*sqrt(w0) * a0 + 2*kt*kappa^2 * a1,
    d_11 = w0 * d_00.
    """
    s = _as_sigma(sigma)
    if s <= 1.0:
        raise DomainError(f"Hessian closed forms require sigma > 1, got {s}")
    w = _as_omega(omega)
    w0, w1 = w.omega0, w.omega1
    kap2 = kappa(w) ** 2
    kt = _kappa_tilde_eff(s, w)
    a = alpha_moments(s, w, spec)
    sq0 = math.sqrt(w0)
    d00 = kt / sq0 * (2.0 * w1**2 - 8.0 * (s - 1.0) * w0) * a.alpha0 - kt / w0 * kap2 * w1 * a.alpha1
    d01 = 4.0 * kt * w1 * (s - 2.0) * sq0 * a.alpha0 + 2.0 * kt * kap2 * a.alpha1
    return np.array([[d00, d01], [d01, w0 * d00]])


def _stencil_grid(sigma, omegas, points: int = DEFAULT_POINTS) -> Grid:
    """Common grid admissible for every omega in the stencil."""
    s = _as_sigma(sigma)
    lengths = [1.08 * min_grid_length(s, w) for w in omegas]
    alias = max(2.0 * math.log(1e14) / (s * kappa(w)) for w in omegas)
    return Grid(length=max(40.0, alias, *lengths), points=points)


def _omega_shifted(w: Omega, dw0: float, dw1: float) -> Omega:
    try:
        return Omega(w.omega0 + dw0, w.omega1 + dw1)
    except DomainError as exc:
        raise DomainError(f"finite-difference stencil leaves the admissible region: {exc}")


def hessian_fd(
    sigma,
    omega,
    grid: Grid | None = None,
    step: float = HESSIAN_FD_STEP,
    richardson: bool = True,
) -> np.ndarray:
    """Second-difference Hessian of d_value on a 3x3 stencil.

    One Richardson level brings the truncation error to O(step^4); the
    same grid is reused for every stencil point so that the periodic
    truncation error cancels in the differences.
    """
    s = _as_sigma(sigma)
    w = _as_omega(omega)
    if grid is None:
        corners = [
            _omega_shifted(w, i * step, j * step) for i in (-1, 1) for j in (-1, 1)
        ]
        grid = _stencil_grid(s, [w, *corners])

    def once(h):
        vals = {}
        for i in (-1, 0, 1):
            for j in (-1, 0, 1):
                vals[i, j] = d_value(s, _omega_shifted(w, i * h, j * h), grid)
        h00 = (vals[1, 0] - 2.0 * vals[0, 0] + vals[-1, 0]) / h**2
        h11 = (vals[0, 1] - 2.0 * vals[0, 0] + vals[0, -1]) / h**2
        h01 = (vals[1, 1] - vals[1, -1] - vals[-1, 1] + vals[-1, -1]) / (4.0 * h**2)
        return np.array([[h00, h01], [h01, h11]])

    if not richardson:
        return once(step)
    return (4.0 * once(step / 2.0) - once(step)) / 3.0


def third_partials(sigma, omega, spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """Third partials of d: (d_000, d_001, d_011, d_111).

    d_001 and d_011 are explicit in the moments; the other two follow from
    the structural relations w0*d_000 = d_011 - d_00 and d_111 = w0*d_001.
    """
    s = _as_sigma(sigma)
    if s <= 1.0:
        raise DomainError(f"third-partial closed forms require sigma > 1, got {s}")
    w = _as_omega(omega)
    w0, w1 = w.omega0, w.omega1
    kap2 = kappa(w) ** 2
    kt = _kappa_tilde_eff(s, w)
    a = alpha_moments(s, w, spec)
    sq0 = math.sqrt(w0)

    d001 = (
        2.0 * w1 * kt * a.alpha0 / (s * kap2 * sq0)
        * (4.0 * (2.0 - 3.0 * s) * (s - 2.0) * w0 - (s - 1.0) * kap2)
        + kt * a.alpha1 / (s * w0)
        * (4.0 * (2.0 - s) * w0 - 2.0 * s * w1**2 - (1.0 + s) * kap2)
    )
    d011 = (
        4.0 * sq0 * kt * a.alpha0 / (s * kap2)
        * ((3.0 * s - 2.0) * (s - 2.0) * w1**2 + (s - 1.0) ** 2 * kap2)
        + 2.0 * (3.0 * s - 2.0) * w1 * kt * a.alpha1 / s
    )
    d00 = hessian_closed(s, w, spec)[0, 0]
    d000 = (d011 - d00) / w0
    d111 = w0 * d001
    return d000, d001, d011, d111


def third_partials_fd(
    sigma,
    omega,
    grid: Grid | None = None,
    step: float = 1e-2,
    richardson: bool = True,
):
    """Third central differences of d_value, same ordering as third_partials."""
    s = _as_sigma(sigma)
    w = _as_omega(omega)
    if grid is None:
        corners = [
            _omega_shifted(w, i * step, j * step)
            for i in (-2, 2)
            for j in (-2, 2)
        ]
        grid = _stencil_grid(s, [w, *corners])

    def dv(dw0, dw1):
        return d_value(s, _omega_shifted(w, dw0, dw1), grid)

    def once(h):
        d000 = (dv(2 * h, 0) - 2 * dv(h, 0) + 2 * dv(-h, 0) - dv(-2 * h, 0)) / (2 * h**3)
        d111 = (dv(0, 2 * h) - 2 * dv(0, h) + 2 * dv(0, -h) - dv(0, -2 * h)) / (2 * h**3)
        d001 = (
            (dv(h, h) - 2 * dv(0, h) + dv(-h, h))
            - (dv(h, -h) - 2 * dv(0, -h) + dv(-h, -h))
        ) / (2 * h**3)
        d011 = (
            (dv(h, h) - 2 * dv(h, 0) + dv(h, -h))
            - (dv(-h, h) - 2 * dv(-h, 0) + dv(-h, -h))
        ) / (2 * h**3)
        return np.array([d000, d001, d011, d111])

    if not richardson:
        return tuple(once(step))
    return tuple((4.0 * once(step / 2.0) - once(step)) / 3.0)


def zero_eigenvector(
    sigma,
    omega,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    det_tol: float = DEGENERACY_TOL,
):
    """Kernel eigenvector xi = (-omega0*d_00, d_01) at a degenerate point."""
    w = _as_omega(omega)
    h = hessian_closed(sigma, w, spec)
    scale = float(np.linalg.norm(h))
    det = float(np.linalg.det(h))
    if abs(det) > det_tol * scale**2:
        raise NotDegenerateError(
            f"|det d''| = {abs(det):.3e} > {det_tol:.1e} * ||d''||^2 = {det_tol * scale**2:.3e}"
        )
    xi = (-w.omega0 * h[0, 0], h[0, 1])
    if math.hypot(*xi) <= 1e-14 * scale:
        raise ZeroVectorError("zero-eigenvalue eigenvector candidate vanishes")
    return xi


def branch_detect(
    sigma,
    omega,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    tol: float = BRANCH_TOL,
) -> str:
    """Which sign relation d_01 = -+ sqrt(omega0) * d_00 holds: 'minus' or 'plus'.

    Also checks the squared identity d_01^2 = omega0 * d_00^2 to 1e-5
    relative, which is det d'' = 0 restated.
    """
    w = _as_omega(omega)
    h = hessian_closed(sigma, w, spec)
    a = h[0, 1]
    b = math.sqrt(w.omega0) * h[0, 0]
    scale = max(abs(a), abs(b))
    if scale == 0.0:
        raise ZeroVectorError("Hessian entries vanish; no branch to detect")
    if abs(a**2 - b**2) > 1e-5 * b**2:
        raise InconsistentBranchError(
            f"squared identity residual {abs(a**2 - b**2) / b**2:.3e} > 1e-5"
        )
    res_minus = abs(a + b) / scale
    res_plus = abs(a - b) / scale
    if min(res_minus, res_plus) > tol:
        raise InconsistentBranchError(
            f"neither sign relation holds: residuals {res_minus:.3e}/{res_plus:.3e}"
        )
    return "minus" if res_minus < res_plus else "plus"


def _branch_bracket(sigma, omega, branch: str, spec: QuadratureSpec):
    d00 = hessian_closed(sigma, omega, spec)[0, 0]
    _, d001, d011, _ = third_partials(sigma, omega, spec)
    sq0 = math.sqrt(_as_omega(omega).omega0)
    if branch == "minus":
        return -4.0 * d011 - 4.0 * sq0 * d001 + d00, d00
    return -4.0 * d011 + 4.0 * sq0 * d001 + d00, d00


def third_directional(sigma, omega, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """nu = (d/dlambda)^3 d(omega + lambda*xi) at lambda=0, by the branch formula.

    The scale of xi is fixed by its defining expression; rescaling
    xi -> c*xi would scale nu by c^3.
    """
    w = _as_omega(omega)
    branch = branch_detect(sigma, w, spec)
    bracket, d00 = _branch_bracket(sigma, w, branch, spec)
    return w.omega0**2 * d00**3 * bracket


def lemma_bracket_reduced(sigma, omega, branch: str, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Reduced closed form of the branch bracket at the degenerate line."""
    s = _as_sigma(sigma)
    w = _as_omega(omega)
    z = w.z
    kt = _kappa_tilde_eff(s, w)
    a0 = alpha_moments(s, w, spec).alpha0
    pref = 8.0 * math.sqrt(w.omega0) * kt * a0 / (s * (1.0 - z**2))
    if branch == "minus":
        return pref * s * (s - 1.0) * (z - 1.0) ** 2 * (z + 1.0)
    return pref * s * (s - 1.0) * (z + 1.0) ** 2 * (z - 1.0)


def third_directional_fd(
    sigma,
    omega,
    xi,
    grid: Grid | None = None,
    step: float | None = None,
    richardson: bool = True,
) -> float:
    """Five-point third difference of lambda -> d(omega + lambda*xi)."""
    s = _as_sigma(sigma)
    w = _as_omega(omega)
    xi = (float(xi[0]), float(xi[1]))
    xi_scale = max(abs(xi[0]), abs(xi[1]))
    if xi_scale == 0.0:
        raise ZeroVectorError("ray direction vanishes")
    if step is None:
        # displacement in omega-space of the outermost stencil point is
        # ~2e-2*(1+|omega|); third differences amplify round-off, so the
        # step cannot be much smaller.
        step = 1e-2 * (1.0 + max(abs(w.omega0), abs(w.omega1))) / xi_scale

    def ray(lam):
        return _omega_shifted(w, lam * xi[0], lam * xi[1])

    if grid is None:
        grid = _stencil_grid(s, [w, ray(2 * step), ray(-2 * step)])

    def once(h):
        vals = [d_value(s, ray(m * h), grid) for m in (-2, -1, 1, 2)]
        return (vals[3] - 2.0 * vals[2] + 2.0 * vals[1] - vals[0]) / (2.0 * h**3)

    if not richardson:
        return once(step)
    # two extrapolation levels: third differences of d along the ray are
    # still O(h^2)-accurate only, and the steep sigma -> 2 end needs O(h^6)
    t0, t1, t2 = once(step), once(step / 2.0), once(step / 4.0)
    r0 = (4.0 * t1 - t0) / 3.0
    r1 = (4.0 * t2 - t1) / 3.0
    return (16.0 * r1 - r0) / 15.0


def _sym22_eig(h: np.ndarray):
    """Closed-form eigen-decomposition of a symmetric 2x2 matrix."""
    a, b, c = float(h[0, 0]), float(h[0, 1]), float(h[1, 1])
    mean = 0.5 * (a + c)
    r = math.hypot(0.5 * (a - c), b)
    lo, hi = mean - r, mean + r
    if r == 0.0 or abs(b) < 1e-300:
        vecs = np.eye(2) if a <= c else np.array([[0.0, 1.0], [1.0, 0.0]])
        return (lo, hi), vecs
    cols = []
    for lam in (lo, hi):
        v = np.array([b, lam - a]) if abs(lam - a) >= abs(lam - c) else np.array([lam - c, b])
        cols.append(v / np.linalg.norm(v))
    return (lo, hi), np.column_stack(cols)


def hessian_report(
    sigma,
    omega,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    grid: Grid | None = None,
    fd_step: float = HESSIAN_FD_STEP,
) -> HessianReport:
    """Hessian with gradient, spectrum, F value and the FD-oracle residual.

    ``fd_residual`` is the max entrywise |closed - fd| over the max
    entry magnitude of the closed form.
    """
    s = _as_sigma(sigma)
    w = _as_omega(omega)
    h = hessian_closed(s, w, spec)
    h_fd = hessian_fd(s, w, grid=grid, step=fd_step)
    fd_residual = float(np.max(np.abs(h - h_fd)) / np.max(np.abs(h)))
    if grid is None:
        grid = _stencil_grid(s, [w])
    p = sample_profile(s, w, grid)
    u = ComplexField(grid, p.field)
    eigenvalues, eigenvectors = _sym22_eig(h)
    return HessianReport(
        d_grad=(mass(u), momentum(u)),
        hessian=h,
        det=float(np.linalg.det(h)),
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        f_value=f_sigma(s, w.z, spec),
        fd_residual=fd_residual,
    )


def degenerate_omega(sigma, omega0: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> Omega:
    """Frequency pair on the degenerate line for the given omega0."""
    if omega0 <= 0:
        raise DomainError(f"omega0 must be positive, got {omega0}")
    z0 = find_z0(sigma, spec)
    return Omega(omega0, 2.0 * z0 * math.sqrt(omega0))


def degeneracy_report(
    sigma,
    omega0: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    grid: Grid | None = None,
) -> DegeneracyReport:
    """Locate the degenerate point over omega0 and run the full calculus there."""
    s = _as_sigma(sigma)
    if s >= 2.0:
        raise DomainError(f"degenerate line exists only for sigma < 2, got {s}")
    z0 = find_z0(s, spec)
    w = degenerate_omega(s, omega0, spec)
    h = hessian_closed(s, w, spec)
    xi = zero_eigenvector(s, w, spec)
    branch = branch_detect(s, w, spec)
    bracket, d00 = _branch_bracket(s, w, branch, spec)
    nu = w.omega0**2 * d00**3 * bracket
    nu_reduced = w.omega0**2 * d00**3 * lemma_bracket_reduced(s, w, branch, spec)
    nu_fd = third_directional_fd(s, w, xi, grid=grid)
    kernel_residual = float(
        np.linalg.norm(h @ np.asarray(xi)) / (np.linalg.norm(h) * math.hypot(*xi))
    )
    return DegeneracyReport(
        sigma=s,
        omega0=float(omega0),
        z0=z0,
        omega_star=w,
        xi=xi,
        branch=branch,
        nu=nu,
        nu_fd=nu_fd,
        nu_reduced=nu_reduced,
        kernel_residual=kernel_residual,
        hessian=h,
        det=float(np.linalg.det(h)),
        in_theorem_range=s >= THEOREM_SIGMA_MIN,
    )


def classify_stability(sigma, omega0: float, omega1: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> str:
    """Stability class of the solitary wave at (sigma, omega).

    sigma = 1: stable everywhere; sigma >= 2: unstable everywhere;
    1 < sigma < 2: stable below the degenerate line omega1 = 2*z0*sqrt(omega0),
    unstable above, degenerate-unstable on it.
    """
    s = _as_sigma(sigma)
    Omega(omega0, omega1)  # admissibility check
    if s == 1.0:
        return "stable"
    if s >= 2.0:
        return "unstable"
    z0 = find_z0(s, spec)
    boundary = 2.0 * z0 * math.sqrt(omega0)
    if abs(omega1 - boundary) <= 1e-9 * (1.0 + abs(boundary)):
        return "degenerate-unstable"
    return "stable" if omega1 < boundary else "unstable"
