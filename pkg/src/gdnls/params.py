"""Special-function layer for the solitary-wave family.

Everything here is a scalar function of the nonlinearity exponent sigma
and the frequency pair omega = (omega0, omega1) with omega1^2 < 4*omega0:
the decay rate kappa, the amplitude prefactor kappa_tilde, the moment
integrals

    alpha_n = int_0^inf (cosh(sigma*kappa*x) - omega1/(2*sqrt(omega0)))^(-1/sigma-n) dx,

their closed-form omega-derivatives, the stability function

    F_sigma(z) = (sigma-1)^2 * [int_0^inf (cosh y - z)^(-1/sigma) dy]^2
                 - [int_0^inf (cosh y - z)^(-1/sigma-1) * (z*cosh y - 1) dy]^2,

and its root z0 in (-1, 1).  The sign of F_sigma at z = omega1/(2*sqrt(omega0))
matches the sign of det d''(omega); the root marks the stability boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .errors import (
    ConvergenceError,
    DomainError,
    MultipleRootsError,
    NoRootError,
)

# Quadrature breaks down within ~1e-6 of the endpoints z = +-1.
Z_CAP = 1.0 - 1e-6


@dataclass(frozen=True)
class Sigma:
    """Dimensionless nonlinearity exponent, sigma >= 1."""

    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        if not math.isfinite(self.value) or self.value < 1.0:
            raise DomainError(f"sigma must satisfy sigma >= 1, got {self.value}")


@dataclass(frozen=True)
class Omega:
    """Frequency pair (omega0, omega1) with omega1^2 < 4*omega0."""

    omega0: float
    omega1: float

    def __post_init__(self):
        object.__setattr__(self, "omega0", float(self.omega0))
        object.__setattr__(self, "omega1", float(self.omega1))
        if not (math.isfinite(self.omega0) and math.isfinite(self.omega1)):
            raise DomainError("omega components must be finite")
        if self.omega1**2 >= 4.0 * self.omega0:
            raise DomainError(
                f"omega=({self.omega0}, {self.omega1}) outside the admissible "
                "region omega1^2 < 4*omega0"
            )

    @property
    def z(self) -> float:
        return self.omega1 / (2.0 * math.sqrt(self.omega0))


@dataclass(frozen=True)
class DerivedParams:
    kappa: float
    kappa_tilde: float
    z: float


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and truncation for the improper moment integrals.

    ``y_max = None`` picks the truncation point from the analytic tail
    bound of the integrand automatically.
    """

    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    y_max: float | None = None
    max_subdivisions: int = 200

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class AlphaMoments:
    alpha0: float
    alpha1: float


def _as_sigma(sigma) -> float:
    if isinstance(sigma, Sigma):
        return sigma.value
    return Sigma(sigma).value


def _as_omega(omega) -> Omega:
    if isinstance(omega, Omega):
        return omega
    w0, w1 = omega
    return Omega(w0, w1)


def require_borderline_sigma(sigma) -> float:
    """Check 1 < sigma < 2, the window where the degenerate line exists."""
    s = _as_sigma(sigma)
    if not (1.0 < s < 2.0):
        raise DomainError(f"borderline analysis requires 1 < sigma < 2, got {s}")
    return s


def kappa(omega) -> float:
    """kappa = sqrt(4*omega0 - omega1^2) > 0."""
    w = _as_omega(omega)
    return math.sqrt(4.0 * w.omega0 - w.omega1**2)


def kappa_tilde(sigma, omega) -> float:
    """Amplitude prefactor 2^(1/s-2) * s^-1 * (1+s)^(1/s) * kappa^(2/s-2) * omega0^(-1/(2s)-1/2)."""
    s = _as_sigma(sigma)
    w = _as_omega(omega)
    kap = kappa(w)
    return (
        2.0 ** (1.0 / s - 2.0)
        / s
        * (1.0 + s) ** (1.0 / s)
        * kap ** (2.0 / s - 2.0)
        * w.omega0 ** (-1.0 / (2.0 * s) - 0.5)
    )


def derived_params(sigma, omega) -> DerivedParams:
    w = _as_omega(omega)
    return DerivedParams(kappa=kappa(w), kappa_tilde=kappa_tilde(sigma, w), z=w.z)


def _tail_bound(p: float, y_max: float) -> float:
    # For y >= y_max: cosh y - z >= (e^y / 2) * (1 - 2*exp(-y)) for |z| <= 1,
    # so the tail of (cosh y - z)^(-p) is below (2/(1-2e^-Y))^p * e^(-p*Y) / p.
    if y_max < 5.0:
        return math.inf
    c = 1.0 - 2.0 * math.exp(-y_max)
    return (2.0 / c) ** p * math.exp(-p * y_max) / p


def _auto_y_max(p: float, abs_tol: float) -> float:
    y = (math.log(2.0 / (p * abs_tol)) + p * math.log(2.0)) / p + 1.0
    return max(60.0, y)


def _truncated_quad(f, p: float, spec: QuadratureSpec, tail_factor: float = 1.0) -> float:
    """Adaptive quadrature of f on [0, y_max] with a certified tail bound.

    ``p`` is the decay exponent of |f| (integrand bounded by a multiple of
    (cosh y - z)^(-p) in the tail); ``tail_factor`` covers that multiple.
    """
    y_max = spec.y_max if spec.y_max is not None else _auto_y_max(p, spec.abs_tol)
    tail = tail_factor * _tail_bound(p, y_max)
    if not tail <= spec.abs_tol:
        raise ConvergenceError(
            f"y_max={y_max} leaves a tail bound {tail:.3e} above abs_tol={spec.abs_tol:.3e}"
        )
    out = quad(
        f,
        0.0,
        y_max,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        limit=spec.max_subdivisions,
        full_output=1,
    )
    value, abserr = out[0], out[1]
    # QUADPACK may flag roundoff while still delivering near machine-level
    # accuracy; judge by the quantitative estimate, not the flag.  The
    # factor 100 tolerates the conservative estimates near |z| -> 1 where
    # the integrand peak pushes the attainable floor up; it still rejects
    # genuine divergence by orders of magnitude.
    if abserr > 100.0 * max(spec.abs_tol, spec.rel_tol * abs(value)):
        detail = out[3] if len(out) > 3 else "error estimate above tolerance"
        raise ConvergenceError(
            f"quadrature did not converge (abserr={abserr:.3e}): {detail}"
        )
    return value


def cosh_power_integral(p: float, z: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """int_0^inf (cosh y - z)^(-p) dy for |z| < 1, p > 0."""
    if abs(z) > Z_CAP:
        raise DomainError(f"|z| must be <= {Z_CAP}, got {z}")
    if p <= 0:
        raise DomainError("exponent p must be positive")
    return _truncated_quad(lambda y: (math.cosh(y) - z) ** (-p), p, spec)


def alpha_n(sigma, omega, n: int, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Moment integral alpha_n; strictly positive on the admissible region."""
    s = _as_sigma(sigma)
    w = _as_omega(omega)
    if n < 0:
        raise DomainError(f"moment order must be >= 0, got {n}")
    kap = kappa(w)
    # substitution y = sigma*kappa*x reduces to the normalized cosh-power integral
    return cosh_power_integral(1.0 / s + n, w.z, spec) / (s * kap)


def alpha_moments(sigma, omega, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> AlphaMoments:
    return AlphaMoments(
        alpha0=alpha_n(sigma, omega, 0, spec),
        alpha1=alpha_n(sigma, omega, 1, spec),
    )


def alpha_derivatives(sigma, omega, spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """Closed forms for the four first derivatives of alpha_0, alpha_1.

    Returns (d alpha0/d omega0, d alpha0/d omega1, d alpha1/d omega0,
    d alpha1/d omega1), each expressed through alpha_0, alpha_1 and kappa.
    """
    s = _as_sigma(sigma)
    w = _as_omega(omega)
    w0, w1 = w.omega0, w.omega1
    kap2 = kappa(w) ** 2
    sq0 = math.sqrt(w0)
    a0 = alpha_n(s, w, 0, spec)
    a1 = alpha_n(s, w, 1, spec)
    da0_dw0 = -2.0 / kap2 * a0 - w1 / (4.0 * s * w0 * sq0) * a1
    da0_dw1 = w1 / kap2 * a0 + 1.0 / (2.0 * s * sq0) * a1
    da1_dw0 = -w1 / (s * sq0 * kap2) * a0 - (w1**2 * (2.0 + s) + 4.0 * s * w0) / (
        2.0 * s * w0 * kap2
    ) * a1
    da1_dw1 = 2.0 * sq0 / (s * kap2) * a0 + 2.0 * w1 * (s + 1.0) / (s * kap2) * a1
    return da0_dw0, da0_dw1, da1_dw0, da1_dw1


def f_sigma(sigma, z: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Stability function F_sigma(z); its sign matches sign(det d'').

    The second integrand is evaluated through the exact split
    z*cosh(y) - 1 = z*(cosh y - z) + (z^2 - 1), which keeps both
    quadratures sign-definite; near z = +-1 the direct form suffers
    internal cancellation that QUADPACK cannot certify.
    """
    s = _as_sigma(sigma)
    if abs(z) > Z_CAP:
        raise DomainError(f"|z| must be <= {Z_CAP}, got {z}")
    p = 1.0 / s
    ia = cosh_power_integral(p, z, spec)
    ib = z * ia + (z**2 - 1.0) * cosh_power_integral(p + 1.0, z, spec)
    return (s - 1.0) ** 2 * ia**2 - ib**2


# find_z0 tolerances: tight enough that downstream Hessian degeneracy
# residuals are limited by quadrature, not by the root location.
F_RESIDUAL_TOL = 1e-10
BRACKET_WIDTH_TOL = 1e-12
SCAN_POINTS = 100


def find_z0(sigma, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Locate the single root of F_sigma in (-1, 1) by scan + bisection.

    Defined for 1 <= sigma < 2; at sigma = 1 the function is identically -1
    and NoRootError is raised from the sign scan.
    """
    s = _as_sigma(sigma)
    if s >= 2.0:
        raise DomainError(f"root search requires sigma < 2, got {s}")
    return _find_z0_cached(s, spec)


@lru_cache(maxsize=128)
def _find_z0_cached(s: float, spec: QuadratureSpec) -> float:
    delta = 1e-6
    zs = np.linspace(-1.0 + delta, 1.0 - delta, SCAN_POINTS)
    fs = np.array([f_sigma(s, z, spec) for z in zs])
    changes = np.nonzero(np.sign(fs[:-1]) * np.sign(fs[1:]) < 0)[0]
    if len(changes) == 0:
        raise NoRootError(f"F_sigma has no sign change on (-1, 1) for sigma={s}")
    if len(changes) > 1:
        # contradicts the single-root claim; surface rather than pick one
        raise MultipleRootsError(
            f"{len(changes)} sign changes of F_sigma found for sigma={s} "
            f"near z={zs[changes].tolist()}"
        )
    i = changes[0]
    lo, hi = float(zs[i]), float(zs[i + 1])
    flo = fs[i]
    while hi - lo > BRACKET_WIDTH_TOL:
        mid = 0.5 * (lo + hi)
        fmid = f_sigma(s, mid, spec)
        if fmid == 0.0:
            lo = hi = mid
            break
        if flo * fmid < 0:
            hi = mid
        else:
            lo, flo = mid, fmid
    root = 0.5 * (lo + hi)
    resid = f_sigma(s, root, spec)
    if abs(resid) > F_RESIDUAL_TOL:
        raise ConvergenceError(
            f"bisection converged to z={root} but |F|={abs(resid):.3e} > {F_RESIDUAL_TOL}"
        )
    return root
