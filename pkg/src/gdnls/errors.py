"""Exception hierarchy shared by all gdnls modules."""


class GdnlsError(Exception):
    """Base class for all package errors."""


class DomainError(GdnlsError):
    """Input outside the admissible parameter region."""


class ConvergenceError(GdnlsError):
    """A quadrature or iterative solver failed to reach its tolerance."""


class NoRootError(GdnlsError):
    """No sign change of the stability function on the search bracket."""


class MultipleRootsError(GdnlsError):
    """More than one sign change found where a single root is expected."""


class NotDegenerateError(GdnlsError):
    """Hessian determinant is not numerically zero at the requested point."""


class ZeroVectorError(GdnlsError):
    """Candidate eigenvector has vanishing components."""


class InconsistentBranchError(GdnlsError):
    """Neither sign relation between the Hessian entries holds."""


class GridTooSmallError(GdnlsError):
    """Periodic grid cannot hold the profile tails below tolerance.

    Carries ``min_length``, the smallest admissible period.
    """

    def __init__(self, message, min_length=None):
        super().__init__(message)
        self.min_length = min_length


class BlowupError(GdnlsError):
    """Non-finite values appeared during time integration."""


class BoundaryContaminationError(GdnlsError):
    """Too much mass far from the solitary wave for the periodic
    truncation to remain a faithful model of the real line."""


class UsageError(GdnlsError):
    """Invalid command-line arguments or option values."""
