"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A parameter lies outside the admissible range of its family, or a
    specification is structurally invalid."""


class BoundaryError(ValueError):
    """An argument sits exactly on a boundary where the operation is not
    defined (e.g. conditioning value 0 or 1 for an h-function)."""


class NoDensityError(ValueError):
    """The requested density does not exist (singular component)."""


class ConvergenceError(RuntimeError):
    """A quadrature rule or root finder failed to converge; the message
    carries bracket/tolerance diagnostics."""
