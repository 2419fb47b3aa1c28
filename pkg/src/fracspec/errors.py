"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested quantity."""


class ResourceLimitError(RuntimeError):
    """A lattice search would exceed the configured size or memory budget."""


class IncompleteSpectrumError(ValueError):
    """The supplied spectrum does not reach the energy a computation needs."""


class ConvergenceError(RuntimeError):
    """A quadrature, truncation or grid did not reach the requested accuracy."""
