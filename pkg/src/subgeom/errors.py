"""Exception types shared across the package.

Every rejection names the violated invariant in its message so that callers
(and the CLI's nonzero-exit contract) can surface the reason without parsing
tracebacks.
"""


class SubgeomError(Exception):
    """Base class for all package errors."""


class CertificateError(SubgeomError):
    """A drift or minorisation certificate violates a named invariant."""


class ConfigurationError(SubgeomError):
    """A parameter is outside its admissible range."""


class KernelError(SubgeomError):
    """A transition kernel fails a structural check (stochasticity,
    monotonicity, irreducibility, minorisation)."""


class NonTerminationError(SubgeomError):
    """An iterative scan hit its hard cap; indicates an input outside the
    subgeometric class rather than a numeric bug."""
