"""Exception hierarchy shared by all l1cert modules.

Exit-code mapping used by the CLI: ArgumentError -> 2,
ResourceLimitError -> 3, SolverFailure -> 4.
"""


class L1CertError(Exception):
    """Base class for all l1cert errors."""


class ArgumentError(L1CertError, ValueError):
    """Invalid argument or malformed input data."""


class UnsupportedConfigError(ArgumentError):
    """Requested configuration is outside the supported problem class
    (e.g. a finite dual-norm bound with the Euclidean observation norm,
    which would require conic programming)."""


class ResourceLimitError(L1CertError):
    """A size guard refused the computation.

    ``partial`` may carry the best result obtained before the refusal
    (e.g. the certificate found so far during an incremental search).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class SolverFailure(L1CertError):
    """The LP backend failed to produce a usable answer."""
