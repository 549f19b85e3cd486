"""Exception hierarchy shared by all gridstress modules."""


class GridStressError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(GridStressError):
    """Case file is malformed (bad JSON, missing keys, wrong types)."""


class ValidationError(GridStressError):
    """A case invariant is violated; the message names the first violated rule."""


class DisconnectedError(ValidationError):
    """The line graph of a case is not connected."""


class EmptyReportError(GridStressError):
    """A report was requested for an empty result list."""


class ConvergenceError(GridStressError):
    """A numerical routine failed to converge or violated its post-conditions."""


class DomainError(GridStressError):
    """A scalar argument is outside its mathematical domain (e.g. epsilon <= 0)."""


class ImbalanceError(GridStressError):
    """Power injections do not sum to zero."""


class SingularBlockError(GridStressError):
    """The passive-passive Laplacian block is singular (passive island with no
    active attachment)."""


class CriticalDampingError(GridStressError):
    """gamma^2 = 4*lambda_j for some mode; the modal decomposition is singular.
    Jitter gamma (e.g. CLI --gamma-jitter) to move off this zero-measure set."""


class NotHurwitzError(GridStressError):
    """The state matrix has an eigenvalue with non-negative real part."""


class NonUniformInertiaError(GridStressError):
    """An operation requiring uniform machine inertia got heterogeneous inertias."""


class NonUniformDampingError(GridStressError):
    """Machine damping/inertia ratios d_i/m_i are not uniform (the uniform-ratio
    assumption is a hard precondition of the closed forms)."""


class BridgeLineError(GridStressError):
    """The faulted line is a bridge; removing it splits the network and the
    contingency measures are undefined."""


class DenominatorError(GridStressError):
    """A fault-case denominator is numerically zero (degenerate fault that
    effectively splits the passive subgrid)."""


class StepSizeError(GridStressError):
    """Integration step size violates the resolution preconditions."""


class NonDecayError(GridStressError):
    """Post-fault energy failed to decay; the configuration is not stable."""
