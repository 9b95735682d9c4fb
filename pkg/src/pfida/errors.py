"""Exception hierarchy shared across the toolkit."""


class PfidaError(Exception):
    """Base class for all errors raised by this package."""


class ExprSyntaxError(PfidaError):
    """Malformed expression text; carries the byte offset of the failure."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownFunctionError(PfidaError):
    """Call to a function outside the supported catalog."""


class UnboundSymbolError(PfidaError):
    """Evaluation hit a symbol with no bound value."""


class EvalDomainError(PfidaError):
    """Numeric evaluation left the real domain (log of non-positive, x/0, ...)."""


class NotInCatalogError(PfidaError):
    """Antiderivative not expressible with the supported integral catalog."""


class SamplingError(PfidaError):
    """Could not draw enough sample points clear of the declared exclusions."""


class DimensionError(PfidaError):
    """Operand dimensions do not match the operation's requirements."""


class NotExactError(PfidaError):
    """Pfaffian form is not exact as written (nonzero exactness defect)."""


class NotIntegrableError(PfidaError):
    """Pfaffian form fails the three-variable integrability condition."""


class StageUnsolvableError(PfidaError):
    """A stage of the reduction procedure exhausted its recognizer cascade."""

    def __init__(self, stage, message):
        super().__init__(f"stage {stage}: {message}")
        self.stage = stage


class ParameterizationFailedError(PfidaError):
    """Sampling refuted that the stage-2 quantity depends only on (U, x3)."""


class HypothesisViolatedError(PfidaError):
    """Coefficients reference the unknown, violating the split-solution hypothesis."""


class NotAffineError(PfidaError):
    """Residual is not affine in the unknown's gradient."""


class SingularInputError(PfidaError):
    """Input coupling matrix is singular at a sampled point."""


class DomainEscapeError(PfidaError):
    """Simulated state left the declared domain or hit an exclusion."""

    def __init__(self, message, time=None, partial=None):
        super().__init__(message)
        self.time = time
        self.partial = partial


class NonFiniteError(PfidaError):
    """Simulation produced a non-finite state."""

    def __init__(self, message, time=None, partial=None):
        super().__init__(message)
        self.time = time
        self.partial = partial


class UnknownCaseError(PfidaError):
    """Benchmark case name not in the registry."""


class CaseFormatError(PfidaError):
    """Malformed benchmark case file."""
