"""
EPSFTA Errors

Every failure raised by the workbench derives from EpsftaError and carries a
stable ``code`` string. The CLI maps EpsftaError to exit status 1 and prints
``error[<code>]: <message>`` on stderr.
"""
from dataclasses import dataclass


class EpsftaError(Exception):
    """Base class for all workbench errors."""

    code = 'EpsftaError'

    def __init__(self, message='', code=None):
        super().__init__(message)
        if code is not None:
            self.code = code

    def __str__(self):
        return self.args[0] if self.args else self.code


# ============================================================================
# Fault tree (fta_core)
# ============================================================================

@dataclass(frozen=True)
class Violation:
    """One broken fault-tree invariant found during validation."""
    code: str
    node_id: str
    detail: str

    def __str__(self):
        return f"{self.code}({self.node_id}): {self.detail}"


class TreeValidationError(EpsftaError):
    """Raised with every violation found, not just the first one."""

    code = 'TreeValidationError'

    def __init__(self, violations):
        self.violations = tuple(violations)
        lines = '; '.join(str(v) for v in self.violations)
        super().__init__(f"invalid fault tree: {lines}")

    @property
    def codes(self):
        return tuple(sorted({v.code for v in self.violations}))


class UnknownEventError(EpsftaError):
    code = 'UnknownEvent'


class NonCoherentTreeError(EpsftaError):
    code = 'NonCoherentTree'


class UnconditionalTopError(EpsftaError):
    code = 'UnconditionalTop'


# ============================================================================
# Quantification
# ============================================================================

class InvalidModelError(EpsftaError):
    code = 'InvalidModel'


class NegativeTimeError(EpsftaError):
    code = 'NegativeTime'


class MissingModelError(EpsftaError):
    code = 'MissingModel'


class TooManyEventsError(EpsftaError):
    """Raised when an exhaustive method would exceed its event cap."""
    code = 'TooManyEvents'


# ============================================================================
# Scenario enumeration
# ============================================================================

class BadClassifierError(EpsftaError):
    code = 'BadClassifier'


class InconsistentCountsError(EpsftaError):
    code = 'InconsistentCounts'


# ============================================================================
# Sizing
# ============================================================================

class SizingError(EpsftaError):
    """Sizing input rejected; ``code`` names the failed precondition."""
    code = 'SizingError'


class UnknownComponentError(EpsftaError):
    code = 'UnknownComponent'


# ============================================================================
# Simulation
# ============================================================================

class SimulationError(EpsftaError):
    code = 'SimulationError'


class BadStepError(SimulationError):
    code = 'BadStep'


class NonMonotoneAnchorsError(SimulationError):
    code = 'NonMonotoneAnchors'


class NoConvergenceError(SimulationError):
    code = 'NoConvergence'


class GridMismatchError(SimulationError):
    code = 'GridMismatch'


class InvalidFaultError(SimulationError):
    code = 'InvalidFault'


# ============================================================================
# Risk matrix
# ============================================================================

class RiskError(EpsftaError):
    code = 'RiskError'


class OutOfRangeError(RiskError):
    code = 'OutOfRange'


class ThresholdConfigError(RiskError):
    code = 'ThresholdConfig'


# ============================================================================
# Files and reports
# ============================================================================

class TreeFileError(EpsftaError):
    code = 'TreeFileError'


class TreeSyntaxError(TreeFileError):
    code = 'SyntaxError'

    def __init__(self, message, line=None, column=None, source=''):
        self.line = line
        self.column = column
        self.source = source
        where = source or '<input>'
        if line is not None:
            where = f"{where}:{line}"
            if column is not None:
                where = f"{where}:{column}"
        super().__init__(f"{where}: {message}")


class SchemaViolationError(TreeFileError):
    code = 'SchemaViolation'

    def __init__(self, field, message, source=''):
        self.field = field
        self.source = source
        prefix = f"{source}: " if source else ''
        super().__init__(f"{prefix}{field}: {message}")


class SemanticError(TreeFileError):
    """A well-formed file whose tree breaks a fault-tree invariant."""

    code = 'SemanticError'

    def __init__(self, validation_error, source=''):
        self.validation_error = validation_error
        self.source = source
        prefix = f"{source}: " if source else ''
        super().__init__(f"{prefix}{validation_error}")

    @property
    def codes(self):
        return self.validation_error.codes


class ReportError(EpsftaError):
    code = 'ReportError'
