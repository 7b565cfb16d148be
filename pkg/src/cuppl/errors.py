"""Error types raised by the compiler pipeline and the virtual machine."""

from __future__ import annotations


class CupError(Exception):
    """Base class for all errors this package raises deliberately."""

    kind = "error"

    def __init__(self, message, span=None):
        super().__init__(message)
        self.message = message
        self.span = span

    def render(self):
        if self.span is not None:
            s = self.span
            return f"error: {self.kind} at {s.file}:{s.start_line}:{s.start_col}: {self.message}"
        return f"error: {self.kind}: {self.message}"


# --- compile-time -----------------------------------------------------------

class CompileError(CupError):
    kind = "compile-error"


class LexError(CompileError):
    kind = "lex-error"


class ParseError(CompileError):
    kind = "parse-error"

    def __init__(self, message, span=None, expected=None):
        super().__init__(message, span)
        self.expected = frozenset(expected or ())


class UnifyError(CompileError):
    kind = "type-mismatch"


class OccursError(UnifyError):
    kind = "occurs-check"


class TypeCheckError(CompileError):
    """Type error attributed to a source span and the typing rule involved."""

    kind = "type-error"

    def __init__(self, message, span=None, rule=None):
        super().__init__(message, span)
        self.rule = rule


class ShiftOutsideResetError(TypeCheckError):
    kind = "shift-outside-reset"


class NotConcreteError(CompileError):
    kind = "not-concrete"


class LoweringError(CompileError):
    kind = "lowering-error"


# --- runtime ----------------------------------------------------------------

class CupRuntimeError(CupError):
    kind = "runtime-error"


class StackOverflowError_(CupRuntimeError):
    kind = "stack-overflow"


class StepLimitExceeded(CupRuntimeError):
    kind = "step-limit-exceeded"


class UncaughtShiftError(CupRuntimeError):
    kind = "uncaught-shift"


class BoundaryError(CupRuntimeError):
    kind = "stack-boundary"


class TypeMismatchError(CupRuntimeError):
    kind = "value-type-mismatch"


class UnsupportedDistError(CupRuntimeError):
    kind = "unsupported-distribution"


class UndefinedQuantityError(CupRuntimeError):
    kind = "undefined-quantity"


class CaseMatchError(CupRuntimeError):
    kind = "inexhaustive-case"


# --- inference --------------------------------------------------------------

class InferError(CupError):
    kind = "inference-error"


class ContinuousDistError(InferError):
    kind = "continuous-distribution"


class AllZeroWeightError(InferError):
    kind = "all-zero-weights"


class InferRuntimeError(InferError):
    """Wraps a runtime failure inside an engine run with its provenance."""

    kind = "inference-runtime-error"

    def __init__(self, message, cause=None, seed=None, step=None):
        super().__init__(message)
        self.cause = cause
        self.seed = seed
        self.step = step


class InvalidDistParamError(CupRuntimeError):
    kind = "invalid-dist-parameter"


class NotCallableError(CupRuntimeError):
    kind = "not-callable"


class DivisionByZeroError(CupRuntimeError):
    kind = "division-by-zero"
