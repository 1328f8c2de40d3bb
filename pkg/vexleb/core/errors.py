from typing import Any, Optional, Sequence, Tuple


class VexlebError(Exception):
    """Base error. `detail` is the user-facing message, `exit_code` the CLI status."""

    exit_code = 1

    def __init__(self, detail: str, **context: Any):
        super().__init__(detail)
        self.detail = detail
        self.context = context

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "detail": self.detail, "context": {k: repr(v) for k, v in self.context.items()}}


class DomainError(VexlebError):
    """Region, grid or sample values outside what an operation accepts."""


class DimensionError(DomainError):
    pass


class ParameterError(VexlebError):
    """Scalar parameters violate an operation's preconditions."""


class ExponentRangeError(ParameterError):
    pass


class IncompatibleFamilyError(ParameterError):
    pass


class NonConvergenceError(VexlebError):
    def __init__(self, detail: str, bracket: Tuple[float, float], rectangle: Optional[Sequence[float]] = None, **context: Any):
        super().__init__(detail, bracket=bracket, rectangle=rectangle, **context)
        self.bracket = bracket
        self.rectangle = rectangle

    def with_rectangle(self, rectangle: Sequence[float]) -> "NonConvergenceError":
        return NonConvergenceError(f"{self.detail} on rectangle {tuple(rectangle)}", bracket=self.bracket, rectangle=rectangle)


class ZeroMassError(DomainError):
    def __init__(self, detail: str, node: Tuple[int, int], **context: Any):
        super().__init__(detail, node=node, **context)
        self.node = node


class RangeError(VexlebError):
    def __init__(self, detail: str, achievable_kmax: Optional[int] = None, **context: Any):
        super().__init__(detail, achievable_kmax=achievable_kmax, **context)
        self.achievable_kmax = achievable_kmax


class InfiniteMassError(RangeError):
    pass


class ResolutionError(VexlebError):
    pass


class InapplicableError(VexlebError):
    pass


class EmptyFamilyError(VexlebError):
    pass


class UsageError(VexlebError):
    pass


class TheoremAssertionError(VexlebError):
    """The computation finished but a checked inequality or verdict failed."""

    exit_code = 2
