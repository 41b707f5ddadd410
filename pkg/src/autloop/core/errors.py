from typing import Optional, Tuple


class AutloopError(Exception):
    """Base class for every error raised by autloop."""


# Invalid input (CLI exit 2)

class InvalidInput(AutloopError):
    pass


class ParseError(InvalidInput):
    def __init__(self, message: str, source: Optional[str] = None, line: Optional[int] = None, field: Optional[str] = None):
        self.source = source
        self.line = line
        self.field = field
        where = []
        if source:
            where.append(str(source))
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field '{field}'")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class SingularError(InvalidInput):
    pass


class NonDivisorError(InvalidInput):
    pass


class FieldError(InvalidInput):
    pass


class JacobiError(InvalidInput):
    def __init__(self, triple: Tuple[int, int, int], residual: int):
        self.triple = triple
        self.residual = residual
        super().__init__(f"Jacobi identity fails on basis triple {triple} (residual bits {residual:#b})")


class W1Violation(InvalidInput):
    def __init__(self, x: int):
        self.x = x
        super().__init__(f"id + ad_x is singular for x = {x:#b}")


class UnsupportedParams(InvalidInput):
    pass


class DimTooLarge(InvalidInput):
    pass


class LoopAxiomError(InvalidInput):
    def __init__(self, message: str, row: Optional[int] = None, column: Optional[int] = None):
        self.row = row
        self.column = column
        super().__init__(message)


class NotASubloop(InvalidInput):
    pass


class PhiConditionError(InvalidInput):
    def __init__(self, condition: str, indices: Tuple[int, ...]):
        self.condition = condition
        self.indices = indices
        super().__init__(f"Phi condition '{condition}' fails at {indices}")


class NonCommutingBeta(InvalidInput):
    def __init__(self, first: int, second: int):
        self.pair = (first, second)
        super().__init__(f"beta(e{first}) and beta(e{second}) do not commute")


class SingularIdPlusBeta(InvalidInput):
    def __init__(self, element: int):
        self.element = element
        super().__init__(f"id + beta(i) is singular for i = {element:#b}")


class NotInjective(InvalidInput):
    pass


class UnitInImage(InvalidInput):
    pass


class BadSubfield(InvalidInput):
    pass


class XSquareNonzero(InvalidInput):
    def __init__(self, first: int, second: int):
        self.pair = (first, second)
        super().__init__(f"X[{first}] * X[{second}] is nonzero")


class DegenerateX(InvalidInput):
    pass


class NotInSpan(InvalidInput):
    pass


# Budgets

class LimitExceeded(AutloopError):
    pass


class SizeLimit(LimitExceeded):
    pass


class BudgetExceeded(LimitExceeded):
    pass


# Verification failures (CLI exit 1)

class VerificationError(AutloopError):
    pass


class Mismatch(VerificationError):
    def __init__(self, x: int, y: int):
        self.pair = (x, y)
        super().__init__(f"u(x*y) != u(x)*u(y) at pair ({x}, {y})")


class CenterMismatch(VerificationError):
    pass


class MethodDisagreement(VerificationError):
    pass


class PropertyFailure(VerificationError):
    pass
