"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so the CLI can emit
structured error records.
"""

from __future__ import annotations


class LatticeError(Exception):
    code = "LatticeError"

    def record(self) -> dict[str, str]:
        return {"error": self.code, "message": str(self)}


class UndeclaredPairing(LatticeError):
    code = "UndeclaredPairing"

    def __init__(self, a: str, b: str):
        super().__init__(f"no Gram entry declared for {a}.{b}")
        self.pair = (a, b)


class MixedUnknowns(LatticeError):
    code = "MixedUnknowns"


class UnknownPairing(LatticeError):
    """A computation needed a constant but met the unresolved unknown."""

    code = "UnknownPairing"


class UnknownSymbol(LatticeError):
    code = "UnknownSymbol"


class DegreeTooHigh(LatticeError):
    code = "DegreeTooHigh"


class ZeroPolynomial(LatticeError):
    code = "ZeroPolynomial"


class NonPositiveSquare(LatticeError):
    code = "NonPositiveSquare"


class NotSymmetric(LatticeError):
    code = "NotSymmetric"


class SingularBasis(LatticeError):
    code = "SingularBasis"


class IntegralityViolation(LatticeError):
    code = "IntegralityViolation"


class EmptyList(LatticeError):
    code = "EmptyList"


class SchemaError(LatticeError):
    code = "SchemaError"

    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class InvariantViolation(LatticeError):
    code = "InvariantViolation"


class RuleNotFound(LatticeError):
    code = "RuleNotFound"


class UnexpectedVerdict(LatticeError):
    code = "UnexpectedVerdict"

    def __init__(self, step: int, expected: str, got: str, rule: str = ""):
        super().__init__(f"step {step} ({rule}): expected {expected}, got {got}")
        self.step = step
        self.expected = expected
        self.got = got


class WrongClassCount(LatticeError):
    code = "WrongClassCount"


class MultipleUnknowns(LatticeError):
    code = "MultipleUnknowns"


class UnboundedSearch(LatticeError):
    code = "UnboundedSearch"


class UnknownVariant(LatticeError):
    code = "UnknownVariant"
