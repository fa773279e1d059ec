"""Exception hierarchy.

Validation failures carry a stable ``exit_code`` so the CLI can map each
variant to its own process status. Theorem-falsifying conditions derive from
:class:`CheckFailure` and always map to exit status 1.
"""

from __future__ import annotations

from typing import Any


class XopError(Exception):
    exit_code = 2

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.details = details

    def diagnostic(self) -> dict[str, Any]:
        out = {"error": type(self).__name__, "message": str(self)}
        out.update({k: _jsonable(v) for k, v in self.details.items()})
        return out


def _jsonable(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return str(value)


# --- algebraic plumbing -------------------------------------------------

class ZeroPolynomialError(XopError, ValueError):
    pass


class InexactDivisionError(XopError, ArithmeticError):
    pass


class MultiplePoleError(XopError, ValueError):
    pass


# --- parameter / spec validation ----------------------------------------

class InvalidParameter(XopError, ValueError):
    exit_code = 7


class DegenerateRecurrence(InvalidParameter):
    """A recurrence or normalisation denominator vanishes at these parameters."""


class NonexistentCombination(XopError, ValueError):
    exit_code = 3


class SeedHasRootsInDomain(XopError, ValueError):
    exit_code = 4


class DegenerateDivisor(XopError, ValueError):
    exit_code = 5

    def __init__(self, message: str, n: int, **details: Any) -> None:
        super().__init__(message, n=n, **details)
        self.n = n


class EigenvalueCollision(XopError, ValueError):
    exit_code = 6


class GaugeError(XopError, ValueError):
    exit_code = 7


# --- theorem / identity falsification -----------------------------------

class CheckFailure(XopError):
    exit_code = 1


class NonPolynomialResult(CheckFailure):
    pass


class ClosedFormMismatch(CheckFailure):
    pass


class SparsityViolation(CheckFailure):
    pass


class UnrepresentableTarget(CheckFailure):
    pass


class IdentityViolation(CheckFailure):
    pass


class NonConvergence(CheckFailure):
    pass
