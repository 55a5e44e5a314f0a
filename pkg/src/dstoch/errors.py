"""Exception hierarchy.

Every error carries a ``kind`` (stable, used in JSON error reports) and an
``exit_code`` used by the command-line front end:

* 1: a mathematical negative (not domestic, not majorized, non-convergent)
* 2: malformed or out-of-range input
* 3: a computational budget or size cap was hit
"""

from __future__ import annotations


class DStochError(Exception):
    kind = "Error"
    exit_code = 2

    def __init__(self, detail: str = "", **info):
        super().__init__(detail)
        self.detail = detail
        self.info = info

    def to_json(self) -> dict:
        return {"error": {"kind": self.kind, "detail": self.detail}}


class InputError(DStochError):
    kind = "InputError"
    exit_code = 2


class NotSquare(InputError):
    kind = "NotSquare"


class NegativeEntry(InputError):
    kind = "NegativeEntry"


class RowSumNotOne(InputError):
    kind = "RowSumNotOne"

    def __init__(self, row: int, total):
        super().__init__(f"row {row + 1} sums to {total}", row=row)
        self.row = row


class ColSumNotOne(InputError):
    kind = "ColSumNotOne"

    def __init__(self, col: int, total):
        super().__init__(f"column {col + 1} sums to {total}", col=col)
        self.col = col


class DimensionMismatch(InputError):
    kind = "DimensionMismatch"


class InvalidPartition(InputError):
    kind = "InvalidPartition"


class InvalidPermutation(InputError):
    kind = "InvalidPermutation"


class InvalidRational(InputError):
    kind = "InvalidRational"


class InvalidVector(InputError):
    kind = "InvalidVector"


class InvalidSubsetPair(InputError):
    kind = "InvalidSubsetPair"


class InvalidGeneratorSet(InputError):
    kind = "InvalidGeneratorSet"


class UnknownGenerator(InputError, KeyError):
    kind = "UnknownGenerator"

    def __str__(self) -> str:
        return self.detail


class EpsilonOutOfRange(InputError):
    kind = "EpsilonOutOfRange"


class OutOfRange(InputError):
    kind = "OutOfRange"


class DimensionTooSmall(InputError):
    kind = "DimensionTooSmall"


class NoSubUnitEntry(InputError):
    kind = "NoSubUnitEntry"


class MathNegative(DStochError):
    exit_code = 1


class NotMajorized(MathNegative):
    kind = "NotMajorized"


class ChainNotMajorized(MathNegative):
    kind = "ChainNotMajorized"


class NotDomestic(MathNegative):
    kind = "NotDomestic"


class NonConvergent(MathNegative):
    kind = "NonConvergent"


class FactorizationFailed(MathNegative):
    kind = "FactorizationFailed"


class BudgetError(DStochError):
    exit_code = 3


class DimensionTooLarge(BudgetError):
    kind = "DimensionTooLarge"

    def __init__(self, n: int, limit: int):
        super().__init__(f"dimension {n} exceeds the configured limit {limit}", n=n, limit=limit)
        self.limit = limit


class BudgetExceeded(BudgetError):
    kind = "BudgetExceeded"


class SubsetBudgetExceeded(BudgetError):
    kind = "SubsetBudgetExceeded"


class InternalError(DStochError):
    """An invariant that valid input can never break was broken."""

    kind = "InternalError"
    exit_code = 4
