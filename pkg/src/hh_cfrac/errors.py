"""Exception hierarchy.

Every error carries a short `code` (its class name) which the cli prints in
diagnostics, and an `exit_code` grouping it into input errors (2) or numerical
degeneration (3).
"""

from __future__ import annotations


class HHError(Exception):
    exit_code = 3

    def __init__(self, message: str = "", **context: object) -> None:
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__
        self.context = context

    @property
    def code(self) -> str:
        return self.__class__.__name__


class InputError(HHError):
    exit_code = 2


class NumericalDegeneration(HHError):
    exit_code = 3


# Input errors
class PerfectSquare(InputError):
    pass


class NoSuchChoice(InputError):
    pass


class DegreeZero(InputError):
    pass


class MalformedInput(InputError):
    pass


class PreconditionViolated(InputError):
    pass


# Numerical degeneration
class SqrtAtRoot(NumericalDegeneration):
    pass


class TAtZero(NumericalDegeneration):
    pass


class DegenerateB(NumericalDegeneration):
    pass


class LeadingVanishes(NumericalDegeneration):
    pass


class QuadraticDegenerate(NumericalDegeneration):
    pass


class EliminationDegenerate(NumericalDegeneration):
    pass


class DegenerateDiscriminant(NumericalDegeneration):
    pass


class BranchValue(NumericalDegeneration):
    pass


class DenominatorZero(NumericalDegeneration):
    pass


class IrregularRootZero(NumericalDegeneration):
    pass


class IrregularRootInfinite(NumericalDegeneration):
    pass


class IrregularStep(NumericalDegeneration):
    pass


class VEqual(NumericalDegeneration):
    pass


class AllZero(NumericalDegeneration):
    def __init__(self, message: str = "", *, order: int = 0, **context: object) -> None:
        super().__init__(message or f"vanishing order >= {order}", order=order, **context)
        self.order = order


class PrecisionLoss(NumericalDegeneration):
    pass
