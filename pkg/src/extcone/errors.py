"""Exception hierarchy shared by all extcone modules.

The CLI maps these onto exit codes: schema/validation problems exit 1,
precondition violations exit 2, and internal invariant breaches exit 3.
"""


class ExtConeError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(ExtConeError):
    """A document or table is malformed (bad field, bad syntax, bad value)."""


class PreconditionError(ExtConeError):
    """An operation was called on inputs that violate its stated contract."""


class LatticeError(ExtConeError):
    """A lattice operation was attempted on a structure that is not a lattice."""


class VerificationError(ExtConeError):
    """A computed result failed its own verification pass.

    This signals either a bug or a presentation that is not actually an
    extended Choquet cone; results are never returned unverified.
    """


class SolverFailure(VerificationError):
    """An exact feasibility problem that must be solvable had no solution."""


class StepBudgetExceeded(VerificationError):
    """The factorization engine ran past its step budget.

    The descent degree is proved to decrease strictly, so hitting the budget
    means the input did not satisfy the engine's preconditions.
    """
