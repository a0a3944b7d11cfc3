"""Exception hierarchy shared by the whole toolkit.

Errors are split by how the command line reports them: usage problems
(exit code 1), violated standing hypotheses (exit code 2) and exhausted
step budgets (exit code 3).
"""

from __future__ import annotations


class BrieskornError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ParseError(BrieskornError):
    """Malformed polynomial expression; carries the offending position."""

    exit_code = 1

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class DomainError(BrieskornError):
    """Operands live in incompatible rings (wrong n, r or mode)."""

    exit_code = 1


class HypothesisViolation(BrieskornError):
    """A standing hypothesis fails: the input is outside the theory."""

    exit_code = 2


class NotCommode(HypothesisViolation):
    """The Newton polyhedron is not convenient; carries a diagnostic."""


class DegenerateInput(HypothesisViolation):
    """Nondegeneracy fails (non-isolated critical points, wrong basis size...)."""


class SubdiagramViolation(HypothesisViolation):
    """A deformation term is not strictly under the Newton diagram."""


class ReductionWatchdog(HypothesisViolation):
    """Weight failed to decrease strictly during a division/theta step."""


class BudgetExceeded(BrieskornError):
    """A configured step budget ran out before the computation finished."""

    exit_code = 3
