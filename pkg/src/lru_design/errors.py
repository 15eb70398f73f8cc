"""Exception taxonomy shared across the package.

Validation problems list the first violated rule together with the
offending element, so CLI users can locate the bad entry in their
input file.  Solver-side errors carry enough state to report partial
results (incumbent, bound) where that is meaningful.
"""
from __future__ import annotations


class LruDesignError(Exception):
    """Base class for all package errors."""


class ValidationError(LruDesignError):
    """An input violates a structural rule.

    ``rule`` is a short machine-readable name, ``element`` the offending
    item (label, pair of labels, ...).
    """

    rule = "invalid"

    def __init__(self, element=None, detail: str = ""):
        self.element = element
        self.detail = detail
        msg = self.rule
        if element is not None:
            msg += f": {element!r}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class SelfLoop(ValidationError):
    rule = "self_loop"


class DuplicateEdge(ValidationError):
    rule = "duplicate_edge"


class DuplicateLabel(ValidationError):
    rule = "duplicate_label"


class UnknownElement(ValidationError):
    rule = "unknown_element"


class NonAdjacentArc(ValidationError):
    rule = "non_adjacent_arc"


class DuplicateArc(ValidationError):
    rule = "duplicate_arc"


class CyclicPrecedence(ValidationError):
    rule = "cyclic_precedence"


class NonPositiveParameter(ValidationError):
    rule = "non_positive_parameter"


class EmptyLru(ValidationError):
    rule = "empty_lru"


class NotAPartition(ValidationError):
    rule = "not_a_partition"


class FailureSetsNotPartition(ValidationError):
    rule = "failure_sets_not_partition"


class FailureOutsideReplacement(ValidationError):
    rule = "failure_outside_replacement"


class NotALruCycle(ValidationError):
    rule = "not_a_lru_cycle"


class NotInSupport(ValidationError):
    rule = "not_in_support"


class UnknownFixture(ValidationError):
    rule = "unknown_fixture"


class InfeasibleConfig(ValidationError):
    rule = "infeasible_config"


class NonPositiveFactor(ValidationError):
    rule = "non_positive_factor"


class InstanceTooLarge(LruDesignError):
    """Exhaustive routine invoked beyond its configured size cap."""


class NumericalFailure(LruDesignError):
    """The LP engine lost feasibility or failed to converge."""


class IntegralityViolation(LruDesignError):
    """The converged master solution is fractional.

    The final basic optimum of the fully priced master is provably
    integer, so hitting this indicates a bug in the engine or in the
    pricing routine rather than a property of the instance.
    """
