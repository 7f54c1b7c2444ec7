"""
Orthogonal Protocol - Binary Search for the Change Point

Two-state problem with orthogonal default and mutation: the state of any pair
can be read off with certainty by LOCC, so a binary search over the window of
ambiguous pairs finds the change point without fail.

RULES:
1. Measure the (floor(m/2)+1)-th pair of the current window of m pairs
2. Default -> keep the pairs on its right, Mutation -> keep those on its left
3. Empty window -> the change point is the smallest position seen as a mutation
   (or no change if none was)
4. The measured pair is consumed even though its state becomes known

Works unchanged for a locally distinguishable set of several mutations: the
discrimination then runs over every label and the first mutation seen names
the mutation.

MEASUREMENT COUNT:
    worst case  floor(log2 n) + 1      (B_n = B_{n//2} + 1)
    best case   floor(log2 (n+1))      (B_n = B_{(n-1)//2} + 1, B_1 = B_2 = 1)
"""

import logging

from .bisection import Bisection, Verdict, Window
from .errors import DomainError, InvalidLengthError, ProtocolLogicError
from .knowledge import HypothesisSet
from .measurement import MeasurementKind, MeasurementRequest, SharedPairs
from .model import Regime
from .plan import Plan, execute
from .results import ProtocolResult, ReportKind, Status

logger = logging.getLogger(__name__)


class OrthogonalPlan(Plan):
    """
    Binary search with perfect LOCC discrimination.

    Args:
        n: Sequence length
        hypotheses: Labels the discrimination distinguishes (default first)
    """

    def __init__(self, n, hypotheses):
        self.search = Bisection(Window(1, n))
        self.hypotheses = tuple(hypotheses)
        self.knowledge = HypothesisSet(n, len(self.hypotheses) - 1)
        self.measured = []

    def next_request(self):
        if self.search.done:
            return None
        return MeasurementRequest(self.search.midpoint, MeasurementKind.LOCC, self.hypotheses)

    def apply(self, request, outcome):
        if request.position != self.search.midpoint:
            raise ProtocolLogicError(f"outcome for pair {request.position}, expected {self.search.midpoint}")
        self.knowledge.restrict(request.position, {outcome})
        self.search.advance(Verdict.DEFAULT if outcome.is_default else Verdict.MUTATION)
        self.measured.append(request.position)

    def settle(self):
        fields = self.knowledge.summarize(self.measured)
        if fields["reported_change_point"].kind is ReportKind.NO_CHANGE:
            status = Status.NO_CHANGE_CONFIRMED
        else:
            status = Status.IDENTIFIED
        return ProtocolResult(status=status, **fields)


def run_orthogonal(seq):
    """
    Locate the change point of a sequence of orthogonal pairs.

    Args:
        seq: SequenceInstance from an orthogonal-regime source

    Returns:
        ProtocolResult: exact change point (or no change), pair accounting
        and transcript

    Example:
        >>> seq = sample_sequence(SourceModel.orthogonal(16), 3)
        >>> run_orthogonal(seq).consumed
        4
    """
    if seq.source.regime is not Regime.ORTHOGONAL:
        raise DomainError(f"orthogonal protocol needs an orthogonal source, got {seq.source.regime.value}")
    plan = OrthogonalPlan(seq.n, seq.source.labels)
    result = execute(plan, SharedPairs(seq))
    logger.debug("✅ orthogonal n=%d k=%d -> %s after %d measurements",
                 seq.n, seq.k, result.reported_change_point.tag, result.consumed)
    return result


def worst_case_measurements(n):
    """floor(log2 n) + 1"""
    if n < 1:
        raise InvalidLengthError(f"sequence length must be >= 1, got {n}")
    return n.bit_length()


def best_case_measurements(n):
    """floor(log2 (n+1))"""
    if n < 1:
        raise InvalidLengthError(f"sequence length must be >= 1, got {n}")
    return (n + 1).bit_length() - 1


def recurse_worst_case(n):
    """Evaluate B_n = B_{n//2} + 1 (B_0 = 0) directly."""
    if n < 1:
        raise InvalidLengthError(f"sequence length must be >= 1, got {n}")
    count = 0
    while n > 0:
        n //= 2
        count += 1
    return count


def recurse_best_case(n):
    """Evaluate B_n = B_{(n-1)//2} + 1 with B_1 = B_2 = 1 directly."""
    if n < 1:
        raise InvalidLengthError(f"sequence length must be >= 1, got {n}")
    count = 0
    while n > 0:
        n = (n - 1) // 2
        count += 1
    return count
