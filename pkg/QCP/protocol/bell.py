"""
Bell-Set Protocol - Change Point With Three Possible Mutations

The default state and the three mutations are the four Bell states. They are
orthogonal but not distinguishable by LOCC, so the protocol first splits them
by parity in the computational basis and only then uses LOCC discrimination
of pairs of Bell states, which is always possible.

    D, M1  -> outcomes 00 / 11 (even parity)
    M2, M3 -> outcomes 01 / 10 (odd parity)

BRANCHES (window lo..n, midpoint mid):
    a1    even parity at mid: discriminate {D, M1} on pair mid-1
    a1.1  pair mid-1 is D: same problem on mid+1..n
    a1.2  pair mid-1 is M1: mutation found, orthogonal search {D, M1} on lo..mid-2
    a2    odd parity at mid: discriminate {M2, M3} on pair mid+1, then
          orthogonal search {D, Mi} on lo..mid-1

BOUNDARIES:
    a1 on a window of one pair  -> stop; no change and a change at n stay possible
    a2 on the last pair         -> parity search on lo..mid-1; change point found,
                                   mutation unknown (M2 or M3)

The all-default sequence can never be confirmed: the pair at n is only ever
seen through its parity.
"""

import enum
import logging

from .bisection import Bisection, Verdict, Window
from .errors import DomainError, ProtocolLogicError
from .knowledge import HypothesisSet
from .measurement import MeasurementKind, MeasurementRequest, SharedPairs
from .model import DEFAULT, Regime, StateLabel
from .plan import Plan, execute
from .results import BellProtocolResult, ReportKind, Status

logger = logging.getLogger(__name__)

EVEN_PARITY = frozenset({DEFAULT, StateLabel(1)})
ODD_PARITY = frozenset({StateLabel(2), StateLabel(3)})


class Phase(enum.Enum):
    BISECT = "bisect"
    CHECK_PRECEDING = "check_preceding"
    CHECK_NEXT = "check_next"
    REDUCED = "reduced"
    PARITY = "parity"
    DONE = "done"


class BellPlan(Plan):
    """
    Step machine for the Bell-set protocol on n pairs.

    The right end of the window is always n: every branch either moves lo
    past the midpoint or hands the left part to a sub-search.
    """

    def __init__(self, n):
        self.n = n
        self.lo = 1
        self.mid = None
        self.phase = Phase.BISECT
        self.knowledge = HypothesisSet(n, 3)
        self.measured = []
        self.branch_trace = []
        self.sub_search = None
        self.sub_hypotheses = ()

    def next_request(self):
        if self.phase is Phase.BISECT:
            return MeasurementRequest(Window(self.lo, self.n).midpoint, MeasurementKind.COMPUTATIONAL)
        if self.phase is Phase.CHECK_PRECEDING:
            return MeasurementRequest(self.mid - 1, MeasurementKind.LOCC, (DEFAULT, StateLabel(1)))
        if self.phase is Phase.CHECK_NEXT:
            return MeasurementRequest(self.mid + 1, MeasurementKind.LOCC, (StateLabel(2), StateLabel(3)))
        if self.phase is Phase.REDUCED:
            return MeasurementRequest(self.sub_search.midpoint, MeasurementKind.LOCC, self.sub_hypotheses)
        if self.phase is Phase.PARITY:
            return MeasurementRequest(self.sub_search.midpoint, MeasurementKind.COMPUTATIONAL)
        return None

    def apply(self, request, outcome):
        expected = self.next_request()
        if expected is None or request.position != expected.position:
            raise ProtocolLogicError(f"unexpected outcome for pair {request.position} in phase {self.phase.value}")
        self.measured.append(request.position)

        if self.phase is Phase.BISECT:
            self._apply_parity_at_midpoint(request.position, outcome)
        elif self.phase is Phase.CHECK_PRECEDING:
            self._apply_preceding(outcome)
        elif self.phase is Phase.CHECK_NEXT:
            self.knowledge.restrict(self.mid + 1, {outcome})
            logger.debug("🔍 pair %d identifies mutation %s", self.mid + 1, outcome.tag)
            self._start_sub_search(Window(self.lo, self.mid - 1), Phase.REDUCED, (DEFAULT, outcome))
        else:
            self._apply_sub_search(request.position, outcome)

    def _apply_parity_at_midpoint(self, position, outcome):
        self.mid = position
        if outcome.parity_even:
            self.knowledge.restrict(position, EVEN_PARITY)
            self.branch_trace.append("a1")
            if self.mid == self.lo:
                logger.debug("⚠ even parity on the last open pair %d, stopping", position)
                self.phase = Phase.DONE
            else:
                self.phase = Phase.CHECK_PRECEDING
            return

        self.knowledge.restrict(position, ODD_PARITY)
        self.branch_trace.append("a2")
        if self.mid < self.n:
            self.phase = Phase.CHECK_NEXT
        else:
            logger.debug("⚠ odd parity on the last pair, mutation index stays unknown")
            self._start_sub_search(Window(self.lo, self.mid - 1), Phase.PARITY)

    def _apply_preceding(self, label):
        self.knowledge.restrict(self.mid - 1, {label})
        if label.is_default:
            self.branch_trace.append("a1.1")
            self.lo = self.mid + 1
            self.phase = Phase.BISECT if self.lo <= self.n else Phase.DONE
        else:
            self.branch_trace.append("a1.2")
            self._start_sub_search(Window(self.lo, self.mid - 2), Phase.REDUCED, (DEFAULT, label))

    def _start_sub_search(self, window, phase, hypotheses=()):
        self.sub_search = Bisection(window)
        self.sub_hypotheses = tuple(hypotheses)
        self.phase = Phase.DONE if self.sub_search.done else phase

    def _apply_sub_search(self, position, outcome):
        if self.phase is Phase.REDUCED:
            self.knowledge.restrict(position, {outcome})
            verdict = Verdict.DEFAULT if outcome.is_default else Verdict.MUTATION
        elif outcome.parity_even:
            self.knowledge.restrict(position, EVEN_PARITY)
            verdict = Verdict.DEFAULT
        else:
            self.knowledge.restrict(position, ODD_PARITY)
            verdict = Verdict.MUTATION

        self.sub_search.advance(verdict)
        if self.sub_search.done:
            self.phase = Phase.DONE

    def settle(self):
        fields = self.knowledge.summarize(self.measured)
        report = fields["reported_change_point"]
        if report.kind is ReportKind.NO_CHANGE:
            status = Status.NO_CHANGE_CONFIRMED
        elif self.knowledge.no_change_possible:
            status = Status.NO_CHANGE_UNRESOLVED
        elif report.kind is ReportKind.EXACT and fields["reported_mutation"] is not None:
            status = Status.IDENTIFIED
        else:
            status = Status.DISTILLED_ONLY
        return BellProtocolResult(status=status, branch_trace=tuple(self.branch_trace), **fields)


def run_bell(seq, rng):
    """
    Run the Bell-set protocol on one sequence.

    Args:
        seq: SequenceInstance from a Bell-set source
        rng: Random stream for the computational-basis outcomes

    Returns:
        BellProtocolResult: change point, mutation when known, pair
        accounting, transcript and branch trace

    Example:
        >>> seq = sample_sequence(SourceModel.bell(16), 3, mutation=1)
        >>> run_bell(seq, rng).branch_trace
        ('a1', 'a1.2')
    """
    if seq.source.regime is not Regime.BELL_SET:
        raise DomainError(f"Bell protocol needs a Bell-set source, got {seq.source.regime.value}")
    if rng is None:
        raise DomainError("computational-basis measurements need a random stream")

    result = execute(BellPlan(seq.n), SharedPairs(seq), rng)
    logger.debug("✅ bell n=%d k=%d M%d -> %s %s via %s",
                 seq.n, seq.k, seq.mutation, result.reported_change_point.tag,
                 result.status.value, "/".join(result.branch_trace))
    return result
