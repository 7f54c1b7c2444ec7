"""
Unambiguous Protocol - Binary Search With Discards

Default and mutation overlap (0 < s < 1), so no LOCC measurement tells them
apart with certainty. The midpoint is measured with optimal unambiguous
discrimination instead:

RULES:
1. Conclusive outcome -> continue exactly like the orthogonal search
2. Inconclusive outcome -> discard the pair (it is consumed) and work with the rest
3. Each measurement is designed from the priors of the current window length
4. Reports come from conclusive outcomes only, so they are never wrong;
   with holes in the window the change point may only be known up to an interval

AVERAGE COST:
    N_m = 1 + p_f(m) N_{m-1} + p~_d(m) N_{(m-1)//2} + p~_m(m) N_{m//2},  N_0 = 0
    average distilled pairs = n - N_n

s = 0 is the orthogonal protocol; s = 1 makes every measurement inconclusive.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bisection import Bisection, Verdict, Window
from .errors import DomainError, ProtocolLogicError
from .knowledge import HypothesisSet
from .measurement import (MeasurementKind, MeasurementRequest, PriorsVariant, SharedPairs,
                          UsdOutcome, priors_for_window)
from .model import DEFAULT, Regime, StateLabel
from .orthogonal import run_orthogonal
from .plan import Plan, execute
from .results import ProtocolResult, ReportKind, Status

logger = logging.getLogger(__name__)

MUTATION = StateLabel(1)


def _check_overlap(s):
    if not 0.0 <= s <= 1.0:
        raise DomainError(f"overlap must lie in [0, 1], got {s}")


@dataclass(frozen=True)
class RecursionTable:
    """
    Average-cost recursion evaluated for window lengths 0..n.

    Arrays are indexed by window length m; index 0 only carries N_0 = 0.

    Attributes:
        overlap: s
        variant: Priors used to design each measurement
        p_default_conclusive: p~_d(m) = p_d(m) (1 - q_d(m))
        p_mutation_conclusive: p~_m(m) = p_m(m) (1 - q_m(m))
        p_fail: p_f(m) = p_d(m) q_d(m) + p_m(m) q_m(m)
        n_bar: N_m
    """
    overlap: float
    variant: PriorsVariant
    p_default_conclusive: np.ndarray
    p_mutation_conclusive: np.ndarray
    p_fail: np.ndarray
    n_bar: np.ndarray

    @property
    def n(self):
        return len(self.n_bar) - 1

    def entry(self, m):
        """(p~_d, p~_m, p_f, N_m) for window length m."""
        return (float(self.p_default_conclusive[m]), float(self.p_mutation_conclusive[m]),
                float(self.p_fail[m]), float(self.n_bar[m]))

    def average_distilled(self, m):
        return m - float(self.n_bar[m])


def _failure_arrays(p_default, p_mutation, s):
    """Vectorised usd_failure_probabilities over every window length."""
    if s == 0.0:
        zeros = np.zeros_like(p_default)
        return zeros, zeros
    if s == 1.0:
        ones = np.ones_like(p_default)
        return ones, ones

    ratio = np.sqrt(p_mutation / p_default)
    q_default = np.where(ratio < s, s * s, np.where(ratio > 1.0 / s, 1.0, s * ratio))
    q_mutation = np.where(ratio < s, 1.0, np.where(ratio > 1.0 / s, s * s, s / ratio))
    return q_default, q_mutation


@lru_cache(maxsize=64)
def recursion_table(n, s, variant=PriorsVariant.PAPER):
    """
    Evaluate the average-cost recursion bottom-up for window lengths 0..n.

    Args:
        n: Largest window length (>= 0)
        s: Overlap in [0, 1]; 0 and 1 are the exact limits
        variant: PAPER or MIDPOINT priors

    Returns:
        RecursionTable (read-only arrays, cached)
    """
    if n < 0:
        raise DomainError(f"window length must be >= 0, got {n}")
    _check_overlap(s)

    m = np.arange(n + 1)
    if variant is PriorsVariant.PAPER:
        favourable = (m + 1) // 2
    else:
        favourable = m // 2 + 1
    p_mutation = favourable / (m + 1)
    p_default = 1.0 - p_mutation

    q_default, q_mutation = _failure_arrays(p_default[1:], p_mutation[1:], s)
    p_default_conclusive = np.zeros(n + 1)
    p_mutation_conclusive = np.zeros(n + 1)
    p_fail = np.zeros(n + 1)
    p_default_conclusive[1:] = p_default[1:] * (1.0 - q_default)
    p_mutation_conclusive[1:] = p_mutation[1:] * (1.0 - q_mutation)
    p_fail[1:] = p_default[1:] * q_default + p_mutation[1:] * q_mutation

    n_bar = np.zeros(n + 1)
    for length in range(1, n + 1):
        n_bar[length] = (1.0
                         + p_fail[length] * n_bar[length - 1]
                         + p_default_conclusive[length] * n_bar[(length - 1) // 2]
                         + p_mutation_conclusive[length] * n_bar[length // 2])

    for array in (p_default_conclusive, p_mutation_conclusive, p_fail, n_bar):
        array.setflags(write=False)
    logger.debug("✅ recursion table n=%d s=%s (%s priors): N_n=%.6f", n, s, variant.value, n_bar[n])
    return RecursionTable(s, variant, p_default_conclusive, p_mutation_conclusive, p_fail, n_bar)


def expected_consumed(n, s, variant=PriorsVariant.PAPER):
    """
    Average number of pairs consumed on a sequence of n pairs.

    Example:
        >>> expected_consumed(2, 0.0)
        1.3333333333333333
    """
    return float(recursion_table(n, s, variant).n_bar[n])


def average_distilled(n, s, variant=PriorsVariant.PAPER):
    """n - N_n"""
    return n - expected_consumed(n, s, variant)


class UnambiguousPlan(Plan):
    """
    Binary search over surviving pairs with unambiguous measurements.

    Args:
        n: Sequence length
        s: Overlap in (0, 1]; s = 1 measures blind
        variant: Priors used to design each measurement
    """

    def __init__(self, n, s, variant=PriorsVariant.PAPER):
        if not 0.0 < s <= 1.0:
            raise DomainError(f"unambiguous search needs 0 < s <= 1, got {s}")
        self.s = s
        self.variant = variant
        self.search = Bisection(Window(1, n))
        self.knowledge = HypothesisSet(n)
        self.measured = []
        self.conclusive = False

    def next_request(self):
        if self.search.done:
            return None
        position = self.search.midpoint
        if self.s == 1.0:
            return MeasurementRequest(position, MeasurementKind.BLIND)
        return MeasurementRequest(
            position, MeasurementKind.USD, (DEFAULT, MUTATION),
            priors=priors_for_window(self.search.length, self.variant), overlap=self.s,
        )

    def apply(self, request, outcome):
        if request.position != self.search.midpoint:
            raise ProtocolLogicError(f"outcome for pair {request.position}, expected {self.search.midpoint}")
        self.measured.append(request.position)

        if outcome is UsdOutcome.INCONCLUSIVE:
            self.search.advance(Verdict.DISCARD)
            return

        self.conclusive = True
        if outcome is UsdOutcome.CONCLUSIVE_DEFAULT:
            self.knowledge.restrict(request.position, {DEFAULT})
            self.search.advance(Verdict.DEFAULT)
        else:
            self.knowledge.restrict(request.position, {MUTATION})
            self.search.advance(Verdict.MUTATION)

    def settle(self):
        fields = self.knowledge.summarize(self.measured)
        if not self.conclusive:
            status = Status.UNRESOLVED
        elif fields["reported_change_point"].kind is ReportKind.NO_CHANGE:
            status = Status.NO_CHANGE_CONFIRMED
        else:
            status = Status.IDENTIFIED
        return ProtocolResult(status=status, **fields)


def run_unambiguous(seq, s, rng=None, variant=PriorsVariant.PAPER):
    """
    Locate the change point of a sequence of nonorthogonal pairs.

    Args:
        seq: SequenceInstance; nonorthogonal source with overlap s, or an
             orthogonal single-mutation source for the limits s = 0 and s = 1
        s: Overlap |<default|mutation>|
        rng: Random stream (numpy Generator), needed for 0 < s < 1
        variant: Priors used to design each measurement

    Returns:
        ProtocolResult: exact change point, interval, or unresolved

    Raises:
        DomainError: if s or the source does not fit
    """
    _check_overlap(s)
    source = seq.source
    if source.mutation_count != 1:
        raise DomainError("unambiguous protocol is a two-state protocol (mutation_count 1)")

    if 0.0 < s < 1.0:
        if source.regime is not Regime.NONORTHOGONAL or source.overlap != s:
            raise DomainError(f"overlap {s} needs a nonorthogonal source with the same overlap")
        if rng is None:
            raise DomainError("unambiguous measurements need a random stream")
    elif source.regime is not Regime.ORTHOGONAL:
        raise DomainError(f"limit s={s} is simulated on an orthogonal single-mutation source")

    if s == 0.0:
        return run_orthogonal(seq)

    result = execute(UnambiguousPlan(seq.n, s, variant), SharedPairs(seq), rng)
    logger.debug("✅ unambiguous n=%d k=%d s=%s -> %s (%s) after %d measurements",
                 seq.n, seq.k, s, result.reported_change_point.tag, result.status.value, result.consumed)
    return result


# Testing
if __name__ == "__main__":
    print("Average-cost recursion")
    print("=" * 50)

    for s in (0.0, 0.3, 0.6, 1.0):
        table = recursion_table(64, s)
        row = "  ".join(f"N_{m}={table.n_bar[m]:.3f}" for m in (2, 16, 64))
        print(f"  s={s:.1f}  {row}")

    print(f"\n  N_2 at s=0: {expected_consumed(2, 0.0)} (4/3 expected)")
    print(f"  distilled from 64 pairs at s=0.3: {average_distilled(64, 0.3):.3f}")
