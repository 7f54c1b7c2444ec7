"""
Measurement - LOCC Primitives as Outcome Distributions

Every LOCC measurement Alice and Bob can perform on one pair, reduced to the
distribution of its outcome given the pair's hidden label. Local
discrimination results are used as black boxes: no POVM is ever built.

RULES:
1. Every measurement consumes exactly one pair
2. A consumed pair can never be measured again
3. Random outcomes use ONE uniform draw (inverse CDF) per measurement
4. Unambiguous outcomes never name the wrong state

MEASUREMENT KINDS:
- locc           - perfect discrimination of orthogonal states
- usd            - optimal unambiguous discrimination of two nonorthogonal states
- blind          - identical states (overlap 1): always inconclusive
- computational  - Bell pair measured in the computational basis (parity only)
"""

import enum
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, ProtocolLogicError
from .model import DEFAULT, Regime, StateLabel

logger = logging.getLogger(__name__)


class PriorsVariant(enum.Enum):
    """How the agent assigns priors to the midpoint of a window of length m."""
    PAPER = "paper"          # p_mutation = floor((m+1)/2) / (m+1)
    MIDPOINT = "midpoint"    # p_mutation = (floor(m/2)+1) / (m+1)


class MeasurementKind(enum.Enum):
    LOCC = "locc"
    USD = "usd"
    BLIND = "blind"
    COMPUTATIONAL = "computational"


class UsdOutcome(enum.Enum):
    CONCLUSIVE_DEFAULT = "D"
    CONCLUSIVE_MUTATION = "M"
    INCONCLUSIVE = "?"


@dataclass(frozen=True)
class PriorPair:
    """Prior probabilities of default / mutation for the pair being measured."""
    p_default: float
    p_mutation: float

    def __post_init__(self):
        for p in (self.p_default, self.p_mutation):
            if not 0 <= p <= 1:
                raise DomainError(f"prior must lie in [0, 1], got {p}")
        if abs(self.p_default + self.p_mutation - 1) > 1e-12:
            raise DomainError(f"priors must sum to 1, got {self.p_default} + {self.p_mutation}")


@dataclass(frozen=True)
class BellBasisOutcome:
    """Computational-basis bits (a, b) read by Alice and Bob."""
    a: int
    b: int

    @property
    def parity_even(self):
        return self.a == self.b

    @property
    def tag(self):
        return f"{self.a}{self.b}"


@dataclass(frozen=True)
class MeasurementRequest:
    """What a protocol asks to measure next."""
    position: int
    kind: MeasurementKind
    hypotheses: tuple = ()
    priors: PriorPair = None
    overlap: float = 0.0


@dataclass(frozen=True)
class MeasurementRecord:
    """One line of the trial transcript."""
    position: int
    kind: MeasurementKind
    outcome: str
    consumed: int = 1

    def to_dict(self):
        return {
            "position": self.position,
            "kind": self.kind.value,
            "outcome": self.outcome,
            "consumed": self.consumed,
        }


def priors_for_window(m, variant=PriorsVariant.PAPER, exact=False):
    """
    Priors for the midpoint of a window of m pairs.

    Args:
        m: Window length (>= 1)
        variant: PAPER formula or MIDPOINT hypothesis count
        exact: Return Fractions instead of floats

    Returns:
        PriorPair

    Example:
        >>> priors_for_window(2).p_mutation
        0.3333333333333333
    """
    if m < 1:
        raise DomainError(f"window length must be >= 1, got {m}")
    if variant is PriorsVariant.PAPER:
        favourable = (m + 1) // 2
    else:
        favourable = m // 2 + 1
    p_mutation = Fraction(favourable, m + 1)
    if exact:
        return PriorPair(1 - p_mutation, p_mutation)
    return PriorPair(1.0 - float(p_mutation), float(p_mutation))


def usd_failure_probabilities(priors, s):
    """
    Conditional failure probabilities (q_d, q_m) of optimal unambiguous
    discrimination between two pure states with overlap s.

    Interior regime, s <= sqrt(p_m/p_d) <= 1/s:
        q_d = s*sqrt(p_m/p_d), q_m = s*sqrt(p_d/p_m)
    Otherwise the unlikely state is never identified (q = 1) and the
    likely one fails with probability s^2.

    Raises:
        DomainError: if s is not strictly between 0 and 1
    """
    if not 0.0 < s < 1.0:
        raise DomainError(f"unambiguous discrimination needs 0 < s < 1, got {s}")
    p_d, p_m = float(priors.p_default), float(priors.p_mutation)
    if p_m == 0.0:
        return s * s, 1.0
    if p_d == 0.0:
        return 1.0, s * s

    ratio = math.sqrt(p_m / p_d)
    if ratio < s:
        return s * s, 1.0
    if ratio > 1.0 / s:
        return 1.0, s * s
    return s * ratio, s / ratio


def usd_outcome_distribution(true_label, priors, s):
    """Outcome distribution of one unambiguous measurement; inconclusive first."""
    q_d, q_m = usd_failure_probabilities(priors, s)
    if true_label.is_default:
        return ((UsdOutcome.INCONCLUSIVE, q_d), (UsdOutcome.CONCLUSIVE_DEFAULT, 1.0 - q_d))
    return ((UsdOutcome.INCONCLUSIVE, q_m), (UsdOutcome.CONCLUSIVE_MUTATION, 1.0 - q_m))


def bell_outcome_distribution(true_label):
    """
    Born-rule distribution of the computational-basis bits.

    Default and Mutation(1) give 00/11, Mutation(2) and Mutation(3) give 01/10,
    each with probability 1/2.
    """
    if true_label.index in (0, 1):
        return ((BellBasisOutcome(0, 0), 0.5), (BellBasisOutcome(1, 1), 0.5))
    if true_label.index in (2, 3):
        return ((BellBasisOutcome(0, 1), 0.5), (BellBasisOutcome(1, 0), 0.5))
    raise DomainError(f"{true_label} is not a Bell-set label")


def _sample(distribution, u):
    """Inverse CDF over a finite distribution."""
    cumulative = 0.0
    for outcome, p in distribution:
        cumulative += p
        if u < cumulative:
            return outcome
    return distribution[-1][0]


def discriminate_orthogonal(true_label, hypotheses):
    """
    Perfect LOCC discrimination among mutually orthogonal, locally
    distinguishable states: the outcome is the true label.

    Raises:
        DomainError: if hypotheses are not at least two distinct labels
        ProtocolLogicError: if the true label is not among the hypotheses
    """
    if len(hypotheses) < 2 or len(set(hypotheses)) != len(hypotheses):
        raise DomainError(f"need at least two distinct hypotheses, got {hypotheses}")
    if true_label not in hypotheses:
        raise ProtocolLogicError(
            f"pair in state {true_label} measured against {[h.tag for h in hypotheses]}"
        )
    return true_label


def usd_measure(true_label, priors, s, rng):
    """Unambiguous measurement of one pair; one uniform draw."""
    return _sample(usd_outcome_distribution(true_label, priors, s), rng.random())


def bell_computational_measure(true_label, rng):
    """Computational-basis measurement of one Bell pair; one uniform draw."""
    return _sample(bell_outcome_distribution(true_label), rng.random())


def outcome_distribution(request, true_label):
    """
    Distribution of the outcome of a request on a pair with the given label.

    Shared by the Monte Carlo runner (through SharedPairs) and the exact
    oracle, so both drive protocols through the same outcomes.
    """
    if request.kind is MeasurementKind.LOCC:
        return ((discriminate_orthogonal(true_label, request.hypotheses), 1),)
    if request.kind is MeasurementKind.USD:
        return usd_outcome_distribution(true_label, request.priors, request.overlap)
    if request.kind is MeasurementKind.BLIND:
        return ((UsdOutcome.INCONCLUSIVE, 1),)
    return bell_outcome_distribution(true_label)


def _outcome_tag(outcome):
    if isinstance(outcome, UsdOutcome):
        return outcome.value
    return outcome.tag


class SharedPairs:
    """
    The sequence Alice and Bob hold, reachable only through measurements.

    Keeps the transcript and refuses to touch a pair twice.

    USAGE:
        pairs = SharedPairs(seq)
        outcome = pairs.measure(request, rng)
        pairs.consumed      # number of pairs destroyed so far
        pairs.transcript    # list of MeasurementRecord
    """

    def __init__(self, sequence):
        self.sequence = sequence
        self.transcript = []
        self._measured = set()

    @property
    def consumed(self):
        return len(self.transcript)

    def measure(self, request, rng=None):
        """
        Perform one measurement and append it to the transcript.

        Args:
            request: MeasurementRequest from a protocol plan
            rng: Random stream (needed for usd and computational kinds)

        Returns:
            StateLabel, UsdOutcome or BellBasisOutcome depending on kind
        """
        position = request.position
        label = self.sequence.label_at(position)
        if position in self._measured:
            raise ProtocolLogicError(f"pair {position} was already consumed")

        if request.kind is MeasurementKind.LOCC:
            outcome = discriminate_orthogonal(label, request.hypotheses)
        elif request.kind is MeasurementKind.USD:
            outcome = usd_measure(label, request.priors, request.overlap, rng)
        elif request.kind is MeasurementKind.BLIND:
            outcome = UsdOutcome.INCONCLUSIVE
        else:
            if self.sequence.source.regime is not Regime.BELL_SET:
                raise DomainError("computational-basis measurement needs a Bell-set source")
            outcome = bell_computational_measure(label, rng)

        self._measured.add(position)
        self.transcript.append(
            MeasurementRecord(position=position, kind=request.kind, outcome=_outcome_tag(outcome))
        )
        logger.debug("🔍 pair %d [%s] -> %s", position, request.kind.value, _outcome_tag(outcome))
        return outcome


# Testing
if __name__ == "__main__":
    print("Measurement primitives")
    print("=" * 50)

    for m in (1, 2, 16):
        priors = priors_for_window(m, exact=True)
        print(f"  m={m:3d}  p_mutation={priors.p_mutation}")

    equal = PriorPair(0.5, 0.5)
    skewed = PriorPair(0.9, 0.1)
    print(f"  equal priors, s=0.5  -> q = {usd_failure_probabilities(equal, 0.5)}")
    print(f"  skewed priors, s=0.5 -> q = {usd_failure_probabilities(skewed, 0.5)}")
    print(f"  Bell Default         -> {bell_outcome_distribution(DEFAULT)}")
    print(f"  Bell Mutation(3)     -> {bell_outcome_distribution(StateLabel(3))}")
