"""
Oracle - Exact References by Enumeration

Enumerates every execution of a protocol plan: every hidden hypothesis
(k, mutation) with its prior, and every measurement outcome with its exact
probability. The plans are the same objects the Monte Carlo runner drives, so
the oracle measures the process as implemented, not a re-derivation of it.

CAPACITY:
    s = 0          deterministic paths, n <= 1024
    0 < s < 1      n <= 14
    Bell set       n <= 10

Probabilities are Fractions when every branch probability is exact
(orthogonal, blind and Bell measurements), floats otherwise.
"""

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..protocol.bell import BellPlan
from ..protocol.errors import CapacityError, DomainError, InvalidLengthError, ProtocolLogicError
from ..protocol.measurement import PriorsVariant, outcome_distribution
from ..protocol.model import SourceModel, sample_sequence
from ..protocol.orthogonal import OrthogonalPlan
from ..protocol.unambiguous import UnambiguousPlan

logger = logging.getLogger(__name__)

MAX_DETERMINISTIC_N = 1024
MAX_UNAMBIGUOUS_N = 14
MAX_BELL_N = 10
TOLERANCE = 1e-10


@dataclass(frozen=True)
class Leaf:
    """One complete execution: hidden hypothesis, path probability, result."""
    k: int
    mutation: int
    prior: object
    probability: object
    result: object

    @property
    def weight(self):
        return self.prior * self.probability


@dataclass
class ExecutionTree:
    """All executions of a plan over the uniform hypothesis prior."""
    n: int
    leaves: list = field(default_factory=list)

    def hypothesis_masses(self):
        """(k, mutation) -> total path probability (1 for every hypothesis)."""
        masses = defaultdict(int)
        for leaf in self.leaves:
            masses[(leaf.k, leaf.mutation)] += leaf.probability
        return dict(masses)

    def check_conservation(self):
        """
        Raise if some hypothesis' paths do not sum to 1.

        Raises:
            ProtocolLogicError: naming the first bad hypothesis
        """
        for hypothesis, mass in self.hypothesis_masses().items():
            if abs(float(mass) - 1.0) > TOLERANCE:
                raise ProtocolLogicError(f"paths of hypothesis {hypothesis} sum to {float(mass)}")
        total = sum(leaf.weight for leaf in self.leaves)
        if abs(float(total) - 1.0) > TOLERANCE:
            raise ProtocolLogicError(f"prior-weighted paths sum to {float(total)}")

    def expectation(self, value):
        """Prior- and path-weighted mean of value(result)."""
        return sum(leaf.weight * value(leaf.result) for leaf in self.leaves)

    @property
    def expected_consumed(self):
        return self.expectation(lambda result: result.consumed)

    @property
    def expected_distilled(self):
        return self.expectation(lambda result: result.distilled)

    @property
    def consumed_range(self):
        consumed = [leaf.result.consumed for leaf in self.leaves]
        return min(consumed), max(consumed)

    def consumed_range_by_hypothesis(self):
        ranges = {}
        for leaf in self.leaves:
            lo, hi = ranges.get(leaf.k, (leaf.result.consumed, leaf.result.consumed))
            ranges[leaf.k] = (min(lo, leaf.result.consumed), max(hi, leaf.result.consumed))
        return ranges

    def status_masses(self):
        masses = Counter()
        for leaf in self.leaves:
            masses[leaf.result.status.value] += leaf.weight
        return dict(masses)

    def branch_masses(self):
        """Expected number of times each Bell branch is taken."""
        masses = Counter()
        for leaf in self.leaves:
            for branch, count in leaf.result.branch_counts().items():
                masses[branch] += leaf.weight * count
        return dict(masses)

    def wrong_reports(self):
        """Leaves whose report or distilled labels contradict the hidden sequence."""
        wrong = []
        for leaf in self.leaves:
            result = leaf.result
            if not result.reported_change_point.contains(leaf.k):
                wrong.append(leaf)
            elif result.reported_mutation not in (None, leaf.mutation):
                wrong.append(leaf)
        return wrong


def _enumerate(plan, seq, prior, probability, leaves, measured=frozenset()):
    """Depth-first walk over outcomes; plans are copied only where paths split."""
    while True:
        request = plan.next_request()
        if request is None:
            leaves.append(Leaf(seq.k, seq.mutation, prior, probability, plan.settle()))
            return
        if request.position in measured:
            raise ProtocolLogicError(f"plan asked for consumed pair {request.position}")
        measured = measured | {request.position}

        branches = [(outcome, p) for outcome, p in outcome_distribution(request, seq.label_at(request.position))
                    if p > 0]
        if isinstance(probability, Fraction):
            branches = [(outcome, Fraction(p)) for outcome, p in branches]

        for outcome, p in branches[1:]:
            child = plan.copy()
            child.apply(request, outcome)
            _enumerate(child, seq, prior, probability * p, leaves, measured)
        outcome, p = branches[0]
        plan.apply(request, outcome)
        probability = probability * p


def _check_length(n, limit, what):
    if n < 1:
        raise InvalidLengthError(f"sequence length must be >= 1, got {n}")
    if n > limit:
        raise CapacityError(f"exact enumeration of {what} is limited to n <= {limit}, got {n}")


def exact_execution_tree(n, s, variant=PriorsVariant.PAPER):
    """
    Enumerate every execution of the two-state protocol for overlap s.

    Args:
        n: Sequence length
        s: Overlap in [0, 1]; 0 runs the orthogonal plan, 1 the blind one
        variant: Priors used to design each measurement

    Returns:
        ExecutionTree over hypotheses k = 1..n+1

    Raises:
        CapacityError: if n exceeds the guard for this overlap
    """
    if not 0.0 <= s <= 1.0:
        raise DomainError(f"overlap must lie in [0, 1], got {s}")
    exact = s in (0.0, 1.0)
    if exact:
        _check_length(n, MAX_DETERMINISTIC_N, f"the s={s} protocol")
    else:
        _check_length(n, MAX_UNAMBIGUOUS_N, "the unambiguous protocol")

    source = SourceModel.orthogonal(n) if exact else SourceModel.nonorthogonal(n, s)
    prior = Fraction(1, n + 1) if exact else 1.0 / (n + 1)
    one = Fraction(1) if exact else 1.0

    tree = ExecutionTree(n)
    for k in range(1, n + 2):
        seq = sample_sequence(source, k)
        plan = OrthogonalPlan(n, source.labels) if s == 0.0 else UnambiguousPlan(n, s, variant)
        _enumerate(plan, seq, prior, one, tree.leaves)

    tree.check_conservation()
    logger.debug("✅ execution tree n=%d s=%s: %d leaves", n, s, len(tree.leaves))
    return tree


def exact_expected_consumed(n, s, variant=PriorsVariant.PAPER):
    """
    Exact mean number of consumed pairs of the implemented process.

    Example:
        >>> exact_expected_consumed(2, 0.0)
        Fraction(5, 3)
    """
    return exact_execution_tree(n, s, variant).expected_consumed


@dataclass(frozen=True)
class BellOracleReport:
    """Exact statistics of the Bell-set protocol over the uniform (k, mutation) prior."""
    n: int
    expected_consumed: Fraction
    expected_distilled: Fraction
    status_masses: dict
    branch_masses: dict
    mutation_identified_mass: Fraction
    wrong_reports: int

    def to_dict(self):
        return {
            "n": self.n,
            "expected_consumed": float(self.expected_consumed),
            "expected_distilled": float(self.expected_distilled),
            "status_masses": {key: float(value) for key, value in sorted(self.status_masses.items())},
            "branch_masses": {key: float(value) for key, value in sorted(self.branch_masses.items())},
            "mutation_identified_mass": float(self.mutation_identified_mass),
            "wrong_reports": self.wrong_reports,
        }


def exact_bell_execution_tree(n):
    """
    Enumerate every execution of the Bell-set protocol.

    Each change point k <= n has prior 1/(n+1), split evenly over the three
    mutations; no change has prior 1/(n+1).
    """
    _check_length(n, MAX_BELL_N, "the Bell-set protocol")
    source = SourceModel.bell(n)
    tree = ExecutionTree(n)
    for k in range(1, n + 2):
        mutations = (1,) if k == n + 1 else (1, 2, 3)
        prior = Fraction(1, (n + 1) * len(mutations))
        for mutation in mutations:
            seq = sample_sequence(source, k, mutation)
            _enumerate(BellPlan(n), seq, prior, Fraction(1), tree.leaves)

    tree.check_conservation()
    return tree


def exact_bell_statistics(n):
    """
    Exact status masses, branch usage and costs of the Bell-set protocol.

    Args:
        n: Sequence length (<= 10)

    Returns:
        BellOracleReport
    """
    tree = exact_bell_execution_tree(n)
    identified = sum(leaf.weight for leaf in tree.leaves if leaf.result.reported_mutation is not None)
    report = BellOracleReport(
        n=n,
        expected_consumed=tree.expected_consumed,
        expected_distilled=tree.expected_distilled,
        status_masses=tree.status_masses(),
        branch_masses=tree.branch_masses(),
        mutation_identified_mass=identified,
        wrong_reports=len(tree.wrong_reports()),
    )
    logger.debug("✅ Bell oracle n=%d: E[consumed]=%.4f", n, float(report.expected_consumed))
    return report


@dataclass(frozen=True)
class BoundTable:
    """Worst/best measurement counts from the recurrences and the closed forms."""
    n: np.ndarray
    worst: np.ndarray
    best: np.ndarray
    worst_closed: np.ndarray
    best_closed: np.ndarray

    def matches_closed_forms(self):
        return bool(np.array_equal(self.worst, self.worst_closed)
                    and np.array_equal(self.best, self.best_closed))

    def row(self, n):
        i = n - 1
        return int(self.worst[i]), int(self.best[i])


def iterate_bound_recurrences(n_max):
    """
    Iterate B_n = B_{n//2} + 1 and B_n = B_{(n-1)//2} + 1 from B_0 = 0.

    Both right-hand sides only look at indices below lo for n in [lo, 2 lo),
    so each doubling block is filled in one vectorised step.

    Args:
        n_max: Largest length (>= 1)

    Returns:
        BoundTable for n = 1..n_max
    """
    if n_max < 1:
        raise InvalidLengthError(f"sequence length must be >= 1, got {n_max}")

    worst = np.zeros(n_max + 1, dtype=np.int64)
    best = np.zeros(n_max + 1, dtype=np.int64)
    lo = 1
    while lo <= n_max:
        block = np.arange(lo, min(2 * lo, n_max + 1))
        worst[block] = worst[block // 2] + 1
        best[block] = best[(block - 1) // 2] + 1
        lo *= 2

    n = np.arange(1, n_max + 1)
    # frexp returns the exponent e with x = f * 2**e, 0.5 <= f < 1, i.e. the bit length
    worst_closed = np.frexp(n.astype(np.float64))[1].astype(np.int64)
    best_closed = np.frexp((n + 1).astype(np.float64))[1].astype(np.int64) - 1
    return BoundTable(n, worst[1:], best[1:], worst_closed, best_closed)
