"""
Core Model - States, Sources and Sequences

Shared vocabulary for every protocol: which state a pair is in, what the
possibly faulty source can emit, and where the change happened.

RULES:
1. Positions and change points are 1-based everywhere
2. k = n+1 means "no change": every pair is in the default state
3. Objects are immutable once built and safe to share between trials
4. No state vectors - a pair is described by its label only

USAGE:
    source = SourceModel.orthogonal(n=16)
    k = draw_change_point(source.n, rng)
    seq = sample_sequence(source, k, mutation=1)
    seq.labels  # (D, D, M1, ...)
"""

import enum
import json
from dataclasses import dataclass

from .errors import DomainError, InvalidLengthError


class Regime(enum.Enum):
    """Relation between the default state and the mutation(s)."""
    ORTHOGONAL = "orthogonal"
    NONORTHOGONAL = "nonorthogonal"
    BELL_SET = "bell"


@dataclass(frozen=True, order=True)
class StateLabel:
    """
    State of one entangled pair.

    index 0 is the default state, index i >= 1 is Mutation(i).
    """
    index: int = 0

    def __post_init__(self):
        if self.index < 0:
            raise DomainError(f"state label index must be >= 0, got {self.index}")

    @classmethod
    def mutation(cls, i):
        if i < 1:
            raise DomainError(f"mutation index must be >= 1, got {i}")
        return cls(i)

    @property
    def is_default(self):
        return self.index == 0

    @property
    def tag(self):
        """Short form used in JSON and transcripts: "D", "M1", "M2", ..."""
        return "D" if self.index == 0 else f"M{self.index}"

    @classmethod
    def from_tag(cls, tag):
        if tag == "D":
            return DEFAULT
        if tag.startswith("M") and tag[1:].isdigit():
            return cls.mutation(int(tag[1:]))
        raise DomainError(f"unknown state label tag: {tag!r}")

    def __str__(self):
        return self.tag


DEFAULT = StateLabel(0)


@dataclass(frozen=True)
class SourceModel:
    """
    A possibly faulty source of n entangled pairs.

    The uniform prior over change points (and over mutations when there
    are several) stands in for the shared mixed state; no density matrix
    is ever built.

    Args:
        n: Number of pairs in the shared sequence
        mutation_count: Number of possible mutations (1 for two-state problems)
        overlap: |<default|mutation>|, only meaningful for one mutation
        regime: Orthogonal, Nonorthogonal or BellSet
    """
    n: int
    mutation_count: int = 1
    overlap: float = 0.0
    regime: Regime = Regime.ORTHOGONAL

    def __post_init__(self):
        if self.n < 1:
            raise InvalidLengthError(f"sequence length must be >= 1, got {self.n}")
        if self.mutation_count < 1:
            raise DomainError(f"mutation_count must be >= 1, got {self.mutation_count}")
        if not 0.0 <= self.overlap <= 1.0:
            raise DomainError(f"overlap must lie in [0, 1], got {self.overlap}")

        if self.regime is Regime.ORTHOGONAL and self.overlap != 0.0:
            raise DomainError("orthogonal regime requires overlap 0")
        if self.regime is Regime.NONORTHOGONAL:
            if self.mutation_count != 1:
                raise DomainError("nonorthogonal regime is a two-state problem (mutation_count 1)")
            if not 0.0 < self.overlap < 1.0:
                raise DomainError(f"nonorthogonal regime requires 0 < overlap < 1, got {self.overlap}")
        if self.regime is Regime.BELL_SET and (self.mutation_count != 3 or self.overlap != 0.0):
            raise DomainError("Bell set regime requires mutation_count 3 and overlap 0")

    @classmethod
    def orthogonal(cls, n, mutation_count=1):
        return cls(n=n, mutation_count=mutation_count)

    @classmethod
    def nonorthogonal(cls, n, overlap):
        return cls(n=n, overlap=overlap, regime=Regime.NONORTHOGONAL)

    @classmethod
    def bell(cls, n):
        return cls(n=n, mutation_count=3, regime=Regime.BELL_SET)

    @property
    def labels(self):
        """Every label this source can emit, default first."""
        return (DEFAULT,) + tuple(StateLabel(i) for i in range(1, self.mutation_count + 1))


@dataclass(frozen=True)
class ChangePoint:
    """Position k in [1, n+1] from which the source emits the mutation."""
    k: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidLengthError(f"sequence length must be >= 1, got {self.n}")
        if not 1 <= self.k <= self.n + 1:
            raise DomainError(f"change point must lie in [1, {self.n + 1}], got {self.k}")

    @property
    def is_no_change(self):
        return self.k == self.n + 1


def draw_change_point(n, rng):
    """
    Draw k uniformly from {1, ..., n+1}.

    Uses a single uniform draw (inverse CDF) so scripted streams can force
    a given branch.

    Args:
        n: Sequence length
        rng: Random stream with a random() method (numpy Generator)

    Returns:
        ChangePoint: the hidden change point

    Raises:
        InvalidLengthError: if n < 1
    """
    if n < 1:
        raise InvalidLengthError(f"sequence length must be >= 1, got {n}")
    k = 1 + int(rng.random() * (n + 1))
    return ChangePoint(k=min(k, n + 1), n=n)


@dataclass(frozen=True)
class SequenceInstance:
    """
    Concrete sequence of n labels with its hidden change point and mutation.

    labels[i] is the state of pair i+1 (tuple storage is 0-based, every
    public accessor is 1-based).
    """
    source: SourceModel
    change_point: ChangePoint
    mutation: int
    labels: tuple

    @property
    def n(self):
        return self.source.n

    @property
    def k(self):
        return self.change_point.k

    def label_at(self, position):
        """Hidden label of the pair at 1-based global position."""
        if not 1 <= position <= self.n:
            raise DomainError(f"position must lie in [1, {self.n}], got {position}")
        return self.labels[position - 1]

    def to_dict(self):
        return {
            "n": self.n,
            "k": self.k,
            "mutation": self.mutation,
            "labels": [label.tag for label in self.labels],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text, source):
        """Rebuild a sequence and check its labels are a prefix/suffix split."""
        data = json.loads(text)
        if data["n"] != source.n:
            raise DomainError(f"sequence length {data['n']} does not match source n={source.n}")
        seq = sample_sequence(source, data["k"], data["mutation"])
        if [label.tag for label in seq.labels] != list(data["labels"]):
            raise DomainError("labels are not a default prefix followed by a mutation suffix")
        return seq


def sample_sequence(source, k, mutation=1):
    """
    Build the sequence with change point k: k-1 default pairs, then the mutation.

    Args:
        source: SourceModel
        k: ChangePoint or int in [1, n+1]
        mutation: Mutation index in [1, mutation_count]

    Returns:
        SequenceInstance

    Example:
        >>> seq = sample_sequence(SourceModel.orthogonal(4), 3)
        >>> [l.tag for l in seq.labels]
        ['D', 'D', 'M1', 'M1']
    """
    change_point = k if isinstance(k, ChangePoint) else ChangePoint(k=k, n=source.n)
    if change_point.n != source.n:
        raise DomainError(f"change point drawn for n={change_point.n}, source has n={source.n}")
    if not 1 <= mutation <= source.mutation_count:
        raise DomainError(f"mutation index must lie in [1, {source.mutation_count}], got {mutation}")

    prefix = change_point.k - 1
    labels = (DEFAULT,) * prefix + (StateLabel(mutation),) * (source.n - prefix)
    return SequenceInstance(source=source, change_point=change_point,
                            mutation=mutation, labels=labels)
