"""
Bisection - The Window of Still-Ambiguous Pairs

Binary search over surviving pairs. The pair measured next is the
(floor(m/2)+1)-th survivor of a window of m pairs. A default verdict keeps the
survivors on its right, a mutation verdict those on its left, and a discarded
(inconclusive) pair simply leaves a hole.

Survivors are kept as a range while no pair has been discarded, so the
orthogonal search never copies positions.
"""

import enum
from dataclasses import dataclass

from .errors import DomainError


class Verdict(enum.Enum):
    DEFAULT = "default"
    MUTATION = "mutation"
    DISCARD = "discard"


@dataclass(frozen=True)
class Window:
    """Contiguous global positions lo..hi (inclusive); empty when lo = hi+1."""
    lo: int
    hi: int

    def __post_init__(self):
        if not 1 <= self.lo <= self.hi + 1:
            raise DomainError(f"invalid window [{self.lo}, {self.hi}]")

    @property
    def length(self):
        return self.hi - self.lo + 1

    @property
    def is_empty(self):
        return self.length == 0

    @property
    def midpoint(self):
        return self.lo + self.length // 2


class Bisection:
    """
    Survivor-ranked binary search.

    USAGE:
        search = Bisection(Window(1, n))
        while not search.done:
            position = search.midpoint
            ...measure...
            search.advance(Verdict.DEFAULT)
    """

    def __init__(self, window):
        self.survivors = range(window.lo, window.hi + 1)

    @property
    def length(self):
        return len(self.survivors)

    @property
    def done(self):
        return len(self.survivors) == 0

    @property
    def midpoint(self):
        return self.survivors[len(self.survivors) // 2]

    def advance(self, verdict):
        rank = len(self.survivors) // 2
        if verdict is Verdict.DEFAULT:
            self.survivors = self.survivors[rank + 1:]
        elif verdict is Verdict.MUTATION:
            self.survivors = self.survivors[:rank]
        else:
            self.survivors = list(self.survivors[:rank]) + list(self.survivors[rank + 1:])
