"""
Protocol Results

What a protocol run reports: the change point (exact, interval or no change),
the mutation when known, the pair accounting and the transcript.

RULES:
1. consumed + distilled_default + distilled_mutation + residual_unknown = n
2. Distilled pairs left of the reported change point are default,
   those at or right of it carry the reported mutation
"""

import enum
from dataclasses import dataclass

from .errors import ProtocolLogicError
from .model import DEFAULT, StateLabel


class Status(enum.Enum):
    IDENTIFIED = "identified"
    NO_CHANGE_CONFIRMED = "no_change_confirmed"
    UNRESOLVED = "unresolved"
    DISTILLED_ONLY = "distilled_only"
    NO_CHANGE_UNRESOLVED = "no_change_unresolved"


class ReportKind(enum.Enum):
    EXACT = "exact"
    INTERVAL = "interval"
    NO_CHANGE = "no_change"


BRANCHES = ("a1", "a1.1", "a1.2", "a2")


@dataclass(frozen=True)
class ChangePointReport:
    """Reported change point: lo == hi for EXACT and NO_CHANGE (hi = n+1)."""
    kind: ReportKind
    lo: int
    hi: int

    @classmethod
    def exact(cls, k):
        return cls(ReportKind.EXACT, k, k)

    @classmethod
    def interval(cls, lo, hi):
        return cls(ReportKind.INTERVAL, lo, hi)

    @classmethod
    def no_change(cls, n):
        return cls(ReportKind.NO_CHANGE, n + 1, n + 1)

    @property
    def is_exact(self):
        return self.kind is not ReportKind.INTERVAL

    def contains(self, k):
        return self.lo <= k <= self.hi

    @property
    def tag(self):
        """CSV form: "k", "lo-hi" or "none"."""
        if self.kind is ReportKind.NO_CHANGE:
            return "none"
        if self.kind is ReportKind.EXACT:
            return str(self.lo)
        return f"{self.lo}-{self.hi}"

    def to_dict(self):
        return {"kind": self.kind.value, "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class ProtocolResult:
    """
    Outcome of one protocol run on one sequence.

    reported_mutation is None when the mutation is unknown or no change
    happened.
    """
    n: int
    reported_change_point: ChangePointReport
    status: Status
    consumed: int
    distilled_default: int
    distilled_mutation: int
    residual_unknown: int = 0
    reported_mutation: int = None
    transcript: tuple = ()

    def __post_init__(self):
        total = self.consumed + self.distilled_default + self.distilled_mutation + self.residual_unknown
        if total != self.n:
            raise ProtocolLogicError(f"pair accounting broken: {total} != n={self.n}")

    @property
    def distilled(self):
        return self.distilled_default + self.distilled_mutation

    @property
    def measured_positions(self):
        return sorted(record.position for record in self.transcript)

    def implied_labels(self):
        """
        Distilled pairs with the label the report implies for them.

        Needs the transcript (positions of consumed pairs).

        Returns:
            dict: position -> StateLabel
        """
        measured = {record.position for record in self.transcript}
        report = self.reported_change_point
        labels = {}
        for position in range(1, self.n + 1):
            if position in measured:
                continue
            if position < report.lo:
                labels[position] = DEFAULT
            elif position >= report.hi and self.reported_mutation is not None:
                labels[position] = StateLabel(self.reported_mutation)
        return labels

    def to_dict(self, include_transcript=True):
        data = {
            "n": self.n,
            "reported_change_point": self.reported_change_point.to_dict(),
            "reported_mutation": self.reported_mutation,
            "status": self.status.value,
            "consumed": self.consumed,
            "distilled_default": self.distilled_default,
            "distilled_mutation": self.distilled_mutation,
            "residual_unknown": self.residual_unknown,
        }
        if include_transcript:
            data["transcript"] = [record.to_dict() for record in self.transcript]
        return data

    def csv_row(self, k_true):
        return [self.n, k_true, self.reported_change_point.tag, self.consumed,
                self.distilled_default, self.distilled_mutation, self.status.value]


@dataclass(frozen=True)
class BellProtocolResult(ProtocolResult):
    """ProtocolResult plus the branch tags taken by the Bell-set protocol."""
    branch_trace: tuple = ()

    def branch_counts(self):
        return {branch: self.branch_trace.count(branch) for branch in BRANCHES}

    def to_dict(self, include_transcript=True):
        data = super().to_dict(include_transcript)
        data["branch_trace"] = list(self.branch_trace)
        return data

    def csv_row(self, k_true, mutation_true=None):
        counts = self.branch_counts()
        mutation = "unknown" if self.reported_mutation is None else self.reported_mutation
        return (super().csv_row(k_true)
                + [mutation_true, mutation]
                + [counts[branch] for branch in BRANCHES])
