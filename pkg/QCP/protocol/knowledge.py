"""
Knowledge - Hidden Hypotheses Still Consistent With the Transcript

Alice and Bob's knowledge after some measurements is the set of hidden
hypotheses (k, mutation) that agree with every outcome so far. For a fixed
mutation i the surviving k always form an interval, so the whole set is one
interval per mutation. k = n+1 (no change) sits at the top of every interval.

Reported change points, reported mutations and distilled pairs are all read
off this set: a pair counts as distilled only if every surviving hypothesis
gives it the same label.
"""

from bisect import bisect_left

from .errors import ProtocolLogicError
from .model import DEFAULT, StateLabel
from .results import ChangePointReport


class HypothesisSet:
    """
    Surviving (k, mutation) hypotheses for a sequence of n pairs.

    Args:
        n: Sequence length
        mutation_count: Number of possible mutations
    """

    def __init__(self, n, mutation_count=1):
        self.n = n
        self.mutation_count = mutation_count
        # mutation index -> inclusive (lowest k, highest k)
        self.bounds = {i: (1, n + 1) for i in range(1, mutation_count + 1)}

    def restrict(self, position, allowed):
        """
        Keep only hypotheses under which the pair at position has a label in allowed.

        Raises:
            ProtocolLogicError: if nothing survives
        """
        allowed = frozenset(allowed)
        default_ok = DEFAULT in allowed

        for i, (lo, hi) in list(self.bounds.items()):
            mutation_ok = StateLabel(i) in allowed
            if default_ok and mutation_ok:
                continue
            if default_ok:
                lo = max(lo, position + 1)
            elif mutation_ok:
                hi = min(hi, position)
            else:
                lo, hi = 1, 0

            if lo > hi:
                del self.bounds[i]
            else:
                self.bounds[i] = (lo, hi)

        if not self.bounds:
            tags = sorted(label.tag for label in allowed)
            raise ProtocolLogicError(f"pair {position} in {tags} contradicts every earlier outcome")

    @property
    def span(self):
        """(lowest, highest) change point still possible."""
        return (min(lo for lo, _ in self.bounds.values()),
                max(hi for _, hi in self.bounds.values()))

    @property
    def no_change_possible(self):
        return any(hi == self.n + 1 for _, hi in self.bounds.values())

    @property
    def candidate_mutations(self):
        """Mutations with at least one surviving change point k <= n."""
        return sorted(i for i, (lo, _) in self.bounds.items() if lo <= self.n)

    @property
    def identified_mutation(self):
        """The mutation if it is certain a change happened and only one mutation fits."""
        candidates = self.candidate_mutations
        if len(candidates) == 1 and not self.no_change_possible:
            return candidates[0]
        return None

    def report(self):
        lo, hi = self.span
        if lo == hi:
            if lo == self.n + 1:
                return ChangePointReport.no_change(self.n)
            return ChangePointReport.exact(lo)
        return ChangePointReport.interval(lo, hi)

    def implied_label(self, position):
        """Label shared by every surviving hypothesis, or None."""
        lo, hi = self.span
        if position < lo:
            return DEFAULT
        mutation = self.identified_mutation
        if position >= hi and mutation is not None:
            return StateLabel(mutation)
        return None

    def distilled_counts(self, measured):
        """
        Count unmeasured pairs by implied label.

        Args:
            measured: Sorted list of consumed positions

        Returns:
            tuple: (distilled_default, distilled_mutation, residual_unknown)
        """
        lo, hi = self.span
        unmeasured = self.n - len(measured)
        distilled_default = (lo - 1) - bisect_left(measured, lo)

        distilled_mutation = 0
        if self.identified_mutation is not None:
            distilled_mutation = (self.n - hi + 1) - (len(measured) - bisect_left(measured, hi))

        return distilled_default, distilled_mutation, unmeasured - distilled_default - distilled_mutation

    def summarize(self, measured):
        """Result fields shared by every protocol (status excluded)."""
        measured = sorted(measured)
        distilled_default, distilled_mutation, residual = self.distilled_counts(measured)
        return {
            "n": self.n,
            "reported_change_point": self.report(),
            "reported_mutation": self.identified_mutation,
            "consumed": len(measured),
            "distilled_default": distilled_default,
            "distilled_mutation": distilled_mutation,
            "residual_unknown": residual,
        }
