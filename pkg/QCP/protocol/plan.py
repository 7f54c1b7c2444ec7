"""
Protocol Plans

A plan is a protocol written as a step machine: it proposes the next
measurement, absorbs its outcome, and finally settles into a result. The Monte
Carlo runner and the exact oracle drive the very same plans, the first by
sampling outcomes, the second by enumerating them.

RULES:
1. next_request() returns None once the protocol has stopped
2. apply() is called exactly once per request, with that request's outcome
3. settle() does not touch the transcript; execute() attaches it
"""

import copy
import dataclasses

from .errors import ProtocolLogicError


class Plan:
    """Base class for protocol plans."""

    def next_request(self):
        raise NotImplementedError

    def apply(self, request, outcome):
        raise NotImplementedError

    def settle(self):
        raise NotImplementedError

    def copy(self):
        return copy.deepcopy(self)


def execute(plan, pairs, rng=None):
    """
    Run a plan to completion against shared pairs.

    Args:
        plan: Plan instance (consumed by the run)
        pairs: SharedPairs holding the hidden sequence
        rng: Random stream for random measurement kinds

    Returns:
        ProtocolResult with the transcript attached
    """
    request = plan.next_request()
    while request is not None:
        outcome = pairs.measure(request, rng)
        plan.apply(request, outcome)
        request = plan.next_request()

    result = plan.settle()
    if result.consumed != pairs.consumed:
        raise ProtocolLogicError(f"plan counted {result.consumed} measurements, ledger {pairs.consumed}")
    return dataclasses.replace(result, transcript=tuple(pairs.transcript))
