"""Shared fixtures: scripted random streams and small sources."""

import numpy as np
import pytest


class ScriptedRandom:
    """Stand-in random stream returning scripted uniforms, then a fallback value."""

    def __init__(self, values, fallback=0.0):
        self.values = list(values)
        self.fallback = fallback
        self.calls = 0

    def random(self):
        self.calls += 1
        if self.values:
            return self.values.pop(0)
        return self.fallback


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def scripted():
    return ScriptedRandom
