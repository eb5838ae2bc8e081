"""Shared test setup: deep recursion headroom and a seeded RNG fixture."""

from __future__ import annotations

import random
import sys

import pytest

sys.setrecursionlimit(30000)

SEED = 20260819


@pytest.fixture
def rng() -> random.Random:
    return random.Random(SEED)
