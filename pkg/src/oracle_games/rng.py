"""Seeded randomness. Every random draw in the package goes through here."""
from __future__ import annotations

import numpy as np


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 generator keyed by ``seed`` and an optional sub-stream path.

    Distinct ``stream`` tuples give statistically independent generators, so
    callers can split one seed across components without coordinating.
    """
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *stream])))
