"""Example streams for the online learner.

An adversary exposes ``rounds`` and ``next_example(cls, mixture)``; it sees
the learner's current mixture before choosing the next example. All three
label with a fixed target row ``hstar``, so the streams are realizable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..oracles import FiniteConceptClass, InputError, LabeledExample
from ..rng import make_rng


@dataclass
class ReplayAdversary:
    """Cycles through a fixed list of examples."""

    examples: Sequence[LabeledExample]
    rounds: int
    _i: int = field(default=0, repr=False)

    def next_example(self, cls, mixture) -> LabeledExample:
        ex = self.examples[self._i % len(self.examples)]
        self._i += 1
        return LabeledExample(int(ex[0]), int(ex[1]))


@dataclass
class RandomAdversary:
    hstar: int
    rounds: int
    seed: int = 0

    def __post_init__(self):
        self._rng = make_rng(self.seed, 1)

    def next_example(self, cls: FiniteConceptClass, mixture) -> LabeledExample:
        x = int(self._rng.integers(cls.domain_size))
        return LabeledExample(x, int(cls.table[self.hstar, x]))


@dataclass
class GreedyAdversary:
    """Picks the point where the current mixture is most wrong about ``hstar``.

    Ties go to the lowest domain index, which makes the stream deterministic.
    Once no point reaches loss epsilon the learner stops updating and the
    adversary repeats the same point forever.
    """

    hstar: int
    rounds: int

    def next_example(self, cls: FiniteConceptClass, mixture) -> LabeledExample:
        target = cls.table[self.hstar].astype(float)
        pool = cls.table[list(mixture.pool)]
        losses = mixture.weights @ np.abs(pool - target)
        x = int(np.argmax(losses))
        return LabeledExample(x, int(target[x]))


def make_adversary(spec: dict, cls: FiniteConceptClass):
    kind = spec.get("adversary")
    hstar = int(spec.get("hstar", 0))
    rounds = int(spec.get("rounds", 100))
    if not 0 <= hstar < cls.size:
        raise InputError(f"hstar {hstar} is not a row of the class")
    if kind == "greedy":
        return GreedyAdversary(hstar, rounds)
    if kind == "random":
        return RandomAdversary(hstar, rounds, int(spec.get("seed", 0)))
    if kind == "replay":
        xs = spec.get("points", list(range(cls.domain_size)))
        return ReplayAdversary([LabeledExample(int(x), int(cls.table[hstar, x])) for x in xs], rounds)
    raise InputError(f"unknown adversary {kind!r}")
