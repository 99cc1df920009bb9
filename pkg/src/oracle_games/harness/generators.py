"""Instance generators. All randomness is keyed by an explicit seed."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from ..dimensions import random_twostage_class
from ..games import MultiPlayerGame, ZeroSumGame
from ..oracles import FiniteConceptClass, InputError
from ..rng import make_rng

KINDS = ("threshold_class", "random_class", "twostage_class", "threshold_game", "random_game", "random_multiplayer", "tensor_file")

# sub-stream ids so different generators never share draws for one seed
_STREAM = {"random_class": 1, "random_game": 2, "random_multiplayer": 3}


def gen_threshold_class(n: int) -> FiniteConceptClass:
    """Row i is 0 before position i and 1 from there on."""
    if n < 1:
        raise InputError("n must be at least 1")
    return FiniteConceptClass((np.arange(n)[None, :] >= np.arange(n)[:, None]).astype(np.int8))


def gen_threshold_game(n: int) -> ZeroSumGame:
    if n < 1:
        raise InputError("n must be at least 1")
    return ZeroSumGame((np.arange(n)[:, None] <= np.arange(n)[None, :]).astype(float))


def gen_random_class(m: int, n: int, seed: int, p: float = 0.5) -> FiniteConceptClass:
    if m < 1 or n < 1:
        raise InputError("m and n must be positive")
    rng = make_rng(seed, _STREAM["random_class"])
    return FiniteConceptClass((rng.random((m, n)) < p).astype(np.int8))


def gen_random_game(m: int, n: int, seed: int) -> ZeroSumGame:
    if m < 1 or n < 1:
        raise InputError("m and n must be positive")
    return ZeroSumGame(make_rng(seed, _STREAM["random_game"]).random((m, n)))


def gen_random_multiplayer(shape, seed: int) -> MultiPlayerGame:
    shape = tuple(int(s) for s in shape)
    if len(shape) < 2 or min(shape) < 1:
        raise InputError("need at least two players with at least one action each")
    rng = make_rng(seed, _STREAM["random_multiplayer"])
    return MultiPlayerGame([rng.random(shape) for _ in shape])


@dataclass(frozen=True)
class InstanceSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown instance kind {self.kind!r}; expected one of {', '.join(KINDS)}")

    def build(self):
        p = self.params
        try:
            if self.kind == "threshold_class":
                return gen_threshold_class(int(p["n"]))
            if self.kind == "random_class":
                return gen_random_class(int(p["m"]), int(p["n"]), int(p.get("seed", 0)), float(p.get("p", 0.5)))
            if self.kind == "twostage_class":
                return random_twostage_class(
                    int(p["n"]), int(p["ell"]), float(p.get("p_hi", 0.7)), float(p.get("p_lo", 0.3)), int(p.get("seed", 0))
                )
            if self.kind == "threshold_game":
                return gen_threshold_game(int(p["n"]))
            if self.kind == "random_game":
                return gen_random_game(int(p["m"]), int(p["n"]), int(p.get("seed", 0)))
            if self.kind == "random_multiplayer":
                return gen_random_multiplayer(p["shape"], int(p.get("seed", 0)))
        except KeyError as exc:
            raise InputError(f"instance kind {self.kind!r} needs parameter {exc}") from exc
        from .io import load_game

        return load_game(p["path"])

    def to_json(self) -> dict:
        return asdict(self)
