"""File formats.

Concept class:  {"domain_size": n, "label_kind": "binary"|"real", "hypotheses": [[...], ...]}
Zero-sum game:  {"zerosum": true, "matrix": [[...], ...]}    (entries are player 2's utility)
k-player game:  {"players": k, "shape": [n_1, ..., n_k], "utilities": [[flat row-major tensor], ...]}
Stream:         [[x, y], ...]  or  {"adversary": "greedy"|"random"|"replay", "hstar": h, "rounds": T, "seed": s}
Strategy:       {"support": [...], "probs": [...]}

JSON is written with sorted keys and a trailing newline so identical runs
produce identical bytes.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..games import MultiPlayerGame, ZeroSumGame
from ..oracles import FiniteConceptClass, InputError, LabeledExample
from .adversary import make_adversary


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def write_text(path, text: str) -> None:
    Path(path).write_text(text)


def class_from_json(obj) -> FiniteConceptClass:
    if not isinstance(obj, dict):
        raise InputError("concept class JSON must be an object")
    return FiniteConceptClass.from_json(obj)


def game_from_json(obj):
    if not isinstance(obj, dict):
        raise InputError("game JSON must be an object")
    if obj.get("zerosum"):
        if "matrix" not in obj:
            raise InputError("zero-sum game JSON needs 'matrix'")
        return ZeroSumGame(obj["matrix"])
    try:
        k = int(obj["players"])
        shape = [int(s) for s in obj["shape"]]
        flat = obj["utilities"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"game JSON needs 'players', 'shape' and 'utilities': {exc}") from exc
    if len(shape) != k or len(flat) != k:
        raise InputError("shape and utilities must have one entry per player")
    size = int(np.prod(shape))
    if any(len(u) != size for u in flat):
        raise InputError(f"each flattened utility tensor must have {size} entries")
    return MultiPlayerGame([np.asarray(u, dtype=float).reshape(shape) for u in flat])


def load_class(path) -> FiniteConceptClass:
    return class_from_json(read_json(path))


def load_game(path):
    return game_from_json(read_json(path))


def load_matrix(path) -> np.ndarray:
    """A class file, a zero-sum game file, or a bare nested list."""
    obj = read_json(path)
    if isinstance(obj, list):
        return np.asarray(obj, dtype=float)
    if "hypotheses" in obj:
        return class_from_json(obj).table.astype(float)
    if obj.get("zerosum"):
        return np.asarray(obj["matrix"], dtype=float)
    raise InputError("expected a concept class, a zero-sum game or a nested list")


def stream_from_json(obj, cls: FiniteConceptClass):
    if isinstance(obj, list):
        try:
            return [LabeledExample(int(x), int(y)) for x, y in obj]
        except (TypeError, ValueError) as exc:
            raise InputError("stream list entries must be [x, y] pairs") from exc
    if isinstance(obj, dict):
        return make_adversary(obj, cls)
    raise InputError("stream JSON must be a list of pairs or a generator spec")
