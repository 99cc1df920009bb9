"""Finite concept classes and the oracles that give access to them."""
from __future__ import annotations

from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

BINARY = "binary"
REAL = "real"
LOWEST = "lowest"
HIGHEST = "highest"


class InputError(ValueError):
    """Malformed input to an oracle or class constructor."""


class LabeledExample(NamedTuple):
    x: int
    y: int


HypothesisId = int


class FiniteConceptClass:
    """An m x n table of labels: row i is hypothesis i evaluated on the domain.

    The table is stored read-only, so instances can be shared freely.
    """

    __slots__ = ("_table", "label_kind")

    def __init__(self, hypotheses, label_kind: Optional[str] = None):
        table = np.array(hypotheses, dtype=float)
        if table.ndim != 2 or table.shape[0] < 1 or table.shape[1] < 1:
            raise InputError("hypotheses must be a nonempty list of equal-length nonempty rows")
        if label_kind is None:
            label_kind = BINARY if np.isin(table, (0.0, 1.0)).all() else REAL
        if label_kind == BINARY:
            if not np.isin(table, (0.0, 1.0)).all():
                raise InputError("binary class contains labels other than 0/1")
            table = table.astype(np.int8)
        elif label_kind == REAL:
            if not np.isfinite(table).all() or table.min() < 0.0 or table.max() > 1.0:
                raise InputError("real-valued class entries must lie in [0, 1]")
        else:
            raise InputError(f"unknown label_kind {label_kind!r}")
        table.setflags(write=False)
        self._table = table
        self.label_kind = label_kind

    @property
    def table(self) -> np.ndarray:
        return self._table

    @property
    def size(self) -> int:
        return self._table.shape[0]

    @property
    def domain_size(self) -> int:
        return self._table.shape[1]

    @property
    def is_binary(self) -> bool:
        return self.label_kind == BINARY

    def row(self, h: HypothesisId) -> np.ndarray:
        return self._table[h]

    def __len__(self) -> int:
        return self.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteConceptClass):
            return NotImplemented
        return self.label_kind == other.label_kind and np.array_equal(self._table, other._table)

    def __hash__(self):
        return hash((self.label_kind, self._table.shape, self._table.tobytes()))

    def __repr__(self) -> str:
        return f"FiniteConceptClass(m={self.size}, n={self.domain_size}, {self.label_kind})"

    def to_json(self) -> dict:
        rows = self._table.tolist()
        return {"domain_size": self.domain_size, "label_kind": self.label_kind, "hypotheses": rows}

    @classmethod
    def from_json(cls, obj: dict) -> "FiniteConceptClass":
        try:
            rows = obj["hypotheses"]
            n = int(obj["domain_size"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"concept class JSON is missing a field: {exc}") from exc
        if any(len(r) != n for r in rows):
            raise InputError("every hypothesis row must have exactly domain_size entries")
        return cls(rows, obj.get("label_kind"))


def _example_arrays(cls: FiniteConceptClass, examples: Iterable[LabeledExample]):
    pairs = [tuple(e) for e in examples]
    xs = np.fromiter((p[0] for p in pairs), dtype=np.int64, count=len(pairs))
    ys = np.fromiter((p[1] for p in pairs), dtype=float, count=len(pairs))
    if len(xs) and (xs.min() < 0 or xs.max() >= cls.domain_size):
        raise InputError(f"example domain index out of range [0, {cls.domain_size})")
    return xs, ys


def _pick(candidates: np.ndarray, tie_break: str) -> int:
    if tie_break == LOWEST:
        return int(candidates[0])
    if tie_break == HIGHEST:
        return int(candidates[-1])
    raise InputError(f"unknown tie_break {tie_break!r}")


def empirical_losses(cls: FiniteConceptClass, examples: Sequence[LabeledExample]) -> np.ndarray:
    """Total absolute loss of every row on ``examples`` (repeats count)."""
    xs, ys = _example_arrays(cls, examples)
    if len(xs) == 0:
        return np.zeros(cls.size)
    return np.abs(cls.table[:, xs] - ys).sum(axis=1)


def consistent_oracle(
    cls: FiniteConceptClass, examples: Sequence[LabeledExample], tie_break: str = LOWEST
) -> Optional[HypothesisId]:
    """A row agreeing with every example, or ``None`` when no row does."""
    if not cls.is_binary:
        raise InputError("consistent oracle requires a binary class")
    xs, ys = _example_arrays(cls, examples)
    ok = np.flatnonzero((cls.table[:, xs] == ys).all(axis=1))
    if len(ok) == 0:
        return None
    return _pick(ok, tie_break)


def erm_oracle(
    cls: FiniteConceptClass,
    examples: Sequence[LabeledExample],
    opt_tol: float = 0.0,
    tie_break: str = LOWEST,
) -> HypothesisId:
    """A row whose total loss is within ``opt_tol`` of the class minimum.

    Finite tables are enumerated, so the returned row is an exact minimizer
    regardless of ``opt_tol``.
    """
    if opt_tol < 0:
        raise InputError("opt_tol must be nonnegative")
    losses = empirical_losses(cls, examples)
    best = np.flatnonzero(losses == losses.min())
    return _pick(best, tie_break)


def value_oracle(cls: FiniteConceptClass, h: HypothesisId, x: int):
    if not (0 <= h < cls.size) or not (0 <= x < cls.domain_size):
        raise InputError(f"index out of range: h={h}, x={x} for {cls!r}")
    v = cls.table[h, x]
    return int(v) if cls.is_binary else float(v)
