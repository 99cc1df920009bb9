"""Game representations, best responses, finite values and verifiers.

Zero-sum convention: ``u(a, b)`` is what player 2 receives; player 1 picks
rows and minimizes, player 2 picks columns and maximizes. Multi-player games
index players from 0 and every utility lies in [0, 1].
"""
from __future__ import annotations

import itertools
import math
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from .mw import selfplay_value
from .oracles import InputError

TIE_TOL = 1e-12
Token = Hashable


class MixedStrategy:
    """Finite-support distribution over action tokens (kept in support order)."""

    __slots__ = ("support", "probs")

    def __init__(self, support: Sequence[Token], probs):
        support = tuple(support)
        probs = np.asarray(probs, dtype=float)
        if len(support) == 0:
            raise InputError("a mixed strategy needs at least one action")
        if probs.shape != (len(support),):
            raise InputError("support and probs differ in length")
        if len(set(support)) != len(support):
            raise InputError("support entries must be distinct")
        if (probs < 0).any() or abs(probs.sum() - 1.0) > 1e-9:
            raise InputError("probs must be a probability vector")
        probs = probs.copy()
        probs.setflags(write=False)
        self.support = support
        self.probs = probs

    @classmethod
    def point(cls, a: Token) -> "MixedStrategy":
        return cls((a,), [1.0])

    @classmethod
    def uniform(cls, actions: Sequence[Token]) -> "MixedStrategy":
        actions = tuple(actions)
        return cls(actions, np.full(len(actions), 1.0 / len(actions)))

    @classmethod
    def from_counts(cls, tokens: Iterable[Token]) -> "MixedStrategy":
        """Empirical distribution of a token sequence, support in first-seen order."""
        counts: dict[Token, int] = {}
        for a in tokens:
            counts[a] = counts.get(a, 0) + 1
        total = sum(counts.values())
        return cls(list(counts), [c / total for c in counts.values()])

    def items(self):
        return zip(self.support, self.probs.tolist())

    def prob(self, a: Token) -> float:
        try:
            return float(self.probs[self.support.index(a)])
        except ValueError:
            return 0.0

    def positive_support(self) -> tuple:
        return tuple(a for a, p in self.items() if p > 0)

    def __len__(self) -> int:
        return len(self.support)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MixedStrategy):
            return NotImplemented
        return dict(self.items()) == dict(other.items())

    def __repr__(self) -> str:
        body = ", ".join(f"{a!r}: {p:.4g}" for a, p in self.items())
        return f"MixedStrategy({{{body}}})"

    def to_json(self) -> dict:
        return {"support": [_jsonable(a) for a in self.support], "probs": self.probs.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "MixedStrategy":
        try:
            return cls([_token(a) for a in obj["support"]], obj["probs"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"strategy JSON needs 'support' and 'probs': {exc}") from exc


def _jsonable(a):
    if isinstance(a, tuple):
        return [_jsonable(x) for x in a]
    if isinstance(a, np.integer):
        return int(a)
    return a


def _token(a):
    if isinstance(a, list):
        return tuple(_token(x) for x in a)
    return a


# ---------------------------------------------------------------- zero-sum


class ZeroSumGame:
    """Two-player zero-sum game backed by a matrix or a utility callback.

    Callback games need finite probe universes ``rows`` / ``cols``; they are
    the candidate sets for best responses and verification.
    """

    def __init__(
        self,
        matrix=None,
        utility: Callable[[Token, Token], float] | None = None,
        rows: Sequence[Token] | None = None,
        cols: Sequence[Token] | None = None,
        payoff_range: tuple[float, float] = (0.0, 1.0),
    ):
        if (matrix is None) == (utility is None):
            raise InputError("give exactly one of matrix or utility")
        self.payoff_range = payoff_range
        lo, hi = payoff_range
        if matrix is not None:
            M = np.array(matrix, dtype=float)
            if M.ndim != 2 or M.size == 0:
                raise InputError("matrix must be a nonempty 2-D array")
            if not np.isfinite(M).all() or M.min() < lo or M.max() > hi:
                raise InputError(f"utilities must lie in [{lo}, {hi}]")
            M.setflags(write=False)
            self.matrix = M
            self.rows = tuple(range(M.shape[0]))
            self.cols = tuple(range(M.shape[1]))
            self._u = None
        else:
            if rows is None or cols is None or not len(rows) or not len(cols):
                raise InputError("callback games need nonempty probe universes rows and cols")
            self.matrix = None
            self.rows = tuple(rows)
            self.cols = tuple(cols)
            self._u = utility

    @property
    def is_tensor(self) -> bool:
        return self.matrix is not None

    def u(self, a: Token, b: Token) -> float:
        if self.matrix is not None:
            return float(self.matrix[a, b])
        v = float(self._u(a, b))
        lo, hi = self.payoff_range
        if not lo <= v <= hi:
            raise InputError(f"utility callback returned {v} outside [{lo}, {hi}]")
        return v

    def submatrix(self, A: Sequence[Token], B: Sequence[Token]) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix[np.ix_(list(A), list(B))]
        return np.array([[self.u(a, b) for b in B] for a in A], dtype=float).reshape(len(A), len(B))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ZeroSumGame):
            return NotImplemented
        if self.is_tensor and other.is_tensor:
            return np.array_equal(self.matrix, other.matrix)
        return self is other

    __hash__ = object.__hash__

    def to_json(self) -> dict:
        if not self.is_tensor:
            raise InputError("only matrix-backed games serialize")
        return {"zerosum": True, "matrix": self.matrix.tolist()}


# ---------------------------------------------------------------- multi-player


class MultiPlayerGame:
    """k-player game; ``tensors[p]`` has shape (n_0, ..., n_{k-1}).

    With a callback, ``utility(p, profile)`` is evaluated on demand and
    ``actions[p]`` lists each player's probe universe.
    """

    def __init__(self, tensors=None, utility=None, actions=None):
        if (tensors is None) == (utility is None):
            raise InputError("give exactly one of tensors or utility")
        if tensors is not None:
            ts = [np.array(t, dtype=float) for t in tensors]
            k = len(ts)
            if k < 2:
                raise InputError("a multi-player game needs at least two players")
            shape = ts[0].shape
            if any(t.shape != shape for t in ts) or len(shape) != k or 0 in shape:
                raise InputError(f"each utility tensor must have one nonempty axis per player ({k})")
            for t in ts:
                if not np.isfinite(t).all() or t.min() < 0 or t.max() > 1:
                    raise InputError("utilities must lie in [0, 1]")
                t.setflags(write=False)
            self.tensors = ts
            self.actions = [tuple(range(s)) for s in shape]
            self._u = None
        else:
            if actions is None or len(actions) < 2 or any(len(a) == 0 for a in actions):
                raise InputError("callback games need a nonempty action universe for each of >= 2 players")
            self.tensors = None
            self.actions = [tuple(a) for a in actions]
            self._u = utility

    @property
    def n_players(self) -> int:
        return len(self.actions)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.actions)

    @property
    def is_tensor(self) -> bool:
        return self.tensors is not None

    def u(self, p: int, profile: Sequence[Token]) -> float:
        if self.tensors is not None:
            return float(self.tensors[p][tuple(profile)])
        v = float(self._u(p, tuple(profile)))
        if not 0.0 <= v <= 1.0:
            raise InputError(f"utility callback returned {v} outside [0, 1]")
        return v

    def subtensor(self, p: int, supports: Sequence[Sequence[Token]]) -> np.ndarray:
        if self.tensors is not None:
            return self.tensors[p][np.ix_(*[list(s) for s in supports])]
        out = np.empty([len(s) for s in supports])
        for idx in itertools.product(*[range(len(s)) for s in supports]):
            out[idx] = self.u(p, [s[i] for s, i in zip(supports, idx)])
        return out

    def profiles(self):
        return itertools.product(*self.actions)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPlayerGame):
            return NotImplemented
        if self.is_tensor and other.is_tensor:
            return all(np.array_equal(a, b) for a, b in zip(self.tensors, other.tensors)) and len(self.tensors) == len(other.tensors)
        return self is other

    __hash__ = object.__hash__

    def to_json(self) -> dict:
        if not self.is_tensor:
            raise InputError("only tensor-backed games serialize")
        return {
            "players": self.n_players,
            "shape": list(self.shape),
            "utilities": [t.ravel().tolist() for t in self.tensors],
        }


def replace(profile: Sequence[Token], p: int, d: Token) -> tuple:
    prof = list(profile)
    prof[p] = d
    return tuple(prof)


# ---------------------------------------------------------------- best response


def _argbest(values: np.ndarray, maximize: bool) -> int:
    target = values.max() if maximize else values.min()
    hits = np.flatnonzero(values >= target - TIE_TOL) if maximize else np.flatnonzero(values <= target + TIE_TOL)
    return int(hits[0])


def best_response(game, player: int, opponents: MixedStrategy, candidates=None, eps: float = 0.0):
    """An action within ``eps`` of the best expected utility against ``opponents``.

    Zero-sum games: player 1 minimizes over rows against a mixture of columns,
    player 2 maximizes over columns against a mixture of rows. Multi-player
    games: ``opponents`` is a distribution over the other players' joint
    actions (tuples in player order with ``player`` removed). Candidates are
    enumerated, so the answer is exact; ties go to the earliest candidate.
    """
    if eps < 0:
        raise InputError("eps must be nonnegative")
    if isinstance(game, ZeroSumGame):
        if player not in (1, 2):
            raise InputError("zero-sum players are 1 (rows, minimizer) and 2 (columns, maximizer)")
        cands = tuple(candidates) if candidates is not None else (game.rows if player == 1 else game.cols)
        if not cands:
            raise InputError("empty candidate set")
        if player == 1:
            vals = game.submatrix(cands, opponents.support) @ opponents.probs
        else:
            vals = opponents.probs @ game.submatrix(opponents.support, cands)
        return cands[_argbest(vals, maximize=player == 2)]
    if isinstance(game, MultiPlayerGame):
        if not 0 <= player < game.n_players:
            raise InputError(f"player must be in [0, {game.n_players})")
        cands = tuple(candidates) if candidates is not None else game.actions[player]
        if not cands:
            raise InputError("empty candidate set")
        vals = deviation_values(game, player, opponents, cands)
        return cands[_argbest(vals, maximize=True)]
    raise InputError(f"unsupported game type {type(game).__name__}")


def deviation_values(game: MultiPlayerGame, p: int, others: MixedStrategy, cands) -> np.ndarray:
    """E_{a_-p ~ others}[u_p(d, a_-p)] for every d in ``cands``."""
    vals = np.zeros(len(cands))
    if game.is_tensor:
        T = game.tensors[p]
        for rest, w in others.items():
            idx = list(rest[:p]) + [list(cands)] + list(rest[p:])
            vals += w * T[tuple(idx)]
        return vals
    for rest, w in others.items():
        for i, d in enumerate(cands):
            vals[i] += w * game.u(p, tuple(rest[:p]) + (d,) + tuple(rest[p:]))
    return vals


# ---------------------------------------------------------------- values


def finite_value(game: ZeroSumGame, A: Sequence[Token], B: Sequence[Token], tol: float) -> float:
    """Min-max value of the subgame A x B to within ``tol``.

    A single row or a single column is solved exactly; otherwise both sides
    run multiplicative weights against each other.
    """
    A, B = list(A), list(B)
    if not A or not B:
        raise InputError("finite_value needs nonempty action sets")
    if tol <= 0:
        raise InputError("tol must be positive")
    U = game.submatrix(A, B)
    if U.shape[0] == 1:
        return float(U[0].max())
    if U.shape[1] == 1:
        return float(U[:, 0].min())
    return float(selfplay_value(U, tol)[0])


def expected_payoff(game: ZeroSumGame, mu1: MixedStrategy, mu2: MixedStrategy) -> float:
    return float(mu1.probs @ game.submatrix(mu1.support, mu2.support) @ mu2.probs)


# ---------------------------------------------------------------- CCE matrix


class CceMatrixView(ZeroSumGame):
    """Zero-sum view of a multi-player game: rows are profiles, columns are
    tagged deviations ``(p, d)``, and entry ``u_p(d, a_-p) - u_p(a)``.

    Nothing is materialized; ``rows`` and ``cols`` are the full universes,
    built lazily.
    """

    def __init__(self, game: MultiPlayerGame):
        self.base = game
        self.payoff_range = (-1.0, 1.0)
        self.matrix = None
        self._rows = None
        self._cols = tuple((p, d) for p in range(game.n_players) for d in game.actions[p])

    @property
    def rows(self):
        if self._rows is None:
            self._rows = tuple(self.base.profiles())
        return self._rows

    @property
    def cols(self):
        return self._cols

    @property
    def is_tensor(self) -> bool:
        return False

    def u(self, a, dev) -> float:
        p, d = dev
        g = self.base
        return g.u(p, replace(a, p, d)) - g.u(p, a)

    def submatrix(self, A, B) -> np.ndarray:
        A, B = list(A), list(B)
        g = self.base
        if not g.is_tensor or not A:
            return np.array([[self.u(a, dev) for dev in B] for a in A], dtype=float).reshape(len(A), len(B))
        P = np.array(A, dtype=np.int64).reshape(len(A), g.n_players)
        out = np.empty((len(A), len(B)))
        base = [g.tensors[p][tuple(P.T)] for p in range(g.n_players)]
        for j, (p, d) in enumerate(B):
            Q = P.copy()
            Q[:, p] = d
            out[:, j] = g.tensors[p][tuple(Q.T)] - base[p]
        return out


def cce_matrix(game: MultiPlayerGame) -> CceMatrixView:
    return CceMatrixView(game)


# ---------------------------------------------------------------- verifiers


def verify_nash(game: ZeroSumGame, mu1: MixedStrategy, mu2: MixedStrategy, rows=None, cols=None):
    """Exploitabilities ``(e1, e2)`` by enumeration over the probe universes.

    e1 is what the minimizer saves by deviating, e2 what the maximizer gains.
    """
    rows = tuple(rows) if rows is not None else game.rows
    cols = tuple(cols) if cols is not None else game.cols
    v = expected_payoff(game, mu1, mu2)
    row_vals = game.submatrix(rows, mu2.support) @ mu2.probs
    col_vals = mu1.probs @ game.submatrix(mu1.support, cols)
    return float(v - row_vals.min()), float(col_vals.max() - v)


def marginal_others(joint: MixedStrategy, p: int) -> MixedStrategy:
    acc: dict[tuple, float] = {}
    for a, w in joint.items():
        rest = tuple(a[:p]) + tuple(a[p + 1:])
        acc[rest] = acc.get(rest, 0.0) + w
    total = sum(acc.values())
    return MixedStrategy(list(acc), [w / total for w in acc.values()])


def deviation_gains(game: MultiPlayerGame, joint: MixedStrategy) -> list[np.ndarray]:
    """gains[p][i] = E[u_p(d_i, a_-p)] - E[u_p(a)] over player p's universe."""
    out = []
    for p in range(game.n_players):
        stay = sum(w * game.u(p, a) for a, w in joint.items())
        out.append(deviation_values(game, p, marginal_others(joint, p), game.actions[p]) - stay)
    return out


def verify_cce(game: MultiPlayerGame, joint: MixedStrategy) -> float:
    """Largest unilateral gain any player gets from a fixed deviation."""
    return float(max(g.max() for g in deviation_gains(game, joint)))
