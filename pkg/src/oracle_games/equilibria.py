"""Equilibrium solvers that touch the large side of a game only through
best-response oracles.

* :func:`nash_half_infinite`: MW on the finite side against best responses.
* :func:`nash_zero_sum`: alternating double oracle for zero-sum games.
* :func:`finite_cce`: k-player MW self-play on a small product game.
* :func:`cce_multiplayer`: double oracle over the CCE matrix view.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import mw
from .config import Caps, default_caps
from .games import (
    TIE_TOL,
    CceMatrixView,
    MixedStrategy,
    MultiPlayerGame,
    ZeroSumGame,
    best_response,
    cce_matrix,
    deviation_values,
    expected_payoff,
    finite_value,
    marginal_others,
    verify_cce,
    verify_nash,
)
from .oracles import InputError
from .rng import make_rng
from .transcript import CCE, ZERO_SUM, SolveTranscript

HALF_INFINITE_C = 16.0


class IterationCapExceeded(RuntimeError):
    def __init__(self, message: str, transcript: SolveTranscript):
        super().__init__(message)
        self.transcript = transcript


@dataclass
class HalfInfiniteResult:
    """Unpacks as ``(mu1, mu2)``; player 1 is always the row minimizer."""

    mu1: MixedStrategy
    mu2: MixedStrategy
    rounds: int
    finite_player: int
    regret: float
    regret_bound: float
    oracle_calls: int

    def __iter__(self):
        yield self.mu1
        yield self.mu2


def half_infinite_rounds(n: int, eps: float) -> int:
    return int(math.ceil(HALF_INFINITE_C * math.log(n + 1) / eps**2))


def nash_half_infinite(
    game: ZeroSumGame,
    finite_side: Sequence,
    eps: float,
    finite_player: int = 1,
    oracle: Callable[[MixedStrategy], object] | None = None,
    candidates: Sequence | None = None,
) -> HalfInfiniteResult:
    """Approximate Nash when one player is restricted to ``finite_side``.

    The finite player runs MW (loss ``u`` for the minimizer, ``-u`` for the
    maximizer). Each round the other player best-responds to the running
    average of the finite player's mixtures, which is a be-the-leader
    strategy and so has nonpositive regret. The output pairs the average MW
    mixture with the empirical distribution of best responses.
    """
    A = tuple(dict.fromkeys(finite_side))
    if not A:
        raise InputError("finite_side must be nonempty")
    if eps <= 0:
        raise InputError("eps must be positive")
    if finite_player not in (1, 2):
        raise InputError("finite_player must be 1 or 2")
    other = 3 - finite_player
    if oracle is None:
        def oracle(mix):
            return best_response(game, other, mix, candidates)

    n = len(A)
    T = half_infinite_rounds(n, eps)
    learner = mw.MultiplicativeWeights(n, mw.learning_rate(n, T))
    sign = 1.0 if finite_player == 1 else -1.0
    cum = np.zeros(n)
    avg_play = np.zeros(n)
    responses = []
    realized = 0.0
    totals = np.zeros(n)
    for t in range(1, T + 1):
        w = learner.weights
        cum += w
        b = oracle(MixedStrategy(A, cum / t))
        responses.append(b)
        if finite_player == 1:
            col = game.submatrix(A, [b])[:, 0]
        else:
            col = game.submatrix([b], A)[0]
        loss = sign * col
        realized += float(w @ loss)
        totals += loss
        avg_play += w
        learner.update(loss)
    finite_mix = MixedStrategy(A, avg_play / avg_play.sum())
    other_mix = MixedStrategy.from_counts(responses)
    mu1, mu2 = (finite_mix, other_mix) if finite_player == 1 else (other_mix, finite_mix)
    return HalfInfiniteResult(
        mu1=mu1,
        mu2=mu2,
        rounds=T,
        finite_player=finite_player,
        regret=float(realized - totals.min()),
        regret_bound=mw.regret_bound(n, T),
        oracle_calls=T,
    )


@dataclass
class EquilibriumCertificate:
    kind: str
    strategies: dict
    claimed_epsilon: float
    eps: float
    val_tol: float
    value: float | None
    iterations: int
    transcript: SolveTranscript = field(repr=False)

    def verify(self, game) -> float:
        """Worst exploitability / deviation gain, recomputed by enumeration."""
        if self.kind == ZERO_SUM:
            return max(verify_nash(game, self.strategies["mu1"], self.strategies["mu2"]))
        return verify_cce(game, self.strategies["joint"])

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "claimed_epsilon": self.claimed_epsilon,
            "eps": self.eps,
            "val_tol": self.val_tol,
            "value": self.value,
            "iterations": self.iterations,
            "oracle_calls": dict(self.transcript.oracle_calls),
            "seed": self.transcript.seed,
            "strategies": {k: v.to_json() for k, v in self.strategies.items()},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "EquilibriumCertificate":
        tr = SolveTranscript(kind=obj["kind"], oracle_calls=obj.get("oracle_calls", {}), seed=obj.get("seed"))
        return cls(
            kind=obj["kind"],
            strategies={k: MixedStrategy.from_json(v) for k, v in obj["strategies"].items()},
            claimed_epsilon=obj["claimed_epsilon"],
            eps=obj["eps"],
            val_tol=obj["val_tol"],
            value=obj.get("value"),
            iterations=obj["iterations"],
            transcript=tr,
        )


class _ValCache:
    def __init__(self, game, tol):
        self.game, self.tol = game, tol
        self.cache: dict = {}
        self.calls = 0

    def __call__(self, A, B) -> float:
        key = (frozenset(A), frozenset(B))
        if key not in self.cache:
            self.calls += 1
            # sort for a canonical row/column order independent of insertion history
            self.cache[key] = finite_value(self.game, sorted(A), sorted(B), self.tol)
        return self.cache[key]


def _check_tol(eps, val_tol):
    if eps <= 0:
        raise InputError("eps must be positive")
    if not 0 < val_tol <= eps / 10 + 1e-15:
        raise InputError("val_tol must lie in (0, eps/10]")


def nash_zero_sum(
    game: ZeroSumGame,
    eps: float,
    val_tol: float,
    caps: Caps | None = None,
    seed: int | None = None,
    row_oracle: Callable[[MixedStrategy], object] | None = None,
    col_oracle: Callable[[MixedStrategy], object] | None = None,
    initial: tuple | None = None,
) -> EquilibriumCertificate:
    """Alternating double oracle.

    Each iteration first lets the minimizer grow A against the fixed B, then
    the maximizer grow B against the new A. It stops once either move
    changes the restricted value by less than eps, with both thresholds
    widened by 2*val_tol toward stopping. The returned pair's exploitability
    is at most 5*eps + 4*val_tol when the oracles are exact.
    """
    _check_tol(eps, val_tol)
    caps = caps or default_caps()
    a0, b0 = initial if initial is not None else (game.rows[0], game.cols[0])
    calls = {"best_response_1": 0, "best_response_2": 0}

    def counted(fn, key, player):
        def call(mix):
            calls[key] += 1
            return fn(mix) if fn is not None else best_response(game, player, mix)
        return call

    br1 = counted(row_oracle, "best_response_1", 1)
    br2 = counted(col_oracle, "best_response_2", 2)
    val = _ValCache(game, val_tol)
    tr = SolveTranscript(kind=ZERO_SUM, config={"eps": eps, "val_tol": val_tol}, seed=seed)
    A, B = [a0], [b0]
    history = []
    for t in range(1, caps.iteration_cap + 1):
        before = dict(calls)
        mu = nash_half_infinite(game, B, eps, finite_player=2, oracle=br1)
        A_prev, B_prev = list(A), list(B)
        A += [a for a in mu.mu1.positive_support() if a not in A]
        xi = nash_half_infinite(game, A, eps, finite_player=1, oracle=br2)
        B += [b for b in xi.mu2.positive_support() if b not in B]
        v_prev = val(A_prev, B_prev)
        v_mid = val(A, B_prev)
        v_new = val(A, B)
        step = sum(calls.values()) - sum(before.values())
        tr.append({
            "iteration": t,
            "A_size": len(A),
            "B_size": len(B),
            "val_AB_prev": v_mid,
            "val_AB": v_new,
            "oracle_calls": step,
        })
        history.append({
            "iteration": t,
            "val_prev": v_prev,
            "added_A": [a for a in A if a not in A_prev],
            "added_B": [b for b in B if b not in B_prev],
            "regret_1": mu.regret,
            "regret_2": xi.regret,
            "regret_bound_1": mu.regret_bound,
            "regret_bound_2": xi.regret_bound,
            "half_infinite_calls": [mu.oracle_calls, xi.oracle_calls],
        })
        widen = 2 * val_tol
        # the A-move test leans on B_{t-1} holding a column best response to
        # A_{t-1}; the seed column b0 is not one, so it is skipped at t = 1
        stop_a = t > 1 and v_mid >= v_prev - eps - widen
        stop_b = v_new <= v_mid + eps + widen
        if stop_a or stop_b:
            for k, n in calls.items():
                tr.count_call(k, n)
            tr.extras.update(history=_jsonable_history(history), val_calls=val.calls, stop=("A" if stop_a else "B"))
            strategies = {"mu1": xi.mu1, "mu2": mu.mu2}
            return EquilibriumCertificate(
                kind=ZERO_SUM,
                strategies=strategies,
                claimed_epsilon=5 * eps + 4 * val_tol,
                eps=eps,
                val_tol=val_tol,
                value=expected_payoff(game, xi.mu1, mu.mu2),
                iterations=t,
                transcript=tr,
            )
    for k, n in calls.items():
        tr.count_call(k, n)
    tr.extras.update(history=_jsonable_history(history), val_calls=val.calls)
    raise IterationCapExceeded(f"double oracle did not stop within {caps.iteration_cap} iterations", tr)


def _jsonable_history(history):
    def conv(v):
        if isinstance(v, tuple):
            return [conv(x) for x in v]
        if isinstance(v, list):
            return [conv(x) for x in v]
        if isinstance(v, (np.integer,)):
            return int(v)
        return v

    return [{k: conv(v) for k, v in h.items()} for h in history]


# ---------------------------------------------------------------- CCE


def finite_cce(
    game: MultiPlayerGame,
    supports: Sequence[Sequence],
    eps: float,
    seed: int = 0,
    exact: bool = False,
) -> MixedStrategy:
    """Approximate CCE of the subgame on supports B_0 x ... x B_{k-1}.

    Every player runs MW on losses 1 - u_p against what the others did.
    Sampled mode draws a realized profile each round and returns the
    empirical distribution of those profiles. ``exact=True`` feeds expected
    losses against the product of the others' mixtures and returns the
    average of the per-round product distributions.
    """
    if eps <= 0:
        raise InputError("eps must be positive")
    supports = [tuple(dict.fromkeys(s)) for s in supports]
    k = game.n_players
    if len(supports) != k or any(len(s) == 0 for s in supports):
        raise InputError("need one nonempty support per player")
    sizes = [len(s) for s in supports]
    T = int(math.ceil(16.0 * math.log(max(sizes) + 1) / eps**2))
    U = [game.subtensor(p, supports) for p in range(k)]
    learners = [mw.MultiplicativeWeights(n, mw.learning_rate(n, T)) for n in sizes]
    if all(n == 1 for n in sizes):
        return MixedStrategy.point(tuple(s[0] for s in supports))
    if exact:
        acc = np.zeros(sizes)
        for _ in range(T):
            ws = [l.weights for l in learners]
            acc += _outer(ws)
            for p in range(k):
                exp_u = _contract_except(U[p], ws, p)
                learners[p].update(1.0 - exp_u)
        acc /= T
        idx = list(np.ndindex(*sizes))
        return MixedStrategy([tuple(s[i] for s, i in zip(supports, ix)) for ix in idx], [acc[ix] for ix in idx])
    rng = make_rng(seed, 0x5CCE)
    played = []
    for _ in range(T):
        draws = rng.random(k)
        prof = tuple(
            min(int(np.searchsorted(np.cumsum(l.weights), r, side="right")), n - 1)
            for l, r, n in zip(learners, draws, sizes)
        )
        played.append(prof)
        for p in range(k):
            idx = list(prof)
            idx[p] = slice(None)
            learners[p].update(1.0 - U[p][tuple(idx)])
    return MixedStrategy.from_counts(tuple(s[i] for s, i in zip(supports, prof)) for prof in played)


def _outer(ws):
    out = ws[0]
    for w in ws[1:]:
        out = np.multiply.outer(out, w)
    return out


def _contract_except(T: np.ndarray, ws: list, p: int) -> np.ndarray:
    """Contract every axis but ``p`` of T against the matching weight vector."""
    out = T
    for q in range(len(ws) - 1, -1, -1):
        if q != p:
            out = np.tensordot(out, ws[q], axes=([q], [0]))
    return out


def best_deviation(game: MultiPlayerGame, joint: MixedStrategy, eps: float = 0.0, oracles=None, counter=None):
    """The player/deviation with the largest gain against ``joint``.

    One best-response call per player; ties go to the lowest player.
    Returns ``(p, d, gain)``.
    """
    best = None
    for p in range(game.n_players):
        others = marginal_others(joint, p)
        d = oracles[p](others) if oracles is not None else best_response(game, p, others, eps=eps)
        if counter is not None:
            counter[p] += 1
        stay = sum(w * game.u(p, a) for a, w in joint.items())
        dev = float(deviation_values(game, p, others, (d,))[0])
        gain = dev - stay
        if best is None or gain > best[2] + TIE_TOL:
            best = (p, d, gain)
    return best


def cce_multiplayer(
    game: MultiPlayerGame,
    eps: float,
    val_tol: float,
    caps: Caps | None = None,
    seed: int = 0,
    exact_cce: bool = False,
    oracles=None,
    fatr_telemetry: bool = False,
) -> EquilibriumCertificate:
    """Multi-player double oracle over the CCE matrix.

    A grows by the support of a CCE of the game restricted to B's
    deviations; B grows by the deviations the half-infinite solver finds
    against A. Stops when Val(A, B) <= 3*eps + 2*val_tol and returns the
    minimizer's mixture over profiles, a (5*eps + 3*val_tol)-CCE.
    """
    _check_tol(eps, val_tol)
    caps = caps or default_caps()
    view = cce_matrix(game)
    k = game.n_players
    counter = [0] * k

    def deviation_oracle(mix):
        p, d, _ = best_deviation(game, mix, oracles=oracles, counter=counter)
        return (p, d)

    val = _ValCache(view, val_tol)
    tr = SolveTranscript(kind=CCE, config={"eps": eps, "val_tol": val_tol, "exact_cce": exact_cce}, seed=seed)
    A: list = []
    B: list = [(p, game.actions[p][0]) for p in range(k)]
    history = []
    snapshots = []
    for t in range(1, caps.iteration_cap + 1):
        before = sum(counter)
        B_prev = list(B)
        supports = [[d for q, d in B if q == p] for p in range(k)]
        sub = finite_cce(game, supports, eps, seed=seed * 1_000_003 + t, exact=exact_cce)
        A += [a for a in sub.positive_support() if a not in A]
        xi = nash_half_infinite(view, A, eps, finite_player=1, oracle=deviation_oracle)
        B += [b for b in xi.mu2.positive_support() if b not in B]
        v_mid = val(A, B_prev)
        v_new = val(A, B)
        snapshots.append((list(A), list(B)))
        tr.append({
            "iteration": t,
            "A_size": len(A),
            "B_size": len(B),
            "val_AB_prev": v_mid,
            "val_AB": v_new,
            "oracle_calls": sum(counter) - before,
        })
        history.append({
            "iteration": t,
            "regret": xi.regret,
            "regret_bound": xi.regret_bound,
            "half_infinite_rounds": xi.rounds,
        })
        if v_new <= 3 * eps + 2 * val_tol:
            for p, n in enumerate(counter):
                tr.count_call(f"best_response_{p}", n)
            tr.extras.update(history=history, val_calls=val.calls)
            if fatr_telemetry:
                tr.extras["fatr_telemetry"] = _fatr_telemetry(val, snapshots, eps)
            joint = xi.mu1
            return EquilibriumCertificate(
                kind=CCE,
                strategies={"joint": joint},
                claimed_epsilon=5 * eps + 3 * val_tol,
                eps=eps,
                val_tol=val_tol,
                value=v_new,
                iterations=t,
                transcript=tr,
            )
    for p, n in enumerate(counter):
        tr.count_call(f"best_response_{p}", n)
    tr.extras.update(history=history, val_calls=val.calls)
    raise IterationCapExceeded(f"CCE double oracle did not stop within {caps.iteration_cap} iterations", tr)


def _fatr_telemetry(val: _ValCache, snapshots, eps: float) -> dict:
    """fatr of the matrix V[i, j] = Val(A_i, B_j), rescaled from [-1, 1] to [0, 1]."""
    from .dimensions import fat_threshold_dimension

    n = len(snapshots)
    V = np.array([[val(snapshots[i][0], snapshots[j][1]) for j in range(n)] for i in range(n)])
    M = np.clip((V + 1.0) / 2.0, 0.0, 1.0)
    rep = fat_threshold_dimension(M, eps, caps=Caps(threshold_max_rows=max(16, n), threshold_max_cols=max(16, n)))
    return {"iterations": n, "fatr_value_history": rep.value, "budget": math.ceil(rep.value / eps) if rep.value else 0}
