"""Online binary classification through a consistent oracle.

The realizable learner keeps a growing pool of hypotheses. Within a phase it
plays lazy multiplicative weights over the pool: the mixture changes only on
rounds where it puts probability >= epsilon on the wrong label. After a fixed
budget of such updates it asks the consistent oracle for a hypothesis that
agrees with everything seen so far, adds it to the pool, and restarts.

The agnostic learner runs MW over self-simulating copies of the realizable
learner, each of which flips its own predictions on a chosen set of rounds.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import mw
from .config import Caps, CapExceeded, default_caps
from .oracles import (
    LOWEST,
    FiniteConceptClass,
    HypothesisId,
    InputError,
    LabeledExample,
    consistent_oracle,
    empirical_losses,
    erm_oracle,
)
from .transcript import AGNOSTIC, LEARN, SolveTranscript

PROPER = "proper"
IMPROPER = "improper"
EPS_SLACK = 1e-12


class NotRealizableError(ValueError):
    def __init__(self, round_index: int):
        super().__init__(f"stream not realizable: no hypothesis is consistent with rounds 1..{round_index}")
        self.round_index = round_index


@dataclass(frozen=True)
class LearnerConfig:
    """Learner parameters.

    In improper mode the majority vote errs only when the mixture puts mass
    >= 1/2 on the wrong label, so epsilon is pinned to 1/2 there. In proper
    mode epsilon is free; T**(-1/(2*tr+3)) balances the two regret terms when
    the threshold dimension tr is known.
    """

    epsilon: float = 0.5
    alpha: float = 0.25
    mode: str = IMPROPER
    mw_constant: float = 8.0
    tie_break: str = LOWEST

    def __post_init__(self):
        if self.mode not in (PROPER, IMPROPER):
            raise InputError(f"mode must be {PROPER!r} or {IMPROPER!r}")
        if not 0 < self.epsilon <= 0.5:
            raise InputError("epsilon must lie in (0, 1/2]")
        if not 0 < self.alpha < self.threshold:
            raise InputError("alpha must lie in (0, epsilon)")
        if self.mw_constant <= 0:
            raise InputError("mw_constant must be positive")

    @property
    def threshold(self) -> float:
        return 0.5 if self.mode == IMPROPER else self.epsilon


@dataclass(frozen=True, eq=False)
class HypothesisMixture:
    pool: tuple[HypothesisId, ...]
    weights: np.ndarray

    def __post_init__(self):
        if len(set(self.pool)) != len(self.pool):
            raise InputError("mixture pool entries must be distinct")
        if len(self.weights) != len(self.pool):
            raise InputError("weights and pool differ in length")
        if abs(float(np.sum(self.weights)) - 1.0) > 1e-9 or (self.weights < 0).any():
            raise InputError("mixture weights must be a probability vector")
        self.weights.setflags(write=False)

    @classmethod
    def uniform(cls, pool: Sequence[HypothesisId]) -> "HypothesisMixture":
        return cls(tuple(pool), np.full(len(pool), 1.0 / len(pool)))

    def prob_one(self, cls: FiniteConceptClass, x: int) -> float:
        return float(self.weights @ cls.table[list(self.pool), x])


def mixture_loss(cls: FiniteConceptClass, mixture: HypothesisMixture, ex: LabeledExample) -> float:
    """Probability that a hypothesis drawn from the mixture mislabels ``ex``."""
    x, y = ex
    return float(mixture.weights @ np.abs(cls.table[list(mixture.pool), x] - y))


def improper_predict(cls: FiniteConceptClass, mixture: HypothesisMixture, x: int) -> int:
    return 1 if mixture.prob_one(cls, x) >= 0.5 - EPS_SLACK else 0


def phase_budget(pool_size: int, alpha: float, mw_constant: float) -> int:
    if pool_size <= 1:
        return 1
    return max(1, math.ceil(mw_constant * math.log(pool_size) / alpha**2))


@dataclass
class PhaseState:
    phase_index: int
    active_set: tuple[HypothesisId, ...]
    update_budget: int
    update_count: int = 0

    @property
    def eta(self) -> float:
        return mw.learning_rate(len(self.active_set), self.update_budget)

    @property
    def done(self) -> bool:
        return self.update_count >= self.update_budget


@dataclass(frozen=True)
class RoundRecord:
    round: int
    phase: int
    x: int
    y: int
    mixture_loss: float
    prediction: int | None
    mistake: bool
    update: bool
    pool_size: int


def lazy_mw_round(
    cls: FiniteConceptClass,
    state: PhaseState,
    mixture: HypothesisMixture,
    ex: LabeledExample,
    epsilon: float,
    round_index: int = 0,
    improper: bool = True,
):
    """One round of lazy MW. Advances ``state.update_count`` on updates.

    Returns ``(mixture, record, phase_done)``; the input mixture object is
    returned untouched when no update happens.
    """
    if state.done:
        raise ValueError("phase budget already exhausted")
    x, y = ex
    loss = mixture_loss(cls, mixture, ex)
    prediction = improper_predict(cls, mixture, x) if improper else None
    update = loss >= epsilon - EPS_SLACK
    mistake = (prediction != y) if improper else update
    if update:
        errs = np.abs(cls.table[list(mixture.pool), x] - y)
        w = mixture.weights * np.exp(-state.eta * errs)
        mixture = HypothesisMixture(mixture.pool, w / w.sum())
        state.update_count += 1
    record = RoundRecord(round_index, state.phase_index, int(x), int(y), loss, prediction, bool(mistake), bool(update), len(state.active_set))
    return mixture, record, state.done


class OnlineActionInsertion:
    """Stateful realizable learner; ``observe`` runs one round.

    ``on_unrealizable`` selects what happens when the consistent oracle finds
    nothing: ``"raise"`` (the realizable contract) or ``"erm"`` (fall back to a
    minimum-loss row; used by the agnostic reduction, whose simulated streams
    need not be realizable).
    """

    def __init__(self, cls: FiniteConceptClass, config: LearnerConfig, on_unrealizable: str = "raise"):
        if not cls.is_binary:
            raise InputError("online learner requires a binary class")
        self.cls = cls
        self.config = config
        self.on_unrealizable = on_unrealizable
        self.history: list[LabeledExample] = []
        self.oracle_calls: list[dict] = []
        self.phases: list[dict] = []
        self.pool: list[HypothesisId] = []
        self.added_after_phase: list[int] = []
        self._insert(self._query_oracle(), after_phase=0)
        self._start_phase()

    @property
    def improper(self) -> bool:
        return self.config.mode == IMPROPER

    def _query_oracle(self) -> HypothesisId:
        h = consistent_oracle(self.cls, self.history, self.config.tie_break)
        call = {"after_round": len(self.history), "oracle": "consistent", "result": h}
        if h is None:
            if self.on_unrealizable != "erm":
                self.oracle_calls.append(call)
                raise NotRealizableError(len(self.history))
            h = erm_oracle(self.cls, self.history, tie_break=self.config.tie_break)
            self.oracle_calls.append(call)
            call = {"after_round": len(self.history), "oracle": "erm", "result": h}
        self.oracle_calls.append(call)
        return h

    def _insert(self, h: HypothesisId, after_phase: int) -> None:
        if h not in self.pool:
            self.pool.append(h)
            self.added_after_phase.append(after_phase)

    def _start_phase(self) -> None:
        j = len(self.phases) + 1
        self.state = PhaseState(j, tuple(self.pool), phase_budget(len(self.pool), self.config.alpha, self.config.mw_constant))
        self.mixture = HypothesisMixture.uniform(self.pool)
        self.phases.append({
            "phase": j,
            "start_round": len(self.history) + 1,
            "end_round": None,
            "pool_size": len(self.pool),
            "budget": self.state.update_budget,
            "completed": False,
        })

    def predict(self, x: int) -> int:
        return improper_predict(self.cls, self.mixture, x)

    def observe(self, x: int, y: int) -> RoundRecord:
        ex = LabeledExample(int(x), int(y))
        t = len(self.history) + 1
        self.mixture, record, done = lazy_mw_round(
            self.cls, self.state, self.mixture, ex, self.config.threshold, t, self.improper
        )
        self.history.append(ex)
        if done:
            info = self.phases[-1]
            info["end_round"] = t
            info["completed"] = True
            h = self._query_oracle()
            self._insert(h, after_phase=info["phase"])
            self._start_phase()
        return record


def _as_rounds(cls, stream, learner, rounds):
    if hasattr(stream, "next_example"):
        n = rounds if rounds is not None else stream.rounds
        for _ in range(n):
            yield stream.next_example(cls, learner.mixture)
    else:
        for i, ex in enumerate(stream):
            if rounds is not None and i >= rounds:
                break
            yield ex


def run_realizable(
    cls: FiniteConceptClass,
    stream,
    config: LearnerConfig = LearnerConfig(),
    rounds: int | None = None,
    seed: int | None = None,
) -> SolveTranscript:
    """Run the realizable learner until the stream ends.

    ``stream`` is a sequence of ``(x, y)`` pairs or an adversary exposing
    ``next_example(cls, mixture)`` and ``rounds``.
    """
    learner = OnlineActionInsertion(cls, config)
    tr = SolveTranscript(kind=LEARN, config=asdict(config), seed=seed)
    try:
        for x, y in _as_rounds(cls, stream, learner, rounds):
            if not (0 <= x < cls.domain_size) or y not in (0, 1):
                raise InputError(f"bad example ({x}, {y})")
            tr.append(asdict(learner.observe(x, y)))
    finally:
        for call in learner.oracle_calls:
            tr.count_call(call["oracle"])
        tr.extras.update(
            pool=list(learner.pool),
            added_after_phase=list(learner.added_after_phase),
            phases=learner.phases,
            oracle_log=learner.oracle_calls,
        )
    return tr


# transcript summaries


def total_mistakes(tr: SolveTranscript) -> int:
    return sum(r["mistake"] for r in tr.records)


def total_updates(tr: SolveTranscript) -> int:
    return sum(r["update"] for r in tr.records)


def completed_phases(tr: SolveTranscript) -> int:
    return sum(p["completed"] for p in tr.extras["phases"])


def phase_mistake_sets(tr: SolveTranscript) -> dict[int, list[LabeledExample]]:
    """Update (epsilon-mistake) examples of each phase, as multisets."""
    out: dict[int, list[LabeledExample]] = {p["phase"]: [] for p in tr.extras["phases"]}
    for r in tr.records:
        if r["update"]:
            out[r["phase"]].append(LabeledExample(r["x"], r["y"]))
    return out


def pool_phase_losses(cls: FiniteConceptClass, tr: SolveTranscript):
    """Empirical loss of each pool member on each completed phase's mistake set.

    Returns ``(losses, added_after)`` where ``losses[i, j]`` is the loss of the
    i-th inserted hypothesis on completed phase j+1 and ``added_after[i]`` is
    the phase after which it joined (0 for the initial hypothesis).
    """
    sets = phase_mistake_sets(tr)
    done = [p["phase"] for p in tr.extras["phases"] if p["completed"]]
    pool = tr.extras["pool"]
    losses = np.zeros((len(pool), len(done)))
    for jj, j in enumerate(done):
        z = sets[j]
        losses[:, jj] = empirical_losses(cls, z)[pool] / len(z)
    return losses, np.array(tr.extras["added_after_phase"]), done


# agnostic reduction


def measured_mistake_bound(cls: FiniteConceptClass, horizon: int, config: LearnerConfig = LearnerConfig()) -> int:
    """Worst mistake count of the realizable learner over ``horizon`` rounds.

    The adversary is the greedy one, tried against every target row. This is
    an empirical stand-in for the worst case over all realizable streams.
    """
    from .harness.adversary import GreedyAdversary

    return max(total_mistakes(run_realizable(cls, GreedyAdversary(h, horizon), config)) for h in range(cls.size))


def flip_sets(horizon: int, max_flips: int):
    return [s for k in range(max_flips + 1) for s in itertools.combinations(range(1, horizon + 1), k)]


def run_agnostic(
    cls: FiniteConceptClass,
    stream: Sequence[LabeledExample],
    horizon: int,
    max_flips: int,
    config: LearnerConfig = LearnerConfig(),
    caps: Caps | None = None,
    seed: int | None = None,
) -> SolveTranscript:
    """Agnostic learner: MW over one expert per flip set S, |S| <= max_flips.

    Expert S runs its own realizable learner, predicts by majority vote, flips
    the prediction on rounds in S, and feeds the (flipped) prediction back to
    its learner as the label.
    """
    caps = caps or default_caps()
    if horizon > caps.agnostic_max_horizon or max_flips > caps.agnostic_max_flips:
        raise CapExceeded(
            f"agnostic reduction builds sum_k C(T, k) experts; horizon {horizon} / flips {max_flips} exceed "
            f"caps {caps.agnostic_max_horizon} / {caps.agnostic_max_flips}"
        )
    if max_flips < 0 or horizon < 1:
        raise InputError("need horizon >= 1 and max_flips >= 0")
    examples = [LabeledExample(int(x), int(y)) for x, y in stream]
    if len(examples) != horizon:
        raise InputError(f"stream has {len(examples)} rounds, horizon is {horizon}")
    sets = flip_sets(horizon, max_flips)
    experts = [OnlineActionInsertion(cls, config, on_unrealizable="erm") for _ in sets]
    flips = [frozenset(s) for s in sets]
    master = mw.MultiplicativeWeights(len(experts), mw.learning_rate(len(experts), horizon))

    tr = SolveTranscript(kind=AGNOSTIC, config={**asdict(config), "horizon": horizon, "max_flips": max_flips}, seed=seed)
    expert_losses = np.zeros((horizon, len(experts)))
    master_losses = np.zeros(horizon)
    for t, (x, y) in enumerate(examples, start=1):
        preds = np.array([e.predict(x) ^ (t in s) for e, s in zip(experts, flips)])
        losses = (preds != y).astype(float)
        master_losses[t - 1] = master.expected_loss(losses)
        expert_losses[t - 1] = losses
        master.update(losses)
        for e, p in zip(experts, preds):
            e.observe(x, int(p))
    for e in experts:
        for call in e.oracle_calls:
            tr.count_call(call["oracle"])

    row_losses = empirical_losses(cls, examples)
    best_row = int(np.argmin(row_losses))
    hstar_stream = [LabeledExample(x, int(cls.table[best_row, x])) for x, _ in examples]
    on_stream = total_mistakes(run_realizable(cls, hstar_stream, config))
    tr.records = [
        {"round": t + 1, "x": examples[t].x, "y": examples[t].y, "master_loss": float(master_losses[t])}
        for t in range(horizon)
    ]
    tr.extras.update(
        n_experts=len(experts),
        flip_sets=[list(s) for s in sets],
        expert_losses=expert_losses.tolist(),
        master_loss=float(master_losses.sum()),
        best_row=best_row,
        best_row_loss=float(row_losses[best_row]),
        regret=float(master_losses.sum() - row_losses[best_row]),
        best_expert_loss=float(expert_losses.sum(axis=0).min()),
        realizable_mistakes=measured_mistake_bound(cls, horizon, config),
        realizable_mistakes_on_stream=on_stream,
        mw_regret_bound=mw.regret_bound(len(experts), horizon),
    )
    return tr
