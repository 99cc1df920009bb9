"""Multiplicative weights over a finite expert set, plus a self-play kernel.

Regret of Hedge with rate eta on losses of range R is at most
log(N)/eta + eta*T*R^2/8; with eta = sqrt(log N / (2T)) this stays below
2*sqrt(T log N) for R <= 2, which is the bound every caller relies on.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit


def learning_rate(n_experts: int, horizon: int) -> float:
    """eta = sqrt(log N / (2T)); zero for a single expert."""
    if n_experts < 1 or horizon < 1:
        raise ValueError("need at least one expert and one round")
    if n_experts == 1:
        return 0.0
    return math.sqrt(math.log(n_experts) / (2.0 * horizon))


def regret_bound(n_experts: int, horizon: int) -> float:
    return 2.0 * math.sqrt(horizon * math.log(n_experts)) if n_experts > 1 else 0.0


class MultiplicativeWeights:
    def __init__(self, n_experts: int, eta: float):
        if n_experts < 1:
            raise ValueError("need at least one expert")
        if eta < 0:
            raise ValueError("eta must be nonnegative")
        self.eta = float(eta)
        self.weights = np.full(n_experts, 1.0 / n_experts)

    @property
    def n_experts(self) -> int:
        return self.weights.shape[0]

    def expected_loss(self, losses) -> float:
        return float(self.weights @ np.asarray(losses, dtype=float))

    def update(self, losses) -> None:
        losses = np.asarray(losses, dtype=float)
        # shift by the min loss: leaves the normalized update unchanged, avoids underflow
        w = self.weights * np.exp(-self.eta * (losses - losses.min()))
        self.weights = w / w.sum()


def run_mw(loss_matrix, eta: float | None = None):
    """Play MW against a fixed (T, N) loss sequence.

    Returns ``(expected_losses, regret)`` where regret is measured against the
    best single expert in hindsight.
    """
    losses = np.asarray(loss_matrix, dtype=float)
    T, N = losses.shape
    if eta is None:
        eta = learning_rate(N, T)
    mw = MultiplicativeWeights(N, eta)
    played = np.empty(T)
    for t in range(T):
        played[t] = mw.expected_loss(losses[t])
        mw.update(losses[t])
    regret = float(played.sum() - losses.sum(axis=0).min())
    return played, regret


def selfplay_rounds(n_rows: int, n_cols: int, tol: float) -> int:
    return int(math.ceil(16.0 * math.log(max(n_rows, n_cols) + 1) / tol**2))


# weights this small never matter again; zeroing them keeps the loop out of
# subnormal arithmetic, which is two orders of magnitude slower
_FLUSH = 1e-280


@njit(cache=True)
def _selfplay(U, T, eta_row, eta_col):
    m, n = U.shape
    p = np.full(m, 1.0 / m)
    q = np.full(n, 1.0 / n)
    p_sum = np.zeros(m)
    q_sum = np.zeros(n)
    row_loss = np.empty(m)
    col_gain = np.empty(n)
    total = 0.0
    for _ in range(T):
        for i in range(m):
            s = 0.0
            for j in range(n):
                s += U[i, j] * q[j]
            row_loss[i] = s
        for j in range(n):
            s = 0.0
            for i in range(m):
                s += p[i] * U[i, j]
            col_gain[j] = s
        v = 0.0
        for i in range(m):
            v += p[i] * row_loss[i]
            p_sum[i] += p[i]
        for j in range(n):
            q_sum[j] += q[j]
        total += v
        lo = row_loss.min()
        z = 0.0
        for i in range(m):
            p[i] *= math.exp(-eta_row * (row_loss[i] - lo))
            z += p[i]
        for i in range(m):
            p[i] /= z
            if p[i] < _FLUSH:
                p[i] = 0.0
        hi = col_gain.max()
        z = 0.0
        for j in range(n):
            q[j] *= math.exp(eta_col * (col_gain[j] - hi))
            z += q[j]
        for j in range(n):
            q[j] /= z
            if q[j] < _FLUSH:
                q[j] = 0.0
    return total / T, p_sum / T, q_sum / T


def selfplay_value(U, tol: float):
    """Approximate min-max value of payoff matrix ``U`` (rows minimize).

    Both sides run MW for ``selfplay_rounds`` rounds; the averaged payoff is
    within ``tol`` of the value. Returns ``(value, row_avg, col_avg)``.
    """
    U = np.ascontiguousarray(U, dtype=np.float64)
    m, n = U.shape
    T = selfplay_rounds(m, n, tol)
    return _selfplay(U, T, learning_rate(m, T), learning_rate(n, T))
