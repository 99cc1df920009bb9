"""Straight-line reference implementations, written without the package's
helpers, used as independent oracles by the test suite."""
import itertools
import math

import numpy as np


def realizable_reference(table, hstar, rounds, alpha=0.25, eps=0.5, C=8.0, improper=True):
    """Greedy adversary vs the phase learner; returns (mistakes, updates, pool)."""
    table = np.asarray(table, dtype=int)
    m, n = table.shape
    target = table[hstar]
    seen = []

    def consistent():
        for i in range(m):
            if all(table[i, x] == y for x, y in seen):
                return i
        raise AssertionError("unrealizable")

    pool = [consistent()]

    def fresh():
        size = len(pool)
        T = 1 if size == 1 else max(1, math.ceil(C * math.log(size) / alpha**2))
        eta = 0.0 if size == 1 else math.sqrt(math.log(size) / (2 * T))
        return np.full(size, 1.0 / size), T, eta, 0

    w, T, eta, k = fresh()
    mistakes = updates = 0
    for _ in range(rounds):
        P = table[pool]
        per_x = w @ np.abs(P - target)
        x = int(np.argmax(per_x))
        y = int(target[x])
        loss = float(per_x[x])
        p1 = float(w @ P[:, x])
        pred = 1 if p1 >= 0.5 - 1e-12 else 0
        upd = loss >= eps - 1e-12
        if improper:
            mistakes += pred != y
        else:
            mistakes += upd
        seen.append((x, y))
        if upd:
            updates += 1
            w = w * np.exp(-eta * np.abs(P[:, x] - y))
            w = w / w.sum()
            k += 1
            if k == T:
                h = consistent()
                if h not in pool:
                    pool.append(h)
                w, T, eta, k = fresh()
    return mistakes, updates, pool


def hedge_regret(losses):
    losses = np.asarray(losses, dtype=float)
    T, N = losses.shape
    eta = math.sqrt(math.log(N) / (2 * T)) if N > 1 else 0.0
    logw = np.zeros(N)
    total = 0.0
    for t in range(T):
        p = np.exp(logw - logw.max())
        p /= p.sum()
        total += p @ losses[t]
        logw -= eta * losses[t]
    return total - losses.sum(axis=0).min()


def threshold_dim_brute(table):
    """Largest d with rows r_1..r_d, cols c_1..c_d, table[r_i, c_j] = [i <= j]."""
    t = np.asarray(table)
    m, n = t.shape
    best = 0
    for d in range(1, min(m, n) + 1):
        found = False
        for rows in itertools.permutations(range(m), d):
            for cols in itertools.permutations(range(n), d):
                if all(t[rows[i], cols[j]] == (1 if i <= j else 0) for i in range(d) for j in range(d)):
                    found = True
                    break
            if found:
                break
        if not found:
            break
        best = d
    return best


def littlestone_brute(table):
    t = np.asarray(table)
    rows = frozenset(range(t.shape[0]))
    memo = {}

    def lit(H):
        if H in memo:
            return memo[H]
        best = 0
        for x in range(t.shape[1]):
            one = frozenset(h for h in H if t[h, x] == 1)
            zero = H - one
            if one and zero:
                best = max(best, 1 + min(lit(one), lit(zero)))
        memo[H] = best
        return best

    return lit(rows)


def vc_brute(table):
    t = np.asarray(table)
    best = 0
    for d in range(1, t.shape[1] + 1):
        if any(len({tuple(r) for r in t[:, list(S)]}) == 2**d for S in itertools.combinations(range(t.shape[1]), d)):
            best = d
        else:
            break
    return best


def fat_threshold_brute(M, eps):
    """Single-theta staircase, theta over the entries and 0, rows/cols by permutation."""
    M = np.asarray(M, dtype=float)
    m, n = M.shape
    best = 0
    for theta in sorted(set(M.ravel().tolist()) | {0.0}):
        hi = M >= theta + eps - 1e-12
        lo = M <= theta + 1e-12
        for d in range(best + 1, min(m, n) + 1):
            ok = any(
                all((hi if i <= j else lo)[rows[i], cols[j]] for i in range(d) for j in range(d))
                for rows in itertools.permutations(range(m), d)
                for cols in itertools.permutations(range(n), d)
            )
            if not ok:
                break
            best = d
    return best


def game_value_lp(U):
    from scipy.optimize import linprog

    U = np.asarray(U, dtype=float)
    m, n = U.shape
    res = linprog(
        np.r_[np.zeros(m), 1.0],
        A_ub=np.c_[U.T, -np.ones(n)],
        b_ub=np.zeros(n),
        A_eq=np.r_[np.ones(m), 0.0][None, :],
        b_eq=[1.0],
        bounds=[(0, None)] * m + [(None, None)],
    )
    assert res.success
    return float(res.x[-1])
