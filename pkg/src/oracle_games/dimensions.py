"""Exact combinatorial dimensions of small finite classes and [0,1] matrices.

Everything here is brute force with pruning. Every routine returns a
:class:`DimensionReport` whose witness can be replayed by the matching
``check_*`` function, which re-derives the claim straight from the
definition without sharing code with the search.

Row = hypothesis (function), column = domain point throughout.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .config import Caps, CapExceeded, default_caps
from .oracles import FiniteConceptClass, InputError
from .rng import make_rng

TOL = 1e-12
EXACT = "exact"
GREEDY = "greedy"


@dataclass(frozen=True)
class DimensionReport:
    kind: str
    value: int
    witness: dict = field(default_factory=dict)
    exhaustive: bool = True
    eps: float | None = None

    def to_json(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind, "value": self.value, "witness": self.witness, "exhaustive": self.exhaustive}
        if self.eps is not None:
            out["eps"] = self.eps
        return out


def _binary_table(cls) -> np.ndarray:
    if isinstance(cls, FiniteConceptClass):
        if not cls.is_binary:
            raise InputError("this dimension is defined for binary classes")
        return cls.table.astype(np.int8)
    t = np.asarray(cls)
    if t.ndim != 2 or not np.isin(t, (0, 1)).all():
        raise InputError("expected a 2-D 0/1 table")
    return t.astype(np.int8)


def as_matrix(obj) -> np.ndarray:
    """Float view of a class or array, validated to lie in [0, 1]."""
    t = obj.table if isinstance(obj, FiniteConceptClass) else obj
    t = np.asarray(t, dtype=float)
    if t.ndim != 2 or t.size == 0:
        raise InputError("expected a nonempty 2-D matrix")
    if not np.isfinite(t).all() or t.min() < 0 or t.max() > 1:
        raise InputError("matrix entries must lie in [0, 1]")
    return t


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _pop(mask: int) -> int:
    return bin(mask).count("1")


def _floor_log2(k: int) -> int:
    return k.bit_length() - 1 if k > 0 else 0


# ---------------------------------------------------------------- VC


def vc_dimension(cls, caps: Caps | None = None) -> DimensionReport:
    t = _binary_table(cls)
    caps = caps or default_caps()
    m, n = t.shape
    if n > caps.vc_max_points:
        raise CapExceeded(f"VC search over {n} points exceeds cap {caps.vc_max_points}")
    # shattered sets are closed under subsets, so grow them one level at a time
    level = [()]
    best: tuple = ()
    while level and len(level[0]) < _floor_log2(m):
        k = len(level[0]) + 1
        prev = set(level)
        nxt = []
        for s in level:
            for x in range(s[-1] + 1 if s else 0, n):
                cand = s + (x,)
                if any(cand[:i] + cand[i + 1:] not in prev for i in range(k - 1)):
                    continue
                if _count_patterns(t[:, cand]) == 1 << k:
                    nxt.append(cand)
        if nxt:
            best = nxt[0]
        level = nxt
    return DimensionReport("vc", len(best), {"points": list(best)})


def _count_patterns(sub: np.ndarray) -> int:
    codes = sub.astype(np.int64) @ (1 << np.arange(sub.shape[1], dtype=np.int64))
    return len(np.unique(codes))


def check_vc_witness(cls, report: DimensionReport) -> bool:
    t = _binary_table(cls)
    pts = report.witness["points"]
    if len(pts) != report.value or len(set(pts)) != len(pts):
        return False
    seen = {tuple(row[pts]) for row in t}
    return all(b in seen for b in itertools.product((0, 1), repeat=len(pts)))


# ---------------------------------------------------------------- Littlestone


def littlestone_dimension(cls, caps: Caps | None = None) -> DimensionReport:
    t = _binary_table(cls)
    caps = caps or default_caps()
    m, n = t.shape
    ones = [sum(1 << r for r in range(m) if t[r, x]) for x in range(n)]
    memo: dict[int, tuple[int, int | None]] = {}

    def lit(mask: int) -> int:
        hit = memo.get(mask)
        if hit is not None:
            return hit[0]
        if len(memo) >= caps.littlestone_max_restrictions:
            raise CapExceeded(
                f"Littlestone recursion visited more than {caps.littlestone_max_restrictions} restrictions"
            )
        bound = _floor_log2(_pop(mask))
        best, arg = 0, None
        seen = set()
        for x in range(n):
            if best == bound:
                break
            m1 = mask & ones[x]
            m0 = mask & ~ones[x]
            if not m1 or not m0 or m1 in seen:
                continue
            seen.add(m1)
            if 1 + _floor_log2(min(_pop(m1), _pop(m0))) <= best:
                continue
            v = 1 + min(lit(m1), lit(m0))
            if v > best:
                best, arg = v, x
        memo[mask] = (best, arg)
        return best

    full = (1 << m) - 1
    d = lit(full)

    def tree(mask: int) -> dict:
        v, x = memo[mask] if mask in memo else (0, None)
        if v == 0 or x is None:
            return {"h": next(_bits(mask))}
        return {"x": x, "one": tree(mask & ones[x]), "zero": tree(mask & ~ones[x])}

    w = _trim(tree(full), d)
    return DimensionReport("littlestone", d, {"tree": w})


def _trim(node: dict, depth: int) -> dict:
    """Cut a witness tree to a complete tree of exactly ``depth`` levels."""
    if depth == 0:
        while "h" not in node:
            node = node["one"]
        return {"h": node["h"]}
    out = {k: v for k, v in node.items() if k not in ("one", "zero")}
    out["one"] = _trim(node["one"], depth - 1)
    out["zero"] = _trim(node["zero"], depth - 1)
    return out


def check_littlestone_witness(cls, report: DimensionReport) -> bool:
    t = _binary_table(cls)

    def ok(node, constraints, depth):
        if depth == 0:
            if "h" not in node:
                return False
            row = t[node["h"]]
            return all(row[x] == y for x, y in constraints)
        if "x" not in node:
            return False
        x = node["x"]
        return ok(node["one"], constraints + [(x, 1)], depth - 1) and ok(node["zero"], constraints + [(x, 0)], depth - 1)

    return ok(report.witness["tree"], [], report.value)


# ---------------------------------------------------------------- thresholds


def _staircase(high: np.ndarray, low: np.ndarray):
    """Largest d with rows f_1..f_d, cols x_1..x_d, high[f_i,x_j] iff i<=j, low[f_i,x_j] for i>j.

    DFS over (remaining rows R, remaining cols C): after fixing a prefix,
    later rows must be low on every chosen column and later columns must be
    high on every chosen row.
    """
    m, n = high.shape
    high_row = [sum(1 << x for x in range(n) if high[f, x]) for f in range(m)]
    low_col = [sum(1 << f for f in range(m) if low[f, x]) for x in range(n)]
    memo: dict[tuple[int, int], tuple[int, tuple | None]] = {}

    def best(R: int, C: int) -> int:
        key = (R, C)
        hit = memo.get(key)
        if hit is not None:
            return hit[0]
        bound = min(_pop(R), _pop(C))
        top, move = 0, None
        for f in _bits(R):
            if top == bound:
                break
            cols = C & high_row[f]
            for x in _bits(cols):
                v = 1 + best(R & low_col[x], cols & ~(1 << x))
                if v > top:
                    top, move = v, (f, x)
                    if top == bound:
                        break
        memo[key] = (top, move)
        return top

    R0, C0 = (1 << m) - 1, (1 << n) - 1
    d = best(R0, C0)
    rows, cols = [], []
    R, C = R0, C0
    while True:
        _, move = memo[(R, C)]
        if move is None:
            break
        f, x = move
        rows.append(f)
        cols.append(x)
        cols_ok = C & high_row[f]
        R, C = R & low_col[x], cols_ok & ~(1 << x)
        if (R, C) not in memo:
            break
    return d, rows, cols


def _staircase_greedy(high: np.ndarray, low: np.ndarray):
    m, n = high.shape
    R, C = set(range(m)), set(range(n))
    rows, cols = [], []
    while True:
        pick, score = None, -1
        for f in sorted(R):
            for x in sorted(C):
                if not high[f, x]:
                    continue
                R2 = {g for g in R if low[g, x]}
                C2 = {y for y in C if high[f, y] and y != x}
                s = min(len(R2), len(C2))
                if s > score:
                    pick, score = (f, x, R2, C2), s
        if pick is None:
            return len(rows), rows, cols
        f, x, R, C = pick
        rows.append(f)
        cols.append(x)


def _check_size(shape, caps: Caps, mode: str):
    m, n = shape
    if mode == EXACT and (m > caps.threshold_max_rows or n > caps.threshold_max_cols):
        raise CapExceeded(
            f"exact threshold search on {m}x{n} exceeds caps {caps.threshold_max_rows}x{caps.threshold_max_cols}; "
            "use mode='greedy' for a lower bound"
        )
    if mode not in (EXACT, GREEDY):
        raise InputError(f"unknown mode {mode!r}")


def threshold_dimension(cls, caps: Caps | None = None, mode: str = EXACT) -> DimensionReport:
    t = _binary_table(cls)
    caps = caps or default_caps()
    _check_size(t.shape, caps, mode)
    search = _staircase if mode == EXACT else _staircase_greedy
    d, rows, cols = search(t == 1, t == 0)
    return DimensionReport("threshold", d, {"rows": rows, "cols": cols}, exhaustive=mode == EXACT)


def check_threshold_witness(cls, report: DimensionReport) -> bool:
    t = _binary_table(cls)
    rows, cols = report.witness["rows"], report.witness["cols"]
    d = report.value
    if len(rows) != d or len(cols) != d or len(set(rows)) != d or len(set(cols)) != d:
        return False
    return all(t[rows[i], cols[j]] == (1 if i <= j else 0) for i in range(d) for j in range(d))


def fat_threshold_candidates(M: np.ndarray) -> list[float]:
    """Threshold values worth trying: the entries themselves, plus 0.

    For d >= 2 some entry sits at or below theta and theta can slide down to
    it. For d = 1 only the high side matters; theta = 0 is the lowest value
    in the label range.
    """
    return sorted(set(np.unique(M).tolist()) | {0.0})


def fat_threshold_dimension(matrix, eps: float, caps: Caps | None = None, mode: str = EXACT) -> DimensionReport:
    if eps <= 0:
        raise InputError("eps must be positive")
    M = as_matrix(matrix)
    caps = caps or default_caps()
    _check_size(M.shape, caps, mode)
    search = _staircase if mode == EXACT else _staircase_greedy
    cap = min(M.shape)
    best = (0, [], [], 0.0)
    for theta in fat_threshold_candidates(M):
        high = M >= theta + eps - TOL
        if not high.any():
            continue
        d, rows, cols = search(high, M <= theta + TOL)
        if d > best[0]:
            best = (d, rows, cols, theta)
            if d == cap:
                break
    d, rows, cols, theta = best
    return DimensionReport("fat_threshold", d, {"rows": rows, "cols": cols, "theta": theta}, mode == EXACT, eps)


def check_fat_threshold_witness(matrix, report: DimensionReport) -> bool:
    M = as_matrix(matrix)
    w, eps, d = report.witness, report.eps, report.value
    rows, cols, theta = w["rows"], w["cols"], w["theta"]
    if len(rows) != d or len(cols) != d or len(set(rows)) != d or len(set(cols)) != d:
        return False
    for i in range(d):
        for j in range(d):
            v = M[rows[i], cols[j]]
            if i <= j and not v >= theta + eps - TOL:
                return False
            if i > j and not v <= theta + TOL:
                return False
    return True


# ---------------------------------------------------------------- fat shattering


def fat_shattering_dimension(matrix, eps: float, caps: Caps | None = None) -> DimensionReport:
    if eps <= 0:
        raise InputError("eps must be positive")
    M = as_matrix(matrix)
    caps = caps or default_caps()
    m, n = M.shape
    if n > caps.fat_max_points:
        raise CapExceeded(f"fat-shattering search over {n} points exceeds cap {caps.fat_max_points}")
    cands = [np.unique(M[:, x]) for x in range(n)]

    def witnesses(S):
        # backtrack column by column; every prefix must already be shattered
        def go(k, codes, valid, chosen):
            if k == len(S):
                return list(chosen)
            col = M[:, S[k]]
            for theta in cands[S[k]]:
                hi = col >= theta + eps - TOL
                lo = col <= theta + TOL
                v2 = valid & (hi | lo)
                c2 = codes * 2 + hi
                if len(np.unique(c2[v2])) == 1 << (k + 1):
                    got = go(k + 1, c2, v2, chosen + [float(theta)])
                    if got is not None:
                        return got
            return None

        return go(0, np.zeros(m, dtype=np.int64), np.ones(m, dtype=bool), [])

    level = {(): []}
    best = ((), [])
    while len(next(iter(level))) < _floor_log2(m):
        k = len(next(iter(level))) + 1
        nxt = {}
        for s in sorted(level):
            for x in range(s[-1] + 1 if s else 0, n):
                cand = s + (x,)
                if any(cand[:i] + cand[i + 1:] not in level for i in range(k - 1)):
                    continue
                w = witnesses(cand)
                if w is not None:
                    nxt[cand] = w
        if not nxt:
            break
        first = min(nxt)
        best = (first, nxt[first])
        level = nxt
    pts, thetas = best
    return DimensionReport("fat_shattering", len(pts), {"points": list(pts), "thetas": thetas}, True, eps)


def check_fat_shattering_witness(matrix, report: DimensionReport) -> bool:
    M = as_matrix(matrix)
    pts, thetas, eps = report.witness["points"], report.witness["thetas"], report.eps
    if len(pts) != report.value or len(thetas) != len(pts):
        return False
    for b in itertools.product((0, 1), repeat=len(pts)):
        if not any(
            all((row[x] >= th + eps - TOL) if bit else (row[x] <= th + TOL) for x, th, bit in zip(pts, thetas, b))
            for row in M
        ):
            return False
    return True


# ---------------------------------------------------------------- sequential fat


def sequential_fat_dimension(matrix, eps: float, caps: Caps | None = None) -> DimensionReport:
    """Depth of the deepest eps-shattered tree, searched up to the depth cap.

    The report is exact when the value is below the cap or meets the
    floor(log2 m) ceiling that a tree with distinct leaves forces; otherwise
    it saturates at the cap with ``exhaustive=False``.
    """
    if eps <= 0:
        raise InputError("eps must be positive")
    M = as_matrix(matrix)
    caps = caps or default_caps()
    m, n = M.shape
    cap = caps.sfat_max_depth
    memo: dict[tuple[int, int], tuple[int, tuple | None]] = {}
    hi_masks: dict[tuple[int, float], int] = {}
    splits = []
    for x in range(n):
        for theta in np.unique(M[:, x]):
            hi = sum(1 << r for r in range(m) if M[r, x] >= theta + eps - TOL)
            lo = sum(1 << r for r in range(m) if M[r, x] <= theta + TOL)
            if hi and lo:
                splits.append((x, float(theta), hi, lo))

    def sf(mask: int, budget: int) -> int:
        key = (mask, budget)
        hit = memo.get(key)
        if hit is not None:
            return hit[0]
        top = min(budget, _floor_log2(_pop(mask)))
        best, arg = 0, None
        seen = set()
        for s in splits:
            if best == top:
                break
            x, theta, hi, lo = s
            l, r = mask & hi, mask & lo
            if not l or not r or (l, r) in seen:
                continue
            seen.add((l, r))
            if 1 + _floor_log2(min(_pop(l), _pop(r))) <= best:
                continue
            v = 1 + min(sf(l, budget - 1), sf(r, budget - 1))
            if v > best:
                best, arg = v, s
        memo[key] = (best, arg)
        return best

    full = (1 << m) - 1
    d = sf(full, cap)
    exact = d < cap or d == _floor_log2(m)

    def tree(mask: int, budget: int, depth: int) -> dict:
        if depth == 0:
            return {"h": next(_bits(mask))}
        _, (x, theta, hi, lo) = memo[(mask, budget)]
        return {
            "x": x,
            "theta": theta,
            "one": tree(mask & hi, budget - 1, depth - 1),
            "zero": tree(mask & lo, budget - 1, depth - 1),
        }

    return DimensionReport("sequential_fat", d, {"tree": tree(full, cap, d), "cap": cap}, exact, eps)


def check_sequential_fat_witness(matrix, report: DimensionReport) -> bool:
    M = as_matrix(matrix)
    eps = report.eps

    def ok(node, path, depth):
        if depth == 0:
            if "h" not in node:
                return False
            row = M[node["h"]]
            return all((row[x] >= th + eps - TOL) if up else (row[x] <= th + TOL) for x, th, up in path)
        x, th = node["x"], node["theta"]
        return ok(node["one"], path + [(x, th, True)], depth - 1) and ok(node["zero"], path + [(x, th, False)], depth - 1)

    return ok(report.witness["tree"], [], report.value)


# ---------------------------------------------------------------- constructions


def xor_class(cls: FiniteConceptClass, g) -> FiniteConceptClass:
    t = _binary_table(cls)
    g = np.asarray(g)
    if g.shape != (t.shape[1],) or not np.isin(g, (0, 1)).all():
        raise InputError(f"g must be a 0/1 vector of length {t.shape[1]}")
    return FiniteConceptClass(t ^ g.astype(np.int8))


def random_twostage_class(n: int, ell: int, p_hi: float, p_lo: float, seed: int) -> FiniteConceptClass:
    """n groups of ell random rows over n points, biased up on and above the diagonal.

    Row ``i*ell + k`` is the k-th member of group i; its entry at column j is
    Bernoulli(p_hi) when i <= j and Bernoulli(p_lo) otherwise.
    """
    if n < 1 or ell < 1:
        raise InputError("n and ell must be positive")
    if not (0 <= p_lo <= 1 and 0 <= p_hi <= 1):
        raise InputError("probabilities must lie in [0, 1]")
    rng = make_rng(seed, 0x25)
    group = np.repeat(np.arange(n), ell)
    p = np.where(group[:, None] <= np.arange(n)[None, :], p_hi, p_lo)
    return FiniteConceptClass((rng.random((n * ell, n)) < p).astype(np.int8))


def group_means(cls: FiniteConceptClass, ell: int) -> np.ndarray:
    t = cls.table.astype(float)
    if t.shape[0] % ell:
        raise InputError("row count is not a multiple of the group size")
    return t.reshape(-1, ell, t.shape[1]).mean(axis=1)


CHECKERS = {
    "vc": check_vc_witness,
    "littlestone": check_littlestone_witness,
    "threshold": check_threshold_witness,
    "fat_threshold": check_fat_threshold_witness,
    "fat_shattering": check_fat_shattering_witness,
    "sequential_fat": check_sequential_fat_witness,
}


def check_witness(data, report: DimensionReport) -> bool:
    return CHECKERS[report.kind](data, report)
