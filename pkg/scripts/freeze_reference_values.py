"""Compute full-matrix reference values for the double-oracle acceptance games.

Each game's value is computed by MW self-play at tol 1e-3 (about 25 s per
12x12 game on one core) and cross-checked against a linear program. The random
12x12 suite goes to tests/data/reference_values.json and the threshold games
to tests/data/threshold_reference_values.json; the acceptance suite reads
both instead of repeating the slow self-play.

    python3 scripts/freeze_reference_values.py [--seeds 50] [--tol 1e-3]
    python3 scripts/freeze_reference_values.py --suite threshold
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

from oracle_games.harness.generators import gen_random_game, gen_threshold_game
from oracle_games.mw import selfplay_value

DATA = Path(__file__).resolve().parents[1] / "tests" / "data"
OUT = {"random": DATA / "reference_values.json", "threshold": DATA / "threshold_reference_values.json"}


def lp_value(U: np.ndarray) -> float:
    """min over row mixtures p of max_j (p @ U)_j."""
    m, n = U.shape
    c = np.r_[np.zeros(m), 1.0]
    A_ub = np.c_[U.T, -np.ones(n)]
    A_eq = np.r_[np.ones(m), 0.0][None, :]
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(n), A_eq=A_eq, b_eq=[1.0], bounds=[(0, None)] * m + [(None, None)])
    if not res.success:
        raise RuntimeError(res.message)
    return float(res.x[-1])


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--suite", choices=sorted(OUT), default="random")
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--size", type=int, help="random suite: game size (12); threshold suite: largest n (8)")
    ap.add_argument("--tol", type=float, default=1e-3)
    ap.add_argument("--out", type=Path)
    args = ap.parse_args(argv)
    out = args.out or OUT[args.suite]
    if args.size is None:
        args.size = 12 if args.suite == "random" else 8
    if args.suite == "random":
        keyed = [("seed", s, gen_random_game(args.size, args.size, s).matrix) for s in range(args.seeds)]
        generator = "gen_random_game(size, size, seed)"
    else:
        keyed = [("n", n, gen_threshold_game(n).matrix) for n in range(1, args.size + 1)]
        generator = "gen_threshold_game(n)"

    games = []
    for key, k, U in keyed:
        t0 = time.perf_counter()
        mw_v = float(selfplay_value(U, args.tol)[0])
        lp_v = lp_value(U)
        games.append({key: k, "mw_value": mw_v, "lp_value": lp_v})
        print(f"{key} {k:2d}: mw {mw_v:.6f}  lp {lp_v:.6f}  |diff| {abs(mw_v - lp_v):.2e}  ({time.perf_counter() - t0:.1f}s)", flush=True)
    out.parent.mkdir(parents=True, exist_ok=True)
    payload = {"size": args.size, "tol": args.tol, "generator": generator, "games": games}
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
