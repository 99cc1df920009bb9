"""Regret of MW and of the realizable learner as the horizon grows.

Prints two CSV blocks: MW regret against 2*sqrt(T ln N) on uniform random
losses, and cumulative mistakes of the realizable learner on threshold
classes under the greedy adversary (the curve flattens once the last phase
ends).

    python3 scripts/regret_curves.py [--experts 16] [--seed 0]
"""
import argparse

import numpy as np

from oracle_games.harness.adversary import GreedyAdversary
from oracle_games.harness.generators import gen_threshold_class
from oracle_games.mw import regret_bound, run_mw
from oracle_games.online import run_realizable


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--experts", type=int, default=16)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--rounds", type=int, default=1200)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)

    print("T,mw_regret,bound")
    for T in (16, 64, 256, 1024, 4096):
        _, r = run_mw(rng.random((T, args.experts)))
        print(f"{T},{r:.3f},{regret_bound(args.experts, T):.3f}")

    print("\nn,hstar,round,cumulative_mistakes")
    for n in range(2, 7):
        cls = gen_threshold_class(n)
        tr = run_realizable(cls, GreedyAdversary(n - 1, args.rounds))
        cum = np.cumsum([r["mistake"] for r in tr.records])
        for t in range(99, args.rounds, 100):
            print(f"{n},{n - 1},{t + 1},{int(cum[t])}")


if __name__ == "__main__":
    main()
