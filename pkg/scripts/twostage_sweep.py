"""Fat-threshold dimension of the group-mean matrix of the two-stage random class.

For each group size ell, draws the class for seeds 0..S-1, averages each block
of ell rows, and reports how often fatr(., eps) reaches n.

    python3 scripts/twostage_sweep.py [--n 6] [--ells 4,16,32,64] [--seeds 20]
"""
import argparse

import numpy as np

from oracle_games.dimensions import fat_threshold_dimension, group_means, random_twostage_class


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=6)
    ap.add_argument("--ells", default="4,16,32,64")
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--p-hi", type=float, default=0.7)
    ap.add_argument("--p-lo", type=float, default=0.3)
    ap.add_argument("--eps", type=float, default=0.2)
    args = ap.parse_args(argv)
    print("ell,values,rate_full")
    for ell in (int(e) for e in args.ells.split(",")):
        vals = []
        for seed in range(args.seeds):
            cls = random_twostage_class(args.n, ell, args.p_hi, args.p_lo, seed)
            vals.append(fat_threshold_dimension(group_means(cls, ell), args.eps).value)
        rate = float(np.mean(np.array(vals) == args.n))
        print(f"{ell},{' '.join(map(str, vals))},{rate:.2f}")


if __name__ == "__main__":
    main()
