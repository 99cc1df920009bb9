"""Command line: ``oracle-games <subcommand> ...``.

Every subcommand is a pure function of its arguments, input files and seed;
outputs are byte-identical across reruns.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .. import dimensions as dims
from ..config import Caps, CapExceeded, default_caps
from ..equilibria import EquilibriumCertificate, IterationCapExceeded, cce_multiplayer, nash_zero_sum
from ..games import MultiPlayerGame, ZeroSumGame
from ..online import (
    IMPROPER,
    PROPER,
    LearnerConfig,
    NotRealizableError,
    completed_phases,
    run_agnostic,
    run_realizable,
    total_mistakes,
    total_updates,
)
from ..oracles import LOWEST, HIGHEST, InputError
from . import io
from .generators import KINDS, InstanceSpec

DIMENSIONS = ("vc", "littlestone", "threshold", "fat_threshold", "fat_shattering", "sequential_fat")

EXIT_INPUT = 2
EXIT_LIMIT = 3
EXIT_UNVERIFIED = 1


def _caps(args) -> Caps:
    caps = default_caps()
    overrides = {}
    for item in args.cap or []:
        name, _, value = item.partition("=")
        if name not in {f.name for f in dataclasses.fields(Caps)}:
            raise InputError(f"unknown cap {name!r}")
        try:
            overrides[name] = int(value)
        except ValueError as exc:
            raise InputError(f"cap {name} needs an integer value") from exc
    return dataclasses.replace(caps, **overrides)


def _emit(args, obj) -> None:
    text = io.dumps(obj)
    if getattr(args, "out", None):
        io.write_text(args.out, text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- subcommands


def cmd_learn(args) -> int:
    cls = io.load_class(args.cls)
    stream = io.stream_from_json(io.read_json(args.stream), cls)
    config = LearnerConfig(epsilon=args.epsilon, alpha=args.alpha, mode=args.mode, mw_constant=args.mw_constant, tie_break=args.tie_break)
    if args.agnostic:
        if not isinstance(stream, list):
            raise InputError("the agnostic learner needs an explicit stream list")
        tr = run_agnostic(cls, stream, len(stream), args.max_flips, config, caps=_caps(args), seed=args.seed)
        summary = {k: tr.extras[k] for k in ("n_experts", "master_loss", "best_row", "best_row_loss", "regret", "mw_regret_bound", "realizable_mistakes")}
    else:
        tr = run_realizable(cls, stream, config, seed=args.seed)
        summary = {
            "rounds": len(tr.records),
            "mistakes": total_mistakes(tr),
            "updates": total_updates(tr),
            "completed_phases": completed_phases(tr),
            "pool": tr.extras["pool"],
            "oracle_calls": tr.oracle_calls,
        }
    if args.transcript:
        io.write_text(args.transcript, tr.to_csv())
    _emit(args, summary)
    return 0


def cmd_solve_zero_sum(args) -> int:
    game = io.load_game(args.game)
    if not isinstance(game, ZeroSumGame):
        raise InputError("solve-zero-sum needs a zero-sum game file")
    cert = nash_zero_sum(game, args.eps, args.val_tol, caps=_caps(args), seed=args.seed)
    return _finish_solve(args, cert)


def cmd_solve_cce(args) -> int:
    game = io.load_game(args.game)
    if isinstance(game, ZeroSumGame):
        M = game.matrix
        game = MultiPlayerGame([1.0 - M, M])
    cert = cce_multiplayer(game, args.eps, args.val_tol, caps=_caps(args), seed=args.seed, exact_cce=args.exact_cce)
    return _finish_solve(args, cert)


def _finish_solve(args, cert: EquilibriumCertificate) -> int:
    if args.transcript:
        io.write_text(args.transcript, cert.transcript.to_csv())
    _emit(args, cert.to_json())
    return 0


def cmd_dims(args) -> int:
    which = DIMENSIONS if args.which == "all" else tuple(w.strip() for w in args.which.split(","))
    unknown = [w for w in which if w not in DIMENSIONS]
    if unknown:
        raise InputError(f"unknown dimension(s) {unknown}; choose from {', '.join(DIMENSIONS)} or 'all'")
    M = io.load_matrix(args.input)
    caps = _caps(args)
    out = []
    for w in which:
        if w == "vc":
            rep = dims.vc_dimension(M, caps)
        elif w == "littlestone":
            rep = dims.littlestone_dimension(M, caps)
        elif w == "threshold":
            rep = dims.threshold_dimension(M, caps, mode=args.mode)
        elif w == "fat_threshold":
            rep = dims.fat_threshold_dimension(M, args.eps, caps, mode=args.mode)
        elif w == "fat_shattering":
            rep = dims.fat_shattering_dimension(M, args.eps, caps)
        else:
            rep = dims.sequential_fat_dimension(M, args.eps, caps)
        out.append(rep.to_json())
    text = "".join(json.dumps(r, sort_keys=True) + "\n" for r in out)
    if args.out:
        io.write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args) -> int:
    game = io.load_game(args.game)
    cert = EquilibriumCertificate.from_json(io.read_json(args.cert))
    if cert.kind == "cce" and isinstance(game, ZeroSumGame):
        game = MultiPlayerGame([1.0 - game.matrix, game.matrix])
    worst = cert.verify(game)
    ok = worst <= cert.claimed_epsilon + 1e-12
    _emit(args, {"kind": cert.kind, "exploitability": worst, "claimed_epsilon": cert.claimed_epsilon, "verified": ok})
    return 0 if ok else EXIT_UNVERIFIED


def cmd_gen(args) -> int:
    params = {k: v for k, v in {
        "n": args.n, "m": args.m, "seed": args.seed, "ell": args.ell, "p_hi": args.p_hi, "p_lo": args.p_lo,
        "shape": args.shape, "path": args.path,
    }.items() if v is not None}
    inst = InstanceSpec(args.kind, params).build()
    _emit(args, inst.to_json())
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oracle-games", description="Oracle-based online learning and equilibrium computation.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{learn,solve-zero-sum,solve-cce,dims,verify,gen}")

    def common(p, out_help="write JSON here instead of stdout"):
        p.add_argument("--out", help=out_help)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--cap", action="append", metavar="NAME=VALUE", help="override a size/iteration cap (repeatable)")

    p = sub.add_parser("learn", help="run the online learner on a stream")
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--stream", required=True)
    p.add_argument("--mode", choices=(IMPROPER, PROPER), default=IMPROPER)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=0.25)
    p.add_argument("--mw-constant", type=float, default=8.0)
    p.add_argument("--tie-break", choices=(LOWEST, HIGHEST), default=LOWEST)
    p.add_argument("--agnostic", action="store_true")
    p.add_argument("--max-flips", type=int, default=1)
    p.add_argument("--transcript")
    common(p)
    p.set_defaults(func=cmd_learn)

    for name, func in (("solve-zero-sum", cmd_solve_zero_sum), ("solve-cce", cmd_solve_cce)):
        p = sub.add_parser(name, help=f"{name.replace('solve-', '')} equilibrium by double oracle")
        p.add_argument("--game", required=True)
        p.add_argument("--eps", type=float, default=0.1)
        p.add_argument("--val-tol", type=float, default=0.01)
        p.add_argument("--transcript")
        if name == "solve-cce":
            p.add_argument("--exact-cce", action="store_true", help="expected-loss inner CCE instead of sampled play")
        common(p, "write the certificate here instead of stdout")
        p.set_defaults(func=func)

    p = sub.add_parser("dims", help="combinatorial dimensions of a class or matrix")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--which", default="all")
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--mode", choices=(dims.EXACT, dims.GREEDY), default=dims.EXACT)
    common(p)
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("verify", help="re-check a certificate by enumeration")
    p.add_argument("--game", required=True)
    p.add_argument("--cert", required=True)
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--p-hi", type=float)
    p.add_argument("--p-lo", type=float)
    p.add_argument("--shape", type=lambda s: [int(x) for x in s.split(",")])
    p.add_argument("--path")
    common(p)
    p.set_defaults(func=cmd_gen)
    return parser


def _report(kind: str, message: str, code: int, **extra) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, **extra}, sort_keys=True) + "\n")
    return code


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except NotRealizableError as exc:
        return _report("not_realizable", str(exc), EXIT_INPUT, round=exc.round_index)
    except CapExceeded as exc:
        return _report("cap_exceeded", str(exc), EXIT_LIMIT)
    except IterationCapExceeded as exc:
        path = getattr(args, "transcript", None)
        if path:
            io.write_text(path, exc.transcript.to_csv())
        return _report("iteration_cap", str(exc), EXIT_LIMIT, partial_transcript=path)
    except InputError as exc:
        return _report("input_error", str(exc), EXIT_INPUT)


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
