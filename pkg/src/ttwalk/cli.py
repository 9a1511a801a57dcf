"""Command line entry point: ``ttwalk <command> [flags]``.

Results go to stdout (or ``--out``) and are byte-identical for identical flags.
The run manifest, which records the flags, version and wall time, goes to
stderr or to ``--manifest``.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from importlib import metadata

from .errors import (
    CapExceededError,
    InvalidRankError,
    MalformedInputError,
    PreconditionError,
)
from .folds import fold_decomposition, realize_power, recomposition_receipt
from .invariants import INCONCLUSIVE, Caps, check_property_G
from .nielsen import find_seed_sequence, format_seed_file, is_admissible, is_cyclically_admissible
from .rose_map import format_rose_map, from_sequence, illegal_turns, is_train_track, parse_rose_map
from .spectral import trial_rate
from .walk import WalkConfig, estimate_E_n_prob, sample_trajectory, trial_record

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_INCONCLUSIVE = 0, 2, 3, 4
PROPERTY_G_LENGTHS = (50, 100, 200, 400)


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _frac(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass
class RunManifest:
    command: str
    rank: int | None
    seed: int | None
    n: list[int] | int | None
    trials: int | None
    caps: dict = field(default_factory=dict)
    code_version: str = field(default_factory=_version)
    wall_time: float = 0.0


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _map(func, items, jobs: int):
    if jobs <= 1:
        return list(map(func, items))
    with ProcessPoolExecutor(jobs) as pool:
        return list(pool.map(func, items, chunksize=16))


def cmd_sample(args, out) -> int:
    for t in range(args.trials):
        traj = sample_trajectory(WalkConfig(args.rank, args.seed, args.n), t)
        out.write(_dump(trial_record(traj)) + "\n")
        if args.emit_maps:
            with open(args.emit_maps, "a") as fh:
                fh.write(f"# trial {t}\n{format_rose_map(from_sequence(traj.items))}\n")
    return EXIT_OK


def cmd_estimate_en(args, out) -> int:
    est = estimate_E_n_prob(WalkConfig(args.rank, args.seed, args.n, args.trials))
    out.write(_dump({
        "rank": args.rank,
        "n": args.n,
        "trials": est.trials,
        "estimate": est.estimate,
        "stderr": est.stderr,
        "theoretical_limit": _frac(est.theoretical_limit),
    }) + "\n")
    return EXIT_OK


def _property_g_task(task):
    rank, seed, n, t, caps = task
    traj = sample_trajectory(WalkConfig(rank, seed, n), t)
    rec = {"n": n, "trial": t, "cyclically_admissible": is_cyclically_admissible(traj.items)}
    if rec["cyclically_admissible"]:
        rec["report"] = check_property_G(traj.items, caps).to_dict()
    return rec


def cmd_property_g(args, out) -> int:
    caps = Caps(args.inp_cap, args.whitehead_cap, args.power_k_cap)
    lengths = args.n or list(PROPERTY_G_LENGTHS)
    tasks = [(args.rank, args.seed, n, t, caps) for n in lengths for t in range(args.trials)]
    records = _map(_property_g_task, tasks, args.jobs)
    inconclusive = False
    table = []
    for n in lengths:
        rows = [rec for rec in records if rec["n"] == n]
        reports = [rec["report"] for rec in rows if "report" in rec]
        for rec in rows:
            out.write(_dump({"kind": "trial", **rec}) + "\n")
        hits = sum(rep["property_g"] for rep in reports)
        inconclusive |= any(rep["no_pinp"] == INCONCLUSIVE and rep["inp_search"] for rep in reports)
        freq = hits / len(reports) if reports else None
        summary = {
            "kind": "summary",
            "n": n,
            "trials": len(rows),
            "e_n": len(reports),
            "b_n": hits,
            "pr_b_given_e": freq,
        }
        out.write(_dump(summary) + "\n")
        table.append(summary)
    print(f"{'n':>6} {'E_n':>6} {'B_n':>6} {'Pr(B|E)':>8}", file=sys.stderr)
    for row in table:
        freq = "-" if row["pr_b_given_e"] is None else f"{row['pr_b_given_e']:.3f}"
        print(f"{row['n']:>6} {row['e_n']:>6} {row['b_n']:>6} {freq:>8}", file=sys.stderr)
    return EXIT_INCONCLUSIVE if inconclusive else EXIT_OK


def _lyapunov_task(task):
    config, t = task
    return trial_rate(config, t)


def cmd_lyapunov(args, out) -> int:
    config = WalkConfig(args.rank, args.seed, args.n, args.trials)
    rates = _map(_lyapunov_task, [(config, t) for t in range(args.trials)], args.jobs)
    mean = math.fsum(rates) / len(rates)
    var = math.fsum((x - mean) ** 2 for x in rates) / (len(rates) - 1) if len(rates) > 1 else math.nan
    if mean <= 0:
        raise PreconditionError(f"nonpositive Lyapunov estimate {mean}")
    out.write(_dump({
        "rank": args.rank,
        "n": args.n,
        "trials": args.trials,
        "ell1_hat": mean,
        "stderr": math.sqrt(var / len(rates)),
    }) + "\n")
    return EXIT_OK


def cmd_decompose(args, out) -> int:
    with open(args.file) as fh:
        f = parse_rose_map(fh.read())
    decomp = fold_decomposition(f)
    receipt = recomposition_receipt(f, decomp)
    if is_train_track(f) and len(illegal_turns(f)) == 1 and len(decomp.nielsen_part):
        p, seq = realize_power(f)
        receipt["power"] = p
        receipt["power_sequence"] = str(seq)
        receipt["power_sequence_cyclically_admissible"] = is_cyclically_admissible(seq)
    out.write(json.dumps(receipt, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if receipt["recomposition_ok"] else EXIT_PRECONDITION


def cmd_seed_search(args, out) -> int:
    seq = find_seed_sequence(args.rank)
    if not is_admissible(seq):
        raise PreconditionError("search returned an inadmissible sequence")
    out.write(format_seed_file({args.rank: seq}))
    return EXIT_OK


COMMANDS = {
    "sample": cmd_sample,
    "estimate-en": cmd_estimate_en,
    "property-g": cmd_property_g,
    "lyapunov": cmd_lyapunov,
    "decompose": cmd_decompose,
    "seed-search": cmd_seed_search,
}


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ttwalk",
        description="Random walks of Nielsen automorphisms and their train track maps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_default, trials_default, multi_n=False):
        p.add_argument("--rank", type=int, default=3)
        p.add_argument("--seed", type=int, default=0)
        if multi_n:
            p.add_argument("--n", type=_positive, nargs="+", default=None)
        else:
            p.add_argument("--n", type=_positive, default=n_default)
        p.add_argument("--trials", type=_positive, default=trials_default)
        p.add_argument("--out")
        p.add_argument("--manifest")
        p.add_argument("--jobs", type=_positive, default=1)

    p = sub.add_parser("sample", help="sample walk trajectories as JSON lines")
    common(p, 100, 1)
    p.add_argument("--emit-maps", help="append the rose map of each trajectory to this file")

    p = sub.add_parser("estimate-en", help="estimate the probability of a cyclically admissible prefix")
    common(p, 200, 100_000)

    p = sub.add_parser("property-g", help="certify property G on sampled prefixes")
    common(p, None, 200, multi_n=True)
    p.add_argument("--inp-cap", type=_positive, default=64)
    p.add_argument("--whitehead-cap", type=_positive, default=1000)
    p.add_argument("--power-k-cap", type=_positive, default=16)

    p = sub.add_parser("lyapunov", help="estimate the top Lyapunov exponent")
    common(p, 2000, 50)

    p = sub.add_parser("decompose", help="fold a rose map into Nielsen factors and a signed permutation")
    p.add_argument("file")
    p.add_argument("--out")
    p.add_argument("--manifest")

    p = sub.add_parser("seed-search", help="search for a seed sequence of the given rank")
    p.add_argument("--rank", type=int, default=3)
    p.add_argument("--out")
    p.add_argument("--manifest")
    return parser


def _manifest(args, wall: float) -> RunManifest:
    caps = {k: getattr(args, k) for k in ("inp_cap", "whitehead_cap", "power_k_cap") if hasattr(args, k)}
    return RunManifest(
        command=args.command,
        rank=getattr(args, "rank", None),
        seed=getattr(args, "seed", None),
        n=getattr(args, "n", None),
        trials=getattr(args, "trials", None),
        caps=caps,
        wall_time=round(wall, 3),
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "rank", 3) < 3:
        parser.error("--rank must be at least 3")
    start = time.perf_counter()
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        code = COMMANDS[args.command](args, out)
    except (MalformedInputError, InvalidRankError) as exc:
        print(f"ttwalk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PreconditionError, CapExceededError) as exc:
        print(f"ttwalk: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    finally:
        if out is not sys.stdout:
            out.close()
    manifest = _dump(asdict(_manifest(args, time.perf_counter() - start)))
    if args.manifest:
        with open(args.manifest, "w") as fh:
            fh.write(manifest + "\n")
    else:
        print(manifest, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
