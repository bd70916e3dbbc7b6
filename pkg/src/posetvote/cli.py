"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 possible-winner run
finished with candidates left unknown after a timeout.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import bench, ilp, profile_io
from .nw import nw_set, nw_set_baseline
from .oracle import brute_force_winners
from .orders import DEFAULT_ENUMERATION_BOUND, vote_densities
from .pipeline import METHODS, pw_set
from .posetgen import DEFAULT_PHI, GENERATORS
from .rules import parse_rule

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_UNKNOWN = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # the same flags are accepted before and after the subcommand; the
    # subcommand copy uses SUPPRESS so it never clobbers an earlier value
    p = argparse.ArgumentParser(add_help=False)
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=default(0), help="random seed (default 0)")
    p.add_argument("--timeout", type=float, default=default(ilp.DEFAULT_TIMEOUT),
                   help="possible-winner time budget in seconds (default 2000)")
    p.add_argument("--threads", type=int, default=default(1), help="worker threads (default 1)")
    return p


def _csv_list(kind=str):
    def parse(text):
        try:
            return tuple(kind(x.strip()) for x in text.split(",") if x.strip())
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad list {text!r}") from None
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="posetvote", description="Necessary and possible winners over partial votes.",
                     parents=[_global_flags(False)])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _global_flags(True)

    def add(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[common])

    p = add("generate", "write a synthetic profile")
    p.add_argument("--type", dest="dataset", choices=sorted(GENERATORS), required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--phi", type=float, default=DEFAULT_PHI)
    p.add_argument("--out")

    for name, help_text in (("nw", "necessary winners"), ("pw", "possible winners"),
                            ("oracle", "brute-force necessary and possible winners")):
        p = add(name, help_text)
        p.add_argument("--rule", required=True)
        p.add_argument("--profile", required=True)
        p.add_argument("--unique", action="store_true", help="unique-winner semantics")
        if name == "nw":
            p.add_argument("--baseline", action="store_true", help="use the unoptimised routine")
            p.add_argument("--stats", action="store_true", help="also write a timing CSV row to stderr")
        elif name == "pw":
            p.add_argument("--method", choices=METHODS, default="auto")
            p.add_argument("--report", help="per-candidate CSV report")
        else:
            p.add_argument("--max-m", type=int, default=DEFAULT_ENUMERATION_BOUND)

    p = add("export-ilp", "write the possible-winner ILP of one candidate in LP format")
    p.add_argument("--rule", required=True)
    p.add_argument("--profile", required=True)
    p.add_argument("--candidate", type=int, required=True)
    p.add_argument("--unique", action="store_true")
    p.add_argument("--out")

    p = add("ingest-ratings", "profile from a user,item,rating CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--out")

    p = add("ingest-pairs", "profile from a user,a,b,preferred,confidence CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--out")

    p = add("density", "per-vote poset densities as CSV")
    p.add_argument("--profile", required=True)

    p = add("bench", "run a benchmark grid and write CSV rows")
    p.add_argument("--datasets", type=_csv_list(), default=("rsm-mix",))
    p.add_argument("--rules", type=_csv_list(), default=("borda",))
    p.add_argument("--methods", type=_csv_list(), default=("nw",))
    p.add_argument("--m", type=_csv_list(int), default=(10,))
    p.add_argument("--n", type=_csv_list(int), default=(10,))
    p.add_argument("--instances", type=int, default=1)
    p.add_argument("--unique", action="store_true")
    p.add_argument("--speedup", action="store_true", help="add NW baseline/optimised speed-up rows")
    p.add_argument("--out")
    return parser


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def _write_text(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _named(profile, cands):
    cands = sorted(cands)
    out = {"indices": cands}
    if profile.names is not None:
        out["names"] = [profile.names[c] for c in cands]
    return out


def _rule(text):
    try:
        return parse_rule(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_generate(args) -> int:
    if args.m < 1 or args.n < 1:
        raise UsageError("--m and --n must be positive")
    profile = GENERATORS[args.dataset](args.m, args.n, args.seed, args.phi)
    _write_text(profile_io.dumps_profile(profile), args.out)
    return EXIT_OK


def cmd_nw(args) -> int:
    rule = _rule(args.rule)
    profile = profile_io.parse_profile(args.profile)
    profile.cover_edges()
    fn = nw_set_baseline if args.baseline else nw_set
    t = time.perf_counter()
    winners = fn(profile, rule, args.unique)
    elapsed = (time.perf_counter() - t) * 1000.0
    _emit({"rule": rule.name, "unique": args.unique, "necessary_winners": _named(profile, winners),
           "time_ms": round(elapsed, 3)})
    if args.stats:
        row = bench.BenchRow("file", rule.name, profile.m, profile.n, args.seed,
                             "nw-baseline" if args.baseline else "nw", len(winners), time_ms=elapsed)
        bench.rows_to_csv([row], sys.stderr)
    return EXIT_OK


def cmd_pw(args) -> int:
    rule = _rule(args.rule)
    profile = profile_io.parse_profile(args.profile)
    t = time.perf_counter()
    possible, report = pw_set(profile, rule, method=args.method, timeout=args.timeout,
                              unique=args.unique, threads=args.threads)
    elapsed = (time.perf_counter() - t) * 1000.0
    rejected = set(range(profile.m)) - set(possible) - set(report.unknown)
    _emit({
        "rule": rule.name, "unique": args.unique, "method": report.method,
        "possible_winners": _named(profile, possible),
        "not_possible": _named(profile, rejected),
        "unknown": _named(profile, report.unknown),
        "phase_counts": {
            "confirmed_phase1": len(report.confirmed_phase1), "pruned_phase1": len(report.pruned_phase1),
            "confirmed_phase2": len(report.confirmed_phase2), "phase3": len(report.undecided_into_phase3),
        },
        "ilp_calls": report.ilp_invocations, "time_ms": round(elapsed, 3),
    })
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="") as fh:
            fh.write("candidate,phase_decided,decision,time_ms\n")
            for c, phase, decision, ms in report.rows():
                fh.write(f"{c},{phase},{decision},{ms:.3f}\n")
    return EXIT_UNKNOWN if report.unknown else EXIT_OK


def cmd_oracle(args) -> int:
    rule = _rule(args.rule)
    profile = profile_io.parse_profile(args.profile)
    nw, pw = brute_force_winners(profile, rule, args.unique, args.max_m)
    _emit({"rule": rule.name, "unique": args.unique,
           "necessary_winners": _named(profile, nw), "possible_winners": _named(profile, pw)})
    return EXIT_OK


def cmd_export_ilp(args) -> int:
    rule = _rule(args.rule)
    profile = profile_io.parse_profile(args.profile)
    if not 0 <= args.candidate < profile.m:
        raise UsageError(f"--candidate must lie in 0..{profile.m - 1}")
    model = ilp.build_pw_model(profile, args.candidate, rule, args.unique)
    _write_text(ilp.export_lp(model), args.out)
    return EXIT_OK


def _ingested(profile, out, extra=None) -> int:
    text = profile_io.dumps_profile(profile)
    summary = {"candidates": profile.m, "voters": profile.n, **(extra or {})}
    if out is None:
        sys.stdout.write(text)
        print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    else:
        _write_text(text, out)
        _emit(summary)
    return EXIT_OK


def cmd_ingest_ratings(args) -> int:
    table = profile_io.read_table(args.input, ("user", "item", "rating"))
    return _ingested(profile_io.ingest_ratings(table), args.out)


def cmd_ingest_pairs(args) -> int:
    table = profile_io.read_table(args.input, ("user", "a", "b", "preferred", "confidence"))
    profile, dropped = profile_io.ingest_pairwise(table, args.threshold)
    return _ingested(profile, args.out, {"dropped_users": dropped})


def cmd_density(args) -> int:
    profile = profile_io.parse_profile(args.profile)
    lines = ["voter,density"] + [f"{l},{d:.6f}" for l, d in enumerate(vote_densities(profile).tolist())]
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        grid = bench.BenchGrid(datasets=args.datasets, rules=args.rules, methods=args.methods,
                               ms=args.m, ns=args.n, instances=args.instances, seed=args.seed,
                               timeout=args.timeout, unique=args.unique, speedup=args.speedup)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = bench.run_grid(grid, threads=args.threads)
    if args.out is None:
        bench.rows_to_csv(rows, sys.stdout)
    else:
        bench.rows_to_csv(rows, args.out)
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate, "nw": cmd_nw, "pw": cmd_pw, "oracle": cmd_oracle,
    "export-ilp": cmd_export_ilp, "ingest-ratings": cmd_ingest_ratings,
    "ingest-pairs": cmd_ingest_pairs, "density": cmd_density, "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with EXIT_USAGE on bad arguments
    if args.threads < 1 or args.timeout < 0:
        parser.error("--threads must be >= 1 and --timeout >= 0")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"posetvote: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError, OverflowError) as exc:
        # ProfileSyntaxError, CycleError and BoundError are ValueErrors
        print(f"posetvote: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
