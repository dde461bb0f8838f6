"""Command-line entry point.

Subcommands: triangle, parity, blocks, bootstrap, experiment, primes, exotic.
Every run is seeded (default 0, so unseeded runs reproduce; --seed random opts
into entropy), writes deterministic JSONL/CSV records to --out, and emits a
run manifest on stderr.  Exit codes: 0 success, 1 usage or input error, 2 a
falsified invariant (dumped as a minimal reproducer).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import secrets
import sys
import time
from fractions import Fraction

from . import __version__, experiments, lifting, parity, primes, walks
from .blocks import BlockSpec, check_block_destruction, detect_event_cascade, longest_block
from .triangle import StopKind, StopRule, TriangleHistory, iterate_until, validate_row

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FINDING = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; findings own that code here.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


class Finding(Exception):
    """A falsified invariant: mathematically significant, never swallowed."""

    def __init__(self, message: str, reproducer: dict):
        super().__init__(message)
        self.reproducer = reproducer


def _parse_values(text: str) -> list[int]:
    return validate_row([int(tok) for tok in text.replace(",", " ").split()])


def _parse_int_pair(text: str) -> tuple[int, int]:
    a, b = (int(tok) for tok in text.replace(",", " ").split())
    return a, b


def _parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def _resolve_seed(raw: str) -> int:
    if raw == "random":
        seed = secrets.randbits(63)
        print(f"seed={seed}", file=sys.stderr)
        return seed
    return int(raw)


def _resolve_threads(value: int | None) -> int:
    if value is not None:
        return max(1, value)
    env = os.environ.get("GILBREATH_THREADS")
    return max(1, int(env)) if env else 1


def _run_id(subcommand: str, params: dict, seed: int) -> str:
    blob = json.dumps({"cmd": subcommand, "params": params, "seed": seed},
                      sort_keys=True, separators=(",", ":"), default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValueError(message)


def _record(run_id: str, kind: str, seed: int, params: dict, result: dict) -> dict:
    return {"run_id": run_id, "kind": kind, "seed": seed, "params": params, "result": result}


def _write_records(lines: list[str], out: str | None) -> None:
    if out is None:
        return
    with open(out, "w") as fh:
        fh.write("\n".join(lines) + ("\n" if lines else ""))


def _records_to_lines(records: list[dict], fmt: str) -> list[str]:
    if fmt == "jsonl":
        return [json.dumps(r, sort_keys=True, separators=(",", ":")) for r in records]
    # CSV: fixed leading columns, then the union of result keys in sorted
    # order; nested values are JSON-encoded.
    keys = sorted({k for r in records for k in r["result"]})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["run_id", "kind", "seed", "params"] + keys)
    for r in records:
        row = [r["run_id"], r["kind"], r["seed"], json.dumps(r["params"], sort_keys=True)]
        for k in keys:
            v = r["result"].get(k)
            row.append(json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v)
        writer.writerow(row)
    return buf.getvalue().splitlines()


def _manifest(subcommand: str, params: dict, seed: int, started: float) -> None:
    obj = {
        "run_id": _run_id(subcommand, params, seed),
        "subcommand": subcommand,
        "config": params,
        "seed": seed,
        "version": __version__,
        "started": started,
        "finished": time.time(),
    }
    print(json.dumps(obj, sort_keys=True, default=str), file=sys.stderr)


_STOP_CHOICES = {
    "le1": StopKind.ALL_LE_ONE,
    "zero-d": StopKind.ALL_IN_ZERO_D,
    "first-not-one": StopKind.FIRST_NOT_ONE,
    "stable": StopKind.STABLE_TAIL,
}


def _cmd_triangle(args) -> list[dict]:
    row = _parse_values(args.values)
    if args.stop == "none":
        history = TriangleHistory.from_row(row)
        iterations, reason = len(history.rows) - 1, "exhausted"
    else:
        kind = _STOP_CHOICES[args.stop]
        if kind is StopKind.ALL_IN_ZERO_D:
            _require(args.d is not None, "--stop zero-d needs --d")
            rule = StopRule(kind, d=args.d)
        else:
            rule = StopRule(kind)
        budget = args.max_iters if args.max_iters is not None else len(row) - 1
        res = iterate_until(row, rule, budget, retain=True)
        history, iterations, reason = res.history, res.iterations, res.reason
    for r in history.rows:
        print(" ".join(str(v) for v in r))
    params = {"values": row, "stop": args.stop, "max_iters": args.max_iters, "d": args.d}
    result = {"rows": history.rows, "iterations": iterations, "reason": reason}
    return [_record(_run_id("triangle", params, args.seed), "triangle", args.seed, params, result)]


def _cmd_parity(args) -> list[dict]:
    records = []
    if args.depth is not None:
        m = parity.mask(args.depth)
        params = {"depth": args.depth}
        result = {"members": sorted(m.members), "size": m.size}
        print(f"J_{args.depth}: {sorted(m.members)} (size {m.size})")
        records.append(_record(_run_id("parity", params, args.seed), "parity_mask",
                               args.seed, params, result))
    if args.prob_even is not None:
        c_lo, c_hi = _parse_int_pair(args.prob_even)
        i_lo, i_hi = _parse_int_pair(args.depths)
        lo, hi = None, None
        for C in range(c_lo, c_hi + 1):
            for i in range(i_lo, i_hi + 1):
                p = parity.prob_even(C, i)
                lo = p if lo is None or p < lo else lo
                hi = p if hi is None or p > hi else hi
                params = {"C": C, "depth": i}
                result = {"prob_even": f"{p.numerator}/{p.denominator}", "float": float(p)}
                records.append(_record(_run_id("parity", params, args.seed), "prob_even",
                                       args.seed, params, result))
        print(f"prob_even over C in [{c_lo},{c_hi}], depth in [{i_lo},{i_hi}]: "
              f"min {lo} ({float(lo):.6f}), max {hi} ({float(hi):.6f})")
    if not records:
        raise ValueError("parity: give --depth and/or --prob-even")
    return records


def _cmd_blocks(args) -> list[dict]:
    row = _parse_values(args.values)
    records = []
    if args.allowed is not None:
        spec = BlockSpec(frozenset(_parse_values(args.allowed) if args.allowed else ()),
                         require_witness=args.witness)
        rep = longest_block(row, spec)
        params = {"values": row, "allowed": sorted(spec.allowed), "witness": args.witness}
        result = {"max_length": rep.max_length, "start_index": rep.start_index,
                  "witness_present": rep.witness_present}
        print(f"longest block: length {rep.max_length} at position {rep.start_index}")
        records.append(_record(_run_id("blocks", params, args.seed), "block_report",
                               args.seed, params, result))
    if args.destruction:
        verdict = check_block_destruction(row)
        params = {"values": row}
        result = {"applicable": verdict.applicable, "holds": verdict.holds, "d": verdict.d,
                  "block_length": verdict.block_length, "observed_max": verdict.observed_max}
        print(f"max-destruction: d={verdict.d} L={verdict.block_length} "
              f"applicable={verdict.applicable} holds={verdict.holds}")
        records.append(_record(_run_id("blocks", params, args.seed), "block_destruction",
                               args.seed, params, result))
        if verdict.applicable and not verdict.holds:
            raise Finding("max-destruction bound falsified", {"row": row})
    if args.events is not None:
        C, R = _parse_int_pair(args.events)
        history = TriangleHistory.from_row(row)
        reports = detect_event_cascade(history, C, R)
        params = {"values": row, "C": C, "R": R}
        result = {"events": [{"j": e.j, "iteration": e.iteration, "allowed": list(e.allowed),
                              "required_length": e.required_length, "status": e.status}
                             for e in reports]}
        for e in reports:
            print(f"E_{e.j}: iteration {e.iteration}, {{0,{e.allowed[1]}}}-block of length "
                  f">= {e.required_length}: {e.status}")
        records.append(_record(_run_id("blocks", params, args.seed), "event_cascade",
                               args.seed, params, result))
    if not records:
        raise ValueError("blocks: give --allowed, --destruction, and/or --events")
    return records


def _build_graph(args, rng_seed: int) -> tuple[walks.RegularDigraph, walks.Coloring, dict]:
    import random as _random

    if args.graph is not None:
        with open(args.graph) as fh:
            g, col = walks.parse_walk_instance(fh.read())
        if col is None:
            raise ValueError("graph file must end with a coloring line of 'r'/'b'")
        return g, col, {"graph": args.graph}
    if args.cycle is not None:
        n = args.cycle
        g, col, L, c, long_prob = walks.remark_counterexample(n)
        print(f"cycle n={n}: red first {n // 10}, L={L}, c={c}, "
              f"all-red probability at 5L: {long_prob.value}")
        return g, col, {"cycle": n}
    if args.debruijn is not None:
        C, k = _parse_int_pair(args.debruijn)
        targets = _parse_values(args.targets) if args.targets else [0]
        g = walks.debruijn_graph(C, k)
        col = walks.ultimate_iterate_coloring(C, k, targets)
        return g, col, {"debruijn": [C, k], "targets": targets}
    if args.random_graph is not None:
        n, d = _parse_int_pair(args.random_graph)
        rng = _random.Random(rng_seed)
        g = walks.random_regular_digraph(n, d, rng)
        col = walks.random_coloring(n, rng, args.red_fraction)
        return g, col, {"random": [n, d], "red_fraction": args.red_fraction}
    raise ValueError("bootstrap: give one of --graph/--cycle/--debruijn/--random")


def _cmd_bootstrap(args) -> list[dict]:
    g, col, source = _build_graph(args, args.seed)
    L = args.length
    counter_prob = walks.all_red_probability(g, col, L).value
    c = args.c if args.c is not None else counter_prob
    verdict = walks.check_bootstrap(g, col, L, c)
    params = dict(source, n=g.n, d=g.d, length=L, c=str(c))
    result = {
        "hypothesis_met": verdict.hypothesis_met,
        "holds": verdict.holds,
        "short_probability": str(verdict.short_probability),
        "short_float": float(verdict.short_probability),
        "long_probability": None if verdict.long_probability is None else str(verdict.long_probability),
        "long_length": verdict.long_length,
        "threshold": str(verdict.threshold),
    }
    print(f"all-red P(L={L}) = {verdict.short_probability} "
          f"({float(verdict.short_probability):.6g})")
    if verdict.hypothesis_met:
        print(f"bootstrap: P(L'={verdict.long_length}) = {verdict.long_probability} "
              f">= c^2/10 = {verdict.threshold}: {verdict.holds}")
    else:
        print(f"hypothesis unmet: P(L) < c = {c}")
    records = [_record(_run_id("bootstrap", params, args.seed), "bootstrap",
                       args.seed, params, result)]
    if verdict.hypothesis_met and not verdict.holds:
        raise Finding("bootstrap conclusion falsified",
                      {"graph": walks.format_walk_instance(g, col), "L": L, "c": str(c)})
    return records


def _cmd_experiment(args) -> list[dict]:
    threads = _resolve_threads(args.threads)
    if args.experiment_kind == "collapse":
        _require(args.M is not None and args.C is not None, "collapse needs --M and --C")
        cfg = experiments.ExperimentConfig(
            kind="uniform_collapse", M=args.M, trials=args.trials, seed=args.seed,
            C=args.C, T=args.T, weights=tuple(args.weights) if args.weights else None,
            trial_offset=args.trial_offset)
        record = experiments.run_collapse_experiment(cfg, threads=threads)
    elif args.experiment_kind == "increasing-alphabet":
        _require(args.M is not None and args.f is not None,
                 "increasing-alphabet needs --M and --f")
        cfg = experiments.ExperimentConfig(
            kind="increasing_alphabet", M=args.M, trials=args.trials, seed=args.seed,
            schedule=experiments.Schedule.parse(args.f), T=args.T,
            trial_offset=args.trial_offset)
        record = experiments.run_collapse_experiment(cfg, threads=threads)
    elif args.experiment_kind == "leading-term":
        _require(args.M is not None and args.f is not None, "leading-term needs --M and --f")
        cfg = experiments.ExperimentConfig(
            kind="gap_leading_term", M=args.M, trials=args.trials, seed=args.seed,
            schedule=experiments.Schedule.parse(args.f), trial_offset=args.trial_offset)
        record = experiments.run_leading_term_experiment(cfg, threads=threads)
    else:  # ultimate-zero
        _require(args.C is not None and args.depth is not None,
                 "ultimate-zero needs --C and --depth")
        record = experiments.estimate_ultimate_zero(
            args.C, args.depth, args.trials, args.seed, threads=threads,
            trial_offset=args.trial_offset)
    agg = json.loads(record.aggregate_line())
    print(f"aggregate: {json.dumps(agg['result'], sort_keys=True)}")
    print(f"wall time: {record.wall_time:.3f}s", file=sys.stderr)
    if args.format == "csv":
        lines = _records_to_lines([agg], "csv")
    else:
        lines = record.jsonl_lines()
    _write_records(lines, args.out)
    # Records were already serialized by the experiment itself.
    return []


def _cmd_primes(args) -> list[dict]:
    verdict = primes.verify_gilbreath(
        args.limit,
        max_full_rows=args.max_full_rows,
        checkpoint_path=args.checkpoint,
        checkpoint_every=args.checkpoint_every,
        resume=args.resume,
    )
    if verdict.status == "verified" and verdict.stabilization_row is not None:
        print(f"verified, stabilization row {verdict.stabilization_row}")
    else:
        print(verdict.status)
    print(f"rows confirmed: {verdict.verified_rows}, full rows iterated: {verdict.rows_iterated}")
    params = {"limit": args.limit, "max_full_rows": args.max_full_rows}
    result = {"status": verdict.status, "verified_rows": verdict.verified_rows,
              "stabilization_row": verdict.stabilization_row,
              "rows_iterated": verdict.rows_iterated}
    records = [_record(_run_id("primes", params, args.seed), "primes", args.seed, params, result)]
    if verdict.status == "violated":
        raise Finding("leading entry != 1 in the prime difference triangle",
                      {"limit": args.limit, "row": verdict.violation_row})
    return records


def _cmd_exotic(args) -> list[dict]:
    import random as _random

    if args.verify is not None:
        with open(args.verify) as fh:
            cert = lifting.ExoticCertificate.from_json(fh.read())
        ok = lifting.verify_certificate(cert)
        print(f"certificate {'valid' if ok else 'INVALID'}: d={cert.d}, "
              f"width {len(cert.initial)}, pure from row {cert.first_pure_row}")
        params = {"verify": args.verify}
        result = {"valid": ok, "d": cert.d, "first_pure_row": cert.first_pure_row}
        return [_record(_run_id("exotic", params, args.seed), "exotic_verify",
                        args.seed, params, result)]
    _require(args.seed_row is not None and args.cap is not None and args.width is not None,
             "exotic search needs --seed-row, --cap, and --width")
    seed_row = _parse_values(args.seed_row)
    constraint = lifting.LiftConstraint(alphabet_max=args.cap, width_goal=args.width)
    cert = lifting.lift_search(seed_row, constraint, args.budget, _random.Random(args.seed))
    params = {"seed_row": seed_row, "cap": args.cap, "width": args.width, "budget": args.budget}
    if cert is None:
        print("none found within budget")
        result: dict = {"found": False}
    else:
        print(f"found width-{len(cert.initial)} initial row, {{0,{cert.d}}}-pure from row "
              f"{cert.first_pure_row}: {' '.join(str(v) for v in cert.initial)}")
        result = {"found": True, **json.loads(cert.to_json())}
    return [_record(_run_id("exotic", params, args.seed), "exotic_search",
                    args.seed, params, result)]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="gilbreath",
        description="Absolute-difference triangles: verification tools and experiments.",
        epilog="CSV output columns: run_id, kind, seed, params (JSON), then the "
               "sorted result fields of the emitted records.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", default="0",
                       help="integer seed, or 'random' for entropy (default 0)")
        p.add_argument("--out", help="write records to this file")
        p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
        p.add_argument("--threads", type=int,
                       help="worker threads (default: env GILBREATH_THREADS or 1)")

    p = sub.add_parser("triangle", help="print the difference triangle of a row")
    p.add_argument("--values", required=True, help="comma-separated row entries")
    p.add_argument("--stop", choices=list(_STOP_CHOICES) + ["none"], default="none")
    p.add_argument("--d", type=int, help="d for the zero-d stop rule")
    p.add_argument("--max-iters", type=int)
    common(p)

    p = sub.add_parser("parity", help="parity masks and even-probability tables")
    p.add_argument("--depth", type=int, help="emit the mask at this depth")
    p.add_argument("--prob-even", help="alphabet range 'CMIN,CMAX' for the table")
    p.add_argument("--depths", default="1,64", help="depth range 'IMIN,IMAX' (default 1,64)")
    common(p)

    p = sub.add_parser("blocks", help="block reports and block-lemma checks")
    p.add_argument("--values", required=True)
    p.add_argument("--allowed", help="allowed-value set, e.g. '0,2'")
    p.add_argument("--witness", type=int, help="value the block must contain")
    p.add_argument("--destruction", action="store_true",
                   help="check the max-destruction bound on the row")
    p.add_argument("--events", help="'C,R' to report the event cascade of the row's triangle")
    common(p)

    p = sub.add_parser("bootstrap", help="exact all-red walk probabilities and the bootstrap check")
    p.add_argument("--graph", help="graph file: 'n d', n successor lines, then r/b coloring line")
    p.add_argument("--cycle", type=int, help="n-cycle with first n/10 vertices red")
    p.add_argument("--debruijn", help="'C,k' de Bruijn graph with ultimate-iterate coloring")
    p.add_argument("--targets", help="red targets for --debruijn (default '0')")
    p.add_argument("--random", dest="random_graph", help="'n,d' seeded random regular digraph")
    p.add_argument("--red-fraction", type=float, default=0.5)
    p.add_argument("--length", type=int, required=True, help="walk length L")
    p.add_argument("--c", type=_parse_fraction,
                   help="hypothesis threshold (fraction, default: exact P at L)")
    common(p)

    p = sub.add_parser("experiment", help="seeded Monte Carlo runs, JSONL trials + aggregate")
    p.add_argument("experiment_kind",
                   choices=("collapse", "leading-term", "ultimate-zero", "increasing-alphabet"))
    p.add_argument("--M", type=int, help="sequence length")
    p.add_argument("--C", type=int, help="alphabet size")
    p.add_argument("--f", help="alphabet schedule: constant 'k' or '1:k1,n2:k2,...'")
    p.add_argument("--T", type=int, help="iteration budget (default M-1)")
    p.add_argument("--depth", type=int, help="row length for ultimate-zero")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--trial-offset", type=int, default=0,
                   help="first trial index (disjoint batches share a seed)")
    p.add_argument("--weights", type=float, nargs="+",
                   help="per-symbol weights for weighted collapse sampling")
    common(p)

    p = sub.add_parser("primes", help="verify the prime difference triangle up to a limit")
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--max-full-rows", type=int, default=10_000)
    p.add_argument("--checkpoint", help="checkpoint file path")
    p.add_argument("--checkpoint-every", type=int, default=0)
    p.add_argument("--resume", action="store_true", help="resume from --checkpoint")
    common(p)

    p = sub.add_parser("exotic", help="lift a {0,d} row upward into an exotic initial sequence")
    p.add_argument("--seed-row", help="the {0,d}-valued row to lift")
    p.add_argument("--cap", type=int, help="alphabet cap for lifted entries")
    p.add_argument("--width", type=int, help="target initial-row width")
    p.add_argument("--budget", type=int, default=100_000, help="DFS node budget")
    p.add_argument("--verify", help="verify a certificate JSON file instead of searching")
    common(p)

    return parser


_HANDLERS = {
    "triangle": _cmd_triangle,
    "parity": _cmd_parity,
    "blocks": _cmd_blocks,
    "bootstrap": _cmd_bootstrap,
    "experiment": _cmd_experiment,
    "primes": _cmd_primes,
    "exotic": _cmd_exotic,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.time()
    try:
        args.seed = _resolve_seed(args.seed)
        records = _HANDLERS[args.command](args)
        if records:
            _write_records(_records_to_lines(records, args.format), args.out)
    except Finding as finding:
        print(f"FINDING: {finding}", file=sys.stderr)
        print(json.dumps({"finding": str(finding), "reproducer": finding.reproducer},
                         sort_keys=True), file=sys.stderr)
        return EXIT_FINDING
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if hasattr(args, "seed") and isinstance(args.seed, int):
            public = {k: v for k, v in vars(args).items()
                      if k not in ("command", "seed") and not callable(v)}
            _manifest(args.command, public, args.seed, started)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
