"""Command line entry point: ``bal3xor <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from . import bounds, twosat
from .advantage import BASELINES, baseline, estimate_advantage
from .pipeline import SweepConfig, run_diagnostics, run_full_export, run_rank_sweep
from .projection import free_support_sweep
from .sampler import GenConfig, generate_batch, instance_from_record, instance_to_record
from .translate import cnf_file_name, translate, write_dimacs
from .verify import verify_directory, write_verify_report


def _resolve_m(args, n: int) -> int:
    if args.m is not None:
        return args.m
    if args.gamma is not None:
        return int(round((1.0 + args.gamma) * n))
    return n + (args.t if args.t is not None else 1)


def _add_common(p: argparse.ArgumentParser, many_n: bool = False, size: bool = True) -> None:
    p.add_argument("--seed", type=int, default=0, help="64-bit master seed")
    if many_n:
        p.add_argument("--n", type=int, nargs="+", required=True)
    else:
        p.add_argument("--n", type=int, required=True)
    if size:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--m", type=int)
        g.add_argument("--t", type=int, nargs="+" if many_n else None)
        g.add_argument("--gamma", type=float)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--out", type=Path)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--balance", choices=("exact", "expected"), default="exact")


def _sweep_config(args, mode: str) -> SweepConfig:
    if args.m is not None:
        ts = [args.m - n for n in args.n]
        if len(set(ts)) != 1:
            raise SystemExit("--m with several --n values is ambiguous; use --t or --gamma")
        ts, gammas = ts[:1], None
    elif args.gamma is not None:
        ts, gammas = None, [args.gamma]
    else:
        ts, gammas = (args.t or [1]), None
    return SweepConfig.from_lists(args.n, args.reps, ts=ts, gammas=gammas, master_seed=args.seed,
                                  out_dir=args.out, mode=mode, balance_mode=args.balance,
                                  threads=args.threads)


def _print_rows(rows) -> None:
    if not rows:
        return
    dicts = [asdict(r) for r in rows]
    cols = list(dicts[0])
    print("\t".join(cols))
    for d in dicts:
        print("\t".join(f"{d[c]:.3f}" if isinstance(d[c], float) else str(d[c]) for c in cols))


def cmd_gen(args) -> int:
    m = _resolve_m(args, args.n)
    batch = generate_batch(GenConfig(args.n, m, args.reps, args.seed, args.balance), threads=args.threads)
    out = args.out or Path(".")
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"xor_n{args.n}_m{m}.jsonl"
    with open(path, "w") as fh:
        for inst in batch:
            fh.write(json.dumps(instance_to_record(inst)) + "\n")
    print(f"wrote {len(batch)} instances to {path} (SAT: {sum(x.label for x in batch)})")
    return 0


def cmd_translate(args) -> int:
    out = args.out / "cnf"
    out.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(args.input) as fh:
        for line in fh:
            if not line.strip():
                continue
            inst = instance_from_record(json.loads(line))
            write_dimacs(translate(inst), out / cnf_file_name(inst.n, inst.rep or 0))
            count += 1
    print(f"wrote {count} CNF files to {out}")
    return 0


def cmd_verify(args) -> int:
    report = verify_directory(args.directory, args.bruteforce_max_n, threads=args.threads)
    write_verify_report(report, args.out or args.directory)
    for r in report.records:
        if not r.consistent:
            print(f"INCONSISTENT {r.file}: {r.error or 'label mismatch'}", file=sys.stderr)
    print(report.summary_line())
    return report.exit_status


def cmd_sweep_diag(args) -> int:
    _print_rows(run_diagnostics(_sweep_config(args, "diagnostics")))
    return 0


def cmd_sweep_rank(args) -> int:
    _print_rows(run_rank_sweep(_sweep_config(args, "rank-sweep")))
    return 0


def cmd_export(args) -> int:
    if args.out is None:
        raise SystemExit("export needs --out")
    result = run_full_export(_sweep_config(args, "full-export"))
    _print_rows(result.rows)
    print(result.verify.summary_line())
    return 0 if result.ok else 1


def cmd_project(args) -> int:
    m = _resolve_m(args, args.n)
    summary, _ = free_support_sweep(GenConfig(args.n, m, 2, args.seed), args.samples,
                                    gamma0=args.gamma0, max_rejections=args.max_rejections,
                                    out_dir=args.out)
    for k, v in asdict(summary).items():
        print(f"{k}\t{v}")
    return 0


def cmd_bound(args) -> int:
    rows = []
    for d in args.d:
        for k in args.k:
            p = bounds.BoundParams(d=d, k=k, c=args.c, alpha0=args.alpha0)
            for n in args.n:
                for m in args.m:
                    rows.append(bounds.success_bound(p, n, m, args.epsilon))
    _print_rows(rows)
    if args.csv:
        dicts = [asdict(r) for r in rows]
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, list(dicts[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(dicts)
    return 0


def cmd_twosat(args) -> int:
    res = twosat.decide(twosat.read_twosat(args.file))
    if res.satisfiable:
        print("SAT")
        print(" ".join(str(v + 1 if b else -(v + 1)) for v, b in enumerate(res.assignment)) + " 0")
        return 10
    print("UNSAT")
    return 20


def cmd_advantage(args) -> int:
    m = _resolve_m(args, args.n)
    cfg = GenConfig(args.n, m, 2, args.seed, args.balance)
    est = estimate_advantage(baseline(args.predictor, args.seed), cfg, args.samples, threads=args.threads)
    lo, hi = est.advantage_ci
    print(f"{est.name}: accuracy {est.accuracy:.4f} over {est.samples} samples; "
          f"advantage {est.advantage:.4f} (99% CI [{lo:.4f}, {hi:.4f}])")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bal3xor", description="Balanced 3XOR / 3SAT instance toolkit")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate balanced 3XOR instances as JSON lines")
    _add_common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("translate", help="translate a JSON-lines batch into DIMACS files")
    p.add_argument("input", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("verify", help="verify a directory of exported CNFs")
    p.add_argument("directory", type=Path)
    p.add_argument("--out", type=Path)
    p.add_argument("--bruteforce-max-n", type=int, default=20)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep-diag", help="co-rank / SAT-fraction diagnostics per n")
    _add_common(p, many_n=True)
    p.set_defaults(func=cmd_sweep_diag)

    p = sub.add_parser("sweep-rank", help="full-rank frequency per (n, t)")
    _add_common(p, many_n=True)
    p.set_defaults(func=cmd_sweep_rank)

    p = sub.add_parser("export", help="generate, translate, write and verify a bundle")
    _add_common(p, many_n=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("project", help="survivor-projection free-support sweep")
    _add_common(p)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--gamma0", type=float)
    p.add_argument("--max-rejections", type=int, default=64)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("bound", help="evaluate the size-aware success bound over a grid")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--m", type=int, nargs="+", required=True)
    p.add_argument("--d", type=int, nargs="+", default=[2])
    p.add_argument("--k", type=float, nargs="+", default=[1.0])
    p.add_argument("--c", type=float, default=1.0 / 3.0)
    p.add_argument("--alpha0", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--csv", type=Path)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("twosat", help="decide a 2CNF DIMACS file (exit 10 SAT / 20 UNSAT)")
    p.add_argument("file", type=Path)
    p.set_defaults(func=cmd_twosat)

    p = sub.add_parser("advantage", help="Monte-Carlo advantage of a baseline predictor")
    _add_common(p)
    p.add_argument("--predictor", choices=BASELINES, default="rhs-parity")
    p.add_argument("--samples", type=int, default=10_000)
    p.set_defaults(func=cmd_advantage)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
