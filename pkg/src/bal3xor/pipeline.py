"""Sweeps and the export bundle.

Output layout under ``out_dir``::

    cnf/bal3xor_n{n}_rep{r:03d}.cnf
    cnf_sha256.csv  gen_times.csv  verify_times.csv  verify_report.csv
    summary.csv  report_3sat_bal.md
    rank_sweep.csv  report_3xor_rank.md      (rank sweep)
    summary.csv  report_3xor_diag.md         (diagnostics)

Timing columns are wall-clock and differ between runs; everything else is a
pure function of the master seed.
"""

from __future__ import annotations

import csv
import hashlib
import logging
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import gf2
from .gf2 import GF2Matrix
from .sampler import GenConfig, XorInstance, _sample_triples, generate_rep, label_sequence, recheck_label
from .streams import Stream, child_rng
from .translate import cnf_file_name, encoding_length, translate, write_dimacs
from .verify import VerifyReport, verify_directory, write_verify_report

log = logging.getLogger(__name__)

MODES = ("diagnostics", "rank-sweep", "full-export")


@dataclass(frozen=True)
class GridPoint:
    """One sweep cell; ``m`` comes from ``t`` (``m = n + t``) or ``gamma``."""

    n: int
    reps: int
    t: Optional[int] = None
    gamma: Optional[float] = None

    def __post_init__(self):
        if (self.t is None) == (self.gamma is None):
            raise ValueError("give exactly one of t or gamma")
        if self.reps < 1:
            raise ValueError(f"reps must be positive, got {self.reps}")

    @property
    def m(self) -> int:
        if self.t is not None:
            return self.n + self.t
        return int(round((1.0 + self.gamma) * self.n))

    @property
    def edge_case(self) -> bool:
        """``m = n + 1`` lies outside the fixed-gamma window."""
        return self.m == self.n + 1


@dataclass
class SweepConfig:
    grid: tuple[GridPoint, ...]
    master_seed: int = 0
    out_dir: Optional[Path] = None
    mode: str = "full-export"
    balance_mode: str = "exact"
    threads: int = 1
    bruteforce_max_n: int = 20

    def __post_init__(self):
        self.grid = tuple(self.grid)
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        for p in self.grid:
            if p.m <= p.n:
                raise ValueError(f"grid point n={p.n} has m={p.m} <= n")
        if self.out_dir is not None:
            self.out_dir = Path(self.out_dir)

    @classmethod
    def from_lists(cls, ns: Sequence[int], reps: int, ts: Optional[Sequence[int]] = None,
                   gammas: Optional[Sequence[float]] = None, **kw) -> "SweepConfig":
        if ts is None and gammas is None:
            ts = (1,)
        grid = [GridPoint(n, reps, t=t) for n in ns for t in (ts or ())]
        grid += [GridPoint(n, reps, gamma=g) for n in ns for g in (gammas or ())]
        return cls(grid=tuple(grid), **kw)

    def gen_config(self, point: GridPoint) -> GenConfig:
        balance = self.balance_mode
        if balance == "exact" and point.reps % 2:
            warnings.warn(f"n={point.n}: odd reps={point.reps}; falling back to expected balance",
                          RuntimeWarning, stacklevel=3)
            balance = "expected"
        return GenConfig(point.n, point.m, point.reps, self.master_seed, balance)


@dataclass
class SweepRow:
    n: int
    m: int
    reps: int
    mean_tprime: float
    median_tprime: float
    q90_tprime: float
    sat_frac: float
    frac_full_rank: float
    gen_time_s: float
    verify_time_s: float
    edge_case: bool = False


SUMMARY_COLUMNS = [f.name for f in fields(SweepRow) if f.name != "edge_case"]


def _order_stat(values: np.ndarray, q: float) -> float:
    return float(np.quantile(values, q, method="inverted_cdf"))


def summarize(point: GridPoint, batch: Sequence[XorInstance], gen_time: float, verify_time: float) -> SweepRow:
    if len(batch) < 2:
        warnings.warn(f"n={point.n}: {len(batch)} rep(s); statistics are degenerate", RuntimeWarning, stacklevel=2)
    tp = np.array([x.corank for x in batch], dtype=float)
    full = np.array([x.corank == x.m - x.n for x in batch], dtype=float)
    return SweepRow(
        n=point.n, m=point.m, reps=len(batch), mean_tprime=float(tp.mean()),
        median_tprime=_order_stat(tp, 0.5), q90_tprime=_order_stat(tp, 0.9),
        sat_frac=float(np.mean([x.label for x in batch])), frac_full_rank=float(full.mean()),
        gen_time_s=gen_time, verify_time_s=verify_time, edge_case=point.edge_case)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return f"{v:.3f}"
    return str(v)


def write_csv(path: Path, columns: Sequence[str], rows: Sequence[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in columns])


def _md_table(columns: Sequence[str], rows: Sequence[dict]) -> str:
    lines = ["| " + " | ".join(columns) + " |", "|" + "---|" * len(columns)]
    lines += ["| " + " | ".join(_fmt(r[c]) for c in columns) + " |" for r in rows]
    return "\n".join(lines)


def _ensure_out(cfg: SweepConfig) -> Optional[Path]:
    if cfg.out_dir is None:
        return None
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    return cfg.out_dir


def _map(cfg: SweepConfig, fn, items):
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


# --- diagnostics ------------------------------------------------------------

def run_diagnostics(cfg: SweepConfig) -> list[SweepRow]:
    """Per-cell co-rank statistics and SAT fraction; labels are rechecked from ``(A, b)``."""
    rows = []
    for point in cfg.grid:
        if point.edge_case:
            log.warning("n=%d, m=n+1 is outside the fixed-gamma balanced window", point.n)
        gcfg = cfg.gen_config(point)
        labels = label_sequence(gcfg)
        t0 = time.perf_counter()
        batch = _map(cfg, lambda r: generate_rep(gcfg, r, labels[r]), range(gcfg.reps))
        gen_time = time.perf_counter() - t0
        t0 = time.perf_counter()
        for inst in batch:
            label, hb = recheck_label(inst)
            if label != inst.label or hb != inst.u:
                raise AssertionError(f"label recheck failed for n={inst.n} rep={inst.rep}")
        rows.append(summarize(point, batch, gen_time, time.perf_counter() - t0))
    out = _ensure_out(cfg)
    if out is not None:
        dicts = [asdict(r) for r in rows]
        write_csv(out / "summary.csv", SUMMARY_COLUMNS, dicts)
        (out / "report_3xor_diag.md").write_text(_diag_markdown(cfg, dicts))
    return rows


def _diag_markdown(cfg: SweepConfig, rows: list[dict]) -> str:
    cols = ["n", "m", "reps", "mean_tprime", "median_tprime", "q90_tprime", "sat_frac"]
    parts = ["# Balanced 3XOR diagnostics", "",
             f"master seed: {cfg.master_seed}; balance: {cfg.balance_mode}", "",
             _md_table(cols, rows), ""]
    if any(r["edge_case"] for r in rows):
        parts += ["Rows with m = n+1 use the edge case outside the fixed-gamma balanced "
                  "window; co-rank grows slowly there.", ""]
    return "\n".join(parts)


# --- rank sweep -------------------------------------------------------------

RANK_COLUMNS = ["n", "t", "m", "N", "reps", "successes", "frac_full_rank"]


@dataclass
class RankRow:
    n: int
    t: int
    m: int
    N: int
    reps: int
    successes: int
    frac_full_rank: float


def full_rank_trial(seed: int, n: int, m: int, rep: int) -> bool:
    a = GF2Matrix.from_supports(_sample_triples(n, m, child_rng(seed, Stream.INSTANCE, n, m, rep)), n)
    return gf2.rank(a) == n


def run_rank_sweep(cfg: SweepConfig) -> list[RankRow]:
    """Count incidence matrices with ``rank(A) = n`` per ``(n, t)`` cell."""
    rows = []
    for point in cfg.grid:
        hits = _map(cfg, lambda r: full_rank_trial(cfg.master_seed, point.n, point.m, r), range(point.reps))
        k = int(sum(hits))
        rows.append(RankRow(point.n, point.m - point.n, point.m, encoding_length(point.n, point.m),
                            point.reps, k, k / point.reps))
    out = _ensure_out(cfg)
    if out is not None:
        dicts = [asdict(r) for r in rows]
        write_csv(out / "rank_sweep.csv", RANK_COLUMNS, dicts)
        (out / "report_3xor_rank.md").write_text(
            "\n".join(["# Rank sweep on balanced 3XOR incidence matrices (m = n+t)", "",
                       f"master seed: {cfg.master_seed}; N = m * ceil(log2 n)", "",
                       _md_table(RANK_COLUMNS, dicts), ""]))
    return rows


# --- full export ------------------------------------------------------------

@dataclass
class ExportResult:
    out_dir: Path
    rows: list[SweepRow]
    verify: VerifyReport
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.verify.exit_status == 0 and not self.verify.vacuous


def _export_rep(gcfg: GenConfig, rep: int, label: int, cnf_dir: Path):
    t0 = time.perf_counter()
    inst = generate_rep(gcfg, rep, label)
    try:
        write_dimacs(translate(inst), cnf_dir / cnf_file_name(inst.n, rep))
        err = None
    except OSError as exc:
        err = f"{cnf_file_name(inst.n, rep)}: {exc}"
    return inst, time.perf_counter() - t0, err


def sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_full_export(cfg: SweepConfig) -> ExportResult:
    """Generate, translate and write every rep, then verify the whole directory."""
    if cfg.out_dir is None:
        raise ValueError("full export needs an output directory")
    out = _ensure_out(cfg)
    cnf_dir = out / "cnf"
    cnf_dir.mkdir(exist_ok=True)

    failures: list[str] = []
    per_point = []
    for point in cfg.grid:
        if point.edge_case:
            log.warning("n=%d, m=n+1 is outside the fixed-gamma balanced window", point.n)
        gcfg = cfg.gen_config(point)
        labels = label_sequence(gcfg)
        results = _map(cfg, lambda r: _export_rep(gcfg, r, labels[r], cnf_dir), range(gcfg.reps))
        failures += [err for _, _, err in results if err]
        per_point.append((point, [inst for inst, _, _ in results], sum(dt for _, dt, _ in results)))

    report = verify_directory(cnf_dir, cfg.bruteforce_max_n, threads=cfg.threads)
    write_verify_report(report, out)
    vtimes = report.times_per_n()

    rows = [summarize(point, batch, gen_time, vtimes.get(point.n, (0, 0.0))[1])
            for point, batch, gen_time in per_point]

    files = sorted(cnf_dir.glob("*.cnf"), key=lambda p: p.name)
    with open(out / "cnf_sha256.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["file", "sha256"])
        for f in files:
            w.writerow([f.name, sha256_file(f)])

    gen_rows: dict[int, list] = {}
    for point, batch, gen_time in per_point:
        entry = gen_rows.setdefault(point.n, [0, 0.0])
        entry[0] += len(batch)
        entry[1] += gen_time
    write_csv(out / "gen_times.csv", ["n", "reps", "gen_time_s"],
              [dict(n=n, reps=c, gen_time_s=s) for n, (c, s) in sorted(gen_rows.items())])
    write_csv(out / "summary.csv", SUMMARY_COLUMNS, [asdict(r) for r in rows])
    (out / "report_3sat_bal.md").write_text(_export_markdown(cfg, rows, report, failures))
    if failures:
        log.error("%d file(s) failed to export", len(failures))
    return ExportResult(out, rows, report, failures)


def _export_markdown(cfg: SweepConfig, rows: list[SweepRow], report: VerifyReport, failures: list[str]) -> str:
    dicts = [asdict(r) for r in rows]
    parts = [
        "# Balanced 3XOR -> 3SAT export", "",
        f"master seed: {cfg.master_seed}; balance: {cfg.balance_mode}; "
        "each XOR clause becomes 4 canonical 3-clauses (m' = 4m), no auxiliary variables.", "",
        "## Verification", "", report.summary_line(), "",
        "## Per-n summary", "", _md_table(SUMMARY_COLUMNS, dicts), "",
        "## Runtimes (seconds, summed over reps)", "",
        _md_table(["n", "reps", "gen_time_s", "verify_time_s"], dicts), "",
    ]
    if any(r.edge_case for r in rows):
        parts += ["Rows with m = n+1 use the edge case outside the fixed-gamma balanced window.", ""]
    if failures:
        parts += ["## Export failures", ""] + [f"- {f}" for f in failures] + [""]
    return "\n".join(parts)


# --- co-rank scaling ----------------------------------------------------------

def corank_scaling(ns: Sequence[int], gamma: float, reps: int, master_seed: int = 0) -> list[dict]:
    """Mean ``t'/n`` per ``n`` at ``m = (1 + gamma) n``; flat in ``n`` when ``t' = Theta(n)``."""
    out = []
    for n in ns:
        m = int(round((1.0 + gamma) * n))
        tps = [m - gf2.rank(GF2Matrix.from_supports(
            _sample_triples(n, m, child_rng(master_seed, Stream.AUX, n, m, r)), n)) for r in range(reps)]
        out.append(dict(n=n, m=m, reps=reps, mean_tprime=float(np.mean(tps)),
                        tprime_over_n=float(np.mean(tps)) / n))
    return out
