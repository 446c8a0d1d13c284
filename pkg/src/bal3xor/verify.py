"""End-to-end checks on exported CNF files.

Labels are always recomputed from file content: the CNF is inverted back to
its XOR clauses and the system is tested for solvability over GF(2). Header
comments, when present, are only cross-checked. Small instances are also
brute-forced as CNFs, independently of any linear algebra.
"""

from __future__ import annotations

import csv
import logging
import time
import warnings
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterator, Optional

import numpy as np

from .sampler import XorSkeleton, recheck_label
from .translate import CnfFormula, PathLike, invert, read_dimacs

log = logging.getLogger(__name__)

BRUTE_FORCE_LIMIT = 24
_CHUNK = 1 << 20


class SizeGuardError(ValueError):
    pass


def recompute_label(skeleton: XorSkeleton) -> int:
    """1 iff ``A x = b`` is solvable, computed as ``[H(A) b == 0]``."""
    return recheck_label(skeleton)[0]


def _surviving_assignments(psi: CnfFormula, limit: int) -> Iterator[np.ndarray]:
    if psi.n > limit:
        raise SizeGuardError(f"brute force refused: n={psi.n} exceeds the guard of {limit}")
    total = 1 << psi.n
    for start in range(0, total, _CHUNK):
        cand = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        for c in psi.clauses:
            keep = np.zeros(cand.shape, dtype=bool)
            for v, s in zip(c.vars, c.signs):
                keep |= ((cand >> v) & 1) != s
            cand = cand[keep]
            if not cand.size:
                break
        yield cand


def brute_force_sat(psi: CnfFormula, limit: int = BRUTE_FORCE_LIMIT) -> int:
    """Exhaustive search over all ``2**n`` assignments, stopping at the first model."""
    for models in _surviving_assignments(psi, limit):
        if models.size:
            return 1
    return 0


def count_models(psi: CnfFormula, limit: int = BRUTE_FORCE_LIMIT) -> int:
    return sum(int(m.size) for m in _surviving_assignments(psi, limit))


@dataclass
class VerifyRecord:
    file: str
    n: Optional[int]
    m: Optional[int]
    m_prime: Optional[int]
    label_recorded: Optional[int]
    label_recomputed: Optional[int]
    sat_bruteforce: Optional[int]
    consistent: bool
    verify_time_s: float
    error: Optional[str] = None


REPORT_COLUMNS = [f.name for f in fields(VerifyRecord) if f.name != "error"]


def _header_mismatch(psi: CnfFormula, skeleton: XorSkeleton) -> Optional[str]:
    expected = {"n": psi.n, "m": skeleton.m, "m_prime": psi.m_prime}
    for key, actual in expected.items():
        if key in psi.meta and psi.meta[key] != str(actual):
            return f"header {key}={psi.meta[key]} but content has {actual}"
    return None


def verify_file(path: PathLike, bruteforce_max_n: int = 20) -> VerifyRecord:
    """Verify one file. Failures become inconsistent records, never exceptions."""
    path = Path(path)
    t0 = time.perf_counter()
    n = m = m_prime = recorded = recomputed = brute = None
    error = None
    try:
        psi = read_dimacs(path)
        n, m_prime = psi.n, psi.m_prime
        if "label" in psi.meta:
            recorded = int(psi.meta["label"])
        skeleton = invert(psi)
        m = skeleton.m
        recomputed = recompute_label(skeleton)
        if n <= min(bruteforce_max_n, BRUTE_FORCE_LIMIT):
            brute = brute_force_sat(psi)
        error = _header_mismatch(psi, skeleton)
    except (ValueError, OSError, UnicodeDecodeError) as exc:
        error = f"{type(exc).__name__}: {exc}"
    consistent = (
        error is None
        and recomputed is not None
        and (recorded is None or recorded == recomputed)
        and (brute is None or brute == recomputed)
    )
    if not consistent:
        log.warning("%s: inconsistent (%s)", path.name, error or "label mismatch")
    return VerifyRecord(path.name, n, m, m_prime, recorded, recomputed, brute, consistent,
                        time.perf_counter() - t0, error)


@dataclass
class VerifyReport:
    records: list[VerifyRecord]

    @property
    def n_files(self) -> int:
        return len(self.records)

    @property
    def n_consistent(self) -> int:
        return sum(r.consistent for r in self.records)

    @property
    def vacuous(self) -> bool:
        return not self.records

    @property
    def match_rate(self) -> Optional[float]:
        return None if self.vacuous else self.n_consistent / self.n_files

    @property
    def exit_status(self) -> int:
        return 0 if self.vacuous or self.n_consistent == self.n_files else 1

    def summary_line(self) -> str:
        if self.vacuous:
            return "match rate: n/a (no CNF files found; vacuous)"
        return f"match rate: {self.match_rate:.3f} ({self.n_consistent}/{self.n_files} consistent)"

    def times_per_n(self) -> "OrderedDict[int, tuple[int, float]]":
        agg: dict[int, list] = {}
        for r in self.records:
            if r.n is None:
                continue
            entry = agg.setdefault(r.n, [0, 0.0])
            entry[0] += 1
            entry[1] += r.verify_time_s
        return OrderedDict((n, tuple(agg[n])) for n in sorted(agg))


def verify_directory(path: PathLike, bruteforce_max_n: int = 20, threads: int = 1) -> VerifyReport:
    """Verify every ``*.cnf`` in ``path``; records are sorted by file name."""
    files = sorted(Path(path).glob("*.cnf"), key=lambda p: p.name)
    if not files:
        warnings.warn(f"no CNF files in {path}; match rate is vacuous", RuntimeWarning, stacklevel=2)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(lambda f: verify_file(f, bruteforce_max_n), files))
    else:
        records = [verify_file(f, bruteforce_max_n) for f in files]
    return VerifyReport(records)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def write_verify_report(report: VerifyReport, out_dir: PathLike) -> None:
    """``verify_report.csv`` (per file) and ``verify_times.csv`` (per n)."""
    out_dir = Path(out_dir)
    with open(out_dir / "verify_report.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for r in report.records:
            row = asdict(r)
            w.writerow([_fmt(row[c]) for c in REPORT_COLUMNS])
    with open(out_dir / "verify_times.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "reps", "verify_time_s"])
        for n, (count, secs) in report.times_per_n().items():
            w.writerow([n, count, f"{secs:.3f}"])
