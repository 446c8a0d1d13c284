"""Balanced random 3XOR instances.

An instance is a system ``A x = b`` over GF(2) with ``m`` equations on ``n``
variables, each equation touching exactly three distinct variables. With
``H = left_kernel_basis(A)`` (``t' = m - rank(A)`` rows) the instance is
satisfiable iff ``H b = 0``. Sampling fixes the target ``u = H b`` first
(zero with probability 1/2, otherwise uniform nonzero) and then draws ``b``
uniformly from the coset ``{b : H b = u}``, so the label is ``[u == 0]``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import gf2
from .gf2 import GF2Matrix, GF2Vector
from .streams import Stream, child_rng, random_bits

BALANCE_MODES = ("exact", "expected")


class InvalidConfigError(ValueError):
    pass


@dataclass(frozen=True)
class XorClause:
    vars: tuple[int, int, int]
    rhs: int

    def __post_init__(self):
        i, j, k = self.vars
        if not 0 <= i < j < k:
            raise ValueError(f"clause variables must be distinct, ascending and non-negative: {self.vars}")
        if self.rhs not in (0, 1):
            raise ValueError(f"rhs must be 0 or 1, got {self.rhs}")


@dataclass(frozen=True)
class XorSkeleton:
    """Clauses and right-hand sides only, as recovered from a CNF."""

    n: int
    clauses: tuple[XorClause, ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        for c in self.clauses:
            if c.vars[2] >= self.n:
                raise ValueError(f"clause {c.vars} references a variable >= n={self.n}")

    @property
    def m(self) -> int:
        return len(self.clauses)

    def incidence(self) -> GF2Matrix:
        return GF2Matrix.from_supports([c.vars for c in self.clauses], self.n)

    def rhs(self) -> GF2Vector:
        return GF2Vector.from_bits(np.fromiter((c.rhs for c in self.clauses), dtype=np.uint8, count=self.m))

    def skeleton(self) -> "XorSkeleton":
        return XorSkeleton(self.n, self.clauses)


@dataclass(frozen=True)
class XorInstance(XorSkeleton):
    corank: int = 0
    u: GF2Vector = field(default_factory=lambda: GF2Vector.zeros(0))
    label: int = 1
    seed: Optional[int] = None
    rep: Optional[int] = None

    def __post_init__(self):
        super().__post_init__()
        if self.u.length != self.corank:
            raise ValueError(f"u has length {self.u.length}, expected t'={self.corank}")
        if self.label != int(self.u.is_zero()):
            raise ValueError("label must equal [u == 0]")


@dataclass(frozen=True)
class GenConfig:
    n: int
    m: int
    reps: int
    master_seed: int = 0
    balance_mode: str = "exact"

    def __post_init__(self):
        if self.n < 3:
            raise InvalidConfigError(f"n must be >= 3, got {self.n}")
        if self.m <= self.n:
            raise InvalidConfigError(f"need m > n so that t' >= 1 (n={self.n}, m={self.m})")
        if self.reps < 1:
            raise InvalidConfigError(f"reps must be positive, got {self.reps}")
        if self.balance_mode not in BALANCE_MODES:
            raise InvalidConfigError(f"balance_mode must be one of {BALANCE_MODES}, got {self.balance_mode!r}")
        if self.balance_mode == "exact" and self.reps % 2:
            raise InvalidConfigError(f"exact balance needs an even number of reps, got {self.reps}")

    @classmethod
    def from_gamma(cls, n: int, gamma: float, reps: int, **kw) -> "GenConfig":
        """Config with ``m = round((1 + gamma) n)``."""
        return cls(n=n, m=int(round((1.0 + gamma) * n)), reps=reps, **kw)


def _sample_triples(n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """``m`` independent uniform 3-subsets of ``range(n)``, sorted within rows."""
    if n < 3:
        raise InvalidConfigError(f"n must be >= 3 to place three distinct variables, got {n}")
    out = np.empty((m, 3), dtype=np.int64)
    filled = 0
    while filled < m:
        draw = rng.integers(0, n, size=(m - filled, 3))
        ok = (draw[:, 0] != draw[:, 1]) & (draw[:, 0] != draw[:, 2]) & (draw[:, 1] != draw[:, 2])
        good = draw[ok]
        out[filled : filled + len(good)] = good
        filled += len(good)
    out.sort(axis=1)
    return out


def sample_incidence(n: int, m: int, rng: np.random.Generator) -> GF2Matrix:
    """``m x n`` incidence matrix with one uniform 3-subset per row.

    Rows are independent, so duplicate rows can occur.
    """
    return GF2Matrix.from_supports(_sample_triples(n, m, rng), n)


def sample_target_u(tprime: int, label: int, rng: np.random.Generator) -> GF2Vector:
    """Zero vector for ``label=1``; uniform over the nonzero vectors for ``label=0``."""
    if label not in (0, 1):
        raise ValueError(f"label must be 0 or 1, got {label}")
    if label == 1:
        return GF2Vector.zeros(tprime)
    if tprime < 1:
        raise ValueError("label 0 is impossible when t' = 0 (every instance is satisfiable)")
    return GF2Vector.from_bits(random_bits(rng, tprime, nonzero=True))


def generate_instance(n: int, m: int, label: int, rng: np.random.Generator, *,
                      seed: Optional[int] = None, rep: Optional[int] = None) -> XorInstance:
    """One instance with prescribed label.

    Draws the incidence matrix, computes its left kernel ``H``, samples ``u``
    for the label and finally ``b`` uniformly on ``{b : H b = u}``.
    """
    if m <= n:
        raise InvalidConfigError(f"need m > n, got n={n}, m={m}")
    triples = _sample_triples(n, m, rng)
    a = GF2Matrix.from_supports(triples, n)
    h = gf2.left_kernel_basis(a)
    u = sample_target_u(h.nrows, label, rng)
    b = gf2.sample_coset_uniform(h, u, rng).to_dense()
    clauses = tuple(XorClause(tuple(int(v) for v in t), int(r)) for t, r in zip(triples, b))
    return XorInstance(n=n, clauses=clauses, corank=h.nrows, u=u, label=label, seed=seed, rep=rep)


def label_sequence(cfg: GenConfig) -> np.ndarray:
    """Labels for reps ``0..reps-1``, drawn on the label stream only.

    Exact mode permutes the template ``[1]*(reps/2) + [0]*(reps/2)``; expected
    mode flips an independent fair coin per rep.
    """
    rng = child_rng(cfg.master_seed, Stream.LABELS, cfg.n, cfg.m)
    if cfg.balance_mode == "exact":
        half = cfg.reps // 2
        template = np.array([1] * half + [0] * half, dtype=np.uint8)
        return template[rng.permutation(cfg.reps)]
    return rng.integers(0, 2, size=cfg.reps, dtype=np.uint8)


def generate_rep(cfg: GenConfig, rep: int, label: int) -> XorInstance:
    """Rep ``rep`` of ``cfg``, drawn on the stream keyed by ``(seed, n, m, rep)``."""
    rng = child_rng(cfg.master_seed, Stream.INSTANCE, cfg.n, cfg.m, rep)
    return generate_instance(cfg.n, cfg.m, int(label), rng, seed=cfg.master_seed, rep=rep)


def generate_batch(cfg: GenConfig, threads: int = 1) -> list[XorInstance]:
    """All reps of ``cfg``, ordered by rep index regardless of ``threads``."""
    labels = label_sequence(cfg)
    reps = range(cfg.reps)
    if threads <= 1:
        return [generate_rep(cfg, r, labels[r]) for r in reps]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda r: generate_rep(cfg, r, labels[r]), reps))


def recheck_label(inst: XorSkeleton) -> tuple[int, GF2Vector]:
    """Recompute ``(label, H b)`` from clauses and rhs alone."""
    h = gf2.left_kernel_basis(inst.incidence())
    hb = h @ inst.rhs()
    return int(hb.is_zero()), hb


def corank(triples: Sequence[Sequence[int]], n: int) -> int:
    a = GF2Matrix.from_supports(triples, n)
    return a.nrows - gf2.rank(a)


def instance_to_record(inst: XorInstance) -> dict:
    """JSON-ready dict; ``u`` is a bit string, clauses are ``[i, j, k, rhs]``."""
    return {
        "n": inst.n, "m": inst.m, "seed": inst.seed, "rep": inst.rep, "label": inst.label,
        "tprime": inst.corank, "u": "".join(map(str, inst.u.to_dense())),
        "clauses": [[*c.vars, c.rhs] for c in inst.clauses],
    }


def instance_from_record(rec: dict) -> XorInstance:
    clauses = tuple(XorClause((int(i), int(j), int(k)), int(r)) for i, j, k, r in rec["clauses"])
    u = GF2Vector.from_bits([int(ch) for ch in rec["u"]])
    return XorInstance(n=int(rec["n"]), clauses=clauses, corank=int(rec["tprime"]), u=u,
                       label=int(rec["label"]), seed=rec.get("seed"), rep=rec.get("rep"))
