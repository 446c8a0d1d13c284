"""Projection of an AND of parities onto a single surviving parity.

Given a full-row-rank ``H`` (``t' x m``) and a target ``u``, a uniform nonzero
``alpha`` selects the survivor ``alpha^T H``. The row transform ``T`` puts the
survivor first; rows ``2..t'`` of ``T H`` are eliminated over a pivot set
``S`` chosen greedily along a random column permutation, which pins ``b_S`` as
an affine function of the free coordinates ``b_F``. A permutation is rejected
while the survivor has no support in ``F``.

Two survivor rows are tracked. ``free_support`` and acceptance use the raw
survivor ``(T H)_1``. Evaluation on ``b_F`` uses the survivor reduced against
the pivot rows, whose ``S`` entries are zero; on the fiber
``<reduced_F, b_F> + c = (T u)_1``, where ``c`` collects the pivot-row
constants folded in during the reduction.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import gf2
from .gf2 import GF2Matrix, GF2Vector
from .sampler import GenConfig, generate_rep
from .streams import SeedLike, Stream, as_generator, child_rng, random_bits
from .validation import as_gf2_matrix, check_bit_matrix, check_bit_vector

MAX_REJECTIONS = 64
ENUMERATION_LIMIT = 22


class SizeGuardError(ValueError):
    pass


def pick_survivor(h: GF2Matrix, rng: np.random.Generator) -> tuple[GF2Vector, GF2Matrix, GF2Matrix]:
    """Draw a uniform nonzero ``alpha`` and an invertible ``T`` with first row ``alpha``.

    ``T`` completes ``alpha`` greedily with unit vectors ``e_0, e_1, ...``; the
    only one skipped is ``e_j`` for ``j`` the last index in ``supp(alpha)``.
    Returns ``(alpha, T, T @ h)``.
    """
    t = h.nrows
    if t == 0:
        raise ValueError("nothing to project: h has no rows")
    bits = random_bits(rng, t, nonzero=True)
    j = int(np.flatnonzero(bits)[-1])
    dense = np.zeros((t, t), dtype=np.uint8)
    dense[0] = bits
    others = [i for i in range(t) if i != j]
    dense[np.arange(1, t), others] = 1
    transform = GF2Matrix.from_dense(dense)
    return GF2Vector.from_bits(bits), transform, transform @ h


@dataclass
class ProjectionOutcome:
    tprime: int
    m: int
    alpha: GF2Vector
    transform: GF2Matrix
    h_prime: GF2Matrix
    u_prime: GF2Vector
    survivor_support: tuple[int, ...]
    pivot_set: tuple[int, ...]
    free_set: tuple[int, ...]
    free_support: int
    accepted: bool
    rejections: int
    delta_upper: int
    delta_forced: int
    coloop_count: int
    affine_offset: int
    reduced_survivor: GF2Vector
    pivot_rows: GF2Matrix = field(repr=False)
    pivot_rhs: np.ndarray = field(repr=False)
    diagnostic: Optional[str] = None

    @property
    def survivor_weight(self) -> int:
        return len(self.survivor_support)

    @property
    def image_rhs(self) -> int:
        """Right-hand side of the projected constraint on ``b_F``."""
        return self.u_prime[0] ^ self.affine_offset

    def restrict(self, b: np.ndarray) -> np.ndarray:
        """``b_F`` for one or many points (last axis is the column axis)."""
        return np.asarray(b)[..., list(self.free_set)]

    def lift(self, b_free: np.ndarray) -> np.ndarray:
        """Full ``b`` from ``b_F`` with ``b_S`` pinned by the pivot rows."""
        b_free = np.atleast_2d(np.asarray(b_free, dtype=np.uint8))
        out = np.zeros((b_free.shape[0], self.m), dtype=np.uint8)
        out[:, list(self.free_set)] = b_free
        if self.pivot_set:
            rows = self.pivot_rows.to_dense()
            dep = (out.astype(np.int64) @ rows.T.astype(np.int64)) & 1
            out[:, list(self.pivot_set)] = dep ^ self.pivot_rhs[None, :]
        return out

    def survivor_value(self, b_free: np.ndarray) -> np.ndarray:
        """``<reduced survivor on F, b_F> + c`` for each row of ``b_free``."""
        b_free = np.atleast_2d(np.asarray(b_free, dtype=np.int64))
        g = self.reduced_survivor.to_dense()[list(self.free_set)].astype(np.int64)
        return ((b_free @ g) & 1) ^ self.affine_offset


def _eliminate_rest(rest: GF2Matrix, u_rest: GF2Vector, order: Sequence[int]):
    """Reduce ``[rest | u_rest]`` scanning ``order``; returns (pivots, rows, rhs)."""
    nw = rest.words.shape[1]
    aug = np.hstack([rest.words, u_rest.to_dense().astype(np.uint64).reshape(-1, 1)])
    pivots = gf2._eliminate(aug, order)
    r = len(pivots)
    return pivots, GF2Matrix(r, rest.ncols, aug[:r, :nw]), aug[:r, nw].astype(np.uint8)


def delta_statistic(h_prime: GF2Matrix, survivor_support: Sequence[int],
                    pivot_set: Optional[Sequence[int]] = None):
    """``|coloops(rows 2..t') ∩ supp(survivor)|``.

    With ``pivot_set`` also returns how many of those columns landed in it
    (always all of them, since coloops lie in every basis).
    """
    if h_prime.nrows < 2:
        raise ValueError("need at least two rows")
    rest = h_prime.select_rows(range(1, h_prime.nrows))
    hits = set(gf2.coloops(rest)) & set(int(c) for c in survivor_support)
    if pivot_set is None:
        return len(hits)
    return len(hits), len(hits & set(int(c) for c in pivot_set))


def project(h: GF2Matrix, u: GF2Vector, rng: np.random.Generator,
            max_rejections: int = MAX_REJECTIONS, *,
            perm_rng: Optional[np.random.Generator] = None) -> ProjectionOutcome:
    """Run the survivor projection on ``(h, u)``.

    ``rng`` draws ``alpha``; ``perm_rng`` (default ``rng``) draws the column
    permutations, at most ``max_rejections`` of them. ``h`` must have full
    row rank, which also guarantees that some survivor-support column is not
    a coloop of the other rows, so every draw has a chance to succeed. On
    exhaustion the outcome comes back unaccepted with a diagnostic.
    """
    t, m = h.shape
    if t == 0:
        raise ValueError("nothing to project: t' = 0")
    if u.length != t:
        raise ValueError(f"u has length {u.length}, expected {t}")
    if gf2.rank(h) != t:
        raise ValueError("h must have full row rank")
    if gf2.solve_affine(h, u) is None:
        raise gf2.EmptyFiberError("u is not in the image of h")
    perm_rng = rng if perm_rng is None else perm_rng

    alpha, transform, h_prime = pick_survivor(h, rng)
    u_prime = transform @ u
    survivor = h_prime.row(0)
    support = tuple(int(c) for c in survivor.support())
    rest = h_prime.select_rows(range(1, t))
    u_rest = GF2Vector.from_bits(u_prime.to_dense()[1:])

    common = dict(tprime=t, m=m, alpha=alpha, transform=transform, h_prime=h_prime,
                  u_prime=u_prime, survivor_support=support)

    if t == 1:
        return ProjectionOutcome(
            **common, pivot_set=(), free_set=tuple(range(m)), free_support=len(support),
            accepted=len(support) > 0, rejections=0, delta_upper=0, delta_forced=0,
            coloop_count=0, affine_offset=0, reduced_survivor=survivor,
            pivot_rows=GF2Matrix.zeros(0, m), pivot_rhs=np.zeros(0, dtype=np.uint8))

    rest_coloops = set(gf2.coloops(rest))
    delta_upper = len(rest_coloops & set(support))

    rejections = 0
    accepted = False
    for _ in range(max(max_rejections, 1)):
        order = perm_rng.permutation(m)
        pivots, pivot_rows, pivot_rhs = _eliminate_rest(rest, u_rest, order)
        in_s = set(pivots)
        free_support = sum(1 for c in support if c not in in_s)
        if free_support > 0:
            accepted = True
            break
        rejections += 1

    diagnostic = None
    if not accepted:
        diagnostic = (f"no acceptable permutation in {max_rejections} draws; "
                      f"{delta_upper} of {len(support)} survivor-support columns are coloops "
                      f"({len(rest_coloops)} coloops in rows 2..t')")

    # fold pivot rows into the survivor so its S entries vanish
    reduced = survivor.words.copy()
    offset = 0
    for i, s in enumerate(pivots):
        if survivor[s]:
            reduced ^= pivot_rows.words[i]
            offset ^= int(pivot_rhs[i])

    in_s = set(pivots)
    return ProjectionOutcome(
        **common, pivot_set=tuple(int(p) for p in pivots),
        free_set=tuple(c for c in range(m) if c not in in_s), free_support=free_support,
        accepted=accepted, rejections=rejections, delta_upper=delta_upper,
        delta_forced=len(rest_coloops & set(support) & in_s), coloop_count=len(rest_coloops),
        affine_offset=offset, reduced_survivor=GF2Vector(m, reduced),
        pivot_rows=pivot_rows, pivot_rhs=pivot_rhs, diagnostic=diagnostic)


def enumerate_fiber(h: GF2Matrix, u: GF2Vector, limit: int = ENUMERATION_LIMIT) -> np.ndarray:
    """All ``b`` with ``h b = u`` as integers (bit ``j`` is coordinate ``j``)."""
    if h.ncols > limit:
        raise SizeGuardError(f"fiber enumeration refused: m={h.ncols} exceeds the guard of {limit}")
    b0 = gf2.solve_affine(h, u)
    if b0 is None:
        return np.zeros(0, dtype=np.int64)
    points = np.array([b0.to_int()], dtype=np.int64)
    for v in gf2.right_kernel_basis(h).rows():
        points = np.concatenate([points, points ^ v.to_int()])
    return points


def _compress(points: np.ndarray, cols: Sequence[int]) -> np.ndarray:
    out = np.zeros_like(points)
    for j, c in enumerate(cols):
        out |= ((points >> c) & 1) << j
    return out


def measure_preservation_check(h: GF2Matrix, u: GF2Vector, outcome: ProjectionOutcome,
                               limit: int = ENUMERATION_LIMIT) -> Fraction:
    """Exact TV distance between the push-forward of the uniform fiber under
    ``b -> b_F`` and the uniform law on ``{b_F : <reduced_F, b_F> = image_rhs}``.
    """
    fiber = enumerate_fiber(h, u, limit)
    free = list(outcome.free_set)
    k = len(free)
    image = _compress(fiber, free)
    counts = np.bincount(image, minlength=1 << k).astype(np.int64)

    g = _compress(np.array([outcome.reduced_survivor.to_int()], dtype=np.int64), free)[0]
    ys = np.arange(1 << k, dtype=np.int64)
    target = (np.bitwise_count(ys & g) & 1) == outcome.image_rhs
    n_fiber, n_target = int(fiber.size), int(target.sum())
    if n_fiber == 0 or n_target == 0:
        return Fraction(1)
    diff = np.abs(counts * n_target - n_fiber * target.astype(np.int64)).sum()
    return Fraction(int(diff), 2 * n_fiber * n_target)


# --- sweep ------------------------------------------------------------------

SWEEP_COLUMNS = ["n", "m", "t_prime", "w_star", "free_support", "accepted",
                 "rejections", "delta_upper", "trial"]


@dataclass
class FreeSupportSummary:
    n: int
    m: int
    samples: int
    accept_rate: float
    mean_free_frac: float
    median_free_frac: float
    q10_free_frac: float
    mean_wstar_frac: float
    mean_delta: float
    averaging_bound: float
    mean_free_support: float
    gamma0: Optional[float] = None
    mass_above_threshold: Optional[float] = None


def projection_trial(cfg: GenConfig, trial: int, max_rejections: int = MAX_REJECTIONS):
    """Instance, alpha and permutation each from their own child stream."""
    inst = generate_rep(cfg, trial, trial % 2)
    h = gf2.left_kernel_basis(inst.incidence())
    outcome = project(h, inst.u, child_rng(cfg.master_seed, Stream.ALPHA, cfg.n, cfg.m, trial),
                      max_rejections, perm_rng=child_rng(cfg.master_seed, Stream.PERMUTATION, cfg.n, cfg.m, trial))
    return inst, outcome


def free_support_sweep(cfg: GenConfig, samples: int, gamma0: Optional[float] = None,
                       max_rejections: int = MAX_REJECTIONS,
                       out_dir: Optional[Path] = None) -> tuple[FreeSupportSummary, list[dict]]:
    """Empirical free-support distribution over ``samples`` independent trials."""
    rows = []
    for trial in range(samples):
        _, o = projection_trial(cfg, trial, max_rejections)
        rows.append(dict(n=cfg.n, m=cfg.m, t_prime=o.tprime, w_star=o.survivor_weight,
                         free_support=o.free_support, accepted=int(o.accepted),
                         rejections=o.rejections, delta_upper=o.delta_upper, trial=trial))
    m = cfg.m
    free = np.array([r["free_support"] for r in rows], dtype=float)
    wstar = np.array([r["w_star"] for r in rows], dtype=float)
    tp = np.array([r["t_prime"] for r in rows], dtype=float)
    delta = np.array([r["delta_upper"] for r in rows], dtype=float)
    keep = (1.0 - (tp - 1.0) / m)
    summary = FreeSupportSummary(
        n=cfg.n, m=m, samples=samples,
        accept_rate=float(np.mean([r["accepted"] for r in rows])),
        mean_free_frac=float(np.mean(free) / m), median_free_frac=float(np.median(free) / m),
        q10_free_frac=float(np.quantile(free, 0.1) / m), mean_wstar_frac=float(np.mean(wstar) / m),
        mean_delta=float(np.mean(delta)), averaging_bound=float(np.mean(keep * wstar) - np.mean(delta)),
        mean_free_support=float(np.mean(free)))
    if gamma0 is not None:
        summary.gamma0 = gamma0
        summary.mass_above_threshold = float(np.mean(free >= 0.5 * keep * gamma0 * m))
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "projection_sweep.csv", "w", newline="") as fh:
            w = csv.DictWriter(fh, SWEEP_COLUMNS, lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
    return summary, rows


class SurvivorProjection(TransformerMixin, BaseEstimator):
    """Estimator wrapper: ``fit`` draws the projection for a kernel matrix,
    ``transform`` maps fiber points ``b`` to ``b_F``, ``inverse_transform``
    lifts ``b_F`` back onto the fiber.
    """

    def __init__(self, max_rejections: int = MAX_REJECTIONS, random_state: SeedLike = None):
        self.max_rejections = max_rejections
        self.random_state = random_state

    def _streams(self):
        if self.random_state is None or isinstance(self.random_state, np.random.Generator):
            alpha_rng, perm_rng = as_generator(self.random_state).spawn(2)
            return alpha_rng, perm_rng
        seed = int(self.random_state)
        return child_rng(seed, Stream.ALPHA), child_rng(seed, Stream.PERMUTATION)

    def fit(self, H, u=None):
        h = as_gf2_matrix(H, name="H")
        u = GF2Vector.zeros(h.nrows) if u is None else check_bit_vector(u, h.nrows)
        alpha_rng, perm_rng = self._streams()
        self.outcome_ = project(h, u, alpha_rng, self.max_rejections, perm_rng=perm_rng)
        self.pivot_set_ = np.array(self.outcome_.pivot_set, dtype=np.int64)
        self.free_set_ = np.array(self.outcome_.free_set, dtype=np.int64)
        self.accepted_ = self.outcome_.accepted
        self.n_features_in_ = h.ncols
        return self

    def transform(self, X):
        check_is_fitted(self, "outcome_")
        X = check_bit_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} columns, expected {self.n_features_in_}")
        return X[:, self.free_set_]

    def inverse_transform(self, X):
        check_is_fitted(self, "outcome_")
        return self.outcome_.lift(check_bit_matrix(X))

    def survivor_value(self, X):
        check_is_fitted(self, "outcome_")
        return self.outcome_.survivor_value(check_bit_matrix(X))
