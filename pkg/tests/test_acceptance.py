"""The numbered acceptance criteria, one test each, at their stated tolerances.

``pytest`` prints a PASS/FAIL line per criterion in the terminal summary.
"""

import math
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from scipy.stats import binom, chisquare

from bal3xor import gf2
from bal3xor.bounds import BoundParams, success_bound
from bal3xor.gf2 import GF2Vector
from bal3xor.measure import pushforward, tv_distance, uniform
from bal3xor.pipeline import SweepConfig, run_diagnostics, run_full_export, run_rank_sweep
from bal3xor.projection import enumerate_fiber, measure_preservation_check, project
from bal3xor.sampler import GenConfig, XorClause, XorSkeleton, generate_rep
from bal3xor.streams import Stream, child_rng
from bal3xor.translate import format_dimacs, invert, parse_dimacs, translate, write_dimacs
from bal3xor.twosat import TwoSatInstance, check_assignment, decide
from bal3xor.verify import recompute_label, verify_directory

from .oracles import cnf_models, random_full_row_rank

SEED = 20251015


@pytest.mark.acceptance(1, "full export at n in {60, 100}, reps=50: match rate exactly 1.000 in under a minute")
def test_match_rate_one(tmp_path):
    t0 = time.perf_counter()
    result = run_full_export(SweepConfig.from_lists([60, 100], 50, ts=[1], out_dir=tmp_path, master_seed=SEED))
    elapsed = time.perf_counter() - t0
    assert result.verify.n_files == 100
    assert result.verify.match_rate == 1.0
    assert result.ok
    assert elapsed < 60, elapsed


@pytest.mark.acceptance(2, "500 window instances with n <= 20: brute force equals recomputed label, no exceptions")
def test_label_equality_oracle(tmp_path):
    rng = child_rng(SEED, Stream.AUX, 2)
    t0 = time.perf_counter()
    for i in range(500):
        n = int(rng.integers(4, 21))
        m = n + int(rng.integers(1, 8))
        inst = generate_rep(GenConfig(n, m, 2, master_seed=SEED), i, i % 2)
        write_dimacs(translate(inst), tmp_path / f"case{i:03d}.cnf")
    report = verify_directory(tmp_path, bruteforce_max_n=20)
    assert report.n_files == 500
    assert [r.error for r in report.records if r.error] == []
    for r in report.records:
        assert r.sat_bruteforce is not None
        assert r.sat_bruteforce == r.label_recomputed == r.label_recorded
    assert time.perf_counter() - t0 < 120


@pytest.mark.acceptance(3, "invert after translate is the identity on 10^4 random instances")
def test_round_trip_injectivity():
    rng = child_rng(SEED, Stream.AUX, 3)
    t0 = time.perf_counter()
    for _ in range(10_000):
        n = int(rng.integers(3, 40))
        m = int(rng.integers(1, 50))
        triples = np.sort(np.argsort(rng.random((m, n)), axis=1)[:, :3], axis=1)
        rhs = rng.integers(0, 2, m)
        phi = XorSkeleton(n, tuple(XorClause(tuple(t), int(r)) for t, r in zip(triples.tolist(), rhs.tolist())))
        assert invert(translate(phi)) == phi
        assert invert(parse_dimacs(format_dimacs(translate(phi)))) == phi
    assert time.perf_counter() - t0 < 30


@pytest.mark.acceptance(4, "n=4, m=5 fixed fiber: push-forward through translate is exactly uniform on its image")
def test_pushforward_exactly_uniform():
    triples = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3), (0, 1, 2)]
    a = XorSkeleton(4, tuple(XorClause(t, 0) for t in triples)).incidence()
    h = gf2.left_kernel_basis(a)
    assert h.nrows == 5 - gf2.rank(a) == 1
    for u_int in range(1 << h.nrows):
        u = GF2Vector.from_bits([(u_int >> i) & 1 for i in range(h.nrows)])
        fiber = [tuple(int(x >> j) & 1 for j in range(5)) for x in enumerate_fiber(h, u)]
        assert len(fiber) == 1 << (5 - h.nrows)

        def to_cnf(b):
            return translate(XorSkeleton(4, tuple(XorClause(t, r) for t, r in zip(triples, b))))

        image = pushforward(uniform(fiber), to_cnf)
        assert len(image) == len(fiber)
        assert tv_distance(image, uniform(image)) == Fraction(0)
        labels = {recompute_label(invert(psi)) for psi in image}
        assert labels == {int(u_int == 0)}


@pytest.mark.acceptance(5, "100 small (h, u): projection TV exactly 0 when accepted, free support >= w* - (t'-1)")
def test_projection_measure_preservation():
    rng = child_rng(SEED, Stream.AUX, 5)
    accepted = 0
    for _ in range(100):
        m = int(rng.integers(2, 21))
        t = int(rng.integers(1, min(m, 6) + 1))
        h = random_full_row_rank(rng, t, m)
        u = GF2Vector.from_bits(rng.integers(0, 2, t))
        o = project(h, u, rng)
        assert o.free_support >= o.survivor_weight - (o.tprime - 1)
        if o.accepted:
            accepted += 1
            assert measure_preservation_check(h, u, o) == Fraction(0)
    assert accepted > 0


@pytest.mark.acceptance(6, "m=n+1, reps=300: mean t' within 15% of 15.783 / 30.993; SAT fraction in 99% CI of 0.5")
@pytest.mark.parametrize("mode", ["exact", "expected"])
def test_corank_table(mode):
    t0 = time.perf_counter()
    cfg = SweepConfig.from_lists([250, 500], 300, ts=[1], master_seed=SEED, mode="diagnostics", balance_mode=mode)
    rows = run_diagnostics(cfg)
    lo, hi = binom.ppf(0.005, 300, 0.5) / 300, binom.ppf(0.995, 300, 0.5) / 300
    for row, target in zip(rows, (15.783, 30.993)):
        assert abs(row.mean_tprime - target) <= 0.15 * target, (row.n, row.mean_tprime)
        assert lo <= row.sat_frac <= hi, (row.n, row.sat_frac)
    assert time.perf_counter() - t0 < 180


@pytest.mark.acceptance(7, "rank sweep: n=60,t=1 in [0, 0.06]; n in {120,150,200}, t in {1,2,3}: at most 2 of 200")
def test_rank_table():
    t0 = time.perf_counter()
    small = run_rank_sweep(SweepConfig.from_lists([60], 200, ts=[1], master_seed=SEED, mode="rank-sweep"))
    assert 0.0 <= small[0].frac_full_rank <= 0.06
    rows = run_rank_sweep(SweepConfig.from_lists([120, 150, 200], 200, ts=[1, 2, 3],
                                                 master_seed=SEED, mode="rank-sweep"))
    assert len(rows) == 9
    assert all(r.successes <= 2 for r in rows), [(r.n, r.t, r.successes) for r in rows]
    assert time.perf_counter() - t0 < 120


@pytest.mark.acceptance(8, "coset sampler passes chi-square at 0.001 on fibers up to 256 points, 10^4 draws per point")
def test_coset_uniformity():
    rng = child_rng(SEED, Stream.AUX, 8)
    for t, m in ((1, 2), (2, 6), (3, 9), (2, 10), (4, 12)):
        h = random_full_row_rank(rng, t, m)
        u = GF2Vector.from_bits(rng.integers(0, 2, t))
        fiber = enumerate_fiber(h, u)
        assert len(fiber) == 1 << (m - t) and len(fiber) <= 256
        draws = gf2.sample_coset_uniform(h, u, rng, size=10_000 * len(fiber))
        keys = draws.astype(np.int64) @ (1 << np.arange(m, dtype=np.int64))
        counts = np.bincount(keys, minlength=1 << m)
        assert set(np.flatnonzero(counts).tolist()) == set(fiber.tolist())
        assert chisquare(counts[fiber]).pvalue > 0.001, (t, m)


@pytest.mark.acceptance(9, "bound: 1e-12 agreement with 60-digit evaluation, monotone in m, cap engages, beta = 1/(3d)")
def test_bound_evaluator():
    mpmath.mp.dps = 60
    grid = [int(10 ** (3 + 37 * i / 19)) for i in range(20)]
    n = 250
    for d in (1, 2, 3):
        p = BoundParams(d=d)
        assert p.beta_d == pytest.approx(1 / (3 * d), rel=1e-15)
        values = []
        for m in grid:
            r = success_bound(p, n, m)
            big_n = mpmath.mpf(m * math.ceil(math.log2(n)))
            alpha = mpmath.mpf(1) / (d + 1) ** 4
            excess = big_n * mpmath.exp(-alpha * mpmath.mpf(m) ** (mpmath.mpf(1) / (3 * d)))
            exact = min(mpmath.mpf(1), mpmath.mpf(0.5) + excess)
            assert abs(r.success_bound - float(exact)) <= 1e-12 * float(exact)
            values.append(r.success_bound)
        assert all(b <= a for a, b in zip(values, values[1:]))
        assert success_bound(p, n, 300).capped and success_bound(p, n, 300).success_bound == 1.0
        assert values[-1] < 1.0


@pytest.mark.acceptance(10, "2SAT solver agrees with exhaustive search on 10^4 instances, witnesses checked")
def test_twosat_calibration():
    rng = child_rng(SEED, Stream.AUX, 10)
    sat_count = 0
    for _ in range(10_000):
        n = int(rng.integers(1, 13))
        m = int(rng.integers(0, 3 * n + 1))
        lits = rng.integers(1, n + 1, size=(m, 2)) * rng.choice([-1, 1], size=(m, 2))
        inst = TwoSatInstance(n, tuple(map(tuple, lits.tolist())))
        res = decide(inst)
        models = cnf_models(n, [list(c) for c in inst.clauses])
        assert res.satisfiable == bool(models.any())
        if res.satisfiable:
            sat_count += 1
            a = np.asarray(res.assignment)
            for c in inst.clauses:
                assert any(a[abs(l) - 1] == (l > 0) for l in c)
            assert check_assignment(inst, res.assignment)
    assert 0 < sat_count < 10_000


@pytest.mark.acceptance(11, "same seed, threads 1 vs 3: byte-identical CNFs and checksum manifest")
def test_thread_determinism(tmp_path):
    one, three = tmp_path / "t1", tmp_path / "t3"
    for out, threads in ((one, 1), (three, 3)):
        run_full_export(SweepConfig.from_lists([12, 40], 10, ts=[2], out_dir=out, master_seed=SEED, threads=threads))
    files = sorted(p.name for p in (one / "cnf").glob("*.cnf"))
    assert len(files) == 20
    assert files == sorted(p.name for p in (three / "cnf").glob("*.cnf"))
    for name in files:
        assert (one / "cnf" / name).read_bytes() == (three / "cnf" / name).read_bytes()
    assert (one / "cnf_sha256.csv").read_bytes() == (three / "cnf_sha256.csv").read_bytes()
