"""Independent reference implementations used only by the tests.

The oracles work on plain integer arrays (row-by-row elimination, exhaustive
enumeration) and never touch the packed representation. The two random
builders at the bottom produce package matrices for test inputs.
"""

from __future__ import annotations

import itertools

import numpy as np

from bal3xor.gf2 import GF2Matrix, rank


def naive_rank(a) -> int:
    m = np.array(a, dtype=np.int64) % 2
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i, c]), None)
        if piv is None:
            continue
        m[[r, piv]] = m[[piv, r]]
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] = (m[i] + m[r]) % 2
        r += 1
        if r == rows:
            break
    return r


def naive_solvable(a, b) -> bool:
    """``A x = b`` solvable iff appending ``b`` does not raise the rank."""
    a = np.array(a, dtype=np.int64).reshape(len(b), -1)
    aug = np.hstack([a, np.array(b, dtype=np.int64).reshape(-1, 1)])
    return naive_rank(a) == naive_rank(aug)


def all_assignments(n: int) -> np.ndarray:
    """``(2**n, n)`` array; row ``x`` holds the bits of ``x`` (bit ``j`` = variable ``j``)."""
    xs = np.arange(1 << n, dtype=np.int64)
    return ((xs[:, None] >> np.arange(n)) & 1).astype(np.uint8)


def xor_models(n: int, clauses) -> np.ndarray:
    """Boolean mask over all assignments satisfying every ``(i, j, k, rhs)``."""
    pts = all_assignments(n)
    ok = np.ones(len(pts), dtype=bool)
    for (i, j, k), r in clauses:
        ok &= (pts[:, i] ^ pts[:, j] ^ pts[:, k]) == r
    return ok


def cnf_models(n: int, clauses) -> np.ndarray:
    """Mask of assignments satisfying DIMACS-style clauses (lists of signed 1-based ints)."""
    pts = all_assignments(n)
    ok = np.ones(len(pts), dtype=bool)
    for c in clauses:
        sat = np.zeros(len(pts), dtype=bool)
        for lit in c:
            v = abs(lit) - 1
            sat |= pts[:, v] == (1 if lit > 0 else 0)
        ok &= sat
    return ok


def all_vectors(m: int):
    return [np.array(bits, dtype=np.uint8) for bits in itertools.product((0, 1), repeat=m)]


def random_matrix(rng, rows, cols, density=0.5) -> GF2Matrix:
    return GF2Matrix.from_dense((rng.random((rows, cols)) < density).astype(np.uint8))


def random_full_row_rank(rng, rows, cols) -> GF2Matrix:
    while True:
        h = random_matrix(rng, rows, cols)
        if rank(h) == rows:
            return h
