"""Bit-packed linear algebra over GF(2).

Rows are stored little-endian in ``uint64`` words: column ``j`` of a row lives
in word ``j // 64`` at bit ``j % 64``. Padding bits past ``ncols`` are always
zero. All values are immutable; every operation returns a new object.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

WORD = 64
_DTYPE = np.dtype("<u8")


def _nwords(ncols: int) -> int:
    return (ncols + WORD - 1) // WORD


def _pack(dense: np.ndarray, ncols: int) -> np.ndarray:
    """Pack a 2-D 0/1 array into ``(rows, nwords)`` uint64 words."""
    rows = dense.shape[0]
    nw = _nwords(ncols)
    padded = np.zeros((rows, nw * WORD), dtype=np.uint8)
    padded[:, :ncols] = dense
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view(_DTYPE).reshape(rows, nw)


def _unpack(words: np.ndarray, ncols: int) -> np.ndarray:
    rows = words.shape[0]
    if rows == 0 or ncols == 0:
        return np.zeros((rows, ncols), dtype=np.uint8)
    raw = np.ascontiguousarray(words, dtype=_DTYPE).view(np.uint8).reshape(rows, -1)
    return np.unpackbits(raw, axis=1, bitorder="little")[:, :ncols]


def _frozen(words: np.ndarray) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype=_DTYPE)
    words.flags.writeable = False
    return words


def _parity(words: np.ndarray) -> np.ndarray:
    """Per-row parity of a 2-D word array."""
    return (np.bitwise_count(words).sum(axis=-1) & 1).astype(np.uint8)


class GF2Vector:
    """Immutable bit vector over GF(2)."""

    __slots__ = ("length", "words")

    def __init__(self, length: int, words: np.ndarray):
        words = np.asarray(words, dtype=_DTYPE).reshape(-1)
        if words.shape[0] != _nwords(length):
            raise ValueError(f"expected {_nwords(length)} words for length {length}, got {words.shape[0]}")
        rem = length % WORD
        if rem and int(words[-1]) >> rem:
            raise ValueError("padding bits beyond length must be zero")
        self.length = length
        self.words = _frozen(words)

    @classmethod
    def zeros(cls, length: int) -> "GF2Vector":
        return cls(length, np.zeros(_nwords(length), dtype=_DTYPE))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "GF2Vector":
        arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=np.uint8).reshape(-1)
        if arr.size and arr.max() > 1:
            raise ValueError("bits must be 0 or 1")
        return cls(arr.size, _pack(arr[None, :], arr.size)[0])

    @classmethod
    def from_support(cls, length: int, support: Iterable[int]) -> "GF2Vector":
        arr = np.zeros(length, dtype=np.uint8)
        idx = np.fromiter(support, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= length):
            raise IndexError("support index out of range")
        arr[idx] = 1
        return cls.from_bits(arr)

    @classmethod
    def from_int(cls, length: int, value: int) -> "GF2Vector":
        if value < 0 or value >> length:
            raise ValueError(f"{value} does not fit in {length} bits")
        return cls.from_bits([(value >> i) & 1 for i in range(length)])

    def to_int(self) -> int:
        return sum(int(w) << (WORD * i) for i, w in enumerate(self.words))

    def to_dense(self) -> np.ndarray:
        return _unpack(self.words[None, :], self.length)[0]

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.to_dense())

    def weight(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def is_zero(self) -> bool:
        return not self.words.any()

    def dot(self, other: "GF2Vector") -> int:
        self._check_len(other)
        return int(np.bitwise_count(self.words & other.words).sum() & 1)

    def _check_len(self, other: "GF2Vector") -> None:
        if self.length != other.length:
            raise ValueError(f"length mismatch: {self.length} vs {other.length}")

    def __xor__(self, other: "GF2Vector") -> "GF2Vector":
        self._check_len(other)
        return GF2Vector(self.length, self.words ^ other.words)

    def __and__(self, other: "GF2Vector") -> "GF2Vector":
        self._check_len(other)
        return GF2Vector(self.length, self.words & other.words)

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return int(self.words[i // WORD] >> np.uint64(i % WORD)) & 1

    def __len__(self) -> int:
        return self.length

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GF2Vector):
            return NotImplemented
        return self.length == other.length and np.array_equal(self.words, other.words)

    def __hash__(self) -> int:
        return hash((self.length, self.words.tobytes()))

    def __repr__(self) -> str:
        bits = "".join(map(str, self.to_dense())) if self.length <= 64 else f"weight={self.weight()}"
        return f"GF2Vector({self.length}, {bits})"


class GF2Matrix:
    """Immutable bit-packed matrix over GF(2), row-major."""

    __slots__ = ("nrows", "ncols", "words")

    def __init__(self, nrows: int, ncols: int, words: np.ndarray):
        words = np.asarray(words, dtype=_DTYPE).reshape(nrows, _nwords(ncols))
        rem = ncols % WORD
        if rem and nrows and (words[:, -1] >> np.uint64(rem)).any():
            raise ValueError("padding bits beyond ncols must be zero")
        self.nrows = nrows
        self.ncols = ncols
        self.words = _frozen(words)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "GF2Matrix":
        return cls(nrows, ncols, np.zeros((nrows, _nwords(ncols)), dtype=_DTYPE))

    @classmethod
    def identity(cls, n: int) -> "GF2Matrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_dense(cls, dense) -> "GF2Matrix":
        arr = np.asarray(dense)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
        arr = arr.astype(np.uint8)
        if arr.size and arr.max() > 1:
            raise ValueError("entries must be 0 or 1")
        return cls(arr.shape[0], arr.shape[1], _pack(arr, arr.shape[1]))

    @classmethod
    def from_rows(cls, rows: Sequence[GF2Vector], ncols: Optional[int] = None) -> "GF2Matrix":
        if not rows:
            if ncols is None:
                raise ValueError("ncols is required for an empty row list")
            return cls.zeros(0, ncols)
        ncols = rows[0].length if ncols is None else ncols
        if any(r.length != ncols for r in rows):
            raise ValueError("all rows must have the same length")
        return cls(len(rows), ncols, np.stack([r.words for r in rows]))

    @classmethod
    def from_supports(cls, supports: Sequence[Sequence[int]], ncols: int) -> "GF2Matrix":
        """Build a matrix whose row ``i`` is the indicator of ``supports[i]``."""
        dense = np.zeros((len(supports), ncols), dtype=np.uint8)
        for i, s in enumerate(supports):
            dense[i, list(s)] = 1
        return cls.from_dense(dense)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def to_dense(self) -> np.ndarray:
        return _unpack(self.words, self.ncols)

    def row(self, i: int) -> GF2Vector:
        return GF2Vector(self.ncols, self.words[i])

    def rows(self) -> list[GF2Vector]:
        return [self.row(i) for i in range(self.nrows)]

    def column(self, j: int) -> GF2Vector:
        return GF2Vector.from_bits(self._column_bits(j))

    def _column_bits(self, j: int) -> np.ndarray:
        if not 0 <= j < self.ncols:
            raise IndexError(j)
        return ((self.words[:, j // WORD] >> np.uint64(j % WORD)) & np.uint64(1)).astype(np.uint8)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return int(self.words[i, j // WORD] >> np.uint64(j % WORD)) & 1

    def transpose(self) -> "GF2Matrix":
        return GF2Matrix.from_dense(self.to_dense().T)

    T = property(transpose)

    def select_rows(self, idx: Sequence[int]) -> "GF2Matrix":
        idx = np.asarray(idx, dtype=np.int64)
        return GF2Matrix(idx.size, self.ncols, self.words[idx])

    def select_columns(self, idx: Sequence[int]) -> "GF2Matrix":
        idx = np.asarray(idx, dtype=np.int64)
        return GF2Matrix.from_dense(self.to_dense()[:, idx])

    def with_column_zeroed(self, j: int) -> "GF2Matrix":
        words = self.words.copy()
        words[:, j // WORD] &= ~np.uint64(1 << (j % WORD))
        return GF2Matrix(self.nrows, self.ncols, words)

    def vstack(self, other: "GF2Matrix") -> "GF2Matrix":
        if self.ncols != other.ncols:
            raise ValueError("column count mismatch")
        return GF2Matrix(self.nrows + other.nrows, self.ncols, np.vstack([self.words, other.words]))

    def matvec(self, v: GF2Vector) -> GF2Vector:
        if v.length != self.ncols:
            raise ValueError(f"dimension mismatch: {self.shape} @ ({v.length},)")
        if self.nrows == 0:
            return GF2Vector.zeros(0)
        return GF2Vector.from_bits(_parity(self.words & v.words[None, :]))

    def matmul(self, other: "GF2Matrix") -> "GF2Matrix":
        if self.ncols != other.nrows:
            raise ValueError(f"dimension mismatch: {self.shape} @ {other.shape}")
        out = np.zeros((self.nrows, _nwords(other.ncols)), dtype=_DTYPE)
        for k in range(self.ncols):
            mask = self._column_bits(k).astype(bool)
            if mask.any():
                out[mask] ^= other.words[k]
        return GF2Matrix(self.nrows, other.ncols, out)

    def __matmul__(self, other):
        if isinstance(other, GF2Vector):
            return self.matvec(other)
        return self.matmul(other)

    def is_zero(self) -> bool:
        return not self.words.any()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GF2Matrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.words, other.words)

    def __hash__(self) -> int:
        return hash((self.shape, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"GF2Matrix({self.nrows}x{self.ncols})"


@dataclass(frozen=True)
class RrefResult:
    matrix: GF2Matrix
    pivot_cols: tuple[int, ...]
    rank: int


def _eliminate(words: np.ndarray, order: Iterable[int], full: bool = True) -> list[int]:
    """Gaussian elimination in place, scanning columns in ``order``.

    After return, row ``i`` of ``words`` holds the pivot for ``pivots[i]``. With
    ``full`` the pivot column is cleared in every other row (reduced form);
    otherwise only below the pivot.
    """
    nrows = words.shape[0]
    pivots: list[int] = []
    r = 0
    for c in order:
        if r == nrows:
            break
        w = c // WORD
        shift = np.uint64(c % WORD)
        hits = np.flatnonzero((words[r:, w] >> shift) & np.uint64(1))
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            words[[r, p]] = words[[p, r]]
        col = ((words[:, w] >> shift) & np.uint64(1)).astype(bool)
        if full:
            col[r] = False
        else:
            col[: r + 1] = False
        if col.any():
            words[col] ^= words[r]
        pivots.append(c)
        r += 1
    return pivots


def _augment(left: GF2Matrix, right_words: np.ndarray) -> np.ndarray:
    """Side-by-side word array; the right block starts on a word boundary."""
    right = np.asarray(right_words, dtype=_DTYPE)
    if right.ndim != 2 or right.shape[0] != left.nrows:
        raise ValueError(f"right block has shape {right.shape}, expected {left.nrows} rows")
    return np.hstack([left.words, right])


def rank(m: GF2Matrix) -> int:
    """Rank over GF(2). The empty matrix has rank 0."""
    if m.nrows == 0 or m.ncols == 0:
        return 0
    return len(_eliminate(m.words.copy(), range(m.ncols), full=False))


def rref(m: GF2Matrix) -> RrefResult:
    return rref_in_column_order(m, range(m.ncols))


def rref_in_column_order(m: GF2Matrix, order: Iterable[int]) -> RrefResult:
    """Reduced row echelon form with columns scanned in ``order``.

    A column becomes a pivot iff it is linearly independent of the pivot
    columns chosen before it, so ``pivot_cols`` is the greedy column basis in
    scan order (reported in selection order).
    """
    order = [int(c) for c in order]
    if sorted(order) != list(range(m.ncols)):
        raise ValueError("order must be a permutation of the column indices")
    words = m.words.copy()
    pivots = _eliminate(words, order)
    return RrefResult(GF2Matrix(m.nrows, m.ncols, words), tuple(pivots), len(pivots))


def left_kernel_basis(a: GF2Matrix) -> GF2Matrix:
    """Row basis ``H`` of ``{y : y^T a = 0}``; ``H @ a == 0`` and ``H`` has full row rank."""
    m = a.nrows
    if m == 0:
        return GF2Matrix.zeros(0, 0)
    ident = GF2Matrix.identity(m)
    aug = _augment(a, ident.words)
    r = len(_eliminate(aug, range(a.ncols), full=False))
    nw = _nwords(a.ncols)
    return GF2Matrix(m - r, m, aug[r:, nw:])


def right_kernel_basis(h: GF2Matrix) -> GF2Matrix:
    """Row basis of ``{x : h x = 0}``, one row per free column of ``rref(h)``."""
    red = rref(h)
    dense = red.matrix.to_dense()
    pivots = list(red.pivot_cols)
    free = [c for c in range(h.ncols) if c not in set(pivots)]
    basis = np.zeros((len(free), h.ncols), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, p in enumerate(pivots):
            basis[k, p] = dense[i, f]
    return GF2Matrix.from_dense(basis.reshape(len(free), h.ncols))


class EmptyFiberError(ValueError):
    """Raised when ``u`` is not in the image of ``h``."""


class _AffineSystem:
    """Reduced form of ``h x = u``; shared by solving and coset sampling."""

    def __init__(self, h: GF2Matrix, u: GF2Vector):
        if u.length != h.nrows:
            raise ValueError(f"dimension mismatch: h has {h.nrows} rows, u has length {u.length}")
        self.ncols = h.ncols
        aug = _augment(h, u.to_dense().astype(_DTYPE).reshape(-1, 1))
        self.pivots = _eliminate(aug, range(h.ncols))
        r = len(self.pivots)
        nw = _nwords(h.ncols)
        self.reduced = aug[:r, :nw]
        self.rhs = aug[:, nw].astype(np.uint8)
        self.consistent = not self.rhs[r:].any()

    def solution(self, free_bits: Optional[np.ndarray] = None) -> GF2Vector:
        if not self.consistent:
            raise EmptyFiberError("u is not in the image of h")
        r = len(self.pivots)
        x = np.zeros(self.ncols, dtype=np.uint8)
        if free_bits is not None:
            x[:] = free_bits
            x[list(self.pivots)] = 0
            z = GF2Vector.from_bits(x)
            dep = _parity(self.reduced & z.words[None, :]) if r else np.zeros(0, dtype=np.uint8)
        else:
            dep = np.zeros(r, dtype=np.uint8)
        x[list(self.pivots)] = self.rhs[:r] ^ dep
        return GF2Vector.from_bits(x)


def solve_affine(h: GF2Matrix, u: GF2Vector) -> Optional[GF2Vector]:
    """Some ``b0`` with ``h b0 = u`` (free coordinates zero), or None if the fiber is empty."""
    system = _AffineSystem(h, u)
    if not system.consistent:
        return None
    return system.solution()


def sample_coset_uniform(h: GF2Matrix, u: GF2Vector, rng: np.random.Generator,
                         size: Optional[int] = None):
    """Uniform draw from ``{b : h b = u}``.

    Free columns of the reduced system get independent fair bits and the pivot
    coordinates are back-substituted, so every fiber element has probability
    ``2**-(ncols - rank)`` exactly. With ``size`` returns a ``(size, ncols)``
    uint8 array of independent draws instead of one vector.
    """
    system = _AffineSystem(h, u)
    if not system.consistent:
        raise EmptyFiberError("u is not in the image of h")
    if size is None:
        free_bits = rng.integers(0, 2, size=h.ncols, dtype=np.uint8)
        return system.solution(free_bits)
    x = rng.integers(0, 2, size=(size, h.ncols), dtype=np.uint8)
    pivots = list(system.pivots)
    if pivots:
        x[:, pivots] = 0
        reduced = _unpack(system.reduced, h.ncols).astype(np.int64)
        dep = (x.astype(np.int64) @ reduced.T) & 1
        x[:, pivots] = dep.astype(np.uint8) ^ system.rhs[None, : len(pivots)]
    return x


def is_coloop(m: GF2Matrix, col: int) -> bool:
    """True iff deleting column ``col`` strictly lowers the rank."""
    if not 0 <= col < m.ncols:
        raise IndexError(col)
    return rank(m.with_column_zeroed(col)) < rank(m)


def coloops(m: GF2Matrix) -> list[int]:
    """All coloops at once.

    Column ``j`` is a coloop iff the unit vector ``e_j`` lies in the row
    space, i.e. some row of the RREF equals ``e_j``.
    """
    red = rref(m)
    if red.rank == 0:
        return []
    weights = np.bitwise_count(red.matrix.words[: red.rank]).sum(axis=1)
    return sorted(p for p, w in zip(red.pivot_cols, weights) if w == 1)
