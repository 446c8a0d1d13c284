"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

from typing import Sequence

import numpy as np
from sklearn.utils.validation import check_array

from .gf2 import GF2Matrix, GF2Vector


def check_bit_matrix(X, *, name: str = "X", allow_empty_rows: bool = True) -> np.ndarray:
    """Validate a 2-D 0/1 array and return it as ``uint8``."""
    if isinstance(X, GF2Matrix):
        return X.to_dense()
    arr = check_array(
        X,
        dtype=None,
        ensure_2d=True,
        ensure_min_samples=0 if allow_empty_rows else 1,
        ensure_min_features=0,
        input_name=name,
    )
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError(f"{name} must contain only 0/1 entries")
    return arr.astype(np.uint8)


def check_bit_vector(v, length: int | None = None, *, name: str = "u") -> GF2Vector:
    if isinstance(v, GF2Vector):
        vec = v
    else:
        arr = np.asarray(v).reshape(-1)
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError(f"{name} must contain only 0/1 entries")
        vec = GF2Vector.from_bits(arr.astype(np.uint8))
    if length is not None and vec.length != length:
        raise ValueError(f"{name} has length {vec.length}, expected {length}")
    return vec


def as_gf2_matrix(X, *, name: str = "X") -> GF2Matrix:
    if isinstance(X, GF2Matrix):
        return X
    return GF2Matrix.from_dense(check_bit_matrix(X, name=name))


def check_permutation(order: Sequence[int], size: int) -> np.ndarray:
    arr = np.asarray(order, dtype=np.int64).reshape(-1)
    if arr.size != size or not np.array_equal(np.sort(arr), np.arange(size)):
        raise ValueError(f"expected a permutation of range({size})")
    return arr


def check_positive(value: int, name: str, minimum: int = 1) -> int:
    if int(value) != value or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)
