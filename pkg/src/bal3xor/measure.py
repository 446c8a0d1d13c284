"""Exact finite distributions: push-forwards, total variation, fiber sizes."""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, TypeVar

K = TypeVar("K", bound=Hashable)
V = TypeVar("V", bound=Hashable)

Distribution = Mapping[Hashable, Fraction]


def uniform(points: Iterable[K]) -> dict[K, Fraction]:
    pts = list(points)
    if not pts:
        raise ValueError("uniform distribution over an empty set")
    counts = Counter(pts)
    total = len(pts)
    return {p: Fraction(c, total) for p, c in counts.items()}


def pushforward(mu: Mapping[K, Fraction], f: Callable[[K], V]) -> dict[V, Fraction]:
    out: dict[V, Fraction] = {}
    for x, p in mu.items():
        y = f(x)
        out[y] = out.get(y, Fraction(0)) + p
    return out


def tv_distance(mu: Mapping, nu: Mapping) -> Fraction:
    """``sup_A |mu(A) - nu(A)| = 1/2 * sum |mu - nu|``, exactly."""
    keys = set(mu) | set(nu)
    return sum((abs(Fraction(mu.get(k, 0)) - Fraction(nu.get(k, 0))) for k in keys), Fraction(0)) / 2


def fibers(domain: Iterable[K], f: Callable[[K], V]) -> dict[V, list[K]]:
    out: dict[V, list[K]] = {}
    for x in domain:
        out.setdefault(f(x), []).append(x)
    return out


def fiber_id_bits(max_fiber_size: int) -> int:
    """Bits needed to name a preimage inside a fiber: ``ceil(log2 |F|)``, 0 when injective."""
    if max_fiber_size < 1:
        raise ValueError("fiber size must be positive")
    return (max_fiber_size - 1).bit_length()
