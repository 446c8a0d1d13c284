"""Numeric evaluation of the size-aware success bound.

For depth ``d``, size ``s(N) = N**k`` with ``N = m * ceil(log2 n)`` and
correlation constant ``alpha_d = alpha0 / (d + 1)**4``::

    Pr[M = chi] <= min(1, 1/2 + s(N) * exp(-alpha_d * m**(c/d)))

Everything runs in log space; ``s(N) * exp(...)`` easily spans hundreds of
orders of magnitude. The K-readings carry the constant-1 instantiation of
their asymptotic statements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

LN2 = math.log(2.0)
LN_HALF = math.log(0.5)
CONSTANT_NOTE = "constant-1 instantiation; the asymptotic statement holds up to an unspecified constant factor"


@dataclass(frozen=True)
class BoundParams:
    d: int
    k: float = 1.0
    c: float = 1.0 / 3.0
    alpha0: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"depth d must be >= 1, got {self.d}")
        if not 0.0 < self.c < 1.0:
            raise ValueError(f"c must lie in (0, 1), got {self.c}")
        if not 0.0 < self.alpha0 <= 1.0:
            raise ValueError(f"alpha0 must lie in (0, 1], got {self.alpha0}")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")
        if self.k < 0:
            raise ValueError(f"size exponent k must be non-negative, got {self.k}")

    @property
    def beta_d(self) -> float:
        return self.c / self.d

    @property
    def alpha_d(self) -> float:
        return alpha_conf(self.d, self.alpha0)


def alpha_conf(d: int, alpha0: float = 1.0) -> float:
    """Conservative correlation constant ``alpha0 / (d + 1)**4``."""
    if d < 1:
        raise ValueError(f"depth d must be >= 1, got {d}")
    if not 0.0 < alpha0 <= 1.0:
        raise ValueError(f"alpha0 must lie in (0, 1], got {alpha0}")
    return alpha0 / (d + 1) ** 4


def index_bits(n: int) -> int:
    """``ceil(log2 n)`` computed exactly on integers."""
    return max(1, (int(n) - 1).bit_length())


def _decay_exponent(p: BoundParams, m: int) -> float:
    """``alpha_d * m**(c/d)``, the exponent in ``exp(-alpha_d m^(c/d))``.

    ``pow`` keeps the error at a few ulps of the result; ``exp(beta ln m)``
    would amplify it by ``beta ln m``. Integers beyond float range fall back
    to the log form.
    """
    try:
        return p.alpha_d * math.pow(float(m), p.beta_d)
    except OverflowError:
        return p.alpha_d * math.exp(p.beta_d * math.log(m))


def log_excess(p: BoundParams, n: int, m: int) -> float:
    """``ln(s(N) * exp(-alpha_d m^(c/d)))``."""
    big_n = int(m) * index_bits(n)
    return p.k * math.log(big_n) - _decay_exponent(p, m)


@dataclass(frozen=True)
class BoundReport:
    m: int
    n: int
    N: int
    alpha_d_conf: float
    beta_d: float
    log_excess: float
    success_bound: float
    capped: bool
    restriction_p: float
    live_vars: float
    bottom_width_exponent: float
    epsilon: float
    k_reading_capped: bool
    k_reading_size_lower_bound_bits: Optional[float]
    note: str = CONSTANT_NOTE


def success_bound(p: BoundParams, n: int, m: int, epsilon: float = 0.0) -> BoundReport:
    if not n >= 3:
        raise ValueError(f"need n >= 3, got {n}")
    if not m > n:
        raise ValueError(f"need m > n, got n={n}, m={m}")
    le = log_excess(p, n, m)
    capped = le >= LN_HALF
    bound = 1.0 if capped else 0.5 + math.exp(le)
    verdict, bits = k_readings(p, n, m, epsilon)
    return BoundReport(
        m=int(m), n=int(n), N=int(m) * index_bits(n), alpha_d_conf=p.alpha_d, beta_d=p.beta_d,
        log_excess=le, success_bound=bound, capped=capped,
        restriction_p=math.exp(-p.beta_d * math.log(m)),
        live_vars=math.exp((1.0 - p.c) * math.log(m)), bottom_width_exponent=p.beta_d,
        epsilon=epsilon, k_reading_capped=verdict, k_reading_size_lower_bound_bits=bits)


def _below_half_minus(epsilon: float, log_term: float) -> bool:
    """``epsilon < 1/2 - exp(log_term)`` without forming tiny differences badly."""
    if log_term >= LN_HALF:
        return False
    return epsilon < 0.5 - math.exp(log_term)


def k_readings(p: BoundParams, n: int, m: int, epsilon: float) -> tuple[bool, Optional[float]]:
    """Two readings of the bound at error budget ``epsilon``.

    Returns ``(capped, size_bits)``. ``capped`` is true iff
    ``epsilon < 1/2 - s(N) exp(-alpha_d m^(c/d))``: no model within the size
    cap reaches error ``epsilon``. ``size_bits`` is ``log2 exp(alpha_d m^(c/d))``
    when ``epsilon < 1/2 - exp(-alpha_d m^(c/d))`` (the size any successful
    model must exceed), else None.
    """
    if not 0.0 <= epsilon < 0.5:
        raise ValueError(f"epsilon must lie in [0, 1/2), got {epsilon}")
    decay = _decay_exponent(p, m)
    capped = _below_half_minus(epsilon, log_excess(p, n, m))
    bits = decay / LN2 if _below_half_minus(epsilon, -decay) else None
    return capped, bits


def capped_threshold(p: BoundParams, n: int, m: int) -> float:
    """``1/2 - s(N) exp(-alpha_d m^(c/d))``; ``-inf`` once the excess overflows a float."""
    le = log_excess(p, n, m)
    return 0.5 - math.exp(le) if le < 700 else -math.inf
