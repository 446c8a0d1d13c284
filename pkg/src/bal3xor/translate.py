"""Canonical 3XOR -> 3CNF translation, its inverse, and DIMACS I/O.

Each XOR clause ``x_i + x_j + x_k = r`` becomes the four 3-clauses that forbid
the four assignments of ``(x_i, x_j, x_k)`` with parity ``1 - r``. A forbidden
assignment ``a`` is excluded by the clause whose literal on ``x`` is negated
iff ``a_x = 1``, so the sign triple of a clause equals the assignment it
forbids. Blocks list clauses by ascending sign triple and follow the XOR
clause order; no auxiliary variables are introduced.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from sklearn.base import BaseEstimator, TransformerMixin

from .sampler import XorClause, XorInstance, XorSkeleton

PathLike = Union[str, os.PathLike]

# Sign triples forbidden for each rhs, in canonical (lexicographic) order.
BLOCK_SIGNS = {
    rhs: tuple(s for s in itertools.product((0, 1), repeat=3) if sum(s) % 2 != rhs)
    for rhs in (0, 1)
}
_SIGNS_TO_RHS = {signs: rhs for rhs, signs in BLOCK_SIGNS.items()}


class NotInWindowError(ValueError):
    """A CNF that is not the image of any XOR instance."""

    def __init__(self, block: int, reason: str):
        super().__init__(f"block {block}: {reason}")
        self.block = block


class DimacsError(ValueError):
    def __init__(self, message: str, lineno: Optional[int] = None):
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)
        self.lineno = lineno


@dataclass(frozen=True)
class Clause3:
    """Three literals over distinct ascending variables; sign 1 means negated."""

    vars: tuple[int, int, int]
    signs: tuple[int, int, int]

    def __post_init__(self):
        i, j, k = self.vars
        if not 0 <= i < j < k:
            raise ValueError(f"clause variables must be distinct and ascending: {self.vars}")
        if any(s not in (0, 1) for s in self.signs):
            raise ValueError(f"signs must be 0/1: {self.signs}")

    def to_dimacs(self) -> list[int]:
        return [-(v + 1) if s else v + 1 for v, s in zip(self.vars, self.signs)]

    @classmethod
    def from_dimacs(cls, lits: Sequence[int]) -> "Clause3":
        if len(lits) != 3:
            raise ValueError(f"expected 3 literals, got {len(lits)}")
        return cls(tuple(abs(x) - 1 for x in lits), tuple(int(x < 0) for x in lits))

    def satisfied_by(self, assignment: Sequence[int]) -> bool:
        return any(assignment[v] != s for v, s in zip(self.vars, self.signs))


@dataclass(frozen=True)
class CnfFormula:
    """A 3CNF. ``meta`` carries DIMACS comment key/values and is ignored by ``==``."""

    n: int
    clauses: tuple[Clause3, ...]
    meta: Mapping[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        for c in self.clauses:
            if c.vars[2] >= self.n:
                raise ValueError(f"clause {c.to_dimacs()} references a variable beyond n={self.n}")

    @property
    def m_prime(self) -> int:
        return len(self.clauses)


def xor_to_block(c: XorClause) -> tuple[Clause3, ...]:
    return tuple(Clause3(c.vars, signs) for signs in BLOCK_SIGNS[c.rhs])


def header_meta(phi: XorSkeleton) -> dict[str, str]:
    meta = {"n": str(phi.n), "m": str(phi.m), "m_prime": str(4 * phi.m)}
    if isinstance(phi, XorInstance):
        if phi.seed is not None:
            meta["seed"] = str(phi.seed)
        if phi.rep is not None:
            meta["rep"] = str(phi.rep)
        meta["label"] = str(phi.label)
        meta["tprime"] = str(phi.corank)
    return meta


def translate(phi: XorSkeleton) -> CnfFormula:
    """Blockwise translation; ``4 m`` clauses on the same ``n`` variables."""
    clauses = [cl for c in phi.clauses for cl in xor_to_block(c)]
    return CnfFormula(phi.n, clauses, header_meta(phi))


def invert(psi: CnfFormula) -> XorSkeleton:
    """Read each block back into its XOR clause.

    Raises ``NotInWindowError`` naming the first block that is not a canonical
    image block.
    """
    if psi.m_prime % 4:
        raise NotInWindowError(psi.m_prime // 4, f"clause count {psi.m_prime} is not a multiple of 4")
    out = []
    for b in range(psi.m_prime // 4):
        block = psi.clauses[4 * b : 4 * b + 4]
        triples = {c.vars for c in block}
        if len(triples) != 1:
            raise NotInWindowError(b, f"mixed variable triples {sorted(triples)}")
        signs = tuple(c.signs for c in block)
        rhs = _SIGNS_TO_RHS.get(signs)
        if rhs is None:
            distinct = len(set(signs))
            raise NotInWindowError(b, f"sign patterns {signs} ({distinct} distinct) are not a canonical XOR block")
        out.append(XorClause(block[0].vars, rhs))
    return XorSkeleton(psi.n, tuple(out))


def encoding_length(n: int, m: int) -> int:
    """Index-bit length ``m * ceil(log2 n)`` of an instance."""
    return m * max(1, (n - 1).bit_length())


# --- DIMACS -----------------------------------------------------------------

def cnf_file_name(n: int, rep: int) -> str:
    return f"bal3xor_n{n}_rep{rep:03d}.cnf"


def format_dimacs(psi: CnfFormula) -> str:
    lines = [f"c {k}={v}" for k, v in psi.meta.items()]
    lines.append(f"p cnf {psi.n} {psi.m_prime}")
    lines.extend(" ".join(map(str, c.to_dimacs())) + " 0" for c in psi.clauses)
    return "\n".join(lines) + "\n"


def write_dimacs(psi: CnfFormula, path: PathLike) -> None:
    Path(path).write_bytes(format_dimacs(psi).encode("ascii"))


def parse_dimacs_lines(lines: Iterable[str]) -> tuple[int, list[list[int]], dict[str, str]]:
    """Generic DIMACS parse: ``(n, clauses, meta)`` with clauses as signed int lists.

    ``key=value`` tokens in comment lines are collected into ``meta``.
    """
    n = declared = None
    clauses: list[list[int]] = []
    meta: dict[str, str] = {}
    pending: list[int] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            for tok in line[1:].split():
                if "=" in tok:
                    k, v = tok.split("=", 1)
                    meta[k] = v
            continue
        if line.startswith("p"):
            parts = line.split()
            if n is not None:
                raise DimacsError("duplicate problem line", lineno)
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"malformed problem line {line!r}", lineno)
            try:
                n, declared = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"non-integer header field in {line!r}", lineno) from None
            if n < 0 or declared < 0:
                raise DimacsError("negative header field", lineno)
            continue
        if n is None:
            raise DimacsError("clause before problem line", lineno)
        try:
            lits = [int(x) for x in line.split()]
        except ValueError:
            raise DimacsError(f"non-integer literal in {line!r}", lineno) from None
        for lit in lits:
            if lit == 0:
                clauses.append(pending)
                pending = []
            elif abs(lit) > n:
                raise DimacsError(f"literal {lit} exceeds declared variable count {n}", lineno)
            else:
                pending.append(lit)
    if n is None:
        raise DimacsError("missing problem line")
    if pending:
        raise DimacsError("last clause is not terminated by 0")
    if len(clauses) != declared:
        raise DimacsError(f"header declares {declared} clauses, found {len(clauses)}")
    return n, clauses, meta


def read_dimacs(path: PathLike) -> CnfFormula:
    """Parse a 3CNF file. Every clause must have three distinct literals in ascending variable order."""
    text = Path(path).read_text(encoding="ascii")
    return parse_dimacs(text)


def parse_dimacs(text: str) -> CnfFormula:
    n, raw, meta = parse_dimacs_lines(text.splitlines())
    clauses = []
    for idx, lits in enumerate(raw):
        try:
            clauses.append(Clause3.from_dimacs(lits))
        except ValueError as exc:
            raise DimacsError(f"clause {idx}: {exc}") from None
    return CnfFormula(n, clauses, meta)


class XorToCnf(TransformerMixin, BaseEstimator):
    """Stateless transformer: XOR instances -> canonical CNFs, and back.

    ``fit`` only records ``n_features_in_``-style bookkeeping so the object
    plays well inside sklearn pipelines.
    """

    def __init__(self, validate: bool = True):
        self.validate = validate

    def fit(self, X, y=None):
        self.n_instances_seen_ = len(X)
        return self

    def transform(self, X):
        return [translate(phi) for phi in X]

    def inverse_transform(self, X):
        out = [invert(psi) for psi in X]
        if self.validate:
            for psi, sk in zip(X, out):
                if translate(sk) != psi:
                    raise NotInWindowError(0, "re-translation does not reproduce the input")
        return out

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.requires_fit = False
        return tags
