"""Linear-time 2SAT via the implication graph and strongly connected components."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .translate import DimacsError, PathLike, parse_dimacs_lines


@dataclass(frozen=True)
class TwoSatInstance:
    """``n`` variables; clauses are pairs of DIMACS literals (``+v`` / ``-v``, 1-based)."""

    n: int
    clauses: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for a, b in self.clauses:
            for lit in (a, b):
                if lit == 0 or abs(lit) > self.n:
                    raise ValueError(f"literal {lit} out of range for n={self.n}")


@dataclass(frozen=True)
class TwoSatResult:
    satisfiable: bool
    assignment: Optional[tuple[int, ...]] = None


def _node(lit: int) -> int:
    v = abs(lit) - 1
    return 2 * v + (lit < 0)


def _tarjan(num_nodes: int, adj: list[list[int]]) -> list[int]:
    """Iterative Tarjan. Component ids come out in reverse topological order."""
    index = [-1] * num_nodes
    low = [0] * num_nodes
    comp = [-1] * num_nodes
    on_stack = [False] * num_nodes
    stack: list[int] = []
    counter = 0
    n_comp = 0
    for root in range(num_nodes):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            edges = adj[v]
            if i < len(edges):
                work[-1] = (v, i + 1)
                w = edges[i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = n_comp
                    if w == v:
                        break
                n_comp += 1
    return comp


def decide(inst: TwoSatInstance) -> TwoSatResult:
    """Satisfiability with a certified witness.

    Each clause ``(a or b)`` contributes ``not a -> b`` and ``not b -> a``. The
    formula is unsatisfiable iff some ``x`` and ``not x`` share a component;
    otherwise ``x`` is set true iff its component comes earlier in Tarjan's
    (reverse topological) numbering than that of ``not x``.
    """
    nodes = 2 * inst.n
    adj: list[list[int]] = [[] for _ in range(nodes)]
    for a, b in inst.clauses:
        na, nb = _node(a), _node(b)
        adj[na ^ 1].append(nb)
        adj[nb ^ 1].append(na)
    comp = _tarjan(nodes, adj)
    assignment = []
    for v in range(inst.n):
        pos, neg = comp[2 * v], comp[2 * v + 1]
        if pos == neg:
            return TwoSatResult(False)
        assignment.append(int(pos < neg))
    witness = tuple(assignment)
    if not check_assignment(inst, witness):
        raise AssertionError("internal error: 2SAT witness fails a clause")
    return TwoSatResult(True, witness)


def check_assignment(inst: TwoSatInstance, assignment: Sequence[int]) -> bool:
    def val(lit: int) -> bool:
        return bool(assignment[abs(lit) - 1]) != (lit < 0)

    return all(val(a) or val(b) for a, b in inst.clauses)


def read_twosat(path: PathLike) -> TwoSatInstance:
    """DIMACS with clauses of one or two literals; a unit ``(a)`` becomes ``(a or a)``."""
    n, clauses, _ = parse_dimacs_lines(Path(path).read_text().splitlines())
    pairs = []
    for idx, c in enumerate(clauses):
        if len(c) == 1:
            pairs.append((c[0], c[0]))
        elif len(c) == 2:
            pairs.append((c[0], c[1]))
        else:
            raise DimacsError(f"clause {idx} has {len(c)} literals; 2SAT accepts at most 2")
    return TwoSatInstance(n, tuple(pairs))
