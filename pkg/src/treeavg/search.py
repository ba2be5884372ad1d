"""Exact average-tree search through a normalized max weighted clique.

Surviving candidate constituents become vertices weighted by their hit
counts; an edge joins two candidates that can sit in the same tree.  The
best clique Q maximizes ``(w(Q) + alpha1) / (|Q| + alpha2)`` and, together
with the must-include set, is the average tree.

Two clique engines are provided and return identical solutions:

* :func:`clique_exhaustive` walks every clique (the oracle);
* :func:`clique_mitm` splits the vertices in two halves, tabulates the best
  fixed-size clique inside subsets of the first half and enumerates cliques
  of the second half against that table.

Ties are broken by higher objective, then fewer vertices, then the
lexicographically smallest list of vertex indices (vertices are in canonical
constituent order), so every engine returns the same clique.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .hits import HitTable, build_hits
from .prune import PruneResult, prune_candidates, prune_zero_hit
from .tree import (
    Constituent,
    ParseTree,
    TreeError,
    as_weights,
    compatible,
    hierarchy,
    is_valid_tree,
    sum_f1_objective,
)

log = logging.getLogger(__name__)

EXHAUSTIVE_CAP = 26
MITM_CAP = 50

ENGINES = ("mitm", "exhaustive", "dp")
MODES = ("nonbinary", "binary")


class CapacityError(RuntimeError):
    """The candidate graph is too large for the requested engine."""


class EngineError(RuntimeError):
    """An engine produced an invalid tree; this is always a bug."""


@dataclass(frozen=True)
class CandidateGraph:
    """Compatibility graph over candidate constituents.

    ``adjacency[i]`` is a bit mask of the neighbours of vertex ``i``
    (no self loops).
    """

    vertices: tuple[Constituent, ...]
    weights: tuple[Fraction, ...]
    adjacency: tuple[int, ...]
    n: int

    def __len__(self) -> int:
        return len(self.vertices)

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.adjacency[i] >> j & 1)

    def is_clique(self, members: Sequence[int]) -> bool:
        return all(self.has_edge(a, b) for k, a in enumerate(members) for b in members[k + 1:])


@dataclass(frozen=True)
class CliqueSolution:
    members: tuple[int, ...]
    constituents: tuple[Constituent, ...]
    score: Fraction
    engine: str


def build_graph(pr: PruneResult, hits: HitTable) -> CandidateGraph:
    vs = pr.survivors
    adjacency = []
    for i, a in enumerate(vs):
        mask = 0
        for j, b in enumerate(vs):
            if i != j and compatible(a, b):
                mask |= 1 << j
        adjacency.append(mask)
    return CandidateGraph(tuple(vs), tuple(hits[c] for c in vs), tuple(adjacency), pr.n)


def _objective(weight, size, alpha1, alpha2, normalized: bool) -> Fraction:
    if normalized:
        return (weight + alpha1) / (size + alpha2)
    return Fraction(weight)


def _solution(graph: CandidateGraph, members, alpha1, alpha2, normalized, engine) -> CliqueSolution:
    members = tuple(sorted(members))
    weight = sum((graph.weights[i] for i in members), Fraction(0))
    return CliqueSolution(
        members,
        tuple(graph.vertices[i] for i in members),
        _objective(weight, len(members), alpha1, alpha2, normalized),
        engine,
    )


def _check_alpha(alpha2, normalized: bool) -> None:
    if normalized and alpha2 <= 0:
        raise ValueError("alpha2 must be positive")


def clique_exhaustive(
    graph: CandidateGraph,
    alpha1=0,
    alpha2=1,
    *,
    normalized: bool = True,
    cap: int = EXHAUSTIVE_CAP,
) -> CliqueSolution:
    """Best clique by visiting every clique of the graph."""
    m = len(graph)
    if m > cap:
        raise CapacityError(f"{m} candidates exceed the exhaustive cap of {cap}; try engine 'mitm'")
    alpha1, alpha2 = Fraction(alpha1), Fraction(alpha2)
    _check_alpha(alpha2, normalized)
    adj, w = graph.adjacency, graph.weights
    best_key: tuple | None = None

    def visit(start: int, members: tuple[int, ...], candidates: int, weight: Fraction) -> None:
        nonlocal best_key
        key = (-_objective(weight, len(members), alpha1, alpha2, normalized), len(members), members)
        if best_key is None or key < best_key:
            best_key = key
        for v in range(start, m):
            if candidates >> v & 1:
                visit(v + 1, members + (v,), candidates & adj[v], weight + w[v])

    visit(0, (), (1 << m) - 1, Fraction(0))
    assert best_key is not None
    return _solution(graph, best_key[2], alpha1, alpha2, normalized, "exhaustive")


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def clique_mitm(
    graph: CandidateGraph,
    alpha1=0,
    alpha2=1,
    *,
    normalized: bool = True,
    cap: int = MITM_CAP,
) -> CliqueSolution:
    """Best clique by meet-in-the-middle over two vertex halves."""
    m = len(graph)
    if m > cap:
        raise CapacityError(f"{m} candidates exceed the meet-in-the-middle cap of {cap}; try engine 'dp'")
    alpha1, alpha2 = Fraction(alpha1), Fraction(alpha2)
    _check_alpha(alpha2, normalized)

    # integer arithmetic: objective * scale == q * (w + a1) / (q * size + p)
    scale = math.lcm(*(x.denominator for x in graph.weights), alpha1.denominator)
    w = [int(x * scale) for x in graph.weights]
    a1 = int(alpha1 * scale)
    p, q = alpha2.numerator, alpha2.denominator
    adj = graph.adjacency

    half = (m + 1) // 2
    first_half = (1 << half) - 1

    # table[S][j] = (weight, mask) of the heaviest j-clique inside S
    table: dict[int, list[tuple[int, int]]] = {0: [(0, 0)]}

    def best(subset: int) -> list[tuple[int, int]]:
        row = table.get(subset)
        if row is not None:
            return row
        low = subset & -subset
        u = low.bit_length() - 1
        rest = subset ^ low
        row = list(best(rest))
        for j, (weight, mask) in enumerate(best(rest & adj[u]), start=1):
            cand = (weight + w[u], mask | low)
            if j == len(row):
                row.append(cand)
            elif cand[0] >= row[j][0]:
                # on equal weight the set containing the smallest vertex wins
                row[j] = cand
        table[subset] = row
        return row

    # incumbent: numerator, denominator, size, mask
    inc = [-1, 1, 0, 0]
    second = list(range(half, m))

    def offer(weight: int, size: int, mask: int) -> None:
        if normalized:
            num, den = q * (weight + a1), q * size + p
        else:
            num, den = weight, 1
        lhs, rhs = num * inc[1], inc[0] * den
        if lhs < rhs:
            return
        if lhs == rhs:
            if size > inc[2]:
                return
            if size == inc[2]:
                diff = mask ^ inc[3]
                if not diff or (diff & -diff) & inc[3]:
                    return
        inc[:] = num, den, size, mask

    def walk(start: int, mask: int, size: int, weight: int, common: int) -> None:
        for j, (bw, bmask) in enumerate(best(common)):
            # cheap strict-loss test before the full tie-aware comparison
            if normalized:
                if q * (weight + bw + a1) * inc[1] < inc[0] * (q * (size + j) + p):
                    continue
            elif weight + bw < inc[0]:
                continue
            offer(weight + bw, size + j, mask | bmask)
        for k in range(start, len(second)):
            v = second[k]
            if mask & ~adj[v]:
                continue
            walk(k + 1, mask | 1 << v, size + 1, weight + w[v], common & adj[v])

    walk(0, 0, 0, 0, first_half)
    log.debug("mitm: %d vertices, %d table rows", m, len(table))
    return _solution(graph, _bits(inc[3]), alpha1, alpha2, normalized, "mitm")


def assemble_tree(sol: CliqueSolution, pr: PruneResult, n: int) -> ParseTree:
    """Add the must-include constituents back to a clique solution."""
    cs = set(pr.must_include) | set(sol.constituents)
    if not is_valid_tree(cs, n):
        raise EngineError(f"{sol.engine} engine assembled an invalid tree")
    return ParseTree(n, frozenset(cs))


def binarize(tree: ParseTree) -> ParseTree:
    """Make ``tree`` binary by merging children of wide nodes left to right.

    A node with children ``c1 .. ck`` (ordered by smallest leaf) gains the
    nodes ``c1|c2``, ``c1|c2|c3``, ... up to the union of the first k-1.
    """
    h = hierarchy(tree)
    cs = set(tree.constituents)
    for children in h.children.values():
        acc = 0
        for c in children[:-1]:
            acc |= c
            cs.add(acc)
    return ParseTree(tree.n, frozenset(cs), words=tree.words)


@dataclass(frozen=True)
class AverageResult:
    tree: ParseTree
    objective: Fraction
    engine: str
    num_candidates: int
    prune: PruneResult | None = None


def average(
    individuals: Sequence[ParseTree],
    weights: Sequence | None = None,
    *,
    mode: str = "nonbinary",
    engine: str = "mitm",
    fanout: int = 2,
    max_candidates: int = MITM_CAP,
    prune_iterate: bool = False,
    fallback: bool = True,
) -> AverageResult:
    """Compute the average tree of an ensemble and report how it was found.

    Non-binary individuals are always handled by the dynamic program, which
    needs every individual's fan-out to be at most ``fanout``.  When the
    meet-in-the-middle graph exceeds ``max_candidates`` and ``fallback`` is
    set, the dynamic program is tried instead.
    """
    from . import dp

    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    hits = build_hits(individuals, weights)
    ws = as_weights(weights, len(individuals))
    n = hits.n

    def finish(tree: ParseTree, used: str, size: int, pr=None) -> AverageResult:
        return AverageResult(tree, sum_f1_objective(tree, individuals, ws), used, size, pr)

    if n == 1:
        return finish(ParseTree.minimal(1), engine, 0)

    binary_input = all(t.is_binary() for t in individuals)
    bounded = max(t.max_fan_out() for t in individuals) <= fanout

    def run_dp(reason: str) -> AverageResult:
        if not bounded:
            raise CapacityError(f"{reason}, and individuals exceed fan-out {fanout} so the dp engine cannot help")
        if binary_input and mode == "nonbinary":
            tree = dp.dp_best_tree(hits.counts, n, fanout, "nonbinary")
        elif binary_input:
            tree = dp.dp_best_tree(hits.counts, n, fanout, "binary")
        elif mode == "nonbinary":
            tree = dp.dp_average_general(individuals, ws, fanout)
        else:
            scores = dp.weighted_hit_scorer(individuals, ws, 2 * n - 1)
            found = dp.dp_fixed_size(scores, n, fanout, 2 * n - 1)
            if found is None:
                raise CapacityError(f"no binary tree of fan-out {fanout} exists for these individuals")
            tree = found[0]
        return finish(tree, "dp", 0)

    if not binary_input:
        return run_dp("non-binary individuals need the dp engine")
    if engine == "dp":
        return run_dp("dp engine requested")

    pr = prune_candidates(hits, iterate=prune_iterate) if mode == "nonbinary" else prune_zero_hit(hits)
    graph = build_graph(pr, hits)
    cap = EXHAUSTIVE_CAP if engine == "exhaustive" else max_candidates
    if len(graph) > cap:
        message = f"{len(graph)} candidates exceed the {engine} cap of {cap}"
        if not fallback:
            raise CapacityError(message)
        log.info("%s; falling back to the dp engine", message)
        return run_dp(message)
    solve = clique_exhaustive if engine == "exhaustive" else clique_mitm
    sol = solve(graph, pr.alpha1, pr.alpha2, normalized=(mode == "nonbinary"), cap=cap)
    tree = assemble_tree(sol, pr, n)
    if mode == "binary":
        tree = binarize(tree)
    return finish(tree, engine, len(graph), pr)


def average_tree(individuals: Sequence[ParseTree], weights: Sequence | None = None, **kw) -> ParseTree:
    """The tree maximizing the weighted sum of F1 against ``individuals``."""
    return average(individuals, weights, **kw).tree


__all__ = [
    "AverageResult",
    "CandidateGraph",
    "CapacityError",
    "CliqueSolution",
    "EngineError",
    "TreeError",
    "assemble_tree",
    "average",
    "average_tree",
    "binarize",
    "build_graph",
    "clique_exhaustive",
    "clique_mitm",
]
