"""Brute-force reference implementations, kept independent of the package.

Trees are plain ``frozenset`` of ``frozenset`` leaf sets here; nothing in
this file imports the package's tree or scoring code.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations


def runs(leafset) -> int:
    s = sorted(leafset)
    return 1 + sum(1 for a, b in zip(s, s[1:]) if b != a + 1)


def nested_or_disjoint(a, b) -> bool:
    return not (a & b) or a <= b or b <= a


@lru_cache(maxsize=None)
def all_trees(n: int) -> tuple[frozenset, ...]:
    """Every tree over ``n`` leaves as a set of leaf sets, trivial ones included."""
    trivial = [frozenset([i]) for i in range(n)] + [frozenset(range(n))]
    optional = [
        frozenset(s)
        for size in range(2, n)
        for s in combinations(range(n), size)
    ]
    out = []

    def grow(start: int, chosen: list) -> None:
        out.append(frozenset(trivial) | frozenset(chosen))
        for i in range(start, len(optional)):
            c = optional[i]
            if all(nested_or_disjoint(c, d) for d in chosen):
                chosen.append(c)
                grow(i + 1, chosen)
                chosen.pop()

    grow(0, [])
    return tuple(out)


def f1(a, b) -> Fraction:
    return Fraction(2 * len(a & b), len(a) + len(b))


def objective(tree, individuals, weights) -> Fraction:
    return sum((Fraction(w) * f1(tree, t) for t, w in zip(individuals, weights)), Fraction(0))


def best(individuals, weights, n: int, fanout: int | None = None, binary: bool = False):
    """Optimal objective and the set of optimal trees (optionally restricted)."""
    top, winners = None, []
    for t in all_trees(n):
        if fanout is not None and any(runs(c) > fanout for c in t):
            continue
        if binary and len(t) != 2 * n - 1:
            continue
        v = objective(t, individuals, weights)
        if top is None or v > top:
            top, winners = v, [t]
        elif v == top:
            winners.append(t)
    return top, winners


def as_sets(tree) -> frozenset:
    """Package ParseTree -> set of leaf sets."""
    return frozenset(
        frozenset(i for i in range(tree.n) if c >> i & 1) for c in tree.constituents
    )


def clique_brute(weights, edges, alpha1, alpha2, normalized=True):
    """Best vertex subset by (score, -size, members) over all cliques."""
    m = len(weights)
    key_best, arg = None, None
    for size in range(m + 1):
        for q in combinations(range(m), size):
            if any((a, b) not in edges for a, b in combinations(q, 2)):
                continue
            w = sum((weights[v] for v in q), Fraction(0))
            score = (w + alpha1) / (size + alpha2) if normalized else w
            key = (-score, size, q)
            if key_best is None or key < key_best:
                key_best, arg = key, q
    return arg, -key_best[0]
