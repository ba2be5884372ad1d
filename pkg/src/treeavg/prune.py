"""Candidate pruning with hit-count bounds.

Two facts about any optimal average tree T* drive this module:

* a constituent that occurs in every individual is in T* (and is compatible
  with everything that could be in T*), so it is fixed up front;
* every other constituent of a smallest optimal T* has a hit count strictly
  above a threshold computed from the must-include set and the sorted
  positive hit counts.

Both let the clique search work on O(n) candidates instead of O(2^n).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .hits import HitTable
from .tree import Constituent, canonical_order


@dataclass(frozen=True)
class PruneResult:
    """Reduced clique problem: fixed constituents, candidates and constants.

    The objective over a candidate clique Q is
    ``(sum of h over Q + alpha1) / (|Q| + alpha2)``.
    """

    must_include: frozenset[Constituent]
    survivors: tuple[Constituent, ...]
    alpha1: Fraction
    alpha2: int
    threshold: Fraction
    n: int


def all_hit_set(hits: HitTable) -> frozenset[Constituent]:
    """Constituents whose hit count equals the total weight."""
    return frozenset(c for c, h in hits.counts.items() if h == hits.total)


def hit_lower_bound(
    hits: HitTable,
    must_include: Iterable[Constituent] = (),
    universe: Iterable[Constituent] | None = None,
) -> Fraction:
    """Threshold that every other constituent of the average tree exceeds.

    Returns the minimum over ``|P| <= j <= 2n-2`` of
    ``(sum of the j-|P| smallest positive hits outside P + h(P)) / (j + 2n - 1)``.
    Values of ``j`` that would need more positive-hit constituents than
    exist are skipped.  If no ``j`` is feasible nothing outside ``P`` can be
    added, and the total weight is returned.

    ``universe`` restricts where the positive hit counts are drawn from; it
    is only safe to pass a set already known to contain T* minus ``P``.
    """
    n = hits.n
    p = set(must_include)
    pool = hits.counts if universe is None else {c: hits[c] for c in universe}
    lam = sorted(h for c, h in pool.items() if h > 0 and c not in p)
    base = sum((hits[c] for c in p), Fraction(0))
    best: Fraction | None = None
    prefix = Fraction(0)
    sums = [prefix]
    for h in lam:
        prefix += h
        sums.append(prefix)
    for j in range(len(p), 2 * n - 1):
        m = j - len(p)
        if m > len(lam):
            break
        value = (sums[m] + base) / (j + 2 * n - 1)
        if best is None or value < best:
            best = value
    return hits.total if best is None else best


def prune_candidates(hits: HitTable, iterate: bool = False) -> PruneResult:
    """Fix all-hit constituents and drop those under the lower bound.

    With ``iterate=True`` the lower bound is recomputed from the surviving
    candidates until nothing changes.
    """
    p = all_hit_set(hits)
    threshold = hit_lower_bound(hits, p)
    survivors = [c for c, h in hits.counts.items() if threshold < h < hits.total]
    while iterate:
        # pruned constituents are absent from the smallest optimal tree, so
        # the bound may be recomputed over the survivors alone; it only grows
        threshold = hit_lower_bound(hits, p, universe=survivors)
        kept = [c for c in survivors if hits[c] > threshold]
        if len(kept) == len(survivors):
            break
        survivors = kept
    return _result(hits, p, survivors, threshold)


def prune_zero_hit(hits: HitTable) -> PruneResult:
    """Fix all-hit constituents and keep every other positive-hit one.

    This skips the lower bound (its argument does not hold when the output
    is forced to be binary) and is also the reference the full pruning is
    checked against.
    """
    p = all_hit_set(hits)
    survivors = [c for c, h in hits.counts.items() if 0 < h < hits.total]
    return _result(hits, p, survivors, Fraction(0))


def _result(hits: HitTable, p: frozenset[Constituent], survivors, threshold) -> PruneResult:
    alpha1 = sum((hits[c] for c in p), Fraction(0))
    return PruneResult(
        must_include=p,
        survivors=tuple(canonical_order(survivors)),
        alpha1=alpha1,
        alpha2=len(p) + 2 * hits.n - 1,
        threshold=threshold,
        n=hits.n,
    )
