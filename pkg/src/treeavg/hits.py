"""Weighted hit counts of constituents across an ensemble of parses."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .tree import Constituent, ParseTree, TreeError, as_weights


@dataclass(frozen=True)
class HitTable:
    """How often (by weight) each constituent occurs in the individuals.

    Constituents missing from ``counts`` have a hit count of zero.
    ``total`` is the summed weight W; a constituent with ``counts[c] == total``
    occurs in every positively weighted individual.
    """

    n: int
    counts: Mapping[Constituent, Fraction]
    total: Fraction
    individual_sizes: tuple[int, ...]

    def __getitem__(self, c: Constituent) -> Fraction:
        return self.counts.get(c, Fraction(0))

    def __len__(self) -> int:
        return len(self.counts)

    def positive(self) -> list[Constituent]:
        return [c for c, h in self.counts.items() if h > 0]


def _check_ensemble(individuals: Sequence[ParseTree]) -> int:
    if not individuals:
        raise TreeError("empty ensemble")
    n = individuals[0].n
    for k, t in enumerate(individuals):
        if t.n != n:
            raise TreeError(f"individual {k} has {t.n} leaves, expected {n}")
    return n


def build_hits(individuals: Sequence[ParseTree], weights: Sequence | None = None) -> HitTable:
    """Count weighted occurrences of every constituent.

    A weight of 2 is the same as listing the individual twice.  Zero-weight
    individuals are allowed but contribute nothing.
    """
    n = _check_ensemble(individuals)
    ws = as_weights(weights, len(individuals))
    total = sum(ws, Fraction(0))
    if total <= 0:
        raise TreeError("at least one individual needs a positive weight")
    counts: dict[Constituent, Fraction] = {}
    for w, t in zip(ws, individuals):
        if not w:
            continue
        for c in t.constituents:
            counts[c] = counts.get(c, Fraction(0)) + w
    return HitTable(n, counts, total, tuple(len(t) for t in individuals))


def weighted_hit_scorer(
    individuals: Sequence[ParseTree],
    weights: Sequence | None,
    num_nodes: int,
) -> dict[Constituent, Fraction]:
    """Per-constituent scores for trees with exactly ``num_nodes`` nodes.

    For a fixed output size the weighted F1 sum decomposes over
    constituents: each occurrence of ``c`` in individual ``k`` contributes
    ``w_k / (num_nodes + |C(T_k)|)``.  The returned dict omits zero scores.
    The constant factor 2 of F1 is dropped.
    """
    n = _check_ensemble(individuals)
    if not n < num_nodes < 2 * n:
        raise TreeError(f"node count {num_nodes} outside ({n}, {2 * n})")
    ws = as_weights(weights, len(individuals))
    scores: dict[Constituent, Fraction] = {}
    for w, t in zip(ws, individuals):
        if not w:
            continue
        share = w / (num_nodes + len(t))
        for c in t.constituents:
            scores[c] = scores.get(c, Fraction(0)) + share
    return scores
