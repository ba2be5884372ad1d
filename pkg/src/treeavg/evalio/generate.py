"""Seeded random binary trees with bounded fan-out.

Trees are grown top-down.  A node's word sequence is cut at one to
``2F - 1`` random points and the segments are dealt alternately to the two
children; cuts that would give a child more than ``F`` components are
redrawn.  With ``agreement > 0`` every individual copies the split of a
shared reference tree with that probability wherever the reference has the
same node, which makes ensembles that partly agree, as real parser runs do.
"""

from __future__ import annotations

import random
from typing import Sequence

from ..tree import Constituent, ParseTree, fan_out, full_span, hierarchy, leaves

_MAX_REDRAWS = 20


def _random_split(rng: random.Random, c: Constituent, fanout: int) -> tuple[Constituent, Constituent]:
    words = leaves(c)
    m = len(words)
    for _ in range(_MAX_REDRAWS):
        k = rng.randint(1, min(2 * fanout - 1, m - 1))
        cuts = sorted(rng.sample(range(1, m), k))
        bounds = [0] + cuts + [m]
        parts = [0, 0]
        for s in range(len(bounds) - 1):
            for i in words[bounds[s]:bounds[s + 1]]:
                parts[s % 2] |= 1 << i
        if fan_out(parts[0]) <= fanout and fan_out(parts[1]) <= fanout:
            return parts[0], parts[1]
    # a single cut never raises fan-out
    cut = rng.randint(1, m - 1)
    left = 0
    for i in words[:cut]:
        left |= 1 << i
    return left, c ^ left


def random_tree(
    rng: random.Random,
    n: int,
    fanout: int = 2,
    reference: ParseTree | None = None,
    agreement: float = 0.0,
) -> ParseTree:
    """One random binary tree over ``n`` words with fan-out at most ``fanout``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if fanout < 1:
        raise ValueError("fan-out must be at least 1")
    ref_children = hierarchy(reference).children if reference is not None else {}
    cs = {full_span(n)}
    stack = [full_span(n)]
    while stack:
        c = stack.pop()
        if c.bit_count() == 1:
            continue
        kids = ref_children.get(c)
        if kids and len(kids) == 2 and agreement and rng.random() < agreement:
            left, right = kids
        else:
            left, right = _random_split(rng, c, fanout)
        cs.update((left, right))
        stack.extend((left, right))
    return ParseTree(n, frozenset(cs))


def random_instance(
    seed: int,
    n: int,
    k: int,
    fanout: int = 2,
    distinct: bool = False,
    agreement: float = 0.0,
) -> list[ParseTree]:
    """``k`` random binary individuals over ``n`` words, fully determined by ``seed``.

    With ``distinct`` the individuals are pairwise different; this raises
    ``ValueError`` if that cannot be achieved after many redraws.
    """
    if fanout not in (1, 2):
        raise ValueError("fan-out must be 1 or 2")
    if k < 1:
        raise ValueError("k must be at least 1")
    rng = random.Random(seed)
    reference = random_tree(rng, n, fanout) if agreement else None
    trees: list[ParseTree] = []
    seen: set[frozenset] = set()
    redraws = 0
    while len(trees) < k:
        t = random_tree(rng, n, fanout, reference, agreement)
        if distinct and t.constituents in seen:
            redraws += 1
            if redraws > 1000:
                raise ValueError(f"could not draw {k} distinct trees over {n} words")
            continue
        seen.add(t.constituents)
        trees.append(t)
    return trees


def random_corpus(
    seed: int,
    sentences: int,
    max_n: int,
    k: int,
    fanout: int = 2,
    agreement: float = 0.0,
    min_n: int = 2,
) -> tuple[list[ParseTree], list[list[ParseTree]]]:
    """Reference trees and ``k`` aligned individual treebanks.

    Sentence lengths are uniform in ``[min_n, max_n]``.  Returns
    ``(references, individuals)`` where ``individuals[j][i]`` is individual
    ``j``'s tree for sentence ``i``.
    """
    rng = random.Random(seed)
    refs: list[ParseTree] = []
    columns: list[list[ParseTree]] = [[] for _ in range(k)]
    for _ in range(sentences):
        n = rng.randint(min(min_n, max_n), max_n)
        ref = random_tree(rng, n, fanout)
        refs.append(ref)
        for j in range(k):
            columns[j].append(random_tree(rng, n, fanout, ref, agreement))
    return refs, columns


def with_words(tree: ParseTree, words: Sequence[str] | None = None) -> ParseTree:
    words = tuple(words) if words is not None else tuple(f"w{i}" for i in range(tree.n))
    return ParseTree(tree.n, tree.constituents, labels=tree.labels, words=words)
