"""Dynamic program over bounded fan-out constituents.

``BoundedDP`` computes, for every constituent ``c`` reachable from the
sentence by splitting, the best total score of a subtree over ``c`` with a
given number of nodes.  A constituent is split into two parts by choosing
up to ``2F - 1`` cut points in its word sequence and sending the segments
alternately to the two parts; both parts must have fan-out at most ``F``.
A split part is either kept as a node or dissolved into its parent, which
is how non-binary nodes arise.

The engine serves three purposes: an independent exact solver for binary
individuals, the fixed-size maximizer behind averaging of non-binary
individuals, and the best-binary-tree search.

Known limitation: intermediate groupings also obey the fan-out cap, so a
node whose children cannot be merged pairwise within fan-out ``F`` is not
reachable.  For ``F = 2`` the smallest such node needs nine words.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .hits import weighted_hit_scorer
from .tree import (
    Constituent,
    ParseTree,
    TreeError,
    as_weights,
    fan_out,
    full_span,
    leaves,
    sum_f1_objective,
)

MAX_FANOUT = 3
#: fan-out 3 tables grow quickly; only small sentences are accepted
FANOUT3_MAX_LENGTH = 12


def enumerate_splits(c: Constituent, fanout: int) -> Iterator[tuple[Constituent, Constituent]]:
    """All ways to split ``c`` into two parts of fan-out at most ``fanout``.

    The first part always holds the first word of ``c``, so every unordered
    split is produced exactly once.
    """
    words = leaves(c)
    m = len(words)
    if m < 2:
        return
    prefix = [0]
    for i in words:
        prefix.append(prefix[-1] | 1 << i)

    def cuts(start: int, remaining: int) -> Iterator[tuple[int, ...]]:
        yield ()
        if remaining:
            for j in range(start, m):
                for rest in cuts(j + 1, remaining - 1):
                    yield (j,) + rest

    for inner in cuts(1, 2 * fanout - 1):
        if not inner:
            continue
        bounds = (0,) + inner + (m,)
        odd = even = 0
        for k in range(len(bounds) - 1):
            seg = prefix[bounds[k + 1]] ^ prefix[bounds[k]]
            if k % 2:
                even |= seg
            else:
                odd |= seg
        if fan_out(odd) <= fanout and fan_out(even) <= fanout:
            yield odd, even


def _check_fanout(n: int, fanout: int) -> None:
    if not 1 <= fanout <= MAX_FANOUT:
        raise ValueError(f"fan-out must be between 1 and {MAX_FANOUT}")
    if fanout == 3 and n > FANOUT3_MAX_LENGTH:
        raise ValueError(f"fan-out 3 is limited to sentences of at most {FANOUT3_MAX_LENGTH} words")


class BoundedDP:
    """Memoized best-subtree tables for one sentence and one scoring function.

    Scores are rescaled to integers by their common denominator so that the
    inner loops compare exact integers.  Missing constituents score zero.
    """

    def __init__(self, scores: Mapping[Constituent, Fraction], n: int, fanout: int = 2):
        if n < 1:
            raise TreeError("sentence must have at least one word")
        _check_fanout(n, fanout)
        full = full_span(n)
        values = {c: Fraction(v) for c, v in scores.items() if v and not c & ~full}
        if any(v < 0 for v in values.values()):
            raise ValueError("scores must be non-negative")
        self.n = n
        self.fanout = fanout
        self.scale = math.lcm(1, *(v.denominator for v in values.values()))
        self.score = {c: int(v * self.scale) for c, v in values.items()}
        # full[c][t - |c|] = (value, include c?) ; excl[c][t - |c|] = (value, o, e, t_o)
        self._full: dict[Constituent, list] = {}
        self._excl: dict[Constituent, list] = {}
        self._binary: dict[Constituent, tuple] = {}

    def s(self, c: Constituent) -> int:
        return self.score.get(c, 0)

    # -- non-binary tables -------------------------------------------------

    def full(self, c: Constituent) -> list:
        """Best subtree over ``c`` (``c`` itself may or may not be a node)."""
        row = self._full.get(c)
        if row is not None:
            return row
        m = c.bit_count()
        if m == 1:
            row = [(self.s(c), True)]
        else:
            excl = self.excl(c)
            sc = self.s(c)
            row = []
            for t in range(m, 2 * m):
                best = None
                if t <= 2 * m - 2 and excl[t - m] is not None:
                    best = (excl[t - m][0], False)
                if t - 1 >= m and excl[t - 1 - m] is not None:
                    incl = excl[t - 1 - m][0] + sc
                    if best is None or incl > best[0]:
                        best = (incl, True)
                row.append(best)
        self._full[c] = row
        return row

    def excl(self, c: Constituent) -> list:
        """Best structure over ``c`` with ``c`` itself not a node."""
        row = self._excl.get(c)
        if row is not None:
            return row
        m = c.bit_count()
        row = [None] * (m - 1)
        for o, e in enumerate_splits(c, self.fanout):
            ho, he = self.full(o), self.full(e)
            mo = o.bit_count()
            for a, left in enumerate(ho):
                if left is None:
                    continue
                for b, right in enumerate(he):
                    if right is None:
                        continue
                    value = left[0] + right[0]
                    cur = row[a + b]
                    if cur is None or value > cur[0]:
                        row[a + b] = (value, o, e, mo + a)
        self._excl[c] = row
        return row

    def value(self, c: Constituent, t: int) -> int | None:
        """H(c, t) in scaled integer units, or None if no such subtree."""
        row = self.full(c)
        m = c.bit_count()
        if not m <= t < m + len(row):
            return None
        entry = row[t - m]
        return None if entry is None else entry[0]

    def excluded_value(self, c: Constituent, t: int) -> int | None:
        m = c.bit_count()
        if m == 1:
            return None
        row = self.excl(c)
        if not m <= t < m + len(row):
            return None
        entry = row[t - m]
        return None if entry is None else entry[0]

    def root_value(self, num_nodes: int) -> int | None:
        """Best total over whole-sentence trees with ``num_nodes`` nodes."""
        n = self.n
        if n == 1:
            return self.s(1) if num_nodes == 1 else None
        x = self.excluded_value(full_span(n), num_nodes - 1)
        return None if x is None else x + self.s(full_span(n))

    def root_tree(self, num_nodes: int) -> ParseTree | None:
        if self.root_value(num_nodes) is None:
            return None
        if self.n == 1:
            return ParseTree.minimal(1)
        out: set[Constituent] = {full_span(self.n)}
        self._collect_excl(full_span(self.n), num_nodes - 1, out)
        return ParseTree(self.n, frozenset(out))

    def _collect_full(self, c: Constituent, t: int, out: set) -> None:
        m = c.bit_count()
        if m == 1:
            out.add(c)
            return
        _, include = self.full(c)[t - m]
        if include:
            out.add(c)
            t -= 1
        self._collect_excl(c, t, out)

    def _collect_excl(self, c: Constituent, t: int, out: set) -> None:
        _, o, e, to = self.excl(c)[t - c.bit_count()]
        self._collect_full(o, to, out)
        self._collect_full(e, t - to, out)

    def memo_size(self) -> int:
        return sum(len(r) for r in self._full.values()) + sum(len(r) for r in self._excl.values())

    def constituents_visited(self) -> int:
        return len(self._full.keys() | self._excl.keys())

    # -- binary trees ------------------------------------------------------

    def binary(self, c: Constituent) -> tuple:
        """(best total, split) over binary subtrees rooted at ``c``."""
        entry = self._binary.get(c)
        if entry is not None:
            return entry
        if c.bit_count() == 1:
            entry = (self.s(c), None)
        else:
            best = None
            for o, e in enumerate_splits(c, self.fanout):
                value = self.binary(o)[0] + self.binary(e)[0]
                if best is None or value > best[0]:
                    best = (value, (o, e))
            assert best is not None
            entry = (best[0] + self.s(c), best[1])
        self._binary[c] = entry
        return entry

    def binary_tree(self) -> ParseTree:
        out: set[Constituent] = set()
        stack = [full_span(self.n)]
        while stack:
            c = stack.pop()
            out.add(c)
            split = self.binary(c)[1]
            if split is not None:
                stack.extend(split)
        return ParseTree(self.n, frozenset(out))

    def unscale(self, value: int) -> Fraction:
        return Fraction(value, self.scale)


def dp_best_tree(
    scores: Mapping[Constituent, Fraction],
    n: int,
    fanout: int = 2,
    mode: str = "nonbinary",
) -> ParseTree:
    """Best tree of fan-out at most ``fanout`` under a per-constituent score.

    In ``nonbinary`` mode the objective is ``sum of scores / (|C(T)| + 2n - 1)``,
    which is the average-tree objective when ``scores`` are the hit counts
    of binary individuals; ties go to the smaller tree.  In ``binary`` mode
    the plain score sum is maximized over binary trees.
    """
    dp = BoundedDP(scores, n, fanout)
    if n == 1:
        return ParseTree.minimal(1)
    if mode == "binary":
        return dp.binary_tree()
    if mode != "nonbinary":
        raise ValueError(f"unknown mode {mode!r}")
    best_tau, best = None, None
    for tau in range(n + 1, 2 * n):
        v = dp.root_value(tau)
        if v is None:
            continue
        ratio = Fraction(v, tau + 2 * n - 1)
        if best is None or ratio > best:
            best_tau, best = tau, ratio
    assert best_tau is not None
    tree = dp.root_tree(best_tau)
    assert tree is not None
    return tree


def dp_fixed_size(
    scores: Mapping[Constituent, Fraction],
    n: int,
    fanout: int,
    num_nodes: int,
) -> tuple[ParseTree, Fraction] | None:
    """Tree with exactly ``num_nodes`` nodes maximizing the score sum.

    Returns ``None`` when no tree of that size has fan-out at most ``fanout``.
    """
    if not n < num_nodes < 2 * n:
        raise TreeError(f"node count {num_nodes} outside ({n}, {2 * n})")
    dp = BoundedDP(scores, n, fanout)
    v = dp.root_value(num_nodes)
    if v is None:
        return None
    tree = dp.root_tree(num_nodes)
    assert tree is not None
    return tree, dp.unscale(v)


def dp_average_general(
    individuals: Sequence[ParseTree],
    weights: Sequence | None = None,
    fanout: int = 2,
) -> ParseTree:
    """Exact average tree for arbitrary (also non-binary) individuals.

    For every output size the F1 sum decomposes into per-constituent scores;
    each size is solved with :func:`dp_fixed_size` and the best tree under
    the true objective is returned (smaller trees win ties).
    """
    if not individuals:
        raise TreeError("empty ensemble")
    ws = as_weights(weights, len(individuals))
    n = individuals[0].n
    if n == 1:
        return ParseTree.minimal(1)
    best_tree, best = None, None
    for tau in range(n + 1, 2 * n):
        found = dp_fixed_size(weighted_hit_scorer(individuals, ws, tau), n, fanout, tau)
        if found is None:
            continue
        value = sum_f1_objective(found[0], individuals, ws)
        if best is None or value > best:
            best_tree, best = found[0], value
    assert best_tree is not None
    return best_tree
