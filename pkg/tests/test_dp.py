from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import all_trees, as_sets, best, objective, runs
from treeavg.dp import (
    BoundedDP,
    dp_average_general,
    dp_best_tree,
    dp_fixed_size,
    enumerate_splits,
)
from treeavg.evalio import random_instance
from treeavg.hits import build_hits
from treeavg.search import average
from treeavg.tree import ParseTree, constituent, fan_out, full_span, leaves


def tree(n, *spans):
    return ParseTree.from_leaf_sets(n, spans)


T1, T3 = tree(3, [0, 1]), tree(3, [1, 2])
RUNNING = build_hits([T1, T1, T3]).counts


def test_split_examples():
    assert list(enumerate_splits(constituent([4, 5]), 1)) == [(constituent([4]), constituent([5]))]
    assert (constituent([0]), constituent([3])) in set(enumerate_splits(constituent([0, 3]), 2))
    assert (constituent([0, 2]), constituent([1])) in set(enumerate_splits(constituent([0, 1, 2]), 2))


@given(st.integers(1, 2**10 - 1), st.integers(1, 3))
def test_splits_are_exactly_the_bounded_bipartitions(c, fanout):
    if fan_out(c) > fanout or c.bit_count() < 2:
        return
    got = list(enumerate_splits(c, fanout))
    assert len(got) == len(set(got))
    low = c & -c
    expected = set()
    words = leaves(c)
    for size in range(1, len(words)):
        for part in combinations(words, size):
            o = sum(1 << i for i in part)
            e = c ^ o
            if o & low and runs(leaves(o)) <= fanout and runs(leaves(e)) <= fanout:
                expected.add((o, e))
    assert set(got) == expected


def test_dp_best_tree_examples():
    assert dp_best_tree(RUNNING, 3, fanout=1) == T1
    assert BoundedDP(RUNNING, 3, 1).root_value(5) == 14
    only_trivial = {c: 1 for c in ParseTree.minimal(6).constituents}
    assert dp_best_tree(only_trivial, 6) == ParseTree.minimal(6)
    assert dp_best_tree({3: 5}, 2) == ParseTree.minimal(2)
    assert dp_best_tree(RUNNING, 1) == ParseTree.minimal(1)
    with pytest.raises(ValueError):
        dp_best_tree(RUNNING, 3, mode="ternary")


def test_dp_fixed_size_examples():
    found = dp_fixed_size(RUNNING, 3, 1, 5)
    assert found == (T1, 14)
    assert dp_fixed_size(RUNNING, 3, 1, 4) == (ParseTree.minimal(3), 12)
    with pytest.raises(ValueError):
        dp_fixed_size(RUNNING, 3, 1, 6)


def test_fixed_size_binary_matches_binary_mode():
    for seed in range(30):
        inds = random_instance(seed, 7, 3)
        hits = build_hits(inds).counts
        t, total = dp_fixed_size(hits, 7, 2, 13)
        b = dp_best_tree(hits, 7, 2, "binary")
        assert t.is_binary() and b.is_binary()
        assert total == sum(hits.get(c, 0) for c in b.constituents)


def test_fanout_guards():
    with pytest.raises(ValueError):
        BoundedDP({}, 13, 3)
    with pytest.raises(ValueError):
        BoundedDP({}, 5, 4)
    with pytest.raises(ValueError):
        BoundedDP({1: Fraction(-1)}, 2)


def test_general_examples():
    odd = tree(5, [0, 1, 2], [3, 4])
    assert dp_average_general([odd]) == odd
    # minimal tree and {0,1} tie at 17/9; the smaller tree wins
    pair = [ParseTree.minimal(3), T1]
    top, winners = best([as_sets(t) for t in pair], [1, 1], 3)
    assert top == Fraction(17, 9) and len(winners) == 2
    assert dp_average_general(pair) == ParseTree.minimal(3)


def test_known_gap_at_nine_words():
    # a fan-out-2 node whose four children cannot be grouped pairwise within
    # fan-out 2; the dp cannot build it, although it is a valid F=2 tree
    gap = tree(9, [0, 1, 2, 3, 4, 5, 7, 8], [0, 3], [1, 5], [2, 7], [4, 8])
    assert gap.max_fan_out() == 2
    scores = {c: 1 for c in gap.constituents}
    assert dp_fixed_size(scores, 9, 2, len(gap))[1] < len(gap)
    assert dp_average_general([gap]) != gap


def bounded_count(n, fanout):
    return sum(1 for c in range(1, 1 << n) if fan_out(c) <= fanout)


@given(st.integers(0, 10**6), st.integers(2, 9), st.integers(1, 4), st.sampled_from([1, 2]))
def test_tables_are_consistent(seed, n, k, fanout):
    inds = random_instance(seed, n, k, fanout)
    dp = BoundedDP(build_hits(inds).counts, n, fanout)
    dp_tau = [dp.root_value(t) for t in range(n + 1, 2 * n)]
    assert dp_tau[-1] is not None
    assert dp.memo_size() <= bounded_count(n, fanout) * (2 * n - 1)
    for c in list(dp._full):
        m = c.bit_count()
        if m == 1:
            continue
        for t in range(m + 1, 2 * m):
            x = dp.excluded_value(c, t) if t <= 2 * m - 2 else None
            y = dp.excluded_value(c, t - 1)
            options = [v for v in (x, None if y is None else y + dp.s(c)) if v is not None]
            assert dp.value(c, t) == (max(options) if options else None)
    for t in range(n + 1, 2 * n):
        built = dp.root_tree(t)
        if built is not None:
            assert len(built) == t
            assert built.max_fan_out() <= fanout
            assert dp.unscale(dp.root_value(t)) == sum(build_hits(inds)[c] for c in built.constituents)


def nonbinary_instance(draw, n, k):
    pool = [t for t in all_trees(n) if all(runs(c) <= 2 for c in t)]
    picks = [draw(st.sampled_from(pool)) for _ in range(k)]
    return [tree(n, *[sorted(c) for c in p if 1 < len(c) < n]) for p in picks]


@given(st.integers(2, 6), st.integers(1, 4), st.data())
def test_general_matches_brute_force(n, k, data):
    inds = nonbinary_instance(data.draw, n, k)
    ws = [Fraction(data.draw(st.integers(0, 4)), data.draw(st.integers(1, 3))) for _ in inds]
    if not any(ws):
        ws[0] = Fraction(1)
    top, winners = best([as_sets(t) for t in inds], ws, n, fanout=2)
    out = dp_average_general(inds, ws)
    assert as_sets(out) in winners
    assert objective(as_sets(out), [as_sets(t) for t in inds], ws) == top
    res = average(inds, ws, mode="binary")
    bin_top, _ = best([as_sets(t) for t in inds], ws, n, fanout=2, binary=True)
    assert res.tree.is_binary() and res.objective == bin_top


@given(st.integers(0, 10**6), st.integers(2, 6), st.integers(1, 5), st.sampled_from([1, 2]))
def test_binary_mode_matches_brute_force(seed, n, k, fanout):
    inds = random_instance(seed, n, k, fanout)
    hits = build_hits(inds).counts
    b = dp_best_tree(hits, n, fanout, "binary")
    top = max(
        sum(hits.get(sum(1 << i for i in c), 0) for c in t)
        for t in all_trees(n)
        if len(t) == 2 * n - 1 and all(runs(c) <= fanout for c in t)
    )
    assert sum(hits.get(c, 0) for c in b.constituents) == top
    assert full_span(n) in b.constituents
