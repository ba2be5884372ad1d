"""Constituents, parse trees and the F1 objective.

A constituent is stored as a Python ``int`` used as a bit set over leaf
positions: bit ``i`` is set iff word ``i`` belongs to the constituent.  Python
integers are arbitrary precision, so set operations are word-parallel and the
sentence length is only bounded by :data:`MAX_LENGTH`.

All scores are :class:`fractions.Fraction` values; nothing in this package
compares floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Constituent = int
Score = Fraction

#: Largest sentence the engines accept.  Raise it if you really need to.
MAX_LENGTH = 256


class TreeError(ValueError):
    """Raised for malformed trees or mismatched ensembles."""


def constituent(leaves: Iterable[int]) -> Constituent:
    """Build a constituent bit set from leaf indices."""
    mask = 0
    for i in leaves:
        if i < 0:
            raise TreeError(f"negative leaf index {i}")
        mask |= 1 << i
    if not mask:
        raise TreeError("a constituent needs at least one leaf")
    return mask


def leaves(c: Constituent) -> tuple[int, ...]:
    """Sorted leaf indices of ``c``."""
    out = []
    while c:
        low = c & -c
        out.append(low.bit_length() - 1)
        c ^= low
    return tuple(out)


def full_span(n: int) -> Constituent:
    return (1 << n) - 1


def fan_out(c: Constituent) -> int:
    """Number of maximal runs of consecutive leaves in ``c``."""
    if c <= 0:
        raise TreeError("empty constituent has no fan-out")
    # a run starts at every set bit whose lower neighbour is unset
    return (c & ~(c << 1)).bit_count()


def compatible(a: Constituent, b: Constituent) -> bool:
    """True iff ``a`` and ``b`` are disjoint or one contains the other."""
    common = a & b
    return common == 0 or common == a or common == b


def canonical_key(c: Constituent) -> tuple[int, int, tuple[int, ...]]:
    """Sort key: smallest leaf, then size, then lexicographic leaf order."""
    low = (c & -c).bit_length() - 1
    return low, c.bit_count(), leaves(c)


def canonical_order(cs: Iterable[Constituent]) -> list[Constituent]:
    return sorted(cs, key=canonical_key)


def trivial_constituents(n: int) -> frozenset[Constituent]:
    """The ``n`` single words plus the whole sentence."""
    return frozenset([1 << i for i in range(n)] + [full_span(n)])


def is_trivial(c: Constituent, n: int) -> bool:
    return c == full_span(n) or c.bit_count() == 1


def is_valid_tree(constituents: Iterable[Constituent], n: int) -> bool:
    """Check that ``constituents`` form a constituency tree over ``n`` words."""
    if n < 1:
        return False
    cs = set(constituents)
    full = full_span(n)
    if not trivial_constituents(n) <= cs:
        return False
    if any(c <= 0 or c & ~full for c in cs):
        return False
    # for n == 1 the single word is the whole sentence
    if not min(n + 1, 2 * n - 1) <= len(cs) <= 2 * n - 1:
        return False
    ordered = sorted(cs)
    for i, a in enumerate(ordered):
        for b in ordered[i + 1:]:
            if not compatible(a, b):
                return False
    return True


@dataclass(frozen=True)
class ParseTree:
    """An immutable constituency tree over ``n`` words.

    ``labels`` maps a constituent to its chain of node labels, outermost
    first; a unary chain ``(S (VP ...))`` over one leaf set gives
    ``("S", "VP")``.  For single words the innermost label is the
    preterminal tag.  ``words`` is optional.
    """

    n: int
    constituents: frozenset[Constituent]
    labels: Mapping[Constituent, tuple[str, ...]] | None = field(default=None, compare=True)
    words: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "constituents", frozenset(self.constituents))
        if self.labels is not None and not isinstance(self.labels, _FrozenLabels):
            object.__setattr__(self, "labels", _FrozenLabels(self.labels))
        if self.words is not None:
            object.__setattr__(self, "words", tuple(self.words))
            if len(self.words) != self.n:
                raise TreeError(f"{len(self.words)} words for a tree over {self.n} leaves")
        if self.n > MAX_LENGTH:
            raise TreeError(f"sentence length {self.n} exceeds MAX_LENGTH={MAX_LENGTH}")
        if not is_valid_tree(self.constituents, self.n):
            raise TreeError("constituents do not form a valid tree")

    @classmethod
    def from_leaf_sets(cls, n: int, spans: Iterable[Iterable[int]], **kw) -> ParseTree:
        """Build a tree from non-trivial leaf sets; trivial ones are added."""
        cs = set(trivial_constituents(n))
        cs.update(constituent(s) for s in spans)
        return cls(n, frozenset(cs), **kw)

    @classmethod
    def minimal(cls, n: int) -> ParseTree:
        return cls(n, trivial_constituents(n))

    def __len__(self) -> int:
        return len(self.constituents)

    def __contains__(self, c: object) -> bool:
        return c in self.constituents

    def nontrivial(self) -> list[Constituent]:
        return canonical_order(c for c in self.constituents if not is_trivial(c, self.n))

    def is_binary(self) -> bool:
        return len(self.constituents) == 2 * self.n - 1

    def max_fan_out(self) -> int:
        return max(fan_out(c) for c in self.constituents)

    def unlabeled(self) -> ParseTree:
        return ParseTree(self.n, self.constituents, words=self.words)


class _FrozenLabels(dict):
    """A hashable, read-only dict so that ParseTree stays hashable."""

    def __hash__(self) -> int:  # type: ignore[override]
        return hash(frozenset(self.items()))

    def _readonly(self, *args, **kwargs):
        raise TypeError("labels are immutable")

    __setitem__ = __delitem__ = clear = pop = popitem = setdefault = update = _readonly  # type: ignore

    def __reduce__(self):
        return (_FrozenLabels, (dict(self),))


@dataclass(frozen=True)
class Hierarchy:
    """Parent and ordered children of every constituent of a tree."""

    root: Constituent
    parent: Mapping[Constituent, Constituent | None]
    children: Mapping[Constituent, tuple[Constituent, ...]]


def hierarchy(tree: ParseTree) -> Hierarchy:
    """Derive the parent/children relation of ``tree``.

    The parent of a constituent is its smallest strict superset; children
    are ordered by their smallest leaf.
    """
    by_size = sorted(tree.constituents, key=lambda c: (c.bit_count(), c))
    parent: dict[Constituent, Constituent | None] = {}
    for i, c in enumerate(by_size):
        parent[c] = None
        for d in by_size[i + 1:]:
            if d.bit_count() > c.bit_count() and c & d == c:
                parent[c] = d
                break
    children: dict[Constituent, list[Constituent]] = {c: [] for c in by_size}
    for c, p in parent.items():
        if p is not None:
            children[p].append(c)
    ordered = {c: tuple(sorted(ch, key=lambda x: x & -x)) for c, ch in children.items()}
    return Hierarchy(full_span(tree.n), parent, ordered)


def _check_same_length(a: ParseTree, b: ParseTree) -> None:
    if a.n != b.n:
        raise TreeError(f"trees over {a.n} and {b.n} leaves cannot be compared")


def pairwise_f1(pred: ParseTree, ref: ParseTree) -> Score:
    """F1 between two trees over all constituents, trivial ones included."""
    _check_same_length(pred, ref)
    common = len(pred.constituents & ref.constituents)
    return Fraction(2 * common, len(pred.constituents) + len(ref.constituents))


def as_weights(weights: Sequence | None, k: int) -> list[Fraction]:
    """Normalise user weights to a list of non-negative fractions."""
    if weights is None:
        return [Fraction(1)] * k
    if len(weights) != k:
        raise TreeError(f"{len(weights)} weights for {k} individuals")
    out = [Fraction(w) for w in weights]
    if any(w < 0 for w in out):
        raise TreeError("weights must be non-negative")
    return out


def sum_f1_objective(
    tree: ParseTree,
    individuals: Sequence[ParseTree],
    weights: Sequence | None = None,
) -> Score:
    """Weighted sum of F1 scores of ``tree`` against every individual."""
    ws = as_weights(weights, len(individuals))
    return sum((w * pairwise_f1(tree, t) for w, t in zip(ws, individuals)), Fraction(0))
