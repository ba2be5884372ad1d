"""Reading and writing discontinuous trees in bracket notation.

One tree per line.  Nodes are ``(LABEL child ...)`` and terminals are
``index=word`` with 0-based indices, so a node may cover non-adjacent
words::

    (ROOT (o 0=Wake 3=up) (o 1=your 2=friend))

A node whose only child is a terminal is a preterminal; its label is the
tag of that word.  Unlabeled trees are written with ``ROOT`` for the
sentence node and ``o`` for every other phrase, terminals appearing bare.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from ..tree import Constituent, ParseTree, TreeError, full_span, hierarchy, leaves

ROOT_LABEL = "ROOT"
PHRASE_LABEL = "o"

_TOKEN = re.compile(r"\(|\)|[^\s()]+")
_TERMINAL = re.compile(r"(\d+)=(.+)")
_FORBIDDEN = re.compile(r"[\s()]")


class FormatError(ValueError):
    """A line is not a well-formed bracketed tree."""


@dataclass(frozen=True)
class SentenceRecord:
    """A tree read from a treebank line, with its words and labels."""

    tree: ParseTree

    @property
    def n(self) -> int:
        return self.tree.n

    @property
    def words(self) -> tuple[str, ...] | None:
        return self.tree.words

    def tag(self, i: int) -> str | None:
        """Preterminal label of word ``i``, if the word has one."""
        chain = (self.tree.labels or {}).get(1 << i)
        return chain[-1] if chain else None

    def punct_mask(self, punct_labels: Iterable[str]) -> frozenset[int]:
        punct = set(punct_labels)
        return frozenset(i for i in range(self.n) if self.tag(i) in punct)


def parse_discbracket(line: str) -> SentenceRecord:
    """Parse one bracketed tree; raises :class:`FormatError`."""
    tokens = _TOKEN.findall(line)
    if not tokens:
        raise FormatError("empty line")
    pos = 0
    words: dict[int, str] = {}
    chains: dict[Constituent, list[str]] = {}

    def node() -> Constituent:
        nonlocal pos
        if tokens[pos] != "(":
            raise FormatError(f"expected '(' at token {pos}, got {tokens[pos]!r}")
        pos += 1
        if pos >= len(tokens) or tokens[pos] in "()":
            raise FormatError(f"missing label at token {pos}")
        label = tokens[pos]
        pos += 1
        mask = 0
        kids = 0
        while True:
            if pos >= len(tokens):
                raise FormatError("unbalanced parentheses: missing ')'")
            tok = tokens[pos]
            if tok == ")":
                pos += 1
                break
            if tok == "(":
                child = node()
            else:
                child = terminal(tok)
                pos += 1
            if mask & child:
                raise FormatError(f"word index {leaves(mask & child)[0]} occurs twice")
            mask |= child
            kids += 1
        if not kids:
            raise FormatError(f"node {label!r} has no children")
        # the outermost label of a unary chain comes first
        chains.setdefault(mask, []).insert(0, label)
        return mask

    def terminal(tok: str) -> Constituent:
        m = _TERMINAL.fullmatch(tok)
        if not m:
            raise FormatError(f"bad terminal {tok!r}; expected index=word")
        i = int(m.group(1))
        if i in words:
            raise FormatError(f"word index {i} occurs twice")
        words[i] = m.group(2)
        return 1 << i

    root = node()
    if pos != len(tokens):
        raise FormatError(f"trailing material after the tree: {' '.join(tokens[pos:])!r}")
    n = len(words)
    if root != full_span(n):
        missing = sorted(set(range(max(words) + 1)) - set(words))
        raise FormatError(f"word indices must be 0..{n - 1}; missing {missing}")
    cs = set(chains) | {1 << i for i in range(n)}
    try:
        tree = ParseTree(
            n,
            frozenset(cs),
            labels={c: tuple(ls) for c, ls in chains.items()},
            words=tuple(words[i] for i in range(n)),
        )
    except TreeError as exc:
        raise FormatError(str(exc)) from exc
    return SentenceRecord(tree)


def write_discbracket(record: SentenceRecord | ParseTree) -> str:
    """Serialize a tree canonically (children ordered by smallest word)."""
    tree = record.tree if isinstance(record, SentenceRecord) else record
    labels = tree.labels or {}
    words = tree.words or tuple(f"w{i}" for i in range(tree.n))
    for w in words:
        if not w or _FORBIDDEN.search(w):
            raise ValueError(f"word {w!r} cannot be written in bracket notation")
    h = hierarchy(tree)
    root = full_span(tree.n)

    def emit(c: Constituent) -> str:
        if c.bit_count() == 1:
            i = c.bit_length() - 1
            body = f"{i}={words[i]}"
        else:
            body = " ".join(emit(child) for child in h.children[c])
        chain = labels.get(c)
        if chain is None:
            chain = (ROOT_LABEL,) if c == root else () if c.bit_count() == 1 else (PHRASE_LABEL,)
        for label in reversed(chain):
            body = f"({label} {body})"
        return body

    return emit(root)


def iter_treebank(path: str | Path) -> Iterator[tuple[int, SentenceRecord]]:
    """Yield ``(line_number, record)``; errors name the file and line."""
    with open(path, encoding="utf-8") as fh:
        for number, line in enumerate(fh, start=1):
            try:
                yield number, parse_discbracket(line)
            except FormatError as exc:
                raise FormatError(f"{path}:{number}: {exc}") from None


def read_treebank(path: str | Path) -> list[SentenceRecord]:
    return [rec for _, rec in iter_treebank(path)]


def format_treebank(trees: Iterable[SentenceRecord | ParseTree]) -> str:
    return "".join(write_discbracket(t) + "\n" for t in trees)
