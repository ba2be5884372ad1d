"""Corpus-level unlabeled F1 for (discontinuous) constituency trees.

Punctuation words are removed (found by their gold preterminal label), the
remaining words are renumbered, and trivial constituents -- single words
and the whole sentence -- are ignored.  Counts are summed over the corpus
before precision, recall and F1 are taken.  Constituents are split into
continuous (fan-out 1) and discontinuous (fan-out 2 or more) after
renumbering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..tree import Constituent, fan_out
from .treebank import PHRASE_LABEL, SentenceRecord

DEFAULT_PUNCT_LABELS = ("$,", "$.", "$(")
CATEGORIES = ("overall", "cont", "disco")


def _percent(num: int, den: int) -> float:
    return 100.0 * num / den if den else 0.0


@dataclass
class Counts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def precision(self) -> float:
        return _percent(self.tp, self.tp + self.fp)

    @property
    def recall(self) -> float:
        return _percent(self.tp, self.tp + self.fn)

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def as_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": round(self.precision, 1),
            "recall": round(self.recall, 1),
            "f1": round(self.f1, 1),
        }


@dataclass
class CorpusReport:
    sentences: int = 0
    overall: Counts = field(default_factory=Counts)
    cont: Counts = field(default_factory=Counts)
    disco: Counts = field(default_factory=Counts)
    # label -> [gold constituents recovered, gold constituents]
    per_label: dict[str, list[int]] | None = None

    def category(self, name: str) -> Counts:
        return getattr(self, name)

    def label_recall(self, label: str) -> float:
        assert self.per_label is not None
        found, total = self.per_label[label]
        return _percent(found, total)

    def as_dict(self) -> dict:
        out: dict = {"sentences": self.sentences}
        for name in CATEGORIES:
            out[name] = self.category(name).as_dict()
        if self.per_label is not None:
            out["per_label"] = {
                label: {"found": f, "gold": t, "recall": round(_percent(f, t), 1)}
                for label, (f, t) in sorted(self.per_label.items())
            }
        return out

    def format_text(self) -> str:
        lines = [f"sentences {self.sentences}", f"{'':8} {'TP':>7} {'FP':>7} {'FN':>7} {'P':>6} {'R':>6} {'F1':>6}"]
        for name in CATEGORIES:
            c = self.category(name)
            lines.append(
                f"{name:8} {c.tp:7d} {c.fp:7d} {c.fn:7d} {c.precision:6.1f} {c.recall:6.1f} {c.f1:6.1f}"
            )
        if self.per_label is not None:
            lines.append("recall by gold label")
            for label, (f, t) in sorted(self.per_label.items(), key=lambda kv: (-kv[1][1], kv[0])):
                lines.append(f"  {label:10} {f:7d} / {t:7d} {_percent(f, t):6.1f}")
        lines.append(
            "F1 overall/cont/disco: "
            + " / ".join(f"{self.category(name).f1:.1f}" for name in CATEGORIES)
        )
        return "\n".join(lines)


def _compress(c: Constituent, keep: Sequence[int]) -> Constituent:
    out = 0
    for k, i in enumerate(keep):
        if c >> i & 1:
            out |= 1 << k
    return out


def evaluable_constituents(
    record: SentenceRecord,
    masked: Iterable[int] = (),
) -> dict[Constituent, str]:
    """Non-trivial constituents after removing ``masked`` words.

    Returns renumbered constituent -> label.  When several constituents
    collapse onto the same word set, the outermost one's label is kept.
    """
    tree = record.tree
    dropped = set(masked)
    keep = [i for i in range(tree.n) if i not in dropped]
    m = len(keep)
    full = (1 << m) - 1
    labels = tree.labels or {}
    out: dict[Constituent, str] = {}
    for c in sorted(tree.constituents, key=lambda x: -x.bit_count()):
        r = _compress(c, keep) if dropped else c
        if r.bit_count() < 2 or r == full or r in out:
            continue
        chain = labels.get(c)
        out[r] = chain[0] if chain else PHRASE_LABEL
    return out


def corpus_scores(
    preds: Sequence[SentenceRecord],
    golds: Sequence[SentenceRecord],
    punct_labels: Iterable[str] = DEFAULT_PUNCT_LABELS,
    per_label: bool = False,
) -> CorpusReport:
    """Score predicted trees against gold trees, summing counts over the corpus."""
    if len(preds) != len(golds):
        raise ValueError(f"{len(preds)} predicted trees but {len(golds)} gold trees")
    punct = tuple(punct_labels)
    report = CorpusReport(per_label={} if per_label else None)
    for k, (pred, gold) in enumerate(zip(preds, golds)):
        if pred.n != gold.n:
            raise ValueError(f"sentence {k + 1}: {pred.n} predicted words but {gold.n} gold words")
        mask = gold.punct_mask(punct)
        p = evaluable_constituents(pred, mask)
        g = evaluable_constituents(gold, mask)
        report.sentences += 1
        for c in p.keys() | g.keys():
            if c in p and c in g:
                kind = "tp"
            elif c in p:
                kind = "fp"
            else:
                kind = "fn"
            for counts in (report.overall, report.disco if fan_out(c) > 1 else report.cont):
                setattr(counts, kind, getattr(counts, kind) + 1)
        if report.per_label is not None:
            for c, label in g.items():
                slot = report.per_label.setdefault(label, [0, 0])
                slot[1] += 1
                slot[0] += c in p
    return report


__all__ = ["CorpusReport", "Counts", "DEFAULT_PUNCT_LABELS", "corpus_scores", "evaluable_constituents"]
