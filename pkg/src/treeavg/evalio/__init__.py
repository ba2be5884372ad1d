"""Treebank I/O, evaluation metrics, random data and the command line."""

from .generate import random_corpus, random_instance, random_tree
from .metrics import CorpusReport, Counts, corpus_scores, evaluable_constituents
from .treebank import FormatError, SentenceRecord, parse_discbracket, read_treebank, write_discbracket

__all__ = [
    "CorpusReport",
    "Counts",
    "FormatError",
    "SentenceRecord",
    "corpus_scores",
    "evaluable_constituents",
    "parse_discbracket",
    "random_corpus",
    "random_instance",
    "random_tree",
    "read_treebank",
    "write_discbracket",
]
