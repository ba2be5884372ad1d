"""Command line: ``treeavg average|eval|gen|bench``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 resource cap exceeded.
Output files are written to a temporary name and renamed, so a failed run
never leaves a partial file behind.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from ..search import ENGINES, MITM_CAP, MODES, CapacityError, EngineError, average
from ..tree import ParseTree, TreeError
from .generate import random_corpus, with_words
from .metrics import DEFAULT_PUNCT_LABELS, corpus_scores
from .treebank import FormatError, SentenceRecord, format_treebank, read_treebank

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CAP = 0, 1, 2, 3

log = logging.getLogger("treeavg")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _parse_weights(text: str | None, k: int) -> list[Fraction] | None:
    if text is None:
        return None
    try:
        ws = [Fraction(x.strip()) for x in text.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad --weights {text!r}: {exc}") from None
    if len(ws) != k:
        raise UsageError(f"--weights has {len(ws)} values for {k} inputs")
    if any(w < 0 for w in ws):
        raise UsageError("--weights must be non-negative")
    return ws


def _read_aligned(paths: Sequence[str]) -> list[list[SentenceRecord]]:
    """Sentences grouped across files; ``out[i][j]`` is file ``j``'s sentence ``i``."""
    banks = [read_treebank(p) for p in paths]
    for p, bank in zip(paths[1:], banks[1:]):
        if len(bank) != len(banks[0]):
            raise FormatError(f"{p}: {len(bank)} trees but {paths[0]} has {len(banks[0])}")
    rows = [list(row) for row in zip(*banks)]
    for i, row in enumerate(rows, start=1):
        for p, rec in zip(paths, row):
            if rec.n != row[0].n:
                raise FormatError(f"{p}:{i}: {rec.n} words but {paths[0]}:{i} has {row[0].n}")
    return rows


def _average_one(job: tuple) -> ParseTree:
    trees, weights, kw = job
    return average(trees, weights, **kw).tree


def _cmd_average(args) -> int:
    weights = _parse_weights(args.weights, len(args.inputs))
    rows = _read_aligned(args.inputs)
    kw = dict(
        mode=args.mode,
        engine=args.engine,
        fanout=args.fanout,
        max_candidates=args.max_candidates,
        prune_iterate=args.prune_iterate,
        fallback=not args.no_fallback,
    )
    jobs = [([r.tree.unlabeled() for r in row], weights, kw) for row in rows]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            outs = list(pool.map(_average_one, jobs, chunksize=8))
    else:
        outs = []
        for i, job in enumerate(jobs, start=1):
            try:
                outs.append(_average_one(job))
            except CapacityError as exc:
                raise CapacityError(f"sentence {i}: {exc}") from None
    trees = [with_words(t, row[0].words) for t, row in zip(outs, rows)]
    _atomic_write(args.output, format_treebank(trees))
    log.info("wrote %d trees to %s", len(trees), args.output)
    return EXIT_OK


def _cmd_eval(args) -> int:
    preds = read_treebank(args.pred)
    golds = read_treebank(args.gold)
    if len(preds) != len(golds):
        raise FormatError(f"{args.pred} has {len(preds)} trees but {args.gold} has {len(golds)}")
    punct = [p for p in args.punct_labels.split(";") if p] if args.punct_labels is not None else DEFAULT_PUNCT_LABELS
    report = corpus_scores(preds, golds, punct, per_label=args.per_label)
    if args.format == "json":
        print(json.dumps(report.as_dict(), indent=2, sort_keys=True))
    else:
        print(report.format_text())
    return EXIT_OK


def _cmd_gen(args) -> int:
    if args.fanout not in (1, 2):
        raise UsageError("--fanout must be 1 or 2")
    if args.n < 1 or args.k < 1 or args.sentences < 0:
        raise UsageError("--n and --k must be positive and --sentences non-negative")
    if not 0 <= args.agreement <= 1:
        raise UsageError("--agreement must lie in [0, 1]")
    refs, columns = random_corpus(args.seed, args.sentences, args.n, args.k, args.fanout, args.agreement)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    files = {f"ind{j + 1}.discbracket": col for j, col in enumerate(columns)}
    files["reference.discbracket"] = refs
    texts = {name: format_treebank(trees) for name, trees in files.items()}
    manifest = {
        "seed": args.seed,
        "sentences": args.sentences,
        "max_n": args.n,
        "k": args.k,
        "fanout": args.fanout,
        "agreement": args.agreement,
        "individuals": [f"ind{j + 1}.discbracket" for j in range(args.k)],
        "reference": "reference.discbracket",
    }
    texts["manifest.json"] = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    for name, text in texts.items():
        _atomic_write(out / name, text)
    log.info("wrote %d files to %s", len(texts), out)
    return EXIT_OK


def _cmd_bench(args) -> int:
    engines = [e.strip() for e in args.engines.split(",") if e.strip()]
    for e in engines:
        if e not in ENGINES:
            raise UsageError(f"unknown engine {e!r}; choose from {', '.join(ENGINES)}")
    rows = _read_aligned(args.inputs)
    print(" ".join([f"{'sent':>5}", f"{'n':>4}", f"{'cand':>5}"] + [f"{e:>11}" for e in engines]))
    totals = dict.fromkeys(engines, 0.0)
    for i, row in enumerate(rows, start=1):
        trees = [r.tree.unlabeled() for r in row]
        cells, cand, objective = [], "-", None
        for e in engines:
            if e == "dp" and row[0].n > args.dp_max_n:
                cells.append(f"{'skip':>11}")
                continue
            start = time.perf_counter()
            try:
                res = average(trees, mode=args.mode, engine=e, fanout=args.fanout, fallback=False)
            except CapacityError:
                cells.append(f"{'cap':>11}")
                continue
            elapsed = time.perf_counter() - start
            totals[e] += elapsed
            if res.prune is not None:
                cand = str(res.num_candidates)
            if objective is not None and res.objective != objective:
                raise EngineError(f"sentence {i}: engines disagree ({objective} vs {res.objective})")
            objective = res.objective
            cells.append(f"{elapsed * 1000:9.2f}ms")
        print(" ".join([f"{i:5d}", f"{row[0].n:4d}", f"{cand:>5}"] + cells))
    print(" ".join([f"{'total':>5}", f"{'':>4}", f"{'':>5}"] + [f"{totals[e]:10.3f}s" for e in engines]))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="treeavg", description="Exact averaging and evaluation of constituency trees.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("average", help="average aligned treebanks sentence by sentence")
    p.add_argument("--inputs", nargs="+", required=True, metavar="FILE")
    p.add_argument("--weights", help="comma-separated non-negative rationals, one per input")
    p.add_argument("--mode", choices=MODES, default="nonbinary")
    p.add_argument("--engine", choices=ENGINES, default="mitm")
    p.add_argument("--fanout", type=int, default=2)
    p.add_argument("--max-candidates", type=int, default=MITM_CAP)
    p.add_argument("--prune-iterate", action="store_true", help="repeat the lower-bound pruning to a fixpoint")
    p.add_argument("--no-fallback", action="store_true", help="fail instead of using the dp engine past the cap")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_average)

    p = sub.add_parser("eval", help="corpus F1 of predicted against gold trees")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--punct-labels", help="';'-separated gold tags treated as punctuation (default '$,;$.;$(')")
    p.add_argument("--per-label", action="store_true")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("gen", help="write random aligned treebanks")
    p.add_argument("--sentences", type=int, required=True)
    p.add_argument("--n", type=int, required=True, help="maximum sentence length")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--fanout", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--agreement", type=float, default=0.5, help="chance of copying a shared reference split")
    p.add_argument("-o", "--output", required=True, metavar="DIR")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("bench", help="per-sentence wall time of each engine")
    p.add_argument("--inputs", nargs="+", required=True, metavar="FILE")
    p.add_argument("--engines", default=",".join(ENGINES))
    p.add_argument("--mode", choices=MODES, default="nonbinary")
    p.add_argument("--fanout", type=int, default=2)
    p.add_argument("--dp-max-n", type=int, default=40, help="skip the dp engine on longer sentences")
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, or a usage error already printed
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"treeavg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"treeavg: capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (FormatError, TreeError, EngineError, ValueError, OSError) as exc:
        print(f"treeavg: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
