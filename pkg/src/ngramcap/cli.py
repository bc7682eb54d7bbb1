"""Command-line entry point: ``ngramcap {index,generate,evaluate,keywords,gridsearch,vocab}``.

Exit codes: 0 on success, 1 on usage errors, 2 on data errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time

from joblib import Parallel, delayed

from .corpus import NGramIndex, build_index, read_corpus
from .estimator import GraphCaptioner
from .exceptions import DataError, GraphEmptyError
from .gridsearch import DEFAULT_SEED, grid_search
from .keywords import (clean_vocab, human_keywords, load_lexicon, load_stoplist,
                       read_keyword_file, write_keyword_file)
from .metrics import METRIC_NAMES, evaluate, read_candidates, read_references
from .search import CostFunction, SearchStats

logger = logging.getLogger("ngramcap")

PARAM_DEFAULTS = {"n": 3, "n2": 3, "h": 1, "fn": 4, "k": 5, "x": 5, "y": 5,
                  "q_n": 150, "max_len": 20}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file; blank lines and ``#`` comments are ignored."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def resolve_params(args) -> dict:
    """Defaults, overridden by ``--config``, overridden by explicit flags."""
    params = dict(PARAM_DEFAULTS)
    if getattr(args, "config", None):
        for key, value in read_config(args.config).items():
            if key not in PARAM_DEFAULTS:
                raise UsageError(f"unknown config key {key!r}")
            params[key] = value
    for key in PARAM_DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    try:
        for key in params:
            params[key] = int(CostFunction.parse(params[key])) if key == "fn" else int(params[key])
    except ValueError as exc:
        raise UsageError(f"bad parameter value: {exc}") from None
    return params


def _add_params(p, names=tuple(PARAM_DEFAULTS)):
    helps = {"n": "graph n-gram order", "n2": "fluency n-gram order", "h": "bottom-up hops",
             "fn": "cost function 1-4 or F, F+M, F+M+L, F+M+L+N", "k": "parents per vertex",
             "x": "top-down link threshold", "y": "beam width", "q_n": "path budget",
             "max_len": "maximum caption length"}
    for name in names:
        flag = "--" + name.replace("_", "-")
        p.add_argument(flag, dest=name, default=None,
                       type=str if name == "fn" else int, help=helps[name])
    p.add_argument("--config", help="key=value parameter file (flags win)")


def _load_index(args, params) -> NGramIndex:
    order = max(params["n"], params["n2"])
    if args.index:
        index = NGramIndex.load(args.index)
        if index.max_order != order:
            raise UsageError(f"index {args.index} has max order {index.max_order}, need {order}")
        return index
    if args.corpus:
        return build_index(read_corpus(args.corpus), order, order)
    raise UsageError("one of --index or --corpus is required")


def _write_jsonl(path, records) -> None:
    fh = sys.stdout if path in (None, "-") else open(path, "w", encoding="utf-8")
    try:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
    finally:
        if fh is not sys.stdout:
            fh.close()


def cmd_index(args) -> int:
    params = resolve_params(args)
    start = time.perf_counter()
    index = build_index(read_corpus(args.corpus), params["n"], params["n2"])
    index.save(args.output)
    logger.info("indexed %d sentences (max order %d) in %.3fs -> %s", len(index.sentences),
                index.max_order, time.perf_counter() - start, args.output)
    return 0


def _generate_one(est: GraphCaptioner, key, kws, top: int, dump_dir):
    stats = SearchStats()
    try:
        ranked = est.generate(kws, stats)
    except GraphEmptyError as exc:
        return key, None, str(exc), stats
    if dump_dir:
        from .graph import build_graph
        graph = build_graph(est.index_, kws.items, est.n, est.h, est.k, est.x)
        with open(os.path.join(dump_dir, f"{key}.graph.txt"), "w", encoding="utf-8") as fh:
            graph.dump(fh)
    return key, ranked[:top], None, stats


def cmd_generate(args) -> int:
    params = resolve_params(args)
    index = _load_index(args, params)
    nouns = load_lexicon(args.lexicon).nouns
    est = GraphCaptioner(**params, nouns=nouns, bidirectional=not args.forward_only).fit(index)
    keyword_sets = read_keyword_file(args.keywords)
    if args.dump_graphs:
        os.makedirs(args.dump_graphs, exist_ok=True)
    keys = list(keyword_sets)
    start = time.perf_counter()
    results = Parallel(n_jobs=args.workers)(
        delayed(_generate_one)(est, key, keyword_sets[key], args.top, args.dump_graphs)
        for key in keys)
    elapsed = time.perf_counter() - start
    fn_label = CostFunction(params["fn"]).label
    ranked_records, top1 = [], []
    for key, ranked, error, stats in results:
        if error is not None:
            ranked_records.append({"id": key, "error": f"GraphEmpty: {error}"})
            top1.append({"id": key, "caption": ""})
            logger.warning("id %s: %s", key, error)
            continue
        logger.debug("id %s: %d expansions, %d rounds", key, stats.expansions, stats.rounds)
        for rank, path in enumerate(ranked, 1):
            ranked_records.append({"id": key, "rank": rank, "caption": path.caption,
                                   "score": path.score, "fn": fn_label, "m": path.m,
                                   "l": path.l, "N": path.extra_nouns})
        top1.append({"id": key, "caption": ranked[0].caption})
    _write_jsonl(args.output, ranked_records)
    if args.captions:
        _write_jsonl(args.captions, top1)
    total_exp = sum(r[3].expansions for r in results)
    logger.info("generated %d captions in %.2fs (%.1f/s), %d path expansions",
                len(keys), elapsed, len(keys) / elapsed if elapsed else float("inf"), total_exp)
    return 0


def _holdout(references: dict, i: int):
    cands, refs = {}, {}
    for key, captions in references.items():
        if i >= len(captions):
            raise DataError(f"id {key!r} has only {len(captions)} references")
        cands[key] = captions[i]
        refs[key] = captions[:i] + captions[i + 1:]
    return cands, refs


def _print_report(corpus: dict, fh=None) -> None:
    fh = fh or sys.stderr
    # percentages, as conventionally reported (CIDEr 1.123 -> 112.3)
    fh.write("  ".join(f"{name} {100 * corpus[name]:.1f}" for name in METRIC_NAMES) + "\n")


def cmd_evaluate(args) -> int:
    references = read_references(args.references)
    if args.self_holdout is not None:
        candidates, references = _holdout(references, args.self_holdout)
    else:
        if not args.candidates:
            raise UsageError("candidates file required unless --self-holdout is given")
        candidates = read_candidates(args.candidates)
        if args.drop_ref is not None:
            references = {k: v[:args.drop_ref] + v[args.drop_ref + 1:] for k, v in references.items()}
    report = evaluate(candidates, references, smoothing=args.smoothing,
                      cider_variant=args.cider_variant)
    if args.output in (None, "-"):
        json.dump(report.to_json(), sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        report.write(args.output)
    _print_report(report.corpus)
    return 0


def cmd_keywords(args) -> int:
    references = read_references(args.references)
    lexicon = load_lexicon(args.lexicon)
    stoplist = () if args.keep_stopwords else load_stoplist(args.stoplist)
    out, failed = {}, 0
    for key, captions in references.items():
        try:
            out[key] = human_keywords(captions, args.mode, lexicon, stoplist, args.caption_index)
        except DataError as exc:
            failed += 1
            logger.warning("id %s: %s", key, exc)
    if args.as_captions:
        _write_jsonl(args.output, ({"id": k, "caption": kws.caption()} for k, kws in out.items()))
    elif args.output in (None, "-"):
        _write_jsonl(None, ({"id": k, "keywords": kws.as_strings(), "source": kws.source_tag}
                            for k, kws in out.items()))
    else:
        write_keyword_file(args.output, out)
    logger.info("extracted %s keywords for %d ids (%d without keywords)", args.mode, len(out), failed)
    return 0


def cmd_vocab(args) -> int:
    stoplist = load_stoplist(args.stoplist)
    words = clean_vocab(read_corpus(args.corpus), args.top_w, stoplist)
    fh = sys.stdout if args.output in (None, "-") else open(args.output, "w", encoding="utf-8")
    try:
        fh.write("\n".join(words) + "\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def cmd_gridsearch(args) -> int:
    params = resolve_params(args)
    base = {k: params[k] for k in ("k", "x", "y", "q_n", "max_len")}
    base["nouns"] = load_lexicon(args.lexicon).nouns
    rows = grid_search(read_corpus(args.corpus), read_keyword_file(args.keywords),
                       read_references(args.references), args.sample_size, args.seed,
                       base_params=base, n_jobs=args.workers)
    _write_jsonl(args.output, rows)
    for rank, row in enumerate(rows, 1):
        sys.stderr.write(f"{rank:2d}. n={row['n']} n2={row['n2']} h={row['h']} fn={row['fn']}  "
                         f"CIDEr {100 * row['CIDEr']:.1f}  BLEU-4 {100 * row['BLEU-4']:.1f}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ngramcap",
                     description="Keyword-to-caption generation over corpus n-gram graphs.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("index", help="build and cache an n-gram index")
    p.add_argument("corpus", help="UTF-8 text, one caption per line")
    p.add_argument("-o", "--output", required=True, help="index cache file")
    _add_params(p, ("n", "n2"))
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("generate", help="generate captions for keyword sets")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--index", help="index cache from 'ngramcap index'")
    src.add_argument("--corpus", help="corpus text file (indexed on the fly)")
    p.add_argument("--keywords", required=True, help='JSON lines {"id", "keywords": [...]}')
    p.add_argument("-o", "--output", help="ranked candidates JSONL (default stdout)")
    p.add_argument("--captions", help='also write top-1 {"id", "caption"} JSONL here')
    p.add_argument("--top", type=int, default=5, help="candidates kept per id")
    p.add_argument("--lexicon", help="POS lexicon used for the noun penalty")
    p.add_argument("--forward-only", action="store_true", help="extend paths through children only")
    p.add_argument("--dump-graphs", metavar="DIR", help="write each id's graph edges to DIR")
    p.add_argument("--workers", type=int, default=1)
    _add_params(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("evaluate", help="score candidates against references")
    p.add_argument("candidates", nargs="?", help='JSON lines {"id", "caption"}')
    p.add_argument("references", help='JSON lines {"id", "captions": [...]}')
    p.add_argument("-o", "--output", help="report JSON (default stdout)")
    p.add_argument("--self-holdout", type=int, metavar="I",
                   help="evaluate reference I of each id against the remaining ones")
    p.add_argument("--drop-ref", type=int, metavar="I", help="remove reference I before scoring")
    p.add_argument("--smoothing", type=float, default=0.0, help="add-epsilon BLEU smoothing")
    p.add_argument("--cider-variant", choices=("D", "plain"), default="D")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("keywords", help="extract human keyword sets from references")
    p.add_argument("references", help='JSON lines {"id", "captions": [...]}')
    p.add_argument("--mode", required=True,
                   help="n, na, nap, napv, (na), (nv) or f1..f5")
    p.add_argument("--caption-index", type=int, default=0)
    p.add_argument("--lexicon")
    p.add_argument("--stoplist")
    p.add_argument("--keep-stopwords", action="store_true")
    p.add_argument("--as-captions", action="store_true",
                   help="emit keyword-only captions instead of keyword sets")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_keywords)

    p = sub.add_parser("vocab", help="top-w cleaned vocabulary of a corpus")
    p.add_argument("corpus")
    p.add_argument("--top-w", type=int, default=1000)
    p.add_argument("--stoplist")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_vocab)

    p = sub.add_parser("gridsearch", help="rank the 32 (n, n2, h, fn) configurations by CIDEr")
    p.add_argument("--corpus", required=True)
    p.add_argument("--keywords", required=True)
    p.add_argument("--references", required=True)
    p.add_argument("--sample-size", type=int, default=500)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--lexicon")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output", help="ranked table as JSON lines (default stdout)")
    _add_params(p, ("k", "x", "y", "q_n", "max_len"))
    p.set_defaults(func=cmd_gridsearch)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ngramcap: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError) as exc:
        print(f"ngramcap: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
