"""Command-line interface.

Subcommands: index, train-lm, train-skipgram, score, generate, correlate.

Option values resolve in precedence order: explicit flag, then JSON config
file (--config), then environment variable (prefix PUNGEN_, e.g.
PUNGEN_WORDNET), then built-in default.  Exit codes: 0 success, 1 usage
error, 2 data or resource error.  Per-record failures in batch scoring are
reported inline in the output stream and do not abort the run.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, TextIO

import numpy as np

from . import stats
from .corpus import Corpus, TagLexicon, ingest, load_corpus, save_corpus, tokenize
from .errors import PunforgeError, ResourceError
from .generator import (GenerationConfig, GenerationResources, STAGE_SWAP,
                        STAGE_TOPIC, generate)
from .kao import meaning_report
from .ngram_lm import NGramModel, train_lm
from .retrieval import InvertedIndex, build_index
from .skipgram import SkipGramConfig, SkipGramModel, train_skipgram
from .surprisal import PunOccurrence, PunPair, score_occurrence
from .wordnet import load_wordnet

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

ENV_PREFIX = "PUNGEN_"


@dataclass
class RunConfig:
    """All tunables with their defaults; see the module docstring for precedence."""

    order: int = 4
    window: int = 2
    d1: int = 5
    d2: int = 10
    dim: int = 300
    epochs: int = 15
    negatives: int = 5
    step_size: float = 0.025
    seed: int = 1
    min_count: int = 1
    pool: int = 500
    keep: int = 100
    topic_k: int = 100
    threshold: float = 0.3
    max_outputs: int = 10
    stage: str = STAGE_TOPIC
    rerank: bool = False
    wordnet: str | None = None
    min_rater_corr: float = 0.2
    permutations: int = 10000
    clip: float = 2.0


class UsageError(Exception):
    pass


def _coerce(name: str, raw: str, target_type: type) -> object:
    try:
        if target_type is bool:
            lowered = raw.strip().lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return target_type(raw)
    except ValueError:
        raise UsageError(f"bad value for {name}: {raw!r}") from None


def resolve_config(flag_values: Mapping[str, object],
                   config_path: str | None,
                   env: Mapping[str, str] | None = None) -> RunConfig:
    """Merge flags over config file over environment over defaults."""
    env = os.environ if env is None else env
    fields = {f.name: f for f in dataclasses.fields(RunConfig)}

    file_values: dict[str, object] = {}
    if config_path:
        try:
            file_values = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(file_values, dict):
            raise UsageError("config file must hold a JSON object")
        for key in file_values:
            if key not in fields:
                raise UsageError(f"unknown config key {key!r}")

    values: dict[str, object] = {}
    for name, spec in fields.items():
        base_type = {int: int, float: float, bool: bool}.get(type(spec.default), str)
        flag = flag_values.get(name)
        if flag is not None:
            values[name] = flag
        elif name in file_values:
            raw = file_values[name]
            if raw is not None and not isinstance(raw, (int, float, bool, str)):
                raise UsageError(f"config key {name!r} has a non-scalar value")
            values[name] = (
                None if raw is None
                else _coerce(name, str(raw), base_type) if isinstance(raw, str)
                else raw
            )
        elif (env_raw := env.get(ENV_PREFIX + name.upper())) is not None:
            values[name] = _coerce(name, env_raw, base_type)
        else:
            values[name] = spec.default
    cfg = RunConfig(**values)
    _validate_config(cfg)
    return cfg


def _validate_config(cfg: RunConfig) -> None:
    checks = [
        (2 <= cfg.order <= 6, "order must be in 2..6"),
        (cfg.window >= 1, "window must be >= 1"),
        (1 <= cfg.d1 <= cfg.d2, "need 1 <= d1 <= d2"),
        (cfg.dim >= 1, "dim must be >= 1"),
        (cfg.epochs >= 0, "epochs must be >= 0"),
        (cfg.negatives >= 1, "negatives must be >= 1"),
        (cfg.step_size > 0, "step-size must be positive"),
        (cfg.min_count >= 1, "min-count must be >= 1"),
        (cfg.pool >= 1 and cfg.keep >= 1, "pool and keep must be >= 1"),
        (cfg.topic_k >= 1, "topic-k must be >= 1"),
        (cfg.threshold >= 0, "threshold must be >= 0"),
        (cfg.max_outputs >= 1, "max-outputs must be >= 1"),
        (cfg.permutations >= 1, "permutations must be >= 1"),
        (cfg.clip > 0, "clip must be positive"),
        (cfg.stage in (STAGE_SWAP, STAGE_TOPIC),
         f"stage must be {STAGE_SWAP} or {STAGE_TOPIC}"),
    ]
    for ok, message in checks:
        if not ok:
            raise UsageError(message)


class _Parser(argparse.ArgumentParser):
    """argparse, but usage problems exit with code 1 instead of 2."""

    def error(self, message):  # noqa: A003 - argparse API
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file with option defaults")
    sub.add_argument("--seed", type=int, help="random seed for all stochastic steps")
    sub.add_argument("-v", "--verbose", action="count", default=0,
                     help="log progress to stderr (-vv for debug)")


def build_parser() -> _Parser:
    parser = _Parser(prog="punforge", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = subs.add_parser("index", help="ingest raw text and build the corpus file")
    p.add_argument("--corpus", required=True, help="input text file")
    p.add_argument("--out", required=True, help="output corpus file")
    p.add_argument("--min-count", dest="min_count", type=int,
                   help="words rarer than this map to the unknown id")
    p.add_argument("--tagged", action="store_true",
                   help="input is one sentence per line of surface_TAG tokens")
    _add_common(p)

    p = subs.add_parser("train-lm", help="train the n-gram language model")
    p.add_argument("--corpus", required=True, help="corpus file from 'index'")
    p.add_argument("--out", required=True, help="output model file")
    p.add_argument("--order", type=int, help="n-gram order (2..6)")
    _add_common(p)

    p = subs.add_parser("train-skipgram", help="train distant skip-gram embeddings")
    p.add_argument("--corpus", required=True, help="corpus file from 'index'")
    p.add_argument("--out", required=True, help="output model file")
    p.add_argument("--dim", type=int, help="embedding dimension")
    p.add_argument("--d1", type=int, help="minimum co-occurrence distance")
    p.add_argument("--d2", type=int, help="maximum co-occurrence distance")
    p.add_argument("--epochs", type=int, help="training epochs")
    p.add_argument("--negatives", type=int, help="negative samples per pair")
    p.add_argument("--step-size", dest="step_size", type=float,
                   help="initial SGD step size")
    p.add_argument("--export-text", dest="export_text",
                   help="also write embeddings as text to this path")
    _add_common(p)

    p = subs.add_parser("score", help="score pun sentences from JSON lines")
    p.add_argument("--lm", required=True, help="language model file")
    p.add_argument("--skipgram", help="skip-gram file; adds meaning scores")
    p.add_argument("--input", default="-", help="JSONL input ('-' for stdin)")
    p.add_argument("--output", default="-", help="JSONL output ('-' for stdout)")
    p.add_argument("--window", type=int, help="local context half-width")
    _add_common(p)

    p = subs.add_parser("generate", help="generate pun candidates for word pairs")
    p.add_argument("--corpus", required=True, help="corpus file from 'index'")
    p.add_argument("--skipgram", help="skip-gram file (topic stage)")
    p.add_argument("--lm", help="language model file; adds surprisal scores")
    p.add_argument("--wordnet", help="dictionary directory (or PUNGEN_WORDNET)")
    p.add_argument("--pairs", help="TSV file of pun<TAB>alternative pairs")
    p.add_argument("--pun", help="single pun word")
    p.add_argument("--alt", help="single alternative word")
    p.add_argument("--output", default="-", help="JSONL output ('-' for stdout)")
    p.add_argument("--pool", type=int, help="seed candidates gathered")
    p.add_argument("--keep", type=int, help="seed candidates kept after ranking")
    p.add_argument("--topic-k", dest="topic_k", type=int,
                   help="topic predictions considered")
    p.add_argument("--threshold", type=float, help="type-consistency threshold")
    p.add_argument("--max-outputs", dest="max_outputs", type=int,
                   help="candidate cap per pair")
    p.add_argument("--window", type=int, help="local context half-width")
    p.add_argument("--stage", choices=[STAGE_SWAP, STAGE_TOPIC],
                   help="stop after swap or run topic insertion")
    p.add_argument("--rerank", action=argparse.BooleanOptionalAction, default=None,
                   help="re-rank candidates by surprisal ratio (needs --lm)")
    _add_common(p)

    p = subs.add_parser("correlate", help="correlate metric scores with ratings")
    p.add_argument("--ratings", required=True, help="CSV: item_id,rater_id,score")
    p.add_argument("--scores", required=True, help="JSONL with id + metric fields")
    p.add_argument("--output", default="-", help="TSV output ('-' for stdout)")
    p.add_argument("--min-rater-corr", dest="min_rater_corr", type=float,
                   help="drop raters whose best agreement is below this")
    p.add_argument("--permutations", type=int, help="permutation test draws")
    p.add_argument("--clip", type=float, help="clip standardized metrics at +/- this")
    _add_common(p)

    return parser


def _open_out(path: str) -> TextIO:
    return sys.stdout if path == "-" else open(path, "w", encoding="utf-8")


def _open_in(path: str) -> TextIO:
    return sys.stdin if path == "-" else open(path, encoding="utf-8")


def _emit(fh: TextIO, record: dict) -> None:
    fh.write(json.dumps(record, sort_keys=True) + "\n")


# --- subcommands ------------------------------------------------------------


def _cmd_index(args, cfg: RunConfig) -> int:
    sentences, vocab = ingest(Path(args.corpus), min_count=cfg.min_count,
                              tagged=args.tagged)
    index = build_index(sentences)
    save_corpus(args.out, Corpus(sentences, vocab, index.postings))
    vocab.save_text(args.out + ".vocab")
    log.info("indexed %d sentences, vocabulary %d", len(sentences), len(vocab))
    return EXIT_OK


def _cmd_train_lm(args, cfg: RunConfig) -> int:
    corpus = load_corpus(args.corpus)
    model = train_lm(corpus.sentences, corpus.vocab, order=cfg.order)
    model.save(args.out)
    log.info("trained order-%d model on %d sentences", cfg.order,
             len(corpus.sentences))
    return EXIT_OK


def _cmd_train_skipgram(args, cfg: RunConfig) -> int:
    corpus = load_corpus(args.corpus)
    sg_config = SkipGramConfig(dim=cfg.dim, d1=cfg.d1, d2=cfg.d2,
                               epochs=cfg.epochs, negatives=cfg.negatives,
                               step_size=cfg.step_size, seed=cfg.seed)
    model = train_skipgram(corpus.sentences, corpus.vocab, sg_config)
    model.save(args.out)
    if args.export_text:
        model.export_text(args.export_text)
    return EXIT_OK


def _score_record(record: dict, lm: NGramModel, skipgram: SkipGramModel | None,
                  unigram_probs: np.ndarray | None, window: int) -> dict:
    pair = PunPair(record["pun_word"], record["alt_word"])
    if "tokens" in record:
        tokens = [str(t).lower() for t in record["tokens"]]
    elif "sentence" in record:
        tokens = tokenize(record["sentence"])
    else:
        raise ValueError("record needs a 'tokens' list or a 'sentence' string")
    if "pun_position" in record:
        position = int(record["pun_position"])
    else:
        slots = [i for i, t in enumerate(tokens) if t == pair.pun_word]
        if len(slots) != 1:
            raise ValueError(
                f"pun word occurs {len(slots)} times; pass 'pun_position'"
            )
        position = slots[0]
    report = score_occurrence(lm, PunOccurrence(tokens, position), pair, window)
    out = {
        "s_local": report.s_local,
        "s_global": report.s_global,
        "s_ratio": report.s_ratio,
        "unusualness": report.unusualness,
        "degenerate": report.degenerate,
    }
    if skipgram is not None:
        meaning = meaning_report(tokens, position, pair, lm.vocab,
                                 unigram_probs, skipgram.relatedness_by_id)
        out["ambiguity"] = meaning.ambiguity
        out["distinctiveness"] = meaning.distinctiveness
    return out


def _cmd_score(args, cfg: RunConfig) -> int:
    lm = NGramModel.load(args.lm)
    skipgram = None
    unigram_probs = None
    if args.skipgram:
        skipgram = SkipGramModel.load(args.skipgram,
                                      expected_vocab_hash=lm.vocab.hash_bytes())
        unigram_probs = np.exp([lm.unigram_logprob(i)
                                for i in range(len(lm.vocab))])
    out = _open_out(args.output)
    with _open_in(args.input) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            record_id = lineno
            try:
                record = json.loads(line)
                record_id = record.get("id", lineno)
                result = _score_record(record, lm, skipgram, unigram_probs,
                                       cfg.window)
                _emit(out, {"id": record_id, **result})
            except (PunforgeError, ValueError, KeyError, TypeError) as exc:
                _emit(out, {"id": record_id, "error": str(exc)})
    if out is not sys.stdout:
        out.close()
    return EXIT_OK


def _read_pairs(args) -> list[PunPair]:
    if args.pairs:
        pairs = []
        with open(args.pairs, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise ResourceError(
                        f"{args.pairs}:{lineno}: expected pun<TAB>alternative"
                    )
                pairs.append(PunPair(parts[0].lower(), parts[1].lower()))
        if not pairs:
            raise ResourceError(f"{args.pairs}: no pairs found")
        return pairs
    if args.pun and args.alt:
        return [PunPair(args.pun.lower(), args.alt.lower())]
    raise UsageError("pass --pairs FILE or both --pun and --alt")


def _cmd_generate(args, cfg: RunConfig) -> int:
    pairs = _read_pairs(args)
    corpus = load_corpus(args.corpus)
    vocab_hash = corpus.vocab.hash_bytes()
    if corpus.postings is None:
        log.info("corpus has no index section; building one in memory")
        index = build_index(corpus.sentences)
    else:
        index = InvertedIndex(corpus.postings,
                              {s.sent_id: len(s.tokens) for s in corpus.sentences})

    lm = NGramModel.load(args.lm, expected_vocab_hash=vocab_hash) if args.lm else None
    skipgram = None
    graph = None
    lexicon = None
    if cfg.stage == STAGE_TOPIC:
        if not args.skipgram:
            raise UsageError("topic stage needs --skipgram (or use --stage SWAP)")
        if not cfg.wordnet:
            raise ResourceError(
                "topic stage needs a dictionary: pass --wordnet or set PUNGEN_WORDNET"
            )
        skipgram = SkipGramModel.load(args.skipgram, expected_vocab_hash=vocab_hash)
        graph = load_wordnet(cfg.wordnet)
        lexicon = TagLexicon(nouns=graph.noun_lemmas(), verbs=graph.verb_lemmas())
    if cfg.rerank and lm is None:
        raise UsageError("--rerank needs --lm")

    resources = GenerationResources(corpus=corpus, index=index, skipgram=skipgram,
                                    graph=graph, lexicon=lexicon, lm=lm)
    gen_config = GenerationConfig(pool=cfg.pool, keep=cfg.keep, topic_k=cfg.topic_k,
                                  threshold=cfg.threshold,
                                  max_outputs=cfg.max_outputs, window=cfg.window,
                                  stage=cfg.stage, rerank=cfg.rerank)
    out = _open_out(args.output)
    for pair in pairs:
        result = generate(pair, resources, gen_config)
        _emit(out, {
            "record": "meta",
            "pun_word": pair.pun_word,
            "alt_word": pair.alt_word,
            "candidates": len(result.candidates),
            "failure": result.failure,
            "warnings": result.warnings,
            "wordnet": graph.version if graph is not None else None,
            "stage": cfg.stage,
            "seed": cfg.seed,
        })
        for cand in result.candidates:
            record = {
                "record": "candidate",
                "pun_word": pair.pun_word,
                "alt_word": pair.alt_word,
                "seed_id": cand.seed_id,
                "seed_rank": cand.seed_rank,
                "pun_position": cand.pun_position,
                "stage": cand.stage,
                "deleted_word": cand.deleted_word,
                "topic_word": cand.topic_word,
                "topic_score": cand.topic_score,
                "tokens": cand.final_tokens,
                "text": " ".join(cand.final_tokens),
            }
            if cand.report is not None:
                record["scores"] = {
                    "s_local": cand.report.s_local,
                    "s_global": cand.report.s_global,
                    "s_ratio": cand.report.s_ratio,
                    "unusualness": cand.report.unusualness,
                    "degenerate": cand.report.degenerate,
                }
            _emit(out, record)
    if out is not sys.stdout:
        out.close()
    return EXIT_OK


def _cmd_correlate(args, cfg: RunConfig) -> int:
    ratings = stats.RatingsTable.load_csv(args.ratings)
    filtered = stats.filter_raters(stats.zscore_raters(ratings),
                                   min_corr=cfg.min_rater_corr)
    means = stats.item_means(filtered.table)

    metric_values: dict[str, dict[str, float]] = {}
    with open(args.scores, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            item = str(record.get("id"))
            for key, value in record.items():
                if key == "id" or isinstance(value, bool):
                    continue
                if isinstance(value, (int, float)):
                    metric_values.setdefault(key, {})[item] = float(value)

    out = _open_out(args.output)
    out.write("metric\tn\tspearman\tp_value\n")
    for metric in sorted(metric_values):
        per_item = metric_values[metric]
        shared = sorted(set(per_item) & set(means))
        if len(shared) < 2:
            raise ResourceError(
                f"metric {metric!r} shares {len(shared)} items with the ratings"
            )
        xs = stats.clip_standardize([per_item[i] for i in shared], cfg.clip)
        ys = [means[i] for i in shared]
        rho = stats.spearman(xs, ys)
        p = stats.permutation_pvalue(xs, ys, permutations=cfg.permutations,
                                     seed=cfg.seed)
        out.write(f"{metric}\t{len(shared)}\t{rho:.6f}\t{p:.6f}\n")
    if out is not sys.stdout:
        out.close()
    return EXIT_OK


_COMMANDS = {
    "index": _cmd_index,
    "train-lm": _cmd_train_lm,
    "train-skipgram": _cmd_train_skipgram,
    "score": _cmd_score,
    "generate": _cmd_generate,
    "correlate": _cmd_correlate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        flag_values = vars(args)
        cfg = resolve_config(flag_values, flag_values.get("config"))
        return _COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"punforge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PunforgeError, OSError) as exc:
        print(f"punforge: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
