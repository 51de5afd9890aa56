"""Pun generation: retrieve a seed, swap in the pun word, insert a topic word.

Stages for a (pun word, alternative word) pair:

1. retrieve seed sentences containing the alternative word exactly once;
2. swap the alternative word for the pun word (stage SWAP);
3. replace the leftmost noun or pronoun before the pun slot with a topic
   word predicted from the pun word by the distant skip-gram model, keeping
   only predictions the lexicon tags as nouns that are type-consistent with
   the replaced word (stage SWAP+TOPIC).

A smoothing rewrite stage would slot in after topic insertion; here it is an
identity pass-through, so candidates leave stage 3 unchanged.

Candidates are ordered by (seed rank ascending, topic score descending) and
capped at ``max_outputs`` per pair; an optional re-rank sorts the same
capped set by surprisal ratio.  Every emitted candidate contains the pun
word exactly once, the alternative word not at all, and its topic word
strictly before the pun slot.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .corpus import Corpus, Pos, Sentence, TagLexicon, tag
from .errors import UnknownWordError
from .ngram_lm import NGramModel
from .retrieval import (DEFAULT_KEEP, DEFAULT_POOL, InvertedIndex,
                        retrieve_seeds)
from .skipgram import SkipGramModel
from .surprisal import (DEFAULT_WINDOW, PunOccurrence, PunPair,
                        SurprisalReport, score_occurrence)
from .wordnet import SynsetGraph, type_consistent

log = logging.getLogger(__name__)

STAGE_SWAP = "SWAP"
STAGE_TOPIC = "SWAP+TOPIC"

DEFAULT_TOPIC_K = 100
DEFAULT_THRESHOLD = 0.3
DEFAULT_MAX_OUTPUTS = 10

# machine-readable failure reasons
NO_SEEDS = "NO_SEEDS"
NO_TOPIC_WORDS = "NO_TOPIC_WORDS"
NO_CANDIDATES = "NO_CANDIDATES"


@dataclass
class GenerationConfig:
    pool: int = DEFAULT_POOL
    keep: int = DEFAULT_KEEP
    topic_k: int = DEFAULT_TOPIC_K
    threshold: float = DEFAULT_THRESHOLD
    max_outputs: int = DEFAULT_MAX_OUTPUTS
    window: int = DEFAULT_WINDOW
    stage: str = STAGE_TOPIC  # STAGE_SWAP stops after the swap
    rerank: bool = False

    def __post_init__(self) -> None:
        if self.stage not in (STAGE_SWAP, STAGE_TOPIC):
            raise ValueError(f"unknown stage {self.stage!r}")


@dataclass
class GenerationResources:
    corpus: Corpus
    index: InvertedIndex
    skipgram: SkipGramModel | None = None
    graph: SynsetGraph | None = None
    lexicon: TagLexicon | None = None
    lm: NGramModel | None = None


@dataclass
class GenerationCandidate:
    seed_id: int
    seed_rank: int
    pun_position: int
    final_tokens: list[str]
    stage: str
    deleted_word: str | None = None
    topic_word: str | None = None
    topic_score: float | None = None
    report: SurprisalReport | None = None


@dataclass
class GenerationResult:
    pair: PunPair
    candidates: list[GenerationCandidate]
    failure: str | None = None
    warnings: list[str] = field(default_factory=list)


def swap(tokens: list[str], pair: PunPair) -> tuple[list[str], int]:
    """Replace the single occurrence of the alternative word with the pun.

    Raises ValueError unless the alternative word occurs exactly once, so
    running swap on its own output fails rather than silently no-opping.
    """
    slots = [i for i, t in enumerate(tokens) if t == pair.alt_word]
    if len(slots) != 1:
        raise ValueError(
            f"alternative word {pair.alt_word!r} occurs {len(slots)} times, need exactly 1"
        )
    out = list(tokens)
    out[slots[0]] = pair.pun_word
    return out, slots[0]


def select_deletion(sentence: Sentence, pun_position: int) -> int | None:
    """Index of the leftmost noun or pronoun strictly before the pun slot."""
    for i in range(pun_position):
        if sentence.tokens[i].pos in (Pos.NOUN, Pos.PRONOUN):
            return i
    return None


def topic_insert(swapped: list[str], tagged: Sentence, pun_position: int,
                 deletion: int, pair: PunPair,
                 topics: list[tuple[str, float]], lexicon: TagLexicon,
                 graph: SynsetGraph,
                 threshold: float = DEFAULT_THRESHOLD) -> list[tuple[list[str], str, float]]:
    """All topic-word insertions for one seed, in topic-score order.

    A topic word survives when the lexicon tags it as a noun, it is neither
    word of the pair, and it is type-consistent with the word it replaces.
    """
    deleted = tagged.tokens[deletion]
    out: list[tuple[list[str], str, float]] = []
    for topic_word, score in topics:
        if topic_word in (pair.pun_word, pair.alt_word):
            continue
        if lexicon.tag_word(topic_word) != Pos.NOUN:
            continue
        if not type_consistent(graph, topic_word, Pos.NOUN,
                               deleted.surface, deleted.pos, threshold):
            continue
        tokens = list(swapped)
        tokens[deletion] = topic_word
        out.append((tokens, topic_word, score))
    return out


def generate(pair: PunPair, resources: GenerationResources,
             config: GenerationConfig | None = None) -> GenerationResult:
    """Run the pipeline for one pair; see the module docstring for stages."""
    config = config or GenerationConfig()
    result = GenerationResult(pair=pair, candidates=[])

    lexicon = resources.lexicon
    if lexicon is not None:
        tag_pun = lexicon.tag_word(pair.pun_word)
        tag_alt = lexicon.tag_word(pair.alt_word)
        if tag_pun != tag_alt:
            message = (
                f"pair words disagree on part of speech: "
                f"{pair.pun_word}={tag_pun.name}, {pair.alt_word}={tag_alt.name}"
            )
            log.warning(message)
            result.warnings.append(message)

    seeds = retrieve_seeds(resources.index, pair.alt_word,
                           pool=config.pool, keep=config.keep)
    if not seeds:
        result.failure = NO_SEEDS
        return result

    topics: list[tuple[str, float]] = []
    if config.stage == STAGE_TOPIC:
        if resources.skipgram is None or resources.graph is None or lexicon is None:
            raise ValueError(
                "topic stage needs skip-gram, synset graph, and lexicon resources"
            )
        try:
            topics = resources.skipgram.predict_topics(pair.pun_word, config.topic_k)
        except UnknownWordError:
            topics = []
        if not topics:
            result.failure = NO_TOPIC_WORDS
            return result

    by_id = {s.sent_id: s for s in resources.corpus.sentences}
    for seed in seeds:
        sentence = by_id[seed.sent_id]
        surfaces = sentence.surfaces()
        if pair.pun_word in surfaces:
            continue  # swapping would leave two pun words
        swapped, position = swap(surfaces, pair)
        if config.stage == STAGE_SWAP:
            result.candidates.append(GenerationCandidate(
                seed_id=seed.sent_id, seed_rank=seed.rank,
                pun_position=position, final_tokens=swapped, stage=STAGE_SWAP,
            ))
            continue
        tagged = tag(sentence, lexicon)
        deletion = select_deletion(tagged, position)
        if deletion is None:
            continue
        for tokens, topic_word, score in topic_insert(
                swapped, tagged, position, deletion, pair, topics,
                lexicon, resources.graph, config.threshold):
            result.candidates.append(GenerationCandidate(
                seed_id=seed.sent_id, seed_rank=seed.rank,
                pun_position=position, final_tokens=tokens, stage=STAGE_TOPIC,
                deleted_word=tagged.tokens[deletion].surface,
                topic_word=topic_word, topic_score=score,
            ))

    # already in (seed rank asc, topic score desc) order by construction
    result.candidates = result.candidates[:config.max_outputs]
    if not result.candidates:
        result.failure = NO_CANDIDATES
        return result

    if resources.lm is not None:
        for cand in result.candidates:
            cand.report = score_occurrence(
                resources.lm,
                PunOccurrence(cand.final_tokens, cand.pun_position),
                pair, config.window,
            )
        if config.rerank:
            result.candidates.sort(
                key=lambda c: c.report.s_ratio, reverse=True
            )
    elif config.rerank:
        raise ValueError("re-ranking needs a language model resource")
    return result
