import logging

import numpy as np
import pytest

from punforge.corpus import (Pos, Sentence, TagLexicon, Token, ingest, tag)
from punforge.generator import (NO_CANDIDATES, NO_SEEDS, NO_TOPIC_WORDS,
                                STAGE_SWAP, STAGE_TOPIC, GenerationConfig,
                                GenerationResources, generate, select_deletion,
                                swap, topic_insert)
from punforge.corpus import Corpus
from punforge.ngram_lm import train_lm
from punforge.retrieval import build_index
from punforge.skipgram import SkipGramConfig, SkipGramModel
from punforge.surprisal import PunPair
from punforge.wordnet import NOUN, SynsetGraph

CORPUS_TEXT = "\n".join([
    "the camp base was cold .",            # seed, deletion 'camp'
    "they built a base near the lake .",   # seed, deletion 'they' (pronoun)
    "the base base doubled .",             # two occurrences: not a seed
    "base camp .",                         # too short: not a seed
    "our team guarded the base today .",   # seed, deletion 'team', ranks first
    "a bass swam by the base .",           # contains the pun word: skipped
    "verby verby verby again .",           # vocabulary filler
    "fish drum person chips swam .",       # vocabulary filler (topic words)
])

LEXICON = TagLexicon(
    nouns={"fish", "drum", "person", "chips", "team", "camp", "bass", "base",
           "lake", "creature", "place", "object"},
    verbs={"verby", "built", "guarded", "swam"},
)

# creature covers fish/person/team; camp sits under place; drum and chips
# under object, so only fish and person are consistent with team or they.
GRAPH = SynsetGraph(
    hypernyms={
        (NOUN, 1): (),
        (NOUN, 2): ((NOUN, 1),),
        (NOUN, 3): ((NOUN, 1),),
        (NOUN, 4): ((NOUN, 1),),
        (NOUN, 10): (),
        (NOUN, 5): ((NOUN, 10),),
        (NOUN, 11): (),
        (NOUN, 6): ((NOUN, 11),),
        (NOUN, 7): ((NOUN, 11),),
    },
    senses={
        ("creature", NOUN): ((NOUN, 1),),
        ("fish", NOUN): ((NOUN, 2),),
        ("person", NOUN): ((NOUN, 3),),
        ("team", NOUN): ((NOUN, 4),),
        ("place", NOUN): ((NOUN, 10),),
        ("camp", NOUN): ((NOUN, 5),),
        ("object", NOUN): ((NOUN, 11),),
        ("drum", NOUN): ((NOUN, 6),),
        ("chips", NOUN): ((NOUN, 7),),
    },
)

PAIR = PunPair("bass", "base")

# Crafted relatedness scores for the query 'bass'; everything else scores 0.
TOPIC_SCORES = {"fish": 6.0, "verby": 5.0, "drum": 4.0, "person": 3.0,
                "chips": 2.0}


def _resources(with_lm=False):
    sentences, vocab = ingest(CORPUS_TEXT)
    vec_in = np.ones((len(vocab), 1))
    vec_out = np.zeros((len(vocab), 1))
    for word, score in TOPIC_SCORES.items():
        vec_out[vocab.id_of(word), 0] = score
    skipgram = SkipGramModel(vocab, SkipGramConfig(dim=1), vec_in, vec_out)
    lm = train_lm(sentences, vocab, order=2) if with_lm else None
    return GenerationResources(
        corpus=Corpus(sentences, vocab, None),
        index=build_index(sentences),
        skipgram=skipgram,
        graph=GRAPH,
        lexicon=LEXICON,
        lm=lm,
    )


def _tagged(text, sent_id=0):
    sent = Sentence(sent_id, [Token(w) for w in text.split()])
    return tag(sent, LEXICON)


class TestSwap:
    def test_replaces_the_single_occurrence(self):
        tokens, position = swap(["a", "base", "here"], PAIR)
        assert tokens == ["a", "bass", "here"]
        assert position == 1

    def test_zero_occurrences_rejected(self):
        with pytest.raises(ValueError):
            swap(["a", "lake"], PAIR)

    def test_double_occurrence_rejected(self):
        with pytest.raises(ValueError):
            swap(["base", "base"], PAIR)


class TestSelectDeletion:
    def test_leftmost_noun_before_the_slot(self):
        sent = _tagged("the camp near the lake base")
        assert select_deletion(sent, 5) == 1

    def test_pronouns_count(self):
        sent = _tagged("they built a base")
        assert select_deletion(sent, 3) == 0

    def test_must_be_strictly_before(self):
        sent = _tagged("the cold base today")
        assert select_deletion(sent, 2) is None

    def test_no_candidate_gives_none(self):
        sent = _tagged("so very cold base")
        assert select_deletion(sent, 3) is None


class TestTopicInsert:
    def test_filters_and_preserves_score_order(self):
        resources = _resources()
        topics = resources.skipgram.predict_topics("bass", 100)
        tagged = _tagged("our team guarded the base today .")
        swapped = ["our", "team", "guarded", "the", "bass", "today", "."]
        out = topic_insert(swapped, tagged, 4, 1, PAIR, topics,
                           LEXICON, GRAPH)
        # 'team' survives as a zero-score self-replacement; verbs, pair
        # words, and type-inconsistent nouns are all gone
        assert [(words[1], words[4]) for words, _, _ in out] == [
            ("fish", "bass"), ("person", "bass"), ("team", "bass"),
        ]
        scores = [score for _, _, score in out]
        assert scores == sorted(scores, reverse=True)

    def test_pair_words_never_inserted(self):
        tagged = _tagged("our team guarded the base today .")
        swapped = ["our", "team", "guarded", "the", "bass", "today", "."]
        out = topic_insert(swapped, tagged, 4, 1, PAIR,
                           [("base", 0.9), ("bass", 0.8)], LEXICON, GRAPH)
        assert out == []


class TestGenerate:
    def test_candidate_order_seed_rank_then_topic_score(self):
        result = generate(PAIR, _resources(), GenerationConfig(max_outputs=100))
        assert result.failure is None
        summary = [(c.seed_id, c.topic_word) for c in result.candidates]
        assert summary == [(4, "fish"), (4, "person"), (4, "team"),
                           (1, "fish"), (1, "person"), (1, "team"),
                           (0, "camp")]
        ranks = [c.seed_rank for c in result.candidates]
        assert ranks == sorted(ranks)

    def test_output_invariants(self):
        result = generate(PAIR, _resources(), GenerationConfig(max_outputs=100))
        for cand in result.candidates:
            assert cand.final_tokens.count("bass") == 1
            assert "base" not in cand.final_tokens
            assert cand.final_tokens[cand.pun_position] == "bass"
            topic_at = cand.final_tokens.index(cand.topic_word)
            assert topic_at < cand.pun_position
            assert cand.stage == STAGE_TOPIC
            assert cand.deleted_word in {"team", "they", "camp"}

    def test_seeds_containing_the_pun_word_are_skipped(self):
        result = generate(PAIR, _resources(), GenerationConfig(max_outputs=100))
        assert 5 not in {c.seed_id for c in result.candidates}

    def test_max_outputs_caps_after_ordering(self):
        result = generate(PAIR, _resources(), GenerationConfig(max_outputs=4))
        assert [(c.seed_id, c.topic_word) for c in result.candidates] == [
            (4, "fish"), (4, "person"), (4, "team"), (1, "fish"),
        ]

    def test_topic_k_truncates_the_prediction_list(self):
        # top-2 predictions are fish and verby; only fish survives the filter
        result = generate(PAIR, _resources(),
                          GenerationConfig(max_outputs=100, topic_k=2))
        assert {c.topic_word for c in result.candidates} == {"fish"}

    def test_swap_stage_emits_one_candidate_per_seed(self):
        result = generate(PAIR, _resources(),
                          GenerationConfig(stage=STAGE_SWAP, max_outputs=100))
        assert [c.seed_id for c in result.candidates] == [4, 1, 0]
        for cand in result.candidates:
            assert cand.stage == STAGE_SWAP
            assert cand.topic_word is None
            assert cand.final_tokens.count("bass") == 1

    def test_no_seeds_failure(self):
        result = generate(PunPair("bass", "emu"), _resources())
        assert result.failure == NO_SEEDS
        assert result.candidates == []

    def test_unknown_pun_word_is_no_topic_words(self):
        result = generate(PunPair("zzz", "base"), _resources())
        assert result.failure == NO_TOPIC_WORDS

    def test_all_seeds_skipped_is_no_candidates(self):
        sentences, vocab = ingest("a bass swam by the base .")
        resources = _resources()
        resources.corpus = Corpus(sentences, vocab, None)
        resources.index = build_index(sentences)
        result = generate(PAIR, resources, GenerationConfig(stage=STAGE_SWAP))
        assert result.failure == NO_CANDIDATES

    def test_no_consistent_topic_is_no_candidates(self):
        # 'lake' is a lexicon noun with no dictionary senses, so nothing is
        # type-consistent with it, not even itself
        sentences, vocab = ingest("the lake base was cold .")
        resources = _resources()
        resources.corpus = Corpus(sentences, vocab, None)
        resources.index = build_index(sentences)
        result = generate(PAIR, resources)
        assert result.failure == NO_CANDIDATES

    def test_pos_mismatch_warning(self, caplog):
        with caplog.at_level(logging.WARNING, logger="punforge.generator"):
            result = generate(PunPair("verby", "base"), _resources(),
                              GenerationConfig(stage=STAGE_SWAP))
        assert result.warnings
        assert "part of speech" in result.warnings[0]
        assert any("part of speech" in r.message for r in caplog.records)
        assert result.candidates  # a warning, not a failure

    def test_matching_pos_produces_no_warning(self):
        result = generate(PAIR, _resources())
        assert result.warnings == []

    def test_topic_stage_requires_resources(self):
        resources = _resources()
        resources.skipgram = None
        with pytest.raises(ValueError):
            generate(PAIR, resources)

    def test_rerank_requires_lm(self):
        with pytest.raises(ValueError):
            generate(PAIR, _resources(),
                     GenerationConfig(stage=STAGE_SWAP, rerank=True))

    def test_lm_attaches_reports(self):
        result = generate(PAIR, _resources(with_lm=True),
                          GenerationConfig(max_outputs=100))
        for cand in result.candidates:
            assert cand.report is not None
            assert cand.report.s_ratio == -1.0 or cand.report.s_ratio >= 0.0

    def test_rerank_orders_by_ratio_descending(self):
        config = GenerationConfig(max_outputs=100, rerank=True)
        result = generate(PAIR, _resources(with_lm=True), config)
        ratios = [c.report.s_ratio for c in result.candidates]
        assert ratios == sorted(ratios, reverse=True)
        plain = generate(PAIR, _resources(with_lm=True),
                         GenerationConfig(max_outputs=100))
        assert {id(c) for c in result.candidates} != set()
        assert len(result.candidates) == len(plain.candidates)

    def test_unknown_stage_rejected(self):
        with pytest.raises(ValueError):
            GenerationConfig(stage="POLISH")
