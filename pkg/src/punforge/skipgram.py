"""Skip-gram embeddings trained only on distant co-occurrences.

Ordinary skip-gram windows capture nearby words; here the window is a band:
a training pair (center, context) is formed exactly when the positional
distance between the two tokens inside one sentence lies in [d1, d2], in
both directions.  Nothing closer than d1 contributes.  The resulting model
answers "which words tend to appear far away from w" - long-range topical
association rather than collocation.

Training is plain SGD with negative sampling (noise ~ unigram^0.75) and a
linearly decaying step size.  All randomness comes from one seeded
generator, pairs are visited in a seeded shuffle, and updates are
sequential, so equal seeds give bitwise-equal embeddings.

Queries use a full softmax over the output embeddings.  ``predict_topics``
excludes the query word itself and the unknown symbol and renormalizes over
the remaining candidates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import binio
from .corpus import Sentence, Vocabulary
from .errors import FormatError, ResourceError, TrainingError, UnknownWordError

SKIPGRAM_MAGIC = b"PGSG"


@dataclass
class SkipGramConfig:
    dim: int = 300
    d1: int = 5
    d2: int = 10
    epochs: int = 15
    negatives: int = 5
    step_size: float = 0.025
    seed: int = 1

    def __post_init__(self) -> None:
        if self.d1 < 1 or self.d2 < self.d1:
            raise ValueError(f"need 1 <= d1 <= d2, got d1={self.d1}, d2={self.d2}")
        if self.dim < 1 or self.epochs < 0 or self.negatives < 0:
            raise ValueError("dim must be >= 1, epochs and negatives >= 0")


def extract_pairs(sentences: Sequence[Sequence[int]], d1: int, d2: int) -> np.ndarray:
    """All (center, context) id pairs at band distance, both directions.

    For positions i < j with j - i in [d1, d2] the pair list gets
    (ids[i], ids[j]) and then (ids[j], ids[i]); sentences are walked in
    order, i ascending, j ascending, which fixes the pair order used by
    training.  Returns an (n, 2) int64 array.
    """
    if d1 < 1 or d2 < d1:
        raise ValueError(f"need 1 <= d1 <= d2, got d1={d1}, d2={d2}")
    out: list[tuple[int, int]] = []
    for ids in sentences:
        n = len(ids)
        for i in range(n):
            for j in range(i + d1, min(i + d2, n - 1) + 1):
                out.append((ids[i], ids[j]))
                out.append((ids[j], ids[i]))
    if not out:
        return np.empty((0, 2), dtype=np.int64)
    return np.array(out, dtype=np.int64)


def step_loss_grads(center_vec: np.ndarray, out_vecs: np.ndarray,
                    labels: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """Negative-sampling loss and analytic gradients for one update.

    ``out_vecs`` holds the output embeddings of the true context (label 1)
    and the sampled negatives (label 0).  Repeated rows are legal and simply
    contribute their term twice.  Returns (loss, d/d center, d/d out rows).
    """
    scores = out_vecs @ center_vec
    # log sigma(s) = -log(1 + e^-s), computed stably for either sign
    loss = float(np.sum(np.logaddexp(0.0, np.where(labels == 1, -scores, scores))))
    sig = np.empty_like(scores)
    pos = scores >= 0
    sig[pos] = 1.0 / (1.0 + np.exp(-scores[pos]))
    exp_neg = np.exp(scores[~pos])
    sig[~pos] = exp_neg / (1.0 + exp_neg)
    residual = sig - labels
    return loss, residual @ out_vecs, np.outer(residual, center_vec)


class SkipGramModel:
    def __init__(self, vocab: Vocabulary, config: SkipGramConfig,
                 vec_in: np.ndarray, vec_out: np.ndarray):
        self.vocab = vocab
        self.config = config
        self.vec_in = vec_in
        self.vec_out = vec_out

    def relatedness_by_id(self, word_id: int) -> np.ndarray:
        """Softmax over the whole vocabulary for one query id; sums to 1."""
        if not 0 <= word_id < len(self.vocab):
            raise UnknownWordError(f"word id {word_id} outside the vocabulary")
        scores = self.vec_out @ self.vec_in[word_id]
        scores -= scores.max()
        exp = np.exp(scores)
        return exp / exp.sum()

    def relatedness_dist(self, word: str) -> np.ndarray:
        if word not in self.vocab:
            raise UnknownWordError(f"{word!r} is not in the vocabulary")
        return self.relatedness_by_id(self.vocab.id_of(word))

    def predict_topics(self, word: str, k: int) -> list[tuple[str, float]]:
        """Top-k topically related words, query word and unknown excluded.

        Probabilities are renormalized over the eligible candidates.  Ties
        break by word, ascending, so output order is deterministic.
        """
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        dist = self.relatedness_dist(word)
        skip = {self.vocab.id_of(word), self.vocab.unk_id}
        eligible = [i for i in range(len(dist)) if i not in skip]
        total = float(sum(dist[i] for i in eligible))
        if total <= 0.0:
            return []
        eligible.sort(key=lambda i: (-dist[i], self.vocab.word_of(i)))
        return [(self.vocab.word_of(i), float(dist[i]) / total)
                for i in eligible[:k]]

    # --- persistence -------------------------------------------------------

    def save(self, path: str | Path) -> None:
        c = self.config
        with open(path, "wb") as fh:
            fh.write(SKIPGRAM_MAGIC)
            binio.write_u32(fh, c.dim)
            binio.write_u32(fh, c.d1)
            binio.write_u32(fh, c.d2)
            binio.write_u32(fh, c.epochs)
            binio.write_u32(fh, c.negatives)
            binio.write_f64(fh, c.step_size)
            binio.write_u64(fh, c.seed)
            binio.write_bytes(fh, self.vocab.hash_bytes())
            vocab_lines = self.vocab.dump_lines()
            binio.write_u32(fh, len(vocab_lines))
            for line in vocab_lines:
                binio.write_str(fh, line)
            for table in (self.vec_in, self.vec_out):
                binio.write_bytes(fh, np.ascontiguousarray(table, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path: str | Path,
             expected_vocab_hash: bytes | None = None) -> "SkipGramModel":
        with open(path, "rb") as fh:
            binio.check_magic(fh, SKIPGRAM_MAGIC, "skip-gram model")
            dim = binio.read_u32(fh)
            d1 = binio.read_u32(fh)
            d2 = binio.read_u32(fh)
            epochs = binio.read_u32(fh)
            negatives = binio.read_u32(fh)
            step_size = binio.read_f64(fh)
            seed = binio.read_u64(fh)
            vocab_hash = binio.read_bytes(fh)
            if expected_vocab_hash is not None and vocab_hash != expected_vocab_hash:
                raise ResourceError(
                    "skip-gram model was trained on a different vocabulary "
                    f"({path}); retrain or pass matching resources"
                )
            vocab_lines = [binio.read_str(fh) for _ in range(binio.read_u32(fh))]
            vocab = Vocabulary.from_dump_lines(vocab_lines)
            if vocab.hash_bytes() != vocab_hash:
                raise FormatError(f"embedded vocabulary is corrupt in {path}")
            config = SkipGramConfig(dim=dim, d1=d1, d2=d2, epochs=epochs,
                                    negatives=negatives, step_size=step_size, seed=seed)
            tables = []
            for _ in range(2):
                raw = binio.read_bytes(fh)
                if len(raw) != len(vocab) * dim * 8:
                    raise FormatError(f"embedding table has wrong size in {path}")
                tables.append(np.frombuffer(raw, dtype="<f8").reshape(len(vocab), dim).copy())
        return cls(vocab, config, tables[0], tables[1])

    def export_text(self, path: str | Path) -> None:
        """Input embeddings as text: header 'V dim', then word + values."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{len(self.vocab)} {self.config.dim}\n")
            for word, idx, _count in self.vocab.items():
                values = " ".join(repr(float(v)) for v in self.vec_in[idx])
                fh.write(f"{word} {values}\n")


def train_skipgram(sentences: Sequence[Sentence] | Sequence[Sequence[int]],
                   vocab: Vocabulary,
                   config: SkipGramConfig | None = None) -> SkipGramModel:
    """Train band skip-gram embeddings; equal seeds give equal models."""
    config = config or SkipGramConfig()
    encoded: list[list[int]] = []
    for s in sentences:
        if isinstance(s, Sentence):
            encoded.append(vocab.encode(s.surfaces()))
        else:
            encoded.append(list(s))
    pairs = extract_pairs(encoded, config.d1, config.d2)
    if len(pairs) == 0:
        raise TrainingError(
            f"no training pairs: no two tokens at distance in "
            f"[{config.d1}, {config.d2}] in any sentence"
        )

    v_size = len(vocab)
    rng = np.random.default_rng(config.seed)
    vec_in = (rng.random((v_size, config.dim)) - 0.5) / config.dim
    vec_out = np.zeros((v_size, config.dim))

    noise = np.array([vocab.count_of_id(i) for i in range(v_size)], dtype=np.float64)
    noise **= 0.75
    if noise.sum() <= 0.0:
        noise[:] = 1.0
    noise_cdf = np.cumsum(noise / noise.sum())

    total_steps = config.epochs * len(pairs)
    labels = np.zeros(config.negatives + 1)
    labels[0] = 1.0
    step = 0
    for _epoch in range(config.epochs):
        order = rng.permutation(len(pairs))
        # The clip guards against a draw landing past the last cumulative
        # value, which float rounding can leave a hair below one.
        negatives = np.minimum(
            np.searchsorted(noise_cdf, rng.random((len(pairs), config.negatives))),
            v_size - 1,
        )
        for row in range(len(pairs)):
            center, context = pairs[order[row]]
            lr = config.step_size * max(1.0 - step / total_steps, 1e-4)
            step += 1
            targets = np.empty(config.negatives + 1, dtype=np.int64)
            targets[0] = context
            targets[1:] = negatives[row]
            _, grad_center, grad_out = step_loss_grads(
                vec_in[center], vec_out[targets], labels
            )
            # np.add.at accumulates over repeated target rows
            np.add.at(vec_out, targets, -lr * grad_out)
            vec_in[center] -= lr * grad_center
    return SkipGramModel(vocab, config, vec_in, vec_out)
