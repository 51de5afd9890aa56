"""Corpus ingestion: tokenization, sentence splitting, vocabulary, POS tags.

Conventions, fixed once and used everywhere downstream:

* text is lowercased unconditionally;
* punctuation characters become their own tokens;
* sentences end at ASCII terminal punctuation (``.`` ``!`` ``?``) followed by
  whitespace, and at every newline;
* the vocabulary assigns ids by descending frequency, ties broken
  lexicographically, with id 0 reserved for the unknown-word symbol;
* words rarer than ``min_count`` map to the unknown id, whose stored count is
  the number of out-of-vocabulary token instances.

Tagging is lexicon lookup, not context disambiguation: a closed pronoun list
wins, then noun-index membership, then verb-index membership, else OTHER.
"""

from __future__ import annotations

import hashlib
import io
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator

from . import binio
from .errors import FormatError

CORPUS_MAGIC = b"PGC1"
INDEX_MAGIC = b"PGIX"

UNK = "<unk>"

# Closed class used for the PRONOUN tag.  Indefinite pronouns are included
# because they behave like person-denoting noun phrases downstream.
PRONOUNS = frozenset(
    """
    i you he she it we they me him her us them
    myself yourself himself herself itself ourselves themselves
    someone anyone everyone nobody
    """.split()
)

# A word token is letters/digits with optional internal apostrophe groups;
# any other non-space character stands alone.
_TOKEN_RE = re.compile(r"\w+(?:'\w+)*|[^\w\s]")
_SENT_BOUNDARY_RE = re.compile(r"(?<=[.!?])\s+")


class Pos(Enum):
    UNKNOWN = 0
    NOUN = 1
    PRONOUN = 2
    VERB = 3
    OTHER = 4


@dataclass(frozen=True)
class Token:
    surface: str
    pos: Pos = Pos.UNKNOWN


@dataclass
class Sentence:
    sent_id: int
    tokens: list[Token]

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def __len__(self) -> int:
        return len(self.tokens)


def tokenize(text: str) -> list[str]:
    """Lowercase and split; punctuation marks come out as single tokens."""
    return _TOKEN_RE.findall(text.lower())


def split_sentences(text: str) -> list[str]:
    """Split raw text into sentence strings.

    Newlines always end a sentence; within a line, terminal punctuation
    followed by whitespace ends one.  Empty pieces are dropped.
    """
    pieces: list[str] = []
    for line in text.splitlines():
        for piece in _SENT_BOUNDARY_RE.split(line):
            piece = piece.strip()
            if piece:
                pieces.append(piece)
    return pieces


def detokenize(sentence: Sentence) -> str:
    """Inverse of tokenization up to whitespace: join surfaces with spaces.

    For sentences produced by :func:`tokenize`, re-tokenizing the result
    yields the identical surface list.
    """
    return " ".join(t.surface for t in sentence.tokens)


class Vocabulary:
    """Frequency-ordered word/id mapping with a reserved unknown id.

    Ids are assigned by descending corpus frequency, ties broken
    lexicographically, starting at 1; id 0 is always the unknown symbol.
    Lookups for unmapped words return the unknown id rather than raising.
    """

    def __init__(self, counts: dict[str, int], min_count: int = 1):
        if min_count < 1:
            raise ValueError(f"min_count must be >= 1, got {min_count}")
        kept = {w: c for w, c in counts.items() if c >= min_count and w != UNK}
        dropped = sum(c for w, c in counts.items() if w not in kept)
        self._words: list[str] = [UNK]
        self._counts: list[int] = [dropped]
        for word, count in sorted(kept.items(), key=lambda kv: (-kv[1], kv[0])):
            self._words.append(word)
            self._counts.append(count)
        self._ids: dict[str, int] = {w: i for i, w in enumerate(self._words)}

    unk_id = 0

    def __len__(self) -> int:
        return len(self._words)

    def __contains__(self, word: str) -> bool:
        return word == UNK or (word in self._ids and self._ids[word] != self.unk_id)

    def id_of(self, word: str) -> int:
        return self._ids.get(word, self.unk_id)

    def word_of(self, idx: int) -> str:
        return self._words[idx]

    def count_of(self, word: str) -> int:
        return self._counts[self.id_of(word)]

    def count_of_id(self, idx: int) -> int:
        return self._counts[idx]

    @property
    def total_count(self) -> int:
        return sum(self._counts)

    def encode(self, surfaces: Iterable[str]) -> list[int]:
        return [self.id_of(s) for s in surfaces]

    def items(self) -> Iterator[tuple[str, int, int]]:
        """Yield (word, id, count) in id order."""
        for i, (w, c) in enumerate(zip(self._words, self._counts)):
            yield w, i, c

    def dump_lines(self) -> list[str]:
        return [f"{w}\t{i}\t{c}" for w, i, c in self.items()]

    def hash_bytes(self) -> bytes:
        h = hashlib.sha256()
        for line in self.dump_lines():
            h.update(line.encode("utf-8"))
            h.update(b"\n")
        return h.digest()[:16]

    def save_text(self, path: str | Path) -> None:
        Path(path).write_text("\n".join(self.dump_lines()) + "\n", encoding="utf-8")

    @classmethod
    def from_dump_lines(cls, lines: Iterable[str]) -> "Vocabulary":
        vocab = cls.__new__(cls)
        vocab._words, vocab._counts = [], []
        for lineno, line in enumerate(lines):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                word, idx_s, count_s = line.split("\t")
                idx, count = int(idx_s), int(count_s)
            except ValueError as exc:
                raise FormatError(f"bad vocabulary line {lineno + 1}: {line!r}") from exc
            if idx != len(vocab._words):
                raise FormatError(f"vocabulary ids out of order at line {lineno + 1}")
            vocab._words.append(word)
            vocab._counts.append(count)
        if not vocab._words or vocab._words[0] != UNK:
            raise FormatError(f"vocabulary must start with {UNK!r} at id 0")
        vocab._ids = {w: i for i, w in enumerate(vocab._words)}
        return vocab

    @classmethod
    def load_text(cls, path: str | Path) -> "Vocabulary":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dump_lines(fh)


class TagLexicon:
    """Word-level tag lookup: pronoun list plus noun/verb index membership."""

    def __init__(self, nouns: Iterable[str] = (), verbs: Iterable[str] = (),
                 pronouns: Iterable[str] = PRONOUNS):
        self.nouns = frozenset(nouns)
        self.verbs = frozenset(verbs)
        self.pronouns = frozenset(pronouns)

    def tag_word(self, word: str) -> Pos:
        if word in self.pronouns:
            return Pos.PRONOUN
        if word in self.nouns:
            return Pos.NOUN
        if word in self.verbs:
            return Pos.VERB
        return Pos.OTHER


def tag(sentence: Sentence, lexicon: TagLexicon) -> Sentence:
    """Return a copy of the sentence with lexicon-assigned tags."""
    return Sentence(
        sentence.sent_id,
        [Token(t.surface, lexicon.tag_word(t.surface)) for t in sentence.tokens],
    )


def _parse_tagged_line(line: str, lineno: int, sent_id: int) -> Sentence:
    tokens: list[Token] = []
    for chunk in line.split():
        surface, sep, tag_name = chunk.rpartition("_")
        if not sep:
            raise FormatError(f"line {lineno}: token {chunk!r} lacks a _TAG suffix")
        try:
            pos = Pos[tag_name.upper()]
        except KeyError:
            raise FormatError(f"line {lineno}: unknown tag {tag_name!r}") from None
        tokens.append(Token(surface.lower(), pos))
    return Sentence(sent_id, tokens)


def ingest(source: str | Path | Iterable[str], min_count: int = 1,
           tagged: bool = False) -> tuple[list[Sentence], Vocabulary]:
    """Read raw or pre-tagged text into sentences plus a vocabulary.

    ``source`` may be a path, a text blob, or an iterable of lines.  The
    pre-tagged format is one sentence per line with ``surface_TAG`` tokens.
    Sentence ids number the sentences in input order starting at 0.
    """
    if isinstance(source, Path):
        text = source.read_text(encoding="utf-8")
    elif isinstance(source, str):
        text = source
    else:
        text = "\n".join(source)

    sentences: list[Sentence] = []
    if tagged:
        sent_id = 0
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            sentences.append(_parse_tagged_line(line, lineno, sent_id))
            sent_id += 1
    else:
        for sent_id, piece in enumerate(split_sentences(text)):
            sentences.append(
                Sentence(sent_id, [Token(s) for s in tokenize(piece)])
            )

    counts: Counter[str] = Counter()
    for sentence in sentences:
        counts.update(t.surface for t in sentence.tokens)
    return sentences, Vocabulary(counts, min_count=min_count)


# --- binary container ------------------------------------------------------
#
# Layout: magic PGC1, flags byte (bit 0: index section present), vocabulary
# dump, surface table, sentences as surface-table references, then the
# optional PGIX postings section.  Sentences keep their full surfaces so that
# rare words survive a min_count-collapsed vocabulary.

Postings = dict[str, list[tuple[int, tuple[int, ...]]]]


@dataclass
class Corpus:
    sentences: list[Sentence]
    vocab: Vocabulary
    postings: Postings | None = None


def _write_postings(fh: BinaryIO, postings: Postings) -> None:
    fh.write(INDEX_MAGIC)
    binio.write_u32(fh, len(postings))
    for term in sorted(postings):
        binio.write_str(fh, term)
        entries = postings[term]
        binio.write_u32(fh, len(entries))
        for sent_id, positions in entries:
            binio.write_u32(fh, sent_id)
            binio.write_u32(fh, len(positions))
            for p in positions:
                binio.write_u32(fh, p)


def _read_postings(fh: BinaryIO) -> Postings:
    binio.check_magic(fh, INDEX_MAGIC, "postings section")
    postings: Postings = {}
    for _ in range(binio.read_u32(fh)):
        term = binio.read_str(fh)
        entries = []
        for _ in range(binio.read_u32(fh)):
            sent_id = binio.read_u32(fh)
            npos = binio.read_u32(fh)
            entries.append((sent_id, tuple(binio.read_u32(fh) for _ in range(npos))))
        postings[term] = entries
    return postings


def save_corpus(path: str | Path, corpus: Corpus) -> None:
    with open(path, "wb") as fh:
        fh.write(CORPUS_MAGIC)
        binio.write_u8(fh, 1 if corpus.postings is not None else 0)

        vocab_lines = corpus.vocab.dump_lines()
        binio.write_u32(fh, len(vocab_lines))
        for line in vocab_lines:
            binio.write_str(fh, line)

        surfaces: dict[str, int] = {}
        for sentence in corpus.sentences:
            for token in sentence.tokens:
                surfaces.setdefault(token.surface, len(surfaces))
        binio.write_u32(fh, len(surfaces))
        for surface in surfaces:  # insertion order == index order
            binio.write_str(fh, surface)

        binio.write_u32(fh, len(corpus.sentences))
        for sentence in corpus.sentences:
            binio.write_u32(fh, sentence.sent_id)
            binio.write_u32(fh, len(sentence.tokens))
            for token in sentence.tokens:
                binio.write_u32(fh, surfaces[token.surface])
                binio.write_u8(fh, token.pos.value)

        if corpus.postings is not None:
            _write_postings(fh, corpus.postings)


def load_corpus(path: str | Path) -> Corpus:
    with open(path, "rb") as fh:
        binio.check_magic(fh, CORPUS_MAGIC, "corpus")
        flags = binio.read_u8(fh)

        vocab_lines = [binio.read_str(fh) for _ in range(binio.read_u32(fh))]
        vocab = Vocabulary.from_dump_lines(vocab_lines)

        surfaces = [binio.read_str(fh) for _ in range(binio.read_u32(fh))]

        sentences: list[Sentence] = []
        for _ in range(binio.read_u32(fh)):
            sent_id = binio.read_u32(fh)
            ntok = binio.read_u32(fh)
            tokens = []
            for _ in range(ntok):
                surface_idx = binio.read_u32(fh)
                pos_code = binio.read_u8(fh)
                try:
                    tokens.append(Token(surfaces[surface_idx], Pos(pos_code)))
                except (IndexError, ValueError) as exc:
                    raise FormatError(f"corrupt corpus file {path}") from exc
            sentences.append(Sentence(sent_id, tokens))

        postings = _read_postings(fh) if flags & 1 else None
    return Corpus(sentences, vocab, postings)
