"""WordNet 3.x database parsing and taxonomy similarity.

Reads the plain-text database pair files (``index.noun``/``data.noun`` and,
when present, the verb pair) straight from a dictionary directory; no
third-party reader is involved.  Only lemma membership, sense order, and
hypernym pointers (``@`` and instance ``@i``) are kept.

Similarity is over the undirected hypernym graph: every synset without a
hypernym is attached to a per-part-of-speech virtual root, and

    path_similarity(a, b) = 1 / (1 + shortest_path_length(a, b))

so identical synsets score 1 and unreachable pairs (different parts of
speech) score 0.  ``type_consistent`` asks whether any sense pair of two
words clears a similarity threshold strictly; pronouns stand in for the
first sense of "person".

Index file grammar (one line per lemma, license header indented):

    lemma pos synset_cnt p_cnt [ptr_symbol...] sense_cnt tagsense_cnt
    synset_offset [synset_offset...]

Data file grammar (offsets are 8 digits, w_cnt is 2-digit hex, p_cnt is
3-digit decimal, pointer target pos and 4-hex source/target follow each
pointer symbol):

    synset_offset lex_filenum ss_type w_cnt word lex_id [word lex_id...]
    p_cnt [ptr_symbol synset_offset pos source/target...] | gloss
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .corpus import Pos
from .errors import FormatError, ResourceError

NOUN = "n"
VERB = "v"

HYPERNYM_SYMBOLS = {"@", "@i"}

# (pos, offset) identifies a synset; offset -1 is the virtual root of a pos.
Synset = tuple[str, int]


def virtual_root(pos: str) -> Synset:
    return (pos, -1)


@dataclass
class SynsetGraph:
    """Hypernym graph plus lemma index for one or more parts of speech."""

    hypernyms: dict[Synset, tuple[Synset, ...]]
    senses: dict[tuple[str, str], tuple[Synset, ...]]  # (lemma, pos) -> sense order
    lemmas: dict[Synset, tuple[str, ...]] = field(default_factory=dict)
    version: str = "unversioned"
    _adjacency: dict[Synset, set[Synset]] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        adj: dict[Synset, set[Synset]] = {s: set() for s in self.hypernyms}
        for synset, parents in self.hypernyms.items():
            if parents:
                for parent in parents:
                    if parent not in self.hypernyms:
                        raise FormatError(
                            f"hypernym pointer to unknown synset {parent}"
                        )
                    adj[synset].add(parent)
                    adj[parent].add(synset)
            else:
                root = virtual_root(synset[0])
                adj.setdefault(root, set()).add(synset)
                adj[synset].add(root)
        self._adjacency = adj

    def noun_lemmas(self) -> frozenset[str]:
        return frozenset(lemma for lemma, pos in self.senses if pos == NOUN)

    def verb_lemmas(self) -> frozenset[str]:
        return frozenset(lemma for lemma, pos in self.senses if pos == VERB)

    def person_synset(self) -> Synset:
        senses = self.senses.get(("person", NOUN))
        if not senses:
            raise ResourceError(
                "noun database has no 'person' entry; pronoun mapping is impossible"
            )
        return senses[0]

    def synsets_of(self, word: str, tag: Pos) -> list[Synset]:
        """Senses of a word under a tag; pronouns map to person, sense 1."""
        if tag == Pos.PRONOUN:
            return [self.person_synset()]
        if tag == Pos.NOUN:
            return list(self.senses.get((word, NOUN), ()))
        if tag == Pos.VERB:
            return list(self.senses.get((word, VERB), ()))
        return []

    def shortest_path(self, a: Synset, b: Synset,
                      limit: int | None = None) -> int | None:
        """Undirected BFS distance through hypernym edges and virtual roots."""
        for node in (a, b):
            if node not in self._adjacency:
                raise ValueError(f"unknown synset {node}")
        if a == b:
            return 0
        seen = {a}
        queue = deque([(a, 0)])
        while queue:
            node, dist = queue.popleft()
            if limit is not None and dist >= limit:
                continue
            for nxt in self._adjacency[node]:
                if nxt in seen:
                    continue
                if nxt == b:
                    return dist + 1
                seen.add(nxt)
                queue.append((nxt, dist + 1))
        return None


def path_similarity(graph: SynsetGraph, a: Synset, b: Synset) -> float:
    """1 / (1 + distance); 0 when no path connects the synsets."""
    dist = graph.shortest_path(a, b)
    if dist is None:
        return 0.0
    return 1.0 / (1.0 + dist)


def type_consistent(graph: SynsetGraph, word: str, word_tag: Pos,
                    other: str, other_tag: Pos, threshold: float = 0.3) -> bool:
    """True if any sense pair has path similarity strictly above threshold."""
    senses_a = graph.synsets_of(word, word_tag)
    senses_b = graph.synsets_of(other, other_tag)
    if not senses_a or not senses_b:
        return False
    # similarity > t means distance < 1/t - 1, so the BFS can stop early
    limit = int(1.0 / threshold) + 1 if threshold > 0.0 else None
    for sa in senses_a:
        for sb in senses_b:
            dist = graph.shortest_path(sa, sb, limit=limit)
            if dist is not None and 1.0 / (1.0 + dist) > threshold:
                return True
    return False


# --- database file parsing --------------------------------------------------


def _data_path(dict_dir: Path, pos: str) -> Path:
    return dict_dir / ("data.noun" if pos == NOUN else "data.verb")


def _index_path(dict_dir: Path, pos: str) -> Path:
    return dict_dir / ("index.noun" if pos == NOUN else "index.verb")


def _parse_data_file(path: Path, pos: str,
                     hypernyms: dict[Synset, tuple[Synset, ...]],
                     lemmas: dict[Synset, tuple[str, ...]]) -> None:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if line.startswith(" ") or not line.strip():
                continue  # license header
            fields = line.split()
            try:
                offset = int(fields[0])
                w_cnt = int(fields[3], 16)
                words = [fields[4 + 2 * i].lower() for i in range(w_cnt)]
                p_idx = 4 + 2 * w_cnt
                p_cnt = int(fields[p_idx])
                parents = []
                for i in range(p_cnt):
                    sym, target, target_pos, _src = fields[p_idx + 1 + 4 * i:
                                                           p_idx + 5 + 4 * i]
                    if sym in HYPERNYM_SYMBOLS:
                        parents.append((target_pos, int(target)))
            except (IndexError, ValueError) as exc:
                raise FormatError(f"{path}:{lineno}: malformed data line") from exc
            synset = (pos, offset)
            hypernyms[synset] = tuple(parents)
            lemmas[synset] = tuple(words)


def _parse_index_file(path: Path, pos: str,
                      senses: dict[tuple[str, str], tuple[Synset, ...]]) -> None:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if line.startswith(" ") or not line.strip():
                continue
            fields = line.split()
            try:
                lemma = fields[0].lower()
                synset_cnt = int(fields[2])
                p_cnt = int(fields[3])
                offsets = fields[4 + p_cnt + 2:]
                if len(offsets) != synset_cnt:
                    raise ValueError("offset count mismatch")
                senses[(lemma, pos)] = tuple((pos, int(o)) for o in offsets)
            except (IndexError, ValueError) as exc:
                raise FormatError(f"{path}:{lineno}: malformed index line") from exc


def load_wordnet(dict_dir: str | Path) -> SynsetGraph:
    """Load a dictionary directory; noun files required, verb files optional.

    Raises ResourceError when the directory or the noun database is missing
    and FormatError (with file and line) on malformed content.
    """
    dict_dir = Path(dict_dir)
    if not dict_dir.is_dir():
        raise ResourceError(f"dictionary directory not found: {dict_dir}")
    hypernyms: dict[Synset, tuple[Synset, ...]] = {}
    lemmas: dict[Synset, tuple[str, ...]] = {}
    senses: dict[tuple[str, str], tuple[Synset, ...]] = {}
    for pos in (NOUN, VERB):
        data, index = _data_path(dict_dir, pos), _index_path(dict_dir, pos)
        if not data.is_file() or not index.is_file():
            if pos == NOUN:
                raise ResourceError(f"noun database missing under {dict_dir}")
            continue
        _parse_data_file(data, pos, hypernyms, lemmas)
        _parse_index_file(index, pos, senses)
    for (lemma, pos), targets in senses.items():
        for target in targets:
            if target not in hypernyms:
                raise FormatError(
                    f"index entry {lemma!r} points at unknown synset {target}"
                )
    n_nouns = sum(1 for s in hypernyms if s[0] == NOUN)
    n_verbs = sum(1 for s in hypernyms if s[0] == VERB)
    graph = SynsetGraph(
        hypernyms, senses, lemmas,
        version=f"{dict_dir.name}:{n_nouns}n+{n_verbs}v",
    )
    graph.person_synset()  # required by the pronoun mapping; fail on load
    return graph
