"""Lexicalisation stores for resources and types, plus Hearst-pattern
extraction of type lexicalisations from article sentences."""

from __future__ import annotations

import logging
import string
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

from .kg_store import KgIndex

log = logging.getLogger(__name__)


def normalise_phrase(text: str) -> str:
    return " ".join(text.lower().split())


class LexStore:
    """entity -> phrase -> count, with the inverse phrase -> entities index.

    A word-level store (used for types) scores a multi-word phrase by summing
    the counts of its words, numerator and denominator alike.
    """

    def __init__(self, counts: Mapping[str, Mapping[str, int]] | None = None, word_level: bool = False):
        self.word_level = word_level
        self.counts: dict[str, dict[str, int]] = {}
        self.inverse: dict[str, set[str]] = defaultdict(set)
        self._totals: dict[str, int] = defaultdict(int)
        self._phrase_cache: dict[str, dict[str, float]] = {}
        for entity, phrases in (counts or {}).items():
            for phrase, n in phrases.items():
                self.add(entity, phrase, n)

    def add(self, entity: str, phrase: str, n: int = 1) -> None:
        if n <= 0:
            raise ValueError(f"lexicalisation counts must be positive, got {n}")
        key = normalise_phrase(phrase)
        if not key:
            raise ValueError("empty lexicalisation phrase")
        per_entity = self.counts.setdefault(entity, {})
        per_entity[key] = per_entity.get(key, 0) + n
        self.inverse[key].add(entity)
        self._totals[key] += n
        if self._phrase_cache:
            self._phrase_cache = {}

    def lex(self, entity: str) -> dict[str, int]:
        return self.counts.get(entity, {})

    def lex_count(self, entity: str, phrase: str) -> int:
        per_entity = self.counts.get(entity)
        if not per_entity:
            return 0
        key = normalise_phrase(phrase)
        if self.word_level:
            return sum(per_entity.get(w, 0) for w in key.split())
        return per_entity.get(key, 0)

    def total(self, phrase: str) -> int:
        key = normalise_phrase(phrase)
        if self.word_level:
            return sum(self._totals.get(w, 0) for w in key.split())
        return self._totals.get(key, 0)

    def lex_score(self, entity: str, phrase: str) -> float:
        """Share of the phrase's occurrences that refer to ``entity``."""
        if not self.word_level:
            key = normalise_phrase(phrase)
            denom = self._totals.get(key, 0)
            if not denom:
                return 0.0
            return self.counts.get(entity, {}).get(key, 0) / denom
        return self.scores(phrase).get(entity, 0.0)

    def scores(self, phrase: str) -> dict[str, float]:
        """lex_score for every entity with a non-zero count on ``phrase``."""
        key = normalise_phrase(phrase)
        cached = self._phrase_cache.get(key)
        if cached is not None:
            return cached
        words = key.split() if self.word_level else [key]
        entities = set().union(*(self.inverse.get(w, ()) for w in words)) if words else set()
        denom = self.total(key)
        result = {}
        if denom:
            for e in entities:
                result[e] = self.lex_count(e, key) / denom
        self._phrase_cache[key] = result
        return result

    def rows(self) -> Iterable[tuple[str, str, int]]:
        for entity in sorted(self.counts):
            for phrase in sorted(self.counts[entity]):
                yield entity, phrase, self.counts[entity][phrase]

    def merge(self, other: LexStore) -> None:
        for entity, phrase, n in other.rows():
            self.add(entity, phrase, n)

    def __len__(self) -> int:
        return len(self.counts)


def load_lexicalisations(lines: Iterable[str], word_level: bool = False) -> LexStore:
    """Read ``entity<TAB>phrase<TAB>count`` rows; repeated pairs are summed."""
    store = LexStore(word_level=word_level)
    bad = 0
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        try:
            entity, phrase, count = parts[0].strip(), parts[1], int(parts[2])
            if count <= 0 or not entity or not normalise_phrase(phrase):
                raise ValueError
        except (IndexError, ValueError):
            bad += 1
            log.debug("lexicalisation line %d rejected: %r", lineno, line[:200])
            continue
        store.add(entity, phrase, count)
    if bad:
        log.warning("skipped %d invalid lexicalisation rows", bad)
    return store


def load_resource_lexicalisations(lines: Iterable[str]) -> LexStore:
    return load_lexicalisations(lines, word_level=False)


def load_type_lexicalisations(lines: Iterable[str]) -> LexStore:
    return load_lexicalisations(lines, word_level=True)


# --- Hearst patterns ---------------------------------------------------------

DETERMINERS = frozenset("a an the this that these those its his her their our my your".split())
BOUNDARY_WORDS = DETERMINERS | frozenset(
    """is was are were be been being has have had
    of in on at by for from with to into as since during under over about after before
    between through against within without near
    and or but nor which who whom whose where when while that such other also
    ,""".split()
)


@dataclass(frozen=True)
class HearstMatch:
    subject: tuple[str, ...]
    object: tuple[str, ...]
    pattern: str

    @property
    def subject_phrase(self) -> str:
        return " ".join(self.subject)

    @property
    def object_phrase(self) -> str:
        return " ".join(self.object)


_EDGE_PUNCT = string.punctuation + "“”‘’–—"


def tokenize_sentence(text: str) -> list[str]:
    """Lowercase, split on whitespace and strip punctuation from token edges.

    A trailing comma is kept as its own ``,`` token since the appositive and
    enumeration patterns depend on it.
    """
    tokens = []
    for raw in text.lower().split():
        word = raw.strip(_EDGE_PUNCT)
        tail = raw[len(raw.rstrip(_EDGE_PUNCT)):]
        if word:
            tokens.append(word)
        if "," in tail:
            tokens.append(",")
    return tokens


def _left_chunk(tokens: list[str], end: int) -> tuple[str, ...]:
    """Maximal non-boundary span ending at ``end`` (inclusive), with one
    directly preceding determiner "the" folded in."""
    i = end
    while i >= 0 and tokens[i] not in BOUNDARY_WORDS:
        i -= 1
    span = tokens[i + 1:end + 1]
    if span and i >= 0 and tokens[i] == "the":
        span = ["the"] + span
    return tuple(span)


# verbs that commonly follow the hypernym ("a band formed in ...")
TRAILING_VERBS = frozenset(
    """formed founded based released recorded born known located produced written directed
    created established made signed named considered""".split()
)


def _ends_object(token: str, first: bool) -> bool:
    if token in BOUNDARY_WORDS:
        return True
    if first:
        return False
    # past participles after the head noun
    return token in TRAILING_VERBS or (len(token) > 4 and token.endswith("ed"))


def _right_chunk(tokens: list[str], start: int) -> tuple[str, ...]:
    j = start
    while j < len(tokens) and not _ends_object(tokens[j], j == start):
        j += 1
    return tuple(tokens[start:j])


def _right_items(tokens: list[str], start: int) -> list[tuple[str, ...]]:
    """Enumerated chunks "x, y and z" starting at ``start``."""
    items = []
    pos = start
    while pos < len(tokens):
        if tokens[pos] == "the":
            chunk = _right_chunk(tokens, pos + 1)
            if chunk:
                chunk = ("the",) + chunk
            step = len(chunk)
        else:
            chunk = _right_chunk(tokens, pos)
            step = len(chunk)
        if not chunk:
            break
        items.append(chunk)
        pos += step
        if pos < len(tokens) and tokens[pos] == ",":
            pos += 1
        if pos < len(tokens) and tokens[pos] in ("and", "or"):
            pos += 1
        elif pos >= len(tokens) or tokens[pos - 1] != ",":
            break
    return items


def _left_items(tokens: list[str], end: int) -> list[tuple[str, ...]]:
    """Enumerated chunks "x, y" ending at ``end``, nearest first."""
    items = []
    pos = end
    while pos >= 0:
        chunk = _left_chunk(tokens, pos)
        if not chunk:
            break
        items.append(chunk)
        pos -= len(chunk)
        if pos >= 0 and tokens[pos] == ",":
            pos -= 1
        else:
            break
    return items


def extract_hearst_matches(sentence: list[str] | tuple[str, ...]) -> list[HearstMatch]:
    """Hypernym pairs from a tokenised, lowercased sentence.

    Rules: "X is/was a/an Y", "X is/was the Y", "Y such as X", "X and other Y"
    and "X, a/an Y". Noun phrases are maximal spans free of function words.
    """
    tokens = list(sentence)
    n = len(tokens)
    matches: list[HearstMatch] = []
    for i, tok in enumerate(tokens):
        nxt = tokens[i + 1] if i + 1 < n else None
        if tok in ("is", "was") and nxt in ("a", "an", "the") and i > 0:
            pattern = f"{tok}_the" if nxt == "the" else f"{tok}_a"
            x = _left_chunk(tokens, i - 1)
            y = _right_chunk(tokens, i + 2)
            if x and y:
                matches.append(HearstMatch(x, y, pattern))
        elif tok == "," and nxt in ("a", "an") and i > 0:
            x = _left_chunk(tokens, i - 1)
            y = _right_chunk(tokens, i + 2)
            if x and y:
                matches.append(HearstMatch(x, y, "appositive"))
        elif tok == "such" and nxt == "as" and i > 0:
            y = _left_chunk(tokens, i - 1)
            if y:
                for x in _right_items(tokens, i + 2):
                    matches.append(HearstMatch(x, y, "such_as"))
        elif tok == "and" and nxt == "other" and i > 0:
            y = _right_chunk(tokens, i + 2)
            if y:
                for x in reversed(_left_items(tokens, i - 1)):
                    matches.append(HearstMatch(x, y, "and_other"))
    return matches


def _subject_variants(phrase: tuple[str, ...]) -> list[str]:
    joined = " ".join(phrase)
    if phrase and phrase[0] == "the" and len(phrase) > 1:
        return [joined, " ".join(phrase[1:])]
    return [joined]


def build_type_lexicalisations(
    kg: KgIndex,
    resource_lex: LexStore,
    articles: Iterable[tuple[str, str]],
    into: LexStore | None = None,
) -> LexStore:
    """Count object words of Hearst matches under each direct type of the
    article's resource, keeping only matches whose subject lexicalises that
    resource."""
    store = into if into is not None else LexStore(word_level=True)
    skipped = 0
    for resource, text in articles:
        if not kg.has_subject(resource):
            skipped += 1
            continue
        types = sorted(kg.types_of(resource))
        if not types:
            continue
        known = resource_lex.lex(resource)
        for match in extract_hearst_matches(tokenize_sentence(text)):
            if not any(v in known for v in _subject_variants(match.subject)):
                continue
            for t in types:
                for word in match.object:
                    store.add(t, word, 1)
    if skipped:
        log.info("skipped %d article records for resources outside the knowledge graph", skipped)
    return store


def iter_articles(lines: Iterable[str]) -> Iterable[tuple[str, str]]:
    """``resource<TAB>sentence`` records."""
    for line in lines:
        line = line.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        resource, sep, text = line.partition("\t")
        if sep and resource.strip():
            yield resource.strip(), text
