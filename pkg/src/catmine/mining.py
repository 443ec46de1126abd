"""Pattern mining: score relations and types per category, aggregate over a
candidate set with the median, and accumulate pattern supports."""

from __future__ import annotations

import statistics
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator

from .candidates import CandidateSet, Tokens
from .category_graph import CategoryGraph
from .kg_store import RDF_TYPE, KgIndex, Literal, Node
from .lexicalisation import LexStore, normalise_phrase

PROPERTY = "property"
TYPE = "type"
KINDS = (PROPERTY, TYPE)


@dataclass(frozen=True, order=True)
class TextualPattern:
    """Shared name part: lowercased prefix and postfix token sequences."""

    prefix: Tokens = ()
    postfix: Tokens = ()

    def __post_init__(self):
        if not self.prefix and not self.postfix:
            raise ValueError("textual pattern needs a prefix or a postfix")
        object.__setattr__(self, "prefix", tuple(t.lower() for t in self.prefix))
        object.__setattr__(self, "postfix", tuple(t.lower() for t in self.postfix))

    @classmethod
    def of(cls, cset: CandidateSet) -> TextualPattern:
        return cls(cset.prefix, cset.postfix)

    @property
    def fixed_phrase(self) -> str:
        return " ".join(self.prefix + self.postfix)

    def __str__(self) -> str:
        return " ".join(self.prefix + ("<var>",) + self.postfix)


def value_score(v: Node, cvar: str, resource_lex: LexStore) -> float:
    """How well ``cvar`` names the value ``v``.

    Resources use the lexicalisation score; literals have no lexicalisations
    and score 1 on an exact lowercased match of their lexical form.
    """
    if isinstance(v, Literal):
        return 1.0 if normalise_phrase(v.value) == normalise_phrase(cvar) else 0.0
    return resource_lex.lex_score(v, cvar)


def score_rel(
    resources: frozenset[str] | set[str], cvar: str, p: str, v: Node,
    kg: KgIndex, resource_lex: LexStore,
) -> float:
    return kg.freq(resources, p, v) * value_score(v, cvar, resource_lex)


def score_type(
    resources: frozenset[str] | set[str], cfix: str, t: str,
    kg: KgIndex, type_lex: LexStore,
) -> float:
    return kg.freq(resources, RDF_TYPE, t) * type_lex.lex_score(t, cfix)


def fact_counts(resources: Iterable[str], kg: KgIndex, *, types: bool) -> Counter:
    """Number of resources carrying each (property, value) pair; restricted to
    type assertions when ``types`` is set and excluding them otherwise."""
    counts: Counter = Counter()
    for r in resources:
        for p, objects in kg.properties_of(r).items():
            if (p == RDF_TYPE) != types:
                continue
            for o in objects:
                counts[(p, o)] += 1
    return counts


def relation_scores(
    resources: frozenset[str], cvar: str, kg: KgIndex, resource_lex: LexStore,
) -> dict[tuple[str, Node], float]:
    """score_rel for every (p, v) held by at least one resource; computed
    from shared counts instead of repeated freq lookups."""
    n = len(resources)
    if not n:
        return {}
    out = {}
    for (p, v), hits in fact_counts(resources, kg, types=False).items():
        out[(p, v)] = (hits / n) * value_score(v, cvar, resource_lex)
    return out


def type_scores(
    resources: frozenset[str], cfix: str, kg: KgIndex, type_lex: LexStore,
) -> dict[str, float]:
    n = len(resources)
    if not n:
        return {}
    lex = type_lex.scores(cfix)
    out = {}
    for (_, t), hits in fact_counts(resources, kg, types=True).items():
        if isinstance(t, str):
            out[t] = (hits / n) * lex.get(t, 0.0)
    return out


def _select_by_median(per_category: list[dict[str, float]]) -> tuple[str, float] | None:
    """Implication with the highest median score over all categories of a set.

    Categories without a score for an implication count as 0. Median ties go
    to the higher mean, then the smaller identifier. ``None`` when the best
    median is 0, i.e. the implication is missing from half of the set.
    """
    candidates = sorted({k for scores in per_category for k in scores})
    best = None
    for key in candidates:
        column = [scores.get(key, 0.0) for scores in per_category]
        rank = (statistics.median(column), sum(column) / len(column))
        if best is None or rank > best[0]:
            best = (rank, key)
    if best is None or best[0][0] <= 0:
        return None
    return best[1], best[0][0]


def mine_property_pattern(
    cset: CandidateSet, graph: CategoryGraph, kg: KgIndex, resource_lex: LexStore,
) -> tuple[str, int] | None:
    """Characteristic property of a candidate set and its support increment."""
    per_category = []
    for c, cvar in cset.members:
        scores = relation_scores(graph.resources(c), " ".join(cvar), kg, resource_lex)
        best: dict[str, float] = {}
        for (p, _), s in scores.items():
            if s > best.get(p, 0.0):
                best[p] = s
        per_category.append(best)
    chosen = _select_by_median(per_category)
    if chosen is None:
        return None
    return chosen[0], len(cset)


def mine_type_pattern(
    cset: CandidateSet, graph: CategoryGraph, kg: KgIndex, type_lex: LexStore,
) -> tuple[str, int] | None:
    cfix = " ".join(cset.cfix)
    per_category = []
    for c, _ in cset.members:
        scores = type_scores(graph.resources(c), cfix, kg, type_lex)
        per_category.append({t: s for t, s in scores.items() if s > 0})
    chosen = _select_by_median(per_category)
    if chosen is None:
        return None
    return chosen[0], len(cset)


class PatternRegistry:
    """Supports of (textual pattern, kind, implication) triples."""

    def __init__(self):
        self._support: dict[TextualPattern, dict[str, dict[str, int]]] = defaultdict(
            lambda: {PROPERTY: {}, TYPE: {}}
        )

    def register(self, textual: TextualPattern, kind: str, implication: str, increment: int) -> None:
        if kind not in KINDS:
            raise ValueError(f"unknown pattern kind {kind!r}")
        if increment <= 0:
            raise ValueError("support increment must be positive")
        bucket = self._support[textual][kind]
        bucket[implication] = bucket.get(implication, 0) + increment

    def support(self, textual: TextualPattern, kind: str, implication: str) -> int:
        entry = self._support.get(textual)
        return entry[kind].get(implication, 0) if entry else 0

    def implications(self, textual: TextualPattern, kind: str) -> dict[str, int]:
        entry = self._support.get(textual)
        return dict(entry[kind]) if entry else {}

    def confidence(self, textual: TextualPattern, kind: str, implication: str) -> float:
        """Support normalised over same-kind patterns of the same textual pattern."""
        entry = self._support.get(textual)
        if not entry or implication not in entry[kind]:
            raise KeyError((textual, kind, implication))
        bucket = entry[kind]
        return bucket[implication] / sum(bucket.values())

    def textual_patterns(self) -> list[TextualPattern]:
        return sorted(self._support)

    def __iter__(self) -> Iterator[tuple[TextualPattern, str, str, int]]:
        for textual in sorted(self._support):
            for kind in KINDS:
                bucket = self._support[textual][kind]
                for implication in sorted(bucket):
                    yield textual, kind, implication, bucket[implication]

    def __len__(self) -> int:
        return sum(len(b) for e in self._support.values() for b in e.values())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PatternRegistry) and list(self) == list(other)


def register(
    registry: PatternRegistry, textual: TextualPattern, kind: str, implication: str, increment: int,
) -> PatternRegistry:
    registry.register(textual, kind, implication, increment)
    return registry


def mine_patterns(
    sets: Iterable[CandidateSet],
    graph: CategoryGraph,
    kg: KgIndex,
    resource_lex: LexStore,
    type_lex: LexStore,
) -> PatternRegistry:
    registry = PatternRegistry()
    for cset in sets:
        textual = TextualPattern.of(cset)
        prop = mine_property_pattern(cset, graph, kg, resource_lex)
        if prop is not None:
            registry.register(textual, PROPERTY, *prop)
        typ = mine_type_pattern(cset, graph, kg, type_lex)
        if typ is not None:
            registry.register(textual, TYPE, *typ)
    return registry
