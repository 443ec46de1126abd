"""Apply mined patterns to categories and select axioms above a confidence
threshold."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .candidates import Tokens, name_tokens
from .category_graph import CategoryGraph
from .kg_store import RDF_TYPE, KgIndex, Node, Ontology, node_key
from .lexicalisation import LexStore
from .mining import PROPERTY, TYPE, PatternRegistry, TextualPattern, relation_scores, type_scores

RELATION = "relation"
DEFAULT_TAU = 0.05


@dataclass(frozen=True)
class Axiom:
    """``category`` implies ``(member, predicate, value)`` for every member.

    Type axioms use ``RDF_TYPE`` as predicate and the type as value.
    """

    category: str
    kind: str  # RELATION or TYPE
    predicate: str
    value: Node
    confidence: float

    @property
    def sort_key(self):
        return (self.category, self.kind, self.predicate, node_key(self.value))


def pattern_confidence(registry: PatternRegistry, textual: TextualPattern, kind: str, implication: str) -> float:
    return registry.confidence(textual, kind, implication)


def match(tokens: Tokens, textual: TextualPattern) -> Tokens | None:
    """Variable part of a category name under ``textual``, if it fits."""
    tokens = tuple(t.lower() for t in tokens)
    pre, post = len(textual.prefix), len(textual.postfix)
    if len(tokens) <= pre + post:
        return None
    if tokens[:pre] != textual.prefix or tokens[len(tokens) - post:] != textual.postfix:
        return None
    return tokens[pre:len(tokens) - post]


def matching_patterns(tokens: Tokens, known: set[TextualPattern] | frozenset[TextualPattern]) -> list[tuple[TextualPattern, Tokens]]:
    """All known textual patterns matching a name, with their variable parts."""
    tokens = tuple(t.lower() for t in tokens)
    n = len(tokens)
    found = []
    for i in range(n):
        for j in range(i + 1, n + 1):
            if i == 0 and j == n:
                continue
            prefix, postfix = tokens[:i], tokens[j:]
            try:
                textual = TextualPattern(prefix, postfix)
            except ValueError:
                continue
            if textual in known:
                found.append((textual, tokens[i:j]))
    found.sort()
    return found


def _check_tau(tau: float) -> None:
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must lie in (0, 1), got {tau}")


def relation_axioms_for(
    c: str,
    matches: list[tuple[TextualPattern, Tokens]],
    registry: PatternRegistry,
    resources: frozenset[str],
    kg: KgIndex,
    resource_lex: LexStore,
    tau: float = DEFAULT_TAU,
) -> list[Axiom]:
    """Relation axioms above ``tau``: at most one value per property, the
    most confident (ties to the smaller value)."""
    _check_tau(tau)
    if not resources:
        return []
    best: dict[str, tuple[float, str, Node]] = {}
    for textual, cvar in matches:
        props = registry.implications(textual, PROPERTY)
        if not props:
            continue
        scores = relation_scores(resources, " ".join(cvar), kg, resource_lex)
        for (p, v), score in scores.items():
            if p not in props:
                continue
            conf = registry.confidence(textual, PROPERTY, p) * score
            if not conf > tau:
                continue
            current = best.get(p)
            cand = (conf, node_key(v), v)
            if current is None or conf > current[0] or (conf == current[0] and cand[1] < current[1]):
                best[p] = cand
    return [Axiom(c, RELATION, p, v, conf) for p, (conf, _, v) in sorted(best.items())]


def type_axioms_for(
    c: str,
    matches: list[tuple[TextualPattern, Tokens]],
    registry: PatternRegistry,
    resources: frozenset[str],
    kg: KgIndex,
    type_lex: LexStore,
    ontology: Ontology,
    tau: float = DEFAULT_TAU,
) -> list[Axiom]:
    """Type axioms above ``tau``: the most confident one plus every less
    confident one whose type is a subtype of an already accepted type."""
    _check_tau(tau)
    if not resources:
        return []
    conf_of: dict[str, float] = {}
    for textual, _ in matches:
        types = registry.implications(textual, TYPE)
        if not types:
            continue
        scores = type_scores(resources, " ".join(textual.prefix + textual.postfix), kg, type_lex)
        for t in types:
            conf = registry.confidence(textual, TYPE, t) * scores.get(t, 0.0)
            if conf > tau and conf > conf_of.get(t, 0.0):
                conf_of[t] = conf
    ranked = sorted(conf_of.items(), key=lambda item: (-item[1], item[0]))
    accepted: list[tuple[str, float]] = []
    for t, conf in ranked:
        if not accepted or any(ontology.is_subtype(t, a) for a, _ in accepted):
            accepted.append((t, conf))
    return [Axiom(c, TYPE, RDF_TYPE, t, conf) for t, conf in sorted(accepted)]


def apply_patterns(
    graph: CategoryGraph,
    registry: PatternRegistry,
    kg: KgIndex,
    resource_lex: LexStore,
    type_lex: LexStore,
    tau: float = DEFAULT_TAU,
    categories: Iterable[str] | None = None,
) -> list[Axiom]:
    """Axioms for every category (all graph nodes by default), sorted."""
    _check_tau(tau)
    known = frozenset(registry.textual_patterns())
    axioms: list[Axiom] = []
    for c in sorted(graph.nodes if categories is None else categories):
        resources = graph.resources(c)
        if not resources:
            continue
        matches = matching_patterns(name_tokens(c), known)
        if not matches:
            continue
        axioms.extend(relation_axioms_for(c, matches, registry, resources, kg, resource_lex, tau))
        axioms.extend(type_axioms_for(c, matches, registry, resources, kg, type_lex, kg.ontology, tau))
    return axioms


def filter_axioms(axioms: Iterable[Axiom], tau: float) -> list[Axiom]:
    """Axioms emitted at a stricter threshold: selection is monotone in tau,
    so re-filtering a lower-threshold result is exact."""
    return [a for a in axioms if a.confidence > tau]
