"""Turn axioms into assertions about category members and drop the ones that
would contradict the knowledge graph."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, replace
from typing import Iterable

from .application import Axiom, RELATION
from .category_graph import CategoryGraph
from .kg_store import RDF_TYPE, KgIndex, Node, Ontology, node_key
from .mining import TYPE

NOVEL = "novel"
PRE_EXISTING = "pre-existing"
FILTERED = "filtered"
FUNCTIONAL_CONFLICT = "functional-conflict"
DISJOINTNESS_CONFLICT = "disjointness-conflict"


@dataclass(frozen=True)
class Assertion:
    subject: str
    predicate: str
    object: Node
    axiom: Axiom
    status: str = NOVEL
    reason: str | None = None

    @property
    def triple(self) -> tuple[str, str, Node]:
        return (self.subject, self.predicate, self.object)

    @property
    def is_type(self) -> bool:
        return self.predicate == RDF_TYPE

    @property
    def sort_key(self):
        return (self.subject, self.predicate, node_key(self.object))

    def filtered(self, reason: str) -> Assertion:
        return replace(self, status=FILTERED, reason=reason)


def _provenance_rank(axiom: Axiom):
    return (-axiom.confidence, axiom.category, axiom.predicate, node_key(axiom.value))


def apply_axioms(axioms: Iterable[Axiom], graph: CategoryGraph, kg: KgIndex) -> list[Assertion]:
    """One assertion per (axiom, member); type axioms also assert every
    supertype below the root.

    A triple produced by several axioms is kept once, credited to the most
    confident axiom.
    """
    ontology = kg.ontology
    chosen: dict[tuple[str, str, Node], Axiom] = {}
    for axiom in axioms:
        members = graph.resources(axiom.category)
        if axiom.kind == TYPE:
            objects: list[Node] = [axiom.value, *sorted(ontology.superclass_closure(axiom.value))]
        else:
            objects = [axiom.value]
        for r in members:
            for o in objects:
                key = (r, axiom.predicate, o)
                current = chosen.get(key)
                if current is None or _provenance_rank(axiom) < _provenance_rank(current):
                    chosen[key] = axiom
    out = []
    for (s, p, o), axiom in chosen.items():
        status = PRE_EXISTING if (s, p, o) in kg else NOVEL
        out.append(Assertion(s, p, o, axiom, status))
    out.sort(key=lambda a: a.sort_key)
    return out


def post_filter_relations(
    assertions: list[Assertion], kg: KgIndex, functional: frozenset[str] | set[str],
) -> list[Assertion]:
    """Filter novel values of functional properties on subjects that already
    have a different value, in the graph or from a more confident axiom."""
    out = list(assertions)
    survivors: dict[tuple[str, str], list[int]] = defaultdict(list)
    for i, a in enumerate(out):
        if a.status != NOVEL or a.is_type or a.predicate not in functional:
            continue
        existing = kg.values(a.subject, a.predicate)
        if any(o != a.object for o in existing):
            out[i] = a.filtered(FUNCTIONAL_CONFLICT)
        else:
            survivors[(a.subject, a.predicate)].append(i)
    for idxs in survivors.values():
        if len(idxs) < 2:
            continue
        ranked = sorted(idxs, key=lambda i: (-out[i].axiom.confidence, node_key(out[i].object)))
        for i in ranked[1:]:
            out[i] = out[i].filtered(FUNCTIONAL_CONFLICT)
    return out


def post_filter_types(assertions: list[Assertion], kg: KgIndex, ontology: Ontology | None = None) -> list[Assertion]:
    """Filter novel types disjoint with a type the subject already has.

    Novel types on one subject are admitted in descending confidence, each
    checked against the graph's types and the ones admitted before it.
    """
    ontology = ontology if ontology is not None else kg.ontology
    out = list(assertions)
    by_subject: dict[str, list[int]] = defaultdict(list)
    for i, a in enumerate(out):
        if a.status == NOVEL and a.is_type:
            by_subject[a.subject].append(i)
    for s, idxs in by_subject.items():
        held = set(kg.types_of(s))
        ranked = sorted(idxs, key=lambda i: (-out[i].axiom.confidence, node_key(out[i].object)))
        for i in ranked:
            t = out[i].object
            if any(ontology.are_disjoint(t, h) for h in held):
                out[i] = out[i].filtered(DISJOINTNESS_CONFLICT)
            else:
                held.add(t)
    return out


def generate_assertions(
    axioms: Iterable[Axiom], graph: CategoryGraph, kg: KgIndex, functional: frozenset[str] | set[str],
) -> list[Assertion]:
    """Apply axioms, then filter relations, then types."""
    assertions = apply_axioms(axioms, graph, kg)
    assertions = post_filter_relations(assertions, kg, functional)
    return post_filter_types(assertions, kg, kg.ontology)


def summarise(assertions: Iterable[Assertion]) -> Counter:
    counts: Counter = Counter()
    for a in assertions:
        kind = TYPE if a.is_type else RELATION
        counts[(kind, a.status if a.status != FILTERED else f"{FILTERED}:{a.reason}")] += 1
        counts[(kind, "generated")] += 1
    return counts
