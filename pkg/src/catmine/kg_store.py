"""Background knowledge graph: triple loading, indexing and ontology queries."""

from __future__ import annotations

import logging
import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Union

log = logging.getLogger(__name__)

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
RDFS_SUBCLASS_OF = "http://www.w3.org/2000/01/rdf-schema#subClassOf"
OWL_DISJOINT_WITH = "http://www.w3.org/2002/07/owl#disjointWith"
OWL_THING = "http://www.w3.org/2002/07/owl#Thing"


class Literal(NamedTuple):
    """A typed literal. ``value`` is the raw lexical form between the quotes,
    escapes untouched; ``datatype`` is the datatype IRI, ``@lang`` for a
    language-tagged string, or ``""`` for a plain literal."""

    value: str
    datatype: str = ""


Node = Union[str, Literal]


class Triple(NamedTuple):
    subject: str
    property: str
    object: Node


def format_term(node: Node) -> str:
    """N-Triples surface form of a resource IRI or literal."""
    if isinstance(node, Literal):
        if not node.datatype:
            return f'"{node.value}"'
        if node.datatype.startswith("@"):
            return f'"{node.value}"{node.datatype}'
        return f'"{node.value}"^^<{node.datatype}>'
    return f"<{node}>"


def node_key(node: Node) -> str:
    """Total, deterministic sort key across resources and literals."""
    return format_term(node)


_IRI = r"<([^<>\s]*)>"
_LITERAL = r'"((?:[^"\\]|\\.)*)"(?:\^\^<([^<>\s]*)>|(@[A-Za-z][A-Za-z0-9-]*))?'
_LINE_RE = re.compile(rf"^\s*{_IRI}\s+{_IRI}\s+(?:{_IRI}|{_LITERAL})\s*\.\s*$")
_TERM_RE = re.compile(rf"^(?:{_IRI}|{_LITERAL})$")


def parse_line(line: str) -> Triple | None:
    """Parse one N-Triples line; ``None`` if it is malformed."""
    m = _LINE_RE.match(line)
    if m is None:
        return None
    s, p, o_iri, lit, dtype, lang = m.groups()
    if o_iri is not None:
        return Triple(s, p, o_iri)
    return Triple(s, p, Literal(lit, dtype or lang or ""))


def parse_term(text: str) -> Node:
    """Inverse of :func:`format_term`."""
    m = _TERM_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not an N-Triples term: {text!r}")
    iri, lit, dtype, lang = m.groups()
    if iri is not None:
        return iri
    return Literal(lit, dtype or lang or "")


@dataclass
class LoadReport:
    parsed: int = 0
    skipped: int = 0
    skipped_lines: list[int] = field(default_factory=list)

    def merge(self, other: LoadReport) -> LoadReport:
        return LoadReport(
            self.parsed + other.parsed,
            self.skipped + other.skipped,
            self.skipped_lines + other.skipped_lines,
        )

    def summary(self, name: str = "input") -> str:
        return f"{name}: parsed={self.parsed} skipped={self.skipped}"


def iter_ntriples(lines: Iterable[str], report: LoadReport | None = None) -> Iterable[Triple]:
    """Yield triples from N-Triples-like lines. Blank lines and ``#`` comments
    are ignored; malformed lines are skipped and counted in ``report``."""
    if report is None:
        report = LoadReport()
    for lineno, line in enumerate(lines, 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        triple = parse_line(stripped)
        if triple is None:
            report.skipped += 1
            report.skipped_lines.append(lineno)
            log.debug("skipping malformed line %d: %r", lineno, stripped[:200])
            continue
        report.parsed += 1
        yield triple


class OntologyCycleError(ValueError):
    """The subclass hierarchy contains a cycle."""


class Ontology:
    """Subclass hierarchy plus pairwise disjointness.

    The hierarchy must be acyclic; the universal root type is never part of a
    superclass closure.
    """

    def __init__(
        self,
        subclass_edges: dict[str, set[str]] | None = None,
        disjoint_pairs: Iterable[tuple[str, str]] = (),
        root: str = OWL_THING,
    ):
        self.root = root
        self.supertypes: dict[str, frozenset[str]] = {
            t: frozenset(sups) for t, sups in (subclass_edges or {}).items()
        }
        self.disjoint: frozenset[frozenset[str]] = frozenset(
            frozenset(pair) for pair in disjoint_pairs
        )
        self._disjoint_with: dict[str, set[str]] = defaultdict(set)
        for a, b in disjoint_pairs:
            self._disjoint_with[a].add(b)
            self._disjoint_with[b].add(a)
        self.known_types: frozenset[str] = frozenset(
            set(self.supertypes)
            | {s for sups in self.supertypes.values() for s in sups}
            | set(self._disjoint_with)
        )
        self._closure: dict[str, frozenset[str]] = {}
        self._check_acyclic()

    def _check_acyclic(self) -> None:
        # iterative DFS with colouring; reports the first cycle found
        WHITE, GREY, BLACK = 0, 1, 2
        colour: dict[str, int] = {}
        for start in sorted(self.supertypes):
            if colour.get(start, WHITE) != WHITE:
                continue
            stack = [(start, iter(sorted(self.supertypes.get(start, ()))))]
            path = [start]
            colour[start] = GREY
            while stack:
                node, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    colour[node] = BLACK
                    stack.pop()
                    path.pop()
                    continue
                state = colour.get(nxt, WHITE)
                if state == GREY:
                    cycle = path[path.index(nxt):] + [nxt]
                    raise OntologyCycleError("subclass cycle: " + " -> ".join(cycle))
                if state == WHITE:
                    colour[nxt] = GREY
                    path.append(nxt)
                    stack.append((nxt, iter(sorted(self.supertypes.get(nxt, ())))))

    def superclass_closure(self, t: str) -> frozenset[str]:
        """All transitive supertypes of ``t``, without ``t`` and the root."""
        cached = self._closure.get(t)
        if cached is not None:
            return cached
        if t not in self.known_types:
            log.debug("superclass closure of unknown type %s", t)
            return frozenset()
        result: set[str] = set()
        todo = list(self.supertypes.get(t, ()))
        while todo:
            s = todo.pop()
            if s in result:
                continue
            result.add(s)
            todo.extend(self.supertypes.get(s, ()))
        result.discard(self.root)
        result.discard(t)
        closure = frozenset(result)
        self._closure[t] = closure
        return closure

    def is_subtype(self, sub: str, sup: str) -> bool:
        """Strict (transitive) subtype test."""
        return sub != sup and sup in self.superclass_closure(sub)

    def are_disjoint(self, t1: str, t2: str) -> bool:
        """True iff some supertype-or-self of ``t1`` is declared disjoint with
        some supertype-or-self of ``t2``."""
        if not self._disjoint_with:
            return False
        up2 = self.superclass_closure(t2) | {t2}
        for s1 in self.superclass_closure(t1) | {t1}:
            partners = self._disjoint_with.get(s1)
            if partners and not partners.isdisjoint(up2):
                return True
        return False

    @classmethod
    def from_triples(
        cls,
        subclass_triples: Iterable[Triple] = (),
        disjoint_triples: Iterable[Triple] = (),
        root: str = OWL_THING,
    ) -> Ontology:
        edges: dict[str, set[str]] = defaultdict(set)
        for s, p, o in subclass_triples:
            if p == RDFS_SUBCLASS_OF and isinstance(o, str):
                edges[s].add(o)
        pairs = [
            (s, o) for s, p, o in disjoint_triples
            if p == OWL_DISJOINT_WITH and isinstance(o, str)
        ]
        return cls(dict(edges), pairs, root=root)


class KgIndex:
    """Immutable index over the background facts, instance types included.

    Type assertions are kept alongside ordinary facts, so
    ``freq(members, RDF_TYPE, t)`` is just another frequency query.
    """

    def __init__(self, triples: Iterable[Triple] = (), ontology: Ontology | None = None):
        by_subject: dict[str, dict[str, set[Node]]] = defaultdict(lambda: defaultdict(set))
        by_po: dict[tuple[str, Node], set[str]] = defaultdict(set)
        for s, p, o in triples:
            by_subject[s][p].add(o)
            by_po[(p, o)].add(s)
        self._by_subject = {s: {p: frozenset(os) for p, os in props.items()}
                            for s, props in by_subject.items()}
        self._by_po = {k: frozenset(v) for k, v in by_po.items()}
        self.ontology = ontology if ontology is not None else Ontology()
        self.report = LoadReport()

    def __len__(self) -> int:
        return sum(len(os) for props in self._by_subject.values() for os in props.values())

    def __contains__(self, triple: tuple[str, str, Node]) -> bool:
        s, p, o = triple
        return o in self.values(s, p)

    def triples(self) -> Iterable[Triple]:
        for s in sorted(self._by_subject):
            props = self._by_subject[s]
            for p in sorted(props):
                for o in sorted(props[p], key=node_key):
                    yield Triple(s, p, o)

    def subjects(self) -> Iterable[str]:
        return self._by_subject.keys()

    def has_subject(self, s: str) -> bool:
        return s in self._by_subject

    def properties_of(self, s: str) -> dict[str, frozenset[Node]]:
        return self._by_subject.get(s, {})

    def facts_of(self, s: str) -> list[tuple[str, Node]]:
        """by-subject projection: every (property, object) of ``s``."""
        return [(p, o) for p, os in self.properties_of(s).items() for o in os]

    def values(self, s: str, p: str) -> frozenset[Node]:
        return self._by_subject.get(s, {}).get(p, frozenset())

    def subjects_with(self, p: str, o: Node) -> frozenset[str]:
        """by-property-object projection."""
        return self._by_po.get((p, o), frozenset())

    def types_of(self, r: str) -> frozenset[str]:
        return frozenset(o for o in self.values(r, RDF_TYPE) if isinstance(o, str))

    def freq(self, members: set[str] | frozenset[str], p: str, v: Node) -> float:
        return freq(self, members, p, v)


def freq(kg: KgIndex, members: set[str] | frozenset[str], p: str, v: Node) -> float:
    """Fraction of ``members`` that carry the fact ``(member, p, v)``."""
    if not members:
        raise ValueError("freq is undefined for an empty member set")
    holders = kg.subjects_with(p, v)
    if len(holders) < len(members):
        hits = sum(1 for r in holders if r in members)
    else:
        hits = sum(1 for r in members if r in holders)
    return hits / len(members)


def detect_functional_properties(kg: KgIndex, threshold: float = 0.05) -> frozenset[str]:
    """Properties whose share of multi-valued subjects is below ``threshold``.

    Multi-valued means two or more distinct objects on one subject.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must lie in (0, 1], got {threshold}")
    used: dict[str, int] = defaultdict(int)
    multi: dict[str, int] = defaultdict(int)
    for s in kg.subjects():
        for p, objects in kg.properties_of(s).items():
            used[p] += 1
            if len(objects) >= 2:
                multi[p] += 1
    return frozenset(p for p, n in used.items() if multi[p] / n < threshold)


def load_ntriples(*sources: Iterable[str], ontology: Ontology | None = None) -> KgIndex:
    """Build a :class:`KgIndex` from one or more line streams."""
    report = LoadReport()
    triples: list[Triple] = []
    for lines in sources:
        triples.extend(iter_ntriples(lines, report))
    kg = KgIndex(triples, ontology)
    kg.report = report
    if report.skipped:
        log.warning("skipped %d malformed triple lines", report.skipped)
    return kg


def load_ontology(
    subclass_lines: Iterable[str] = (),
    disjoint_lines: Iterable[str] = (),
    root: str = OWL_THING,
) -> Ontology:
    return Ontology.from_triples(
        iter_ntriples(subclass_lines), iter_ntriples(disjoint_lines), root=root
    )
