"""Category graph loading, cleaning and membership lookups."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

log = logging.getLogger(__name__)

DEFAULT_ROOT = "Main_topic_classifications"
DEFAULT_STOPWORDS = ("wikipedia", "lists", "template", "stub")


class CategoryGraphError(ValueError):
    pass


def category_title(category_id: str) -> str:
    """Human-readable title: underscores become spaces, runs collapse."""
    return " ".join(category_id.replace("_", " ").split())


def category_tokens(category_id: str) -> tuple[str, ...]:
    return tuple(category_title(category_id).split())


@dataclass
class CategoryGraph:
    root: str = DEFAULT_ROOT
    nodes: set[str] = field(default_factory=set)
    children: dict[str, dict[str, None]] = field(default_factory=dict)
    membership: dict[str, set[str]] = field(default_factory=dict)

    def add_node(self, c: str) -> None:
        self.nodes.add(c)

    def add_edge(self, parent: str, child: str) -> None:
        self.nodes.add(parent)
        self.nodes.add(child)
        # dict as an insertion-ordered set
        self.children.setdefault(parent, {})[child] = None

    def add_member(self, c: str, resource: str) -> None:
        self.nodes.add(c)
        self.membership.setdefault(c, set()).add(resource)

    def children_of(self, c: str) -> list[str]:
        return list(self.children.get(c, ()))

    def resources(self, c: str) -> frozenset[str]:
        """Direct members of ``c``; no propagation through subcategories."""
        return frozenset(self.membership.get(c, ()))

    def tokens(self, c: str) -> tuple[str, ...]:
        return category_tokens(c)

    def all_resources(self) -> set[str]:
        return set().union(*self.membership.values()) if self.membership else set()

    def edges(self) -> Iterable[tuple[str, str]]:
        for parent in sorted(self.children):
            for child in self.children[parent]:
                yield parent, child


def _split_tsv(line: str) -> list[str] | None:
    line = line.rstrip("\r\n")
    if not line.strip() or line.startswith("#"):
        return None
    return [part.strip() for part in line.split("\t")]


def load_category_graph(
    edge_lines: Iterable[str],
    membership_lines: Iterable[str] = (),
    root: str = DEFAULT_ROOT,
) -> CategoryGraph:
    """Read ``parent<TAB>child`` and ``category<TAB>resource`` rows.

    Category ids are kept as given; titles and tokens are derived from them.
    """
    graph = CategoryGraph(root=root)
    for lineno, line in enumerate(edge_lines, 1):
        parts = _split_tsv(line)
        if parts is None:
            continue
        if len(parts) < 2 or not parts[0] or not parts[1]:
            log.warning("edges line %d malformed, skipped", lineno)
            continue
        graph.add_edge(parts[0], parts[1])
    implicit = 0
    for lineno, line in enumerate(membership_lines, 1):
        parts = _split_tsv(line)
        if parts is None:
            continue
        if len(parts) < 2 or not parts[0] or not parts[1]:
            log.warning("membership line %d malformed, skipped", lineno)
            continue
        if parts[0] not in graph.nodes:
            implicit += 1
        graph.add_member(parts[0], parts[1])
    if implicit:
        log.info("%d membership rows created implicit category nodes", implicit)
    return graph


def is_administrative(c: str, stopwords: Sequence[str] = DEFAULT_STOPWORDS) -> bool:
    title = category_title(c).lower()
    return any(word.lower() in title for word in stopwords)


def clean(graph: CategoryGraph, stopwords: Sequence[str] = DEFAULT_STOPWORDS) -> CategoryGraph:
    """Keep categories reachable from the root without passing through an
    administrative category (one whose title contains a stop word)."""
    if graph.root not in graph.nodes:
        raise CategoryGraphError(f"root category {graph.root!r} not in graph")
    keep = {graph.root}
    queue = deque([graph.root])
    while queue:
        c = queue.popleft()
        for child in graph.children.get(c, ()):
            if child not in keep and not is_administrative(child, stopwords):
                keep.add(child)
                queue.append(child)

    cleaned = CategoryGraph(root=graph.root, nodes=set(keep))
    for parent, kids in graph.children.items():
        if parent not in keep:
            continue
        retained = {k: None for k in kids if k in keep}
        if retained:
            cleaned.children[parent] = retained
    for c, members in graph.membership.items():
        if c in keep and members:
            cleaned.membership[c] = set(members)
    removed = len(graph.nodes) - len(keep)
    log.info("cleaning kept %d of %d categories (%d removed)", len(keep), len(graph.nodes), removed)
    return cleaned
