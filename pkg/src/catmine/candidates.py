"""Candidate category sets: sibling categories sharing a word prefix and/or
postfix in their names."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

from .category_graph import CategoryGraph, category_tokens

Tokens = tuple[str, ...]


@dataclass(frozen=True)
class CandidateSet:
    parent: str
    prefix: Tokens
    postfix: Tokens
    members: tuple[tuple[str, Tokens], ...]

    def __post_init__(self):
        if not self.prefix and not self.postfix:
            raise ValueError("candidate set needs a shared prefix or postfix")

    @property
    def kind(self) -> str:
        if self.prefix and self.postfix:
            return "both"
        return "prefix" if self.prefix else "postfix"

    @property
    def cfix(self) -> Tokens:
        """Shared part of the names: prefix followed by postfix."""
        return self.prefix + self.postfix

    @property
    def categories(self) -> list[str]:
        return [c for c, _ in self.members]

    def __len__(self) -> int:
        return len(self.members)


def variable_part(cset: CandidateSet, member: str) -> Tokens:
    for c, cvar in cset.members:
        if c == member:
            return cvar
    raise KeyError(f"{member!r} is not a member of the candidate set under {cset.parent!r}")


def name_tokens(c: str) -> Tokens:
    """Lowercased word tokens of a category name."""
    return tuple(t.lower() for t in category_tokens(c))


def _common_prefix_len(seqs: Sequence[Tokens]) -> int:
    first = min(seqs, key=len)
    n = 0
    for i, tok in enumerate(first):
        if all(s[i] == tok for s in seqs):
            n += 1
        else:
            break
    return n


def _common_suffix_len(seqs: Sequence[Tokens]) -> int:
    return _common_prefix_len([s[::-1] for s in seqs])


def _shape_group(
    parent: str, members: list[tuple[str, Tokens]], anchored: str, min_size: int
) -> CandidateSet | None:
    """Derive the maximal shared affixes of a group anchored on its first
    (``anchored == "prefix"``) or last token.

    A member equal to the shared anchor part has no variable part and leaves
    the group; the anchor is then recomputed over the rest.
    """
    while len(members) >= min_size:
        seqs = [toks for _, toks in members]
        if anchored == "postfix":
            k = _common_suffix_len(seqs)
            keep = [(c, t) for c, t in members if len(t) > k]
        else:
            k = _common_prefix_len(seqs)
            keep = [(c, t) for c, t in members if len(t) > k]
        if len(keep) == len(members):
            break
        members = keep
    else:
        return None
    if len(members) < min_size:
        return None

    seqs = [toks for _, toks in members]
    # leave at least one variable token per member
    if anchored == "postfix":
        post = _common_suffix_len(seqs)
        room = min(len(s) for s in seqs) - post - 1
        pre = min(_common_prefix_len([s[:len(s) - post] for s in seqs]), room)
    else:
        pre = _common_prefix_len(seqs)
        room = min(len(s) for s in seqs) - pre - 1
        post = min(_common_suffix_len([s[pre:] for s in seqs]), room)
    prefix = seqs[0][:pre]
    postfix = seqs[0][len(seqs[0]) - post:] if post else ()
    out = tuple(
        (c, toks[pre:len(toks) - post]) for c, toks in sorted(members)
    )
    return CandidateSet(parent, prefix, postfix, out)


def candidate_sets_for_parent(
    parent: str, children: Iterable[str], min_size: int = 2
) -> list[CandidateSet]:
    """Group one parent's children.

    Children are bucketed by last token (postfix groups) and by first token
    (prefix groups). Buckets are served largest first, postfix before prefix
    on equal size, and each child joins only the first bucket that claims it.
    """
    kids = sorted({c: name_tokens(c) for c in children}.items())
    kids = [(c, t) for c, t in kids if len(t) >= 2]
    by_last: dict[str, list[str]] = defaultdict(list)
    by_first: dict[str, list[str]] = defaultdict(list)
    tokens = dict(kids)
    for c, t in kids:
        by_last[t[-1]].append(c)
        by_first[t[0]].append(c)

    buckets = [(len(cs), 0, (w,), "postfix", cs) for w, cs in by_last.items() if len(cs) >= min_size]
    buckets += [(len(cs), 1, (w,), "prefix", cs) for w, cs in by_first.items() if len(cs) >= min_size]
    buckets.sort(key=lambda b: (-b[0], b[1], b[2]))

    taken: set[str] = set()
    result = []
    for _, _, _, anchored, cs in buckets:
        free = [c for c in cs if c not in taken]
        if len(free) < min_size:
            continue
        cset = _shape_group(parent, [(c, tokens[c]) for c in free], anchored, min_size)
        if cset is None:
            continue
        taken.update(cset.categories)
        result.append(cset)
    result.sort(key=lambda s: (s.prefix, s.postfix, s.members))
    return result


def build_candidate_sets(graph: CategoryGraph, min_size: int = 2) -> list[CandidateSet]:
    if min_size < 2:
        raise ValueError("min_size must be at least 2")
    sets = []
    for parent in sorted(graph.children):
        sets.extend(candidate_sets_for_parent(parent, graph.children[parent], min_size))
    return sets
