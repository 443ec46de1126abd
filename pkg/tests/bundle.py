"""Serialise a test world into the on-disk input files the CLI reads."""

from __future__ import annotations

from pathlib import Path

import yaml

from catmine.kg_store import OWL_DISJOINT_WITH, RDF_TYPE, RDFS_SUBCLASS_OF, format_term

from .scenarios import World


def _nt(s, p, o) -> str:
    return f"{format_term(s)} {format_term(p)} {format_term(o)} .\n"


def write_bundle(world: World, directory: Path, root: str = "Root", **settings) -> Path:
    """Write input files plus ``config.yaml`` into ``directory``; return the
    config path. Output goes to ``directory/out`` unless overridden."""
    directory.mkdir(parents=True, exist_ok=True)
    facts = [t for t in world.triples if t.property != RDF_TYPE]
    types = [t for t in world.triples if t.property == RDF_TYPE]
    files = {
        "kg_facts": ("facts.nt", [_nt(*t) for t in facts]),
        "instance_types": ("types.nt", [_nt(*t) for t in types]),
        "subclass_axioms": ("subclass.nt", [
            _nt(t, RDFS_SUBCLASS_OF, s) for t in sorted(world.subclass) for s in sorted(world.subclass[t])]),
        "disjointness_axioms": ("disjoint.nt", [_nt(a, OWL_DISJOINT_WITH, b) for a, b in world.disjoint]),
        "category_edges": ("edges.tsv", [f"{p}\t{c}\n" for p, c in world.graph.edges()]),
        "category_membership": ("membership.tsv", [
            f"{c}\t{r}\n" for c in sorted(world.graph.membership) for r in sorted(world.graph.membership[c])]),
        "resource_lexicalisations": ("resource_lex.tsv", [
            f"{e}\t{ph}\t{n}\n" for e, ph, n in world.resource_lex.rows()]),
        "type_lexicalisations": ("type_lex.tsv", [f"{e}\t{ph}\t{n}\n" for e, ph, n in world.type_lex.rows()]),
    }
    config = {"root": root, "out": "out"}
    for key, (name, lines) in files.items():
        (directory / name).write_text("".join(lines), encoding="utf-8")
        config[key] = name
    config.update(settings)
    path = directory / "config.yaml"
    path.write_text(yaml.safe_dump(config, sort_keys=True), encoding="utf-8")
    return path
