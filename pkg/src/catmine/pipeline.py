"""Pipeline stages. Each stage writes its artifacts to the output directory
and later stages read them back."""

from __future__ import annotations

import logging
import random
from collections import Counter
from contextlib import ExitStack
from dataclasses import dataclass
from functools import cached_property
from itertools import groupby
from pathlib import Path
from statistics import fmean

from .application import RELATION, Axiom, apply_patterns, filter_axioms
from .artifacts import MissingArtifactError, atomic_write, header_comment, read_tsv, require, write_tsv
from .assertions import FILTERED, NOVEL, Assertion, generate_assertions, summarise
from .candidates import CandidateSet, build_candidate_sets
from .category_graph import CategoryGraph, clean, load_category_graph
from .config import PipelineConfig
from .kg_store import (
    RDF_TYPE,
    KgIndex,
    LoadReport,
    detect_functional_properties,
    format_term,
    iter_ntriples,
    load_ontology,
    parse_term,
)
from .lexicalisation import (
    LexStore,
    build_type_lexicalisations,
    iter_articles,
    load_resource_lexicalisations,
    load_type_lexicalisations,
)
from .mining import KINDS, PatternRegistry, TextualPattern, mine_patterns

log = logging.getLogger(__name__)

STAGES = ("ingest", "build-lex", "candidates", "mine", "apply-patterns", "generate", "report")

# axioms are also kept down to this confidence so the report can sweep tau
SWEEP_FLOOR = 0.005
BUCKETS = [(round(0.01 * i, 2), round(0.01 * (i + 1), 2)) for i in range(1, 10)] + [(0.10, 1.00)]
SWEEP_TAUS = [round(0.01 * i, 2) for i in range(1, 11)]

EDGES = "category_edges.tsv"
MEMBERSHIP = "category_membership.tsv"
FUNCTIONAL = "functional_properties.tsv"
LOAD_REPORT = "load_report.txt"
TYPE_LEX = "type_lexicalisations.tsv"
CANDIDATES = "candidate_sets.tsv"
PATTERNS = "patterns.tsv"
AXIOMS = "axioms.tsv"
AXIOM_SWEEP = "axiom_sweep.tsv"
NOVEL_NT = "novel_assertions.nt"
FILTERED_TSV = "filtered_assertions.tsv"
GEN_SUMMARY = "generation_summary.txt"
REPORT = "report.txt"

AXIOM_COLUMNS = ("category", "kind", "property_or_type", "value", "confidence")


def _tokens(text: str) -> tuple[str, ...]:
    return tuple(text.split(" ")) if text else ()


@dataclass
class Pipeline:
    config: PipelineConfig

    @property
    def out(self) -> Path:
        return self.config.out

    def path(self, name: str) -> Path:
        return self.out / name

    # --- inputs --------------------------------------------------------------

    def _open(self, name: str, stack: ExitStack):
        path = getattr(self.config, name)
        if path is None:
            return []
        return stack.enter_context(open(path, encoding="utf-8"))

    @cached_property
    def kg(self) -> KgIndex:
        with ExitStack() as stack:
            ontology = load_ontology(
                self._open("subclass_axioms", stack),
                self._open("disjointness_axioms", stack),
                root=self.config.root_type,
            )
            report = LoadReport()
            triples = []
            self.input_reports = {}
            for name in ("kg_facts", "instance_types"):
                part = LoadReport()
                triples.extend(iter_ntriples(self._open(name, stack), part))
                self.input_reports[name] = part
                report = report.merge(part)
        kg = KgIndex(triples, ontology)
        kg.report = report
        return kg

    @cached_property
    def resource_lex(self) -> LexStore:
        with open(self.config.resource_lexicalisations, encoding="utf-8") as fh:
            return load_resource_lexicalisations(fh)

    # --- artifacts -----------------------------------------------------------

    def load_graph(self) -> CategoryGraph:
        graph = CategoryGraph(root=self.config.root)
        graph.add_node(self.config.root)
        for row in read_tsv(self.path(EDGES), "ingest"):
            graph.add_edge(row[0], row[1])
        for row in read_tsv(self.path(MEMBERSHIP), "ingest"):
            graph.add_member(row[0], row[1])
        return graph

    def load_functional(self) -> frozenset[str]:
        return frozenset(row[0] for row in read_tsv(self.path(FUNCTIONAL), "ingest"))

    def load_type_lex(self) -> LexStore:
        rows = read_tsv(self.path(TYPE_LEX), "build-lex")
        return load_type_lexicalisations("\t".join(r) for r in rows)

    def load_candidates(self) -> list[CandidateSet]:
        rows = list(read_tsv(self.path(CANDIDATES), "candidates"))
        sets = []
        for (parent, prefix, postfix, _), group in groupby(rows, key=lambda r: (r[0], r[1], r[2], r[5])):
            members = tuple((r[3], _tokens(r[4])) for r in group)
            sets.append(CandidateSet(parent, _tokens(prefix), _tokens(postfix), members))
        return sets

    def load_patterns(self) -> PatternRegistry:
        registry = PatternRegistry()
        for prefix, postfix, kind, implication, support in read_tsv(self.path(PATTERNS), "mine"):
            registry.register(TextualPattern(_tokens(prefix), _tokens(postfix)), kind, implication, int(support))
        return registry

    def load_axioms(self, name: str = AXIOMS) -> list[Axiom]:
        axioms = []
        for category, kind, predicate, value, conf in read_tsv(self.path(name), "apply-patterns"):
            if kind == RELATION:
                axioms.append(Axiom(category, kind, predicate, parse_term(value), float(conf)))
            else:
                axioms.append(Axiom(category, kind, RDF_TYPE, predicate, float(conf)))
        return axioms

    # --- stages --------------------------------------------------------------

    def ingest(self) -> None:
        cfg = self.config
        with open(cfg.category_edges, encoding="utf-8") as edges, \
                open(cfg.category_membership, encoding="utf-8") as members:
            raw = load_category_graph(edges, members, root=cfg.root)
        graph = clean(raw, cfg.stopwords)
        kg = self.kg
        functional = detect_functional_properties(kg, cfg.functional_threshold)

        write_tsv(self.path(EDGES), "ingest", ("parent", "child"), graph.edges())
        write_tsv(self.path(MEMBERSHIP), "ingest", ("category", "resource"),
                  ((c, r) for c in sorted(graph.membership) for r in sorted(graph.membership[c])))
        write_tsv(self.path(FUNCTIONAL), "ingest", ("property",), ((p,) for p in sorted(functional)))
        lines = [header_comment("ingest")]
        for name, part in self.input_reports.items():
            lines.append(part.summary(name) + "\n")
        lines += [
            f"triples: {len(kg)}\n",
            f"subjects: {len(kg.subjects())}\n",
            f"ontology types: {len(kg.ontology.known_types)}\n",
            f"disjointness pairs: {len(kg.ontology.disjoint)}\n",
            f"categories loaded: {len(raw.nodes)}\n",
            f"categories retained: {len(graph.nodes)}\n",
            f"functional properties: {len(functional)}\n",
        ]
        atomic_write(self.path(LOAD_REPORT), lines)

    def build_lex(self) -> None:
        require(self.path(EDGES), "ingest")
        store = LexStore(word_level=True)
        if self.config.type_lexicalisations is not None:
            with open(self.config.type_lexicalisations, encoding="utf-8") as fh:
                store.merge(load_type_lexicalisations(fh))
        if self.config.articles is not None:
            with open(self.config.articles, encoding="utf-8") as fh:
                build_type_lexicalisations(self.kg, self.resource_lex, iter_articles(fh), into=store)
        write_tsv(self.path(TYPE_LEX), "build-lex", ("type", "word", "count"), store.rows())

    def candidates(self) -> None:
        graph = self.load_graph()
        sets = build_candidate_sets(graph, self.config.min_set_size)
        rows = (
            (s.parent, " ".join(s.prefix), " ".join(s.postfix), c, " ".join(cvar), i)
            for i, s in enumerate(sets) for c, cvar in s.members
        )
        write_tsv(self.path(CANDIDATES), "candidates",
                  ("parent", "prefix", "postfix", "member", "cvar", "set"), rows)

    def mine(self) -> None:
        sets = self.load_candidates()
        graph = self.load_graph()
        type_lex = self.load_type_lex()
        registry = mine_patterns(sets, graph, self.kg, self.resource_lex, type_lex)
        rows = ((" ".join(t.prefix), " ".join(t.postfix), kind, impl, support)
                for t, kind, impl, support in registry)
        write_tsv(self.path(PATTERNS), "mine", ("prefix", "postfix", "kind", "implication", "support"), rows)

    def apply_patterns(self) -> None:
        registry = self.load_patterns()
        graph = self.load_graph()
        type_lex = self.load_type_lex()
        floor = min(SWEEP_FLOOR, self.config.tau)
        swept = apply_patterns(graph, registry, self.kg, self.resource_lex, type_lex, tau=floor)
        swept.sort(key=lambda a: a.sort_key)
        kept = filter_axioms(swept, self.config.tau)
        write_tsv(self.path(AXIOMS), "apply-patterns", AXIOM_COLUMNS, _axiom_rows(kept),
                  extra=f"tau={self.config.tau}")
        write_tsv(self.path(AXIOM_SWEEP), "apply-patterns", AXIOM_COLUMNS, _axiom_rows(swept),
                  extra=f"tau={floor}")

    def generate(self) -> None:
        axioms = self.load_axioms()
        graph = self.load_graph()
        functional = self.load_functional()
        assertions = generate_assertions(axioms, graph, self.kg, functional)
        novel = [a for a in assertions if a.status == NOVEL]
        filtered = [a for a in assertions if a.status == FILTERED]

        def nt_lines():
            yield header_comment("generate")
            for a in novel:
                yield f"{format_term(a.subject)} {format_term(a.predicate)} {format_term(a.object)} .\n"

        atomic_write(self.path(NOVEL_NT), nt_lines())
        write_tsv(self.path(FILTERED_TSV), "generate",
                  ("subject", "predicate", "object", "reason", "category", "confidence"),
                  ((a.subject, a.predicate, format_term(a.object), a.reason, a.axiom.category,
                    repr(a.axiom.confidence)) for a in filtered))
        counts = summarise(assertions)
        lines = [header_comment("generate")]
        for (kind, status), n in sorted(counts.items()):
            lines.append(f"{kind}\t{status}\t{n}\n")
        atomic_write(self.path(GEN_SUMMARY), lines)

    def report(self) -> None:
        axioms = self.load_axioms(AXIOM_SWEEP)
        rng = random.Random(self.config.seed)
        lines = [header_comment("report", f"seed={self.config.seed} tau={self.config.tau}")]

        lines.append("\n## confidence buckets\n")
        lines.append("interval\trelation\ttype\ttotal\n")
        bucketed: list[list[Axiom]] = []
        for lo, hi in BUCKETS:
            last = hi == 1.00
            inside = [a for a in axioms if lo <= a.confidence and (a.confidence <= hi if last else a.confidence < hi)]
            bucketed.append(inside)
            rel = sum(1 for a in inside if a.kind == RELATION)
            close = "]" if last else ")"
            lines.append(f"[{lo:.2f},{hi:.2f}{close}\t{rel}\t{len(inside) - rel}\t{len(inside)}\n")

        lines.append("\n## tau sweep\n")
        lines.append("tau\trelation_axioms\ttype_axioms\tcategories\n")
        for tau in SWEEP_TAUS:
            kept = filter_axioms(axioms, tau)
            rel = sum(1 for a in kept if a.kind == RELATION)
            cats = len({a.category for a in kept})
            lines.append(f"{tau:.2f}\t{rel}\t{len(kept) - rel}\t{cats}\n")

        lines.append("\n## pipeline statistics\n")
        lines.extend(f"{k}\t{v}\n" for k, v in self._statistics())

        lines.append(f"\n## samples (up to {self.config.sample_size} per bucket, seed {self.config.seed})\n")
        lines.append("interval\t" + "\t".join(AXIOM_COLUMNS) + "\n")
        for (lo, hi), inside in zip(BUCKETS, bucketed):
            sample = rng.sample(inside, min(self.config.sample_size, len(inside)))
            sample.sort(key=lambda a: a.sort_key)
            for row in _axiom_rows(sample):
                lines.append(f"{lo:.2f}-{hi:.2f}\t" + "\t".join(row) + "\n")
        atomic_write(self.path(REPORT), lines)

    def _statistics(self) -> list[tuple[str, object]]:
        stats: list[tuple[str, object]] = []
        try:
            sets = self.load_candidates()
        except MissingArtifactError:
            sets = None
        if sets is not None:
            kinds = Counter(s.kind for s in sets)
            stats += [
                ("candidate_sets", len(sets)),
                ("candidate_sets_prefix_only", kinds["prefix"]),
                ("candidate_sets_postfix_only", kinds["postfix"]),
                ("candidate_sets_both", kinds["both"]),
                ("candidate_set_mean_size", f"{fmean(len(s) for s in sets):.2f}" if sets else "0"),
            ]
        try:
            registry = self.load_patterns()
        except MissingArtifactError:
            registry = None
        if registry is not None:
            textual = registry.textual_patterns()
            stats.append(("textual_patterns", len(textual)))
            for kind in KINDS:
                with_kind = [len(registry.implications(t, kind)) for t in textual if registry.implications(t, kind)]
                stats.append((f"textual_patterns_with_{kind}", len(with_kind)))
                mean = f"{fmean(with_kind):.2f}" if with_kind else "0"
                stats.append((f"mean_{kind}_implications", mean))
        try:
            axioms = self.load_axioms()
        except MissingArtifactError:
            axioms = None
        if axioms is not None:
            rel = sum(1 for a in axioms if a.kind == RELATION)
            stats += [
                ("relation_axioms", rel),
                ("type_axioms", len(axioms) - rel),
                ("covered_categories", len({a.category for a in axioms})),
            ]
        summary = self.path(GEN_SUMMARY)
        if summary.exists():
            for line in summary.read_text(encoding="utf-8").splitlines():
                if line and not line.startswith("#"):
                    kind, status, n = line.split("\t")
                    stats.append((f"assertions_{kind}_{status}", int(n)))
        return stats

    def run(self, stage: str) -> None:
        steps = {
            "ingest": self.ingest,
            "build-lex": self.build_lex,
            "candidates": self.candidates,
            "mine": self.mine,
            "apply-patterns": self.apply_patterns,
            "generate": self.generate,
            "report": self.report,
        }
        names = STAGES if stage == "all" else (stage,)
        if stage != "all" and stage not in steps:
            raise ValueError(f"unknown stage {stage!r}")
        for name in names:
            log.info("running stage %s", name)
            steps[name]()


def _axiom_rows(axioms: list[Axiom]):
    for a in axioms:
        if a.kind == RELATION:
            yield (a.category, a.kind, a.predicate, format_term(a.value), repr(a.confidence))
        else:
            yield (a.category, a.kind, a.value, "", repr(a.confidence))


def run_stage(stage: str, config: PipelineConfig) -> Pipeline:
    config.validate()
    pipeline = Pipeline(config)
    pipeline.run(stage)
    return pipeline
