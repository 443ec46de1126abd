import pytest

from catmine.application import apply_patterns
from catmine.assertions import generate_assertions
from catmine.candidates import build_candidate_sets
from catmine.kg_store import detect_functional_properties, node_key
from catmine.mining import mine_patterns

from .oracle import Oracle
from .randomgraph import random_world

SEEDS = range(200)


def run_package(w, tau):
    kg = w.kg()
    sets = build_candidate_sets(w.graph)
    registry = mine_patterns(sets, w.graph, kg, w.resource_lex, w.type_lex)
    axioms = apply_patterns(w.graph, registry, kg, w.resource_lex, w.type_lex, tau)
    functional = detect_functional_properties(kg)
    return sets, registry, axioms, functional, generate_assertions(axioms, w.graph, kg, functional)


def compare(seed, tau=0.05):
    w = random_world(seed)
    sets, registry, axioms, functional, assertions = run_package(w, tau)
    oracle = Oracle(w)
    support = oracle.mine(sets)
    assert {(t.prefix, t.postfix, k, i): n for t, k, i, n in registry} == support
    expected_axioms = oracle.apply(support, tau)
    assert [(a.category, a.kind, a.predicate, a.value, a.confidence) for a in axioms] == expected_axioms
    assert set(functional) == oracle.functional()
    expected = oracle.assertions(expected_axioms, oracle.functional())
    got = {(a.subject, a.predicate, node_key(a.object)): (a.status, a.reason, a.axiom.category) for a in assertions}
    assert got == expected
    return len(sets), len(axioms), len(assertions)


@pytest.mark.parametrize("seed", SEEDS)
def test_pipeline_matches_oracle(seed):
    compare(seed)


def test_random_worlds_are_not_trivial():
    sizes = [compare(seed) for seed in range(40)]
    assert sum(1 for s, a, n in sizes if s and a and n) >= 10
