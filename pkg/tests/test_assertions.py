import pytest

from catmine.application import RELATION, Axiom, apply_patterns
from catmine.assertions import (
    DISJOINTNESS_CONFLICT,
    FILTERED,
    FUNCTIONAL_CONFLICT,
    NOVEL,
    PRE_EXISTING,
    Assertion,
    apply_axioms,
    generate_assertions,
    post_filter_relations,
    post_filter_types,
    summarise,
)
from catmine.candidates import build_candidate_sets
from catmine.category_graph import CategoryGraph
from catmine.kg_store import RDF_TYPE, KgIndex, Literal, Ontology, Triple, detect_functional_properties
from catmine.mining import TYPE, mine_patterns

from .scenarios import (
    AIR_DE_PARIS,
    ALBUM,
    BIRTH_YEAR,
    BRYAN_FISHER,
    GENRE,
    PERSON,
    REGGAE,
    XSD_GYEAR,
    albums_world,
    births_world,
    galleries_world,
)


def reggae_assertions():
    w = albums_world()
    kg = w.kg()
    axiom = Axiom(REGGAE, RELATION, GENRE, "dbr:Reggae", 0.18)
    return w, kg, apply_axioms([axiom], w.graph, kg)


def test_reggae_albums_generate_fifty_thirteen_novel():
    _, _, out = reggae_assertions()
    assert len(out) == 50
    assert sum(a.status == NOVEL for a in out) == 13
    assert sum(a.status == PRE_EXISTING for a in out) == 37


def test_genre_not_functional_so_extra_genres_kept():
    w, kg, out = reggae_assertions()
    functional = detect_functional_properties(kg)
    assert GENRE not in functional
    novel = [a for a in out if a.status == NOVEL]
    with_other_genre = [a for a in novel if kg.values(a.subject, GENRE)]
    assert len(with_other_genre) == 4
    filtered = post_filter_relations(out, kg, functional)
    assert sum(a.status == NOVEL for a in filtered) == 13


def test_type_axiom_asserts_supertypes():
    kg = KgIndex([], Ontology({ALBUM: {"dbo:MusicalWork"}, "dbo:MusicalWork": {"dbo:Work"},
                               "dbo:Work": {"http://www.w3.org/2002/07/owl#Thing"}}))
    g = CategoryGraph(root="R")
    g.add_member("Some_albums", "dbr:Untyped_record")
    out = apply_axioms([Axiom("Some_albums", TYPE, RDF_TYPE, ALBUM, 0.9)], g, kg)
    assert [(a.object, a.status) for a in out] == [
        (ALBUM, NOVEL), ("dbo:MusicalWork", NOVEL), ("dbo:Work", NOVEL)]


def test_existing_types_are_pre_existing():
    kg = KgIndex([Triple("r", RDF_TYPE, "dbo:Work")], Ontology({ALBUM: {"dbo:Work"}}))
    g = CategoryGraph(root="R")
    g.add_member("C", "r")
    out = apply_axioms([Axiom("C", TYPE, RDF_TYPE, ALBUM, 0.9)], g, kg)
    assert {a.object: a.status for a in out} == {ALBUM: NOVEL, "dbo:Work": PRE_EXISTING}


def test_empty_category_yields_nothing():
    assert apply_axioms([Axiom("Empty", RELATION, "p", "v", 0.5)], CategoryGraph(), KgIndex()) == []


def test_duplicate_triples_credit_most_confident_axiom():
    g = CategoryGraph(root="R")
    g.add_member("A", "r")
    g.add_member("B", "r")
    out = apply_axioms([Axiom("A", RELATION, "p", "v", 0.3), Axiom("B", RELATION, "p", "v", 0.6)], g, KgIndex())
    assert len(out) == 1
    assert out[0].axiom.category == "B"


def test_functional_conflict_with_graph():
    w, reg = births_world()
    kg = w.kg()
    functional = detect_functional_properties(kg)
    assert BIRTH_YEAR in functional
    axioms = apply_patterns(w.graph, reg, kg, w.resource_lex, w.type_lex, 0.05)
    assert [(a.predicate, a.value) for a in axioms] == [(BIRTH_YEAR, Literal("1982", XSD_GYEAR))]
    out = generate_assertions(axioms, w.graph, kg, functional)
    bryan = [a for a in out if a.subject == BRYAN_FISHER]
    assert len(bryan) == 1
    assert bryan[0].status == FILTERED and bryan[0].reason == FUNCTIONAL_CONFLICT
    assert sum(a.status == NOVEL for a in out) == 5
    assert sum(a.status == PRE_EXISTING for a in out) == 15


def test_non_functional_property_always_passes():
    kg = KgIndex([Triple("s", "p", "o1")])
    a = Assertion("s", "p", "o2", Axiom("c", RELATION, "p", "o2", 0.5))
    assert post_filter_relations([a], kg, set())[0].status == NOVEL


def test_functional_property_without_existing_value_passes():
    a = Assertion("s", "p", "o", Axiom("c", RELATION, "p", "o", 0.5))
    assert post_filter_relations([a], KgIndex(), {"p"})[0].status == NOVEL


def test_functional_conflict_within_the_batch():
    a = Assertion("s", "p", "o1", Axiom("c1", RELATION, "p", "o1", 0.4))
    b = Assertion("s", "p", "o2", Axiom("c2", RELATION, "p", "o2", 0.7))
    out = post_filter_relations([a, b], KgIndex(), {"p"})
    assert [x.status for x in out] == [FILTERED, NOVEL]


def test_disjointness_filter():
    w, reg = galleries_world()
    kg = w.kg()
    axioms = apply_patterns(w.graph, reg, kg, w.resource_lex, w.type_lex, 0.05)
    assert [(a.kind, a.value) for a in axioms] == [(TYPE, PERSON)]
    out = generate_assertions(axioms, w.graph, kg, frozenset())
    status = {a.subject: (a.status, a.reason) for a in out}
    assert status[AIR_DE_PARIS] == (FILTERED, DISJOINTNESS_CONFLICT)
    assert status["dbr:Some_village"] == (FILTERED, DISJOINTNESS_CONFLICT)
    assert status["dbr:Untyped_artist"] == (NOVEL, None)
    assert status["dbr:Artist_0"] == (PRE_EXISTING, None)


def test_untyped_subject_never_filtered():
    onto = Ontology({}, [("A", "B")])
    a = Assertion("r", RDF_TYPE, "A", Axiom("c", TYPE, RDF_TYPE, "A", 0.5))
    assert post_filter_types([a], KgIndex([], onto))[0].status == NOVEL


def test_disjoint_novel_types_on_one_subject():
    onto = Ontology({}, [("A", "B")])
    kg = KgIndex([], onto)
    a = Assertion("r", RDF_TYPE, "A", Axiom("c1", TYPE, RDF_TYPE, "A", 0.5))
    b = Assertion("r", RDF_TYPE, "B", Axiom("c2", TYPE, RDF_TYPE, "B", 0.8))
    out = post_filter_types([a, b], kg)
    assert [(x.object, x.status) for x in out] == [("A", FILTERED), ("B", NOVEL)]


def test_summary_counts_partition():
    w = albums_world()
    kg = w.kg()
    reg = mine_patterns(build_candidate_sets(w.graph), w.graph, kg, w.resource_lex, w.type_lex)
    axioms = apply_patterns(w.graph, reg, kg, w.resource_lex, w.type_lex, 0.05)
    out = generate_assertions(axioms, w.graph, kg, detect_functional_properties(kg))
    counts = summarise(out)
    for kind in (RELATION, TYPE):
        parts = sum(n for (k, status), n in counts.items() if k == kind and status != "generated")
        assert parts == counts[(kind, "generated")]
    novel = {a.triple for a in out if a.status == NOVEL}
    assert not any(t in kg for t in novel)
    assert len({a.triple for a in out}) == len(out)
    # every album is typed already, so novel types are its supertypes only
    assert {a.object for a in out if a.is_type and a.status == NOVEL} == {"dbo:MusicalWork", "dbo:Work"}
    assert counts[(RELATION, NOVEL)] == 13


def test_filtered_assertion_requires_reason():
    a = Assertion("s", "p", "o", Axiom("c", RELATION, "p", "o", 0.5))
    assert a.filtered(FUNCTIONAL_CONFLICT).reason == FUNCTIONAL_CONFLICT
    with pytest.raises(TypeError):
        a.filtered()
