import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catmine.candidates import (
    CandidateSet,
    build_candidate_sets,
    candidate_sets_for_parent,
    name_tokens,
    variable_part,
)
from catmine.category_graph import CategoryGraph


def test_albums_share_a_postfix():
    sets = candidate_sets_for_parent("Albums_by_artist", [
        "The_Beatles_albums", "Nine_Inch_Nails_albums", "Miles_Davis_albums"])
    assert len(sets) == 1
    s = sets[0]
    assert s.prefix == () and s.postfix == ("albums",)
    assert s.kind == "postfix"
    assert sorted(" ".join(cvar) for _, cvar in s.members) == ["miles davis", "nine inch nails", "the beatles"]


def test_reality_tv_children_give_three_sets():
    children = [
        "Big_Brother_participants", "Survivor_participants", "The_Mole_participants",
        "Idol_contestants", "X_Factor_contestants",
        "Love_Island_members", "Jersey_Shore_members",
    ]
    sets = candidate_sets_for_parent("Reality_TV_participants", children)
    assert sorted(s.postfix for s in sets) == [("contestants",), ("members",), ("participants",)]


def test_no_shared_token_no_set():
    assert candidate_sets_for_parent("P", ["Red_apples", "Green_pears"]) == []


def test_variable_parts():
    s = candidate_sets_for_parent("Albums", ["The_Beatles_albums", "Queen_albums"])[0]
    assert variable_part(s, "The_Beatles_albums") == ("the", "beatles")
    films = candidate_sets_for_parent("Films_by_director", [
        "Films_directed_by_Stanley_Kubrick", "Films_directed_by_Sofia_Coppola"])[0]
    assert films.prefix == ("films", "directed", "by")
    assert variable_part(films, "Films_directed_by_Stanley_Kubrick") == ("stanley", "kubrick")
    with pytest.raises(KeyError):
        variable_part(films, "Queen_albums")


def test_prefix_and_postfix():
    sets = candidate_sets_for_parent("Populated_places_in_Sri_Lanka", [
        "Populated_places_in_Kandy_district", "Populated_places_in_Galle_district",
        "Populated_places_in_Matara_district"])
    assert len(sets) == 1
    s = sets[0]
    assert s.prefix == ("populated", "places", "in") and s.postfix == ("district",)
    assert s.kind == "both"
    assert variable_part(s, "Populated_places_in_Kandy_district") == ("kandy",)


def test_member_equal_to_shared_part_is_excluded():
    sets = candidate_sets_for_parent("Rock_music", ["Rock_albums", "Indie_rock_albums", "Hard_rock_albums"])
    assert len(sets) == 1
    assert sets[0].postfix == ("rock", "albums")
    assert sets[0].categories == ["Hard_rock_albums", "Indie_rock_albums"]


def test_single_word_children_never_grouped():
    assert candidate_sets_for_parent("P", ["Albums", "Albums"]) == []


def test_larger_group_wins_shared_children():
    # "The_Beatles_albums" could join the prefix group "the" or the postfix group "albums"
    sets = candidate_sets_for_parent("P", [
        "The_Beatles_albums", "Queen_albums", "Muse_albums", "The_Who_songs", "The_Kinks_songs"])
    by_post = {s.postfix: s for s in sets}
    assert by_post[("albums",)].categories == ["Muse_albums", "Queen_albums", "The_Beatles_albums"]
    # the leftover "the ... songs" children form a set anchored on "the"
    assert by_post[("songs",)].prefix == ("the",)
    assert by_post[("songs",)].kind == "both"
    assert len(sets) == 2


def test_tie_goes_to_postfix():
    sets = candidate_sets_for_parent("P", ["A_x_end", "A_y_other", "B_z_end"])
    # prefix "a" and postfix "end" both have two members; postfix wins
    assert [s.postfix for s in sets] == [("end",)]


def test_min_size_respected():
    children = ["A_albums", "B_albums", "C_films", "D_films", "E_films"]
    sets = candidate_sets_for_parent("P", children, min_size=3)
    assert [s.postfix for s in sets] == [("films",)]
    with pytest.raises(ValueError):
        build_candidate_sets(CategoryGraph(), min_size=1)


def test_deterministic_order_across_parents():
    g = CategoryGraph(root="R")
    for parent, kids in {"Z": ["A_b", "C_b"], "A": ["X_y", "W_y", "Films_by_q", "Films_by_r"]}.items():
        for k in kids:
            g.add_edge(parent, k)
    sets = build_candidate_sets(g)
    assert [s.parent for s in sets] == ["A", "A", "Z"]
    assert [(s.prefix, s.postfix) for s in sets[:2]] == [((), ("y",)), (("films", "by"), ())]


# --- properties -------------------------------------------------------------

WORDS = ["albums", "films", "by", "people", "from", "the", "rock", "x", "y", "z", "district", "in"]


def random_children(rng):
    return list({
        "_".join(rng.choice(WORDS) for _ in range(rng.randint(1, 5))): None
        for _ in range(rng.randint(0, 20))
    })


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4))
def test_candidate_set_invariants(seed, min_size):
    rng = random.Random(seed)
    children = random_children(rng)
    sets = candidate_sets_for_parent("P", children, min_size)
    seen = set()
    for s in sets:
        assert s.prefix or s.postfix
        assert len(s) >= min_size
        for c, cvar in s.members:
            assert cvar
            assert s.prefix + cvar + s.postfix == name_tokens(c)
            assert c not in seen
            seen.add(c)
    assert sets == candidate_sets_for_parent("P", list(reversed(children)), min_size)


def test_candidate_set_requires_shared_part():
    with pytest.raises(ValueError):
        CandidateSet("P", (), (), (("a", ("a",)),))
