"""
Tests for the brute-force reference implementations.
"""

import pytest
from hypothesis import given

from popaug.config import GuardExceededError, OracleLimits
from popaug.instance import Matching, build_instance
from popaug.oracle import (
    admits_complete_popular,
    brute_is_popular,
    brute_min_cost_max_card_popular,
    brute_min_cost_popular,
    brute_min_cost_popular_instance,
    clone_labels,
    enumerate_matchings,
    popular_matchings,
    popularity_margin,
)
from popaug.popmatch import compare
from popaug.registry import OracleRegistry, UnknownSubproblemError

from .samples import fix_intro
from .strategies import instances


class TestEnumeration:
    """Test exhaustive matching enumeration."""

    def test_single_person(self):
        inst = build_instance([("b", 1, 0)], {"a": [["b"]]})
        assert len(list(enumerate_matchings(inst))) == 2

    def test_fix_intro_count(self):
        # partial injections of three people into three single-copy items
        assert len(list(enumerate_matchings(fix_intro()))) == 34

    def test_empty_instance(self):
        matchings = list(enumerate_matchings(build_instance([], {})))
        assert len(matchings) == 1
        assert dict(matchings[0].assignment) == {}

    def test_every_matching_once(self):
        keys = [m.key() for m in enumerate_matchings(fix_intro().with_copies({"b2": 2}))]
        assert len(keys) == len(set(keys))

    def test_people_guard(self):
        with pytest.raises(GuardExceededError, match="oracle people"):
            list(enumerate_matchings(fix_intro(), OracleLimits(max_people=2)))

    def test_matching_guard(self):
        with pytest.raises(GuardExceededError, match="enumerated matchings"):
            list(enumerate_matchings(fix_intro(), OracleLimits(max_matchings=10)))


class TestBrutePopularity:
    """Test popularity from the definition."""

    def test_fix_intro_m1(self):
        inst = fix_intro()
        m1 = Matching.build(inst, {"a1": "b1", "a2": "b2", "a3": "b3"})
        assert not brute_is_popular(inst, m1)

    def test_complete_matching_after_copy(self):
        inst = fix_intro().with_copies({"b2": 2})
        assert brute_is_popular(inst, Matching.build(inst, {"a1": "b1", "a2": "b2", "a3": "b2"}))

    def test_single_person(self):
        inst = build_instance([("b", 1, 0)], {"a": [["b"]]}, last_resorts=True)
        assert brute_is_popular(inst, Matching.build(inst, {"a": "b"}))

    def test_min_cost(self):
        assert brute_min_cost_popular(fix_intro()) is None
        _, cost = brute_min_cost_popular(fix_intro().with_copies({"b2": 2}))
        assert cost == 7

    def test_single_item_cost(self):
        inst = build_instance([("b", 1, 4)], {"a": [["b"]]})
        matching, cost = brute_min_cost_popular(inst)
        assert cost == 4
        assert matching["a"] == "b"

    def test_max_card(self):
        inst = build_instance(
            [("b1", 1, 0), ("b2", 1, 5)],
            {"a1": [["b1"]], "a2": [["b1"], ["b2"]]},
        )
        matching, cost = brute_min_cost_max_card_popular(inst)
        assert matching.size == 2
        assert cost == 5

    def test_popular_matchings(self):
        inst = fix_intro().with_copies({"b2": 2})
        found = popular_matchings(inst)
        assert found
        assert all(brute_is_popular(inst, m) for m in found)

    @given(instances())
    def test_min_cost_exists_iff_some_matching_is_popular(self, inst):
        exists = any(brute_is_popular(inst, m) for m in enumerate_matchings(inst))
        assert (brute_min_cost_popular(inst) is not None) == exists


class TestPopularityMargin:
    """Test the matching-based popularity margin."""

    def test_fix_intro_m1(self):
        inst = fix_intro()
        m1 = Matching.build(inst, {"a1": "b1", "a2": "b2", "a3": "b3"})
        margin, witness = popularity_margin(inst, m1)
        assert margin == 1
        assert compare(inst, witness, m1) == 1

    def test_popular_has_zero_margin(self):
        inst = fix_intro().with_copies({"b2": 2})
        margin, _ = popularity_margin(inst, Matching.build(inst, {"a1": "b1", "a2": "b2", "a3": "b2"}))
        assert margin == 0

    @given(instances())
    def test_margin_agrees_with_enumeration(self, inst):
        matchings = list(enumerate_matchings(inst))
        m = matchings[-1]
        margin, witness = popularity_margin(inst, m)
        assert margin == max(compare(inst, other, m) for other in matchings)
        assert compare(inst, witness, m) == margin

    def test_many_copies(self):
        inst = build_instance(
            [("b1", 10**9, 0), ("b2", 1, 0)], {"a1": [["b1"]], "a2": [["b2"], ["b1"]]}, last_resorts=True
        )
        m = Matching.build(inst, {"a1": "b1", "a2": "b1"})
        margin, witness = popularity_margin(inst, m)
        assert margin == 1
        assert witness.assignment["a2"] == "b2"


class TestCloneLabels:
    """Test labels on the explicitly cloned rank-1 graph."""

    def test_fix_intro(self):
        people, items, size = clone_labels(fix_intro())
        assert size == 1
        assert people == {"a1": "E", "a2": "E", "a3": "E"}
        assert items["b1"] == "O"
        assert items["b2"] == "E"

    def test_two_copies_two_people(self):
        inst = build_instance([("b", 2, 0)], {"a1": [["b"]], "a2": [["b"]]}, last_resorts=True)
        people, items, size = clone_labels(inst)
        assert size == 2
        assert people == {"a1": "U", "a2": "U"}
        assert items["b"] == "U"

    def test_surplus_copies_are_even(self):
        inst = build_instance([("b", 10**9, 0)], {"a1": [["b"]], "a2": [["b"]]}, last_resorts=True)
        people, items, size = clone_labels(inst)
        assert size == 2
        assert people == {"a1": "O", "a2": "O"}
        assert items["b"] == "E"

    def test_labels_ignore_copies_beyond_listers(self):
        inst = fix_intro()
        assert clone_labels(inst.with_copies({"b1": 4})) == clone_labels(inst.with_copies({"b1": 10**6}))

    @given(instances())
    def test_popular_matchings_keep_rank1_size(self, inst):
        _, _, size = clone_labels(inst)
        for m in popular_matchings(inst):
            assert sum(1 for p in inst.people if m.assignment[p] in inst.top_group(p)) == size


class TestPopularInstance:
    """Test the cheapest copy vector search."""

    def test_single_person(self):
        universe = build_instance([("b", 1, 5)], {"a": [["b"]]})
        vector = brute_min_cost_popular_instance(universe)
        assert vector.copies == {"b": 1}
        assert vector.total_cost == 5

    def test_fix_intro_universe(self):
        # buying only b3 makes it everyone's top choice
        vector = brute_min_cost_popular_instance(fix_intro(last_resorts=False))
        assert vector.total_cost == 3
        assert vector.copies == {"b1": 0, "b2": 0, "b3": 3}

    def test_person_without_items(self):
        universe = build_instance([("b", 1, 1)], {"a1": [["b"]], "a2": []})
        assert brute_min_cost_popular_instance(universe) is None
        assert not admits_complete_popular(universe, {"b": 1})

    def test_vector_guard(self):
        with pytest.raises(GuardExceededError, match="copy vectors"):
            brute_min_cost_popular_instance(fix_intro(), OracleLimits(max_copy_vectors=5))


class TestRegistry:
    """Test the named oracle subproblems."""

    def setup_method(self):
        self.registry = OracleRegistry()

    def test_subproblems(self):
        names = set(self.registry.get_subproblems())
        assert names == set(self.registry.get_subproblem_schemas())
        assert {"popular", "max-card", "count", "labels", "instance"} <= names

    def test_count(self):
        answer = self.registry.run("count", fix_intro())
        assert answer.lines == ["count 34"]

    def test_popular_absent(self):
        answer = self.registry.run("popular", fix_intro())
        assert not answer.found
        assert answer.lines == ["NO_POPULAR_MATCHING"]

    def test_popular_found(self):
        answer = self.registry.run("popular", fix_intro().with_copies({"b2": 2}))
        assert answer.found
        assert answer.lines[-1] == "cost 7"

    def test_unknown(self):
        with pytest.raises(UnknownSubproblemError):
            self.registry.run("nope", fix_intro())
