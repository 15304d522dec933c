"""
Tests for the instance model, matchings and the text formats.
"""

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from popaug.instance import (
    CopyVector,
    Instance,
    InstanceError,
    InvalidMatchingError,
    Item,
    LastResortError,
    Matching,
    ParseError,
    add_last_resorts,
    build_instance,
    ensure_last_resorts,
    matching_cost,
    parse_instance,
    parse_matching,
    serialize_instance,
    serialize_matching,
    strip_last_resorts,
    validate_matching,
)
from popaug.oracle import enumerate_matchings

from .samples import FIX_INTRO, fix_intro
from .strategies import instances


class TestParseInstance:
    """Test the instance text format."""

    def test_minimal_instance(self):
        inst = parse_instance("item b1 copies=1 cost=3\nperson a1 : b1\n")
        assert inst.people == ("a1",)
        assert inst.items == (Item("b1", 1, 3),)
        assert inst.prefs == ((("b1",),),)
        assert not inst.last_resort_enabled

    def test_fix_intro(self):
        inst = parse_instance(FIX_INTRO)
        assert inst.people == ("a1", "a2", "a3")
        assert [item.cost for item in inst.items] == [3, 2, 1]
        for person in inst.people:
            assert inst.preferences(person) == (("b1",), ("b2",), ("b3",))

    def test_tie_group(self):
        text = "item b1 copies=1 cost=0\nitem b2 copies=1 cost=0\nitem b3 copies=2 cost=1\nperson a : (b1 b2) > b3\n"
        inst = parse_instance(text)
        assert inst.top_group("a") == ("b1", "b2")
        assert inst.rank("a", "b2") == 1
        assert inst.rank("a", "b3") == 2

    def test_comments_and_blank_lines(self):
        inst = parse_instance("# header\n\nitem b1 copies=2 cost=4  # two copies\nperson a1 : b1\n")
        assert inst.item("b1").copies == 2

    def test_empty_list(self):
        inst = parse_instance("item b1 copies=1 cost=0\nperson a1 :\n")
        assert inst.preferences("a1") == ()

    def test_last_resorts_directive(self):
        inst = parse_instance(FIX_INTRO + "last-resorts\n")
        assert inst == fix_intro()

    def test_undeclared_item_reports_line(self):
        with pytest.raises(ParseError, match="line 2") as info:
            parse_instance("item b1 copies=1 cost=3\nperson a1 : b9\n")
        assert info.value.line_no == 2

    @pytest.mark.parametrize(
        "text, message",
        [
            ("item b1 copies=0 cost=1\n", "copies"),
            ("item b1 copies=1 cost=-1\n", "negative cost"),
            ("item b1 copies=1\n", "expected"),
            ("item b1 copies=1 cost=1\nitem b1 copies=1 cost=2\n", "duplicate item"),
            ("item b1 copies=1 cost=1\nperson a : b1\nitem b2 copies=1 cost=1\n", "precede"),
            ("item b1 copies=1 cost=1\nperson a : b1 > b1\n", "listed twice"),
            ("item b1 copies=1 cost=1\nperson a : (b1\n", "unterminated"),
            ("item b1 copies=1 cost=1\nperson a : b1 >\n", "dangling"),
            ("item b1 copies=1 cost=1\nperson a : b1\nperson a : b1\n", "duplicate person"),
            ("house b1\n", "unknown directive"),
            ("item - copies=1 cost=1\n", "invalid item id"),
            ("item b1 copies=1 cost=1\nlast-resorts\nperson a : b1\n", "nothing may follow"),
            (f"item b1 copies=1 cost={2**63}\n", "exceeds"),
        ],
    )
    def test_malformed(self, text, message):
        with pytest.raises(ParseError, match=message):
            parse_instance(text)

    def test_serialize_round_trip(self):
        text = (
            "item b1 copies=2 cost=5\n"
            "item b2 copies=1 cost=0\n"
            "person a1 : (b1 b2)\n"
            "person a2 : b2 > b1\n"
            "person a3 :\n"
        )
        inst = parse_instance(text)
        assert serialize_instance(inst) == text
        with_lr = add_last_resorts(inst)
        assert serialize_instance(with_lr) == text + "last-resorts\n"
        assert parse_instance(serialize_instance(with_lr)) == with_lr


class TestInstanceModel:
    """Test validation and derived instances."""

    def test_add_last_resorts(self):
        inst = fix_intro()
        assert inst.last_resort_enabled
        assert inst.preferences("a1") == (("b1",), ("b2",), ("b3",), ("_last:a1",))
        assert inst.item("_last:a2") == Item("_last:a2", 1, 0)
        assert [item.id for item in inst.real_items] == ["b1", "b2", "b3"]

    def test_add_last_resorts_twice(self):
        with pytest.raises(LastResortError):
            add_last_resorts(fix_intro())

    def test_ensure_and_strip(self):
        inst = fix_intro()
        assert ensure_last_resorts(inst) is inst
        assert strip_last_resorts(inst) == fix_intro(last_resorts=False)

    def test_empty_list_gets_last_resort_only(self):
        inst = add_last_resorts(parse_instance("item b1 copies=1 cost=0\nperson a1 :\n"))
        assert inst.preferences("a1") == (("_last:a1",),)

    def test_reserved_prefix(self):
        with pytest.raises(InstanceError, match="reserved"):
            Instance(("a",), (Item("_last:a"),), (((("_last:a",),)),))

    def test_misplaced_last_resort(self):
        inst = fix_intro()
        prefs = ((("_last:a1",), ("b1",)),) + inst.prefs[1:]
        with pytest.raises(LastResortError):
            Instance(inst.people, inst.items, prefs, True)

    def test_undeclared_item(self):
        with pytest.raises(InstanceError, match="undeclared"):
            Instance(("a",), (Item("b"),), ((("c",),),))

    def test_with_copies_drops_items(self):
        inst = fix_intro().with_copies({"b2": 0, "b1": 3})
        assert [item.id for item in inst.real_items] == ["b1", "b3"]
        assert inst.item("b1").copies == 3
        assert inst.preferences("a1") == (("b1",), ("b3",), ("_last:a1",))

    def test_with_extra_copies(self):
        inst = fix_intro().with_extra_copies({"b2": 1})
        assert inst.item("b2").copies == 2
        with pytest.raises(InstanceError, match="negative"):
            fix_intro().with_extra_copies({"b2": -1})

    def test_last_resort_keeps_one_copy(self):
        with pytest.raises(LastResortError):
            fix_intro().with_copies({"_last:a1": 2})

    def test_listers_and_entries(self):
        inst = fix_intro()
        assert inst.listers("b1") == 3
        assert inst.entry_count == 9

    def test_build_instance(self):
        inst = build_instance([("b1", 2, 4)], {"a1": [["b1"]], "a2": []}, last_resorts=True)
        assert inst.people == ("a1", "a2")
        assert inst.preferences("a2") == (("_last:a2",),)


class TestMatchings:
    """Test matchings, their validation and their cost."""

    def setup_method(self):
        self.inst = fix_intro()

    def test_cost_direct_sum(self):
        m = Matching.build(self.inst, {"a1": "b1", "a2": "b2", "a3": "b3"})
        assert matching_cost(self.inst, m) == 6

    def test_cost_all_last_resorts(self):
        m = Matching.build(self.inst, {})
        assert matching_cost(self.inst, m) == 0
        assert m.size == 0
        assert m["a1"] == "_last:a1"

    def test_cost_counts_multiplicity(self):
        inst = self.inst.with_copies({"b2": 2})
        m = Matching.build(inst, {"a1": "b1", "a2": "b2", "a3": "b2"})
        assert matching_cost(inst, m) == 7
        assert m.usage["b2"] == 2

    def test_over_capacity(self):
        with pytest.raises(InvalidMatchingError, match="copies"):
            Matching.build(self.inst, {"a1": "b2", "a2": "b2"})

    def test_unknown_person(self):
        with pytest.raises(InvalidMatchingError, match="unknown person"):
            Matching.build(self.inst, {"z": "b1"})

    def test_unlisted_item(self):
        inst = parse_instance("item b1 copies=1 cost=0\nitem b2 copies=1 cost=0\nperson a : b1\n")
        with pytest.raises(InvalidMatchingError, match="does not list"):
            Matching.build(inst, {"a": "b2"})

    def test_parse_and_serialize(self):
        m = parse_matching(self.inst, "a1 -> b1\na2 -> -\na3 -> b2\n")
        assert m["a2"] == "_last:a2"
        assert serialize_matching(self.inst, m) == "a1 -> b1\na2 -> -\na3 -> b2\n"

    def test_parse_requires_everyone(self):
        with pytest.raises(InvalidMatchingError, match="a3"):
            parse_matching(self.inst, "a1 -> b1\na2 -> b2\n")

    def test_parse_rejects_garbage(self):
        with pytest.raises(ParseError, match="line 1"):
            parse_matching(self.inst, "a1 b1\n")


class TestMatchingProperties:
    """Valid matchings pass validation and every corruption of one fails."""

    @given(instances())
    def test_serialize_round_trip(self, inst):
        assert parse_instance(serialize_instance(inst)) == inst
        bare = strip_last_resorts(inst)
        assert parse_instance(serialize_instance(bare)) == bare

    @given(instances())
    def test_enumerated_matchings_are_valid(self, inst):
        for m in enumerate_matchings(inst):
            validate_matching(inst, m)

    @given(instances(), st.data())
    def test_altered_usage(self, inst, data):
        m = data.draw(st.sampled_from(list(enumerate_matchings(inst))))
        item_id = data.draw(st.sampled_from([item.id for item in inst.items]))
        usage = dict(m.usage)
        usage[item_id] = usage.get(item_id, 0) + 1
        with pytest.raises(InvalidMatchingError):
            validate_matching(inst, Matching(m.assignment, usage))

    @given(instances(), st.data())
    def test_dropped_person(self, inst, data):
        assume(inst.people)
        m = data.draw(st.sampled_from(list(enumerate_matchings(inst))))
        person = data.draw(st.sampled_from(list(inst.people)))
        assignment = {p: b for p, b in m.assignment.items() if p != person}
        usage = dict(m.usage)
        usage[m[person]] -= 1
        with pytest.raises(InvalidMatchingError, match="not assigned"):
            validate_matching(inst, Matching(assignment, {b: n for b, n in usage.items() if n}))

    @given(instances(), st.data())
    def test_unlisted_item(self, inst, data):
        pairs = [
            (person, item.id)
            for person in inst.people
            for item in inst.real_items
            if item.id not in inst.listed_items(person)
        ]
        assume(pairs)
        person, item_id = data.draw(st.sampled_from(pairs))
        with pytest.raises(InvalidMatchingError, match="does not list"):
            Matching.build(inst, {person: item_id})

    @given(instances())
    def test_exceeding_copies(self, inst):
        crowded = [item for item in inst.real_items if inst.listers(item.id) > item.copies]
        assume(crowded)
        item_id = crowded[0].id
        takers = {p: item_id for p in inst.people if item_id in inst.listed_items(p)}
        with pytest.raises(InvalidMatchingError, match="copies"):
            Matching.build(inst, takers)


class TestCopyVector:
    """Test the serializable copy vector record."""

    def test_priced(self):
        vector = CopyVector.priced(fix_intro(), {"b1": 1, "b2": 2})
        assert vector.total_cost == 7
        copies, total = vector
        assert copies == {"b1": 1, "b2": 2}
        assert vector.to_dict() == {"copies": {"b1": 1, "b2": 2}, "total_cost": 7}
