"""
Tests for length-2 augmentation, exact augmentation and plan verification.
"""

import pytest
from hypothesis import given

from popaug.augment import (
    AugmentationPlan,
    AugmentPreconditionError,
    apply_plan,
    augment_length2,
    exact_augmentation,
    verify_plan,
)
from popaug.config import GuardExceededError, SearchLimits
from popaug.instance import build_instance, parse_instance
from popaug.popmatch import min_cost_popular

from .samples import TWO_CONTESTS, fix_intro
from .strategies import length2_instances


def _length2_intro():
    return build_instance(
        [("b1", 1, 3), ("b2", 1, 2)],
        {"a1": [["b1"], ["b2"]], "a2": [["b1"], ["b2"]], "a3": [["b1"], ["b2"]]},
        last_resorts=True,
    )


class TestAugmentLength2:
    """Test the greedy duplication algorithm for short strict lists."""

    def test_duplicates_cheapest_odd_item(self):
        plan = augment_length2(_length2_intro())
        assert plan.extra == {"b2": 1}
        assert plan.total_cost == 2

    def test_steps(self):
        plan = augment_length2(_length2_intro())
        (step,) = plan.steps
        assert step.item == "b2"
        assert step.size_after == step.size_before + 1
        assert step.s_stable
        assert step.within_degree_bound

    def test_already_popular(self):
        inst = build_instance([("b1", 1, 5), ("b2", 1, 1)], {"a1": [["b1"], ["b2"]], "a2": [["b1"], ["b2"]]})
        plan = augment_length2(inst)
        assert plan.extra == {}
        assert plan.total_cost == 0
        assert plan.steps == []

    def test_two_contests(self):
        inst = parse_instance(TWO_CONTESTS)
        plan = augment_length2(inst)
        assert plan.extra == {"b2": 1, "c1": 1}
        assert plan.total_cost == 3
        assert verify_plan(inst, plan)

    def test_rejects_ties(self):
        inst = build_instance([("b1", 1, 0), ("b2", 1, 0)], {"a": [["b1", "b2"]]})
        with pytest.raises(AugmentPreconditionError, match="ties"):
            augment_length2(inst)

    def test_rejects_long_lists(self):
        with pytest.raises(AugmentPreconditionError, match="more than two"):
            augment_length2(fix_intro())

    def test_lines(self):
        inst = parse_instance(TWO_CONTESTS)
        assert augment_length2(inst).lines(inst) == ["b2 +1", "c1 +1", "total 3"]


class TestExactAugmentation:
    """Test the exhaustive copy-vector search."""

    def test_fix_intro(self):
        plan = exact_augmentation(fix_intro())
        assert plan.extra == {"b2": 1}
        assert plan.total_cost == 2

    def test_already_popular(self):
        plan = exact_augmentation(fix_intro().with_copies({"b2": 2}))
        assert plan.extra == {}
        assert plan.total_cost == 0

    def test_budget_too_small(self):
        assert exact_augmentation(fix_intro(), budget=1) is None

    def test_perfect(self):
        plan = exact_augmentation(fix_intro(), perfect=True)
        assert plan.total_cost == 2
        assert verify_plan(fix_intro(), plan, perfect=True)

    def test_perfect_impossible_with_empty_list(self):
        inst = build_instance([("b1", 1, 1)], {"a1": [["b1"]], "a2": []})
        assert exact_augmentation(inst, perfect=True) is None

    def test_state_guard(self):
        with pytest.raises(GuardExceededError, match="exceeds limit 10"):
            exact_augmentation(fix_intro(), limits=SearchLimits(max_states=10))

    def test_two_contests_agrees_with_greedy(self):
        inst = parse_instance(TWO_CONTESTS)
        assert exact_augmentation(inst).extra == augment_length2(inst).extra


class TestVerifyPlan:
    """Test plan application and verification."""

    def test_b2_copy_helps(self):
        assert verify_plan(fix_intro(), AugmentationPlan.priced(fix_intro(), {"b2": 1}))

    def test_empty_plan(self):
        assert not verify_plan(fix_intro(), AugmentationPlan())

    def test_b3_copies_do_not_help(self):
        assert not verify_plan(fix_intro(), AugmentationPlan.priced(fix_intro(), {"b3": 5}))

    def test_apply_plan(self):
        plan = AugmentationPlan.priced(fix_intro(), {"b1": 1, "b3": 0})
        assert plan.extra == {"b1": 1}
        assert plan.total_cost == 3
        assert apply_plan(fix_intro(), plan).item("b1").copies == 2

    def test_plan_round_trips_through_json(self):
        plan = augment_length2(_length2_intro())
        again = AugmentationPlan.from_json(plan.to_json())
        assert again == plan


class TestLength2Properties:
    """Greedy duplication against the exhaustive search."""

    @given(length2_instances())
    def test_greedy_is_optimal(self, inst):
        greedy = augment_length2(inst)
        exact = exact_augmentation(inst)
        assert greedy.total_cost == exact.total_cost
        assert verify_plan(inst, greedy)
        assert verify_plan(inst, exact)
        assert min_cost_popular(apply_plan(inst, greedy)) is not None

    @given(length2_instances())
    def test_each_step_grows_matching_by_one(self, inst):
        for step in augment_length2(inst).steps:
            assert step.size_after == step.size_before + 1

    @given(length2_instances())
    def test_steps_keep_s_and_degree_bound(self, inst):
        for step in augment_length2(inst).steps:
            assert step.s_stable
            assert step.within_degree_bound is not False
