"""
Min-cost augmentation

Adding copies of items, at minimum total cost, so that an instance admits a
popular matching (or, in the perfect variant, a popular matching that gives
every person a real item). Strict lists of length at most two are solved
greedily by duplicating the cheapest odd item of the reduced graph; the
general problem is answered by an exact best-first search over copy
vectors, guarded by a configurable state limit.
"""

import heapq
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

from dataclasses_json import dataclass_json

from .config import DEFAULT_SEARCH_LIMITS, PopaugError, SearchLimits
from .decomposition import (
    FsSets,
    Label,
    MatchState,
    alternating_labels,
    decompose,
)
from .instance import Instance, ItemId, ensure_last_resorts, is_last_resort
from .popmatch import min_cost_max_card_popular, min_cost_popular

logger = logging.getLogger(__name__)


class AugmentPreconditionError(PopaugError, ValueError):
    """The instance is outside the class an augmentation routine handles."""


@dataclass_json
@dataclass
class AugmentationStep:
    """One duplication made by the length-2 algorithm."""

    item: ItemId
    size_before: int
    size_after: int
    s_stable: bool
    within_degree_bound: Optional[bool] = None


@dataclass_json
@dataclass
class AugmentationPlan:
    """Extra copies per item and their total cost."""

    extra: Dict[ItemId, int] = field(default_factory=dict)
    total_cost: int = 0
    steps: List[AugmentationStep] = field(default_factory=list)

    @classmethod
    def priced(cls, inst: Instance, extra: Mapping[ItemId, int], steps=None) -> "AugmentationPlan":
        cleaned = {b: n for b, n in extra.items() if n > 0}
        total = sum(n * inst.item(b).cost for b, n in cleaned.items())
        return cls(cleaned, total, list(steps or []))

    def lines(self, inst: Instance) -> List[str]:
        """``<item> +<count>`` in item declaration order, then ``total <cost>``."""
        out = [f"{item.id} +{self.extra[item.id]}" for item in inst.items if self.extra.get(item.id)]
        out.append(f"total {self.total_cost}")
        return out


def apply_plan(inst: Instance, plan: AugmentationPlan) -> Instance:
    return inst.with_extra_copies(plan.extra)


def _check_length2(inst: Instance) -> None:
    for person, groups in zip(inst.people, inst.prefs):
        real = [group for group in groups if not any(is_last_resort(b) for b in group)]
        if any(len(group) > 1 for group in real):
            raise AugmentPreconditionError(f"person {person!r} has ties")
        if len(real) > 2:
            raise AugmentPreconditionError(f"person {person!r} lists more than two items")


def _reduced_state(inst: Instance, seed: Optional[MatchState] = None) -> Tuple[FsSets, MatchState]:
    _, fs, view = decompose(inst)
    state = MatchState(view)
    if seed is not None:
        for p, b in enumerate(seed.mate):
            if b != -1 and b in view.adjacency[p]:
                state.assign(p, b)
    state.maximize()
    return fs, state


def augment_length2(inst: Instance) -> AugmentationPlan:
    """
    Min-cost augmentation for strict preference lists of at most two items.

    While the reduced graph has no matching covering everybody, one copy of
    the cheapest odd item (odd with respect to the current reduced graph and
    its maximum matching; declaration order on ties) is added.
    """
    inst = ensure_last_resorts(inst)
    _check_length2(inst)

    single_copies = all(item.copies == 1 for item in inst.real_items)
    fs, state = _reduced_state(inst)
    degree: Dict[ItemId, int] = {}
    for b_list in state.view.adjacency:
        for b in b_list:
            item_id = state.view.item_ids[b]
            degree[item_id] = degree.get(item_id, 0) + 1

    current = inst
    extra: Dict[ItemId, int] = {}
    steps: List[AugmentationStep] = []
    people = len(inst.people)
    while state.size < people:
        if len(steps) >= people:
            raise RuntimeError("length-2 augmentation did not converge")
        _, item_labels = alternating_labels(state)
        odd = [
            (current.items[b].cost, b)
            for b, label in enumerate(item_labels)
            if label is Label.ODD and not is_last_resort(current.items[b].id)
        ]
        if not odd:
            raise RuntimeError("unmatched people but no odd item in the reduced graph")
        _, b = min(odd)
        item_id = current.items[b].id
        extra[item_id] = extra.get(item_id, 0) + 1

        size_before = state.size
        current = inst.with_extra_copies(extra)
        new_fs, state = _reduced_state(current, state)
        step = AugmentationStep(
            item=item_id,
            size_before=size_before,
            size_after=state.size,
            s_stable=_same_s(fs, new_fs),
        )
        if single_copies:
            step.within_degree_bound = current.item(item_id).copies <= degree.get(item_id, 0)
        steps.append(step)
        logger.debug("duplicated %s (cost %d): matching %d -> %d", item_id, current.item(item_id).cost, size_before, state.size)

    plan = AugmentationPlan.priced(inst, extra, steps)
    logger.info("length-2 augmentation: %d copies, total cost %d", sum(plan.extra.values()), plan.total_cost)
    return plan


def _same_s(before: FsSets, after: FsSets) -> bool:
    return all(before.s[p] == after.s[p] for p in before.s)


def _feasible(inst: Instance, perfect: bool) -> bool:
    if not perfect:
        return min_cost_popular(inst) is not None
    report = min_cost_max_card_popular(inst)
    return report is not None and report.matched == len(inst.people)


def verify_plan(inst: Instance, plan: AugmentationPlan, perfect: bool = False) -> bool:
    """
    Whether ``inst`` with the plan's extra copies admits a popular matching
    (a popular matching with nobody on a last resort when ``perfect``).
    """
    augmented = ensure_last_resorts(apply_plan(inst, plan))
    return _feasible(augmented, perfect)


def _search_bounds(inst: Instance, budget: Optional[int]) -> List[Tuple[ItemId, int, int]]:
    bounds = []
    for item in inst.real_items:
        bound = inst.listers(item.id)
        if budget is not None and item.cost > 0:
            bound = min(bound, budget // item.cost)
        bounds.append((item.id, item.cost, bound))
    return bounds


def exact_augmentation(
    inst: Instance,
    perfect: bool = False,
    limits: SearchLimits = DEFAULT_SEARCH_LIMITS,
    budget: Optional[int] = None,
) -> Optional[AugmentationPlan]:
    """
    Exhaustive min-cost augmentation.

    Copy vectors with extra(b) <= number of people listing b are visited in
    nondecreasing (total cost, vector) order, so the plan returned is the
    lexicographically least among the cheapest feasible ones. Returns None
    when no vector (within ``budget``, if given) works.
    """
    inst = ensure_last_resorts(inst)
    if perfect:
        empty = [p for p, groups in zip(inst.people, inst.prefs) if len(groups) == 1]
        if empty:
            logger.info("no perfect augmentation: %s lists no real item", empty[0])
            return None

    bounds = _search_bounds(inst, budget)
    states = 1
    for _, _, bound in bounds:
        states *= bound + 1
    limits.check("max_states", states, "exact augmentation copy vectors")

    ids = [item_id for item_id, _, _ in bounds]
    costs = [cost for _, cost, _ in bounds]
    caps = [bound for _, _, bound in bounds]
    start = tuple(0 for _ in bounds)
    heap: List[Tuple[int, Tuple[int, ...], int]] = [(0, start, 0)]
    visited = 0
    while heap:
        total, vector, first = heapq.heappop(heap)
        visited += 1
        extra = {ids[i]: n for i, n in enumerate(vector) if n}
        if _feasible(inst.with_extra_copies(extra), perfect):
            logger.info("exact augmentation: cost %d after %d vectors", total, visited)
            return AugmentationPlan.priced(inst, extra)
        for i in range(first, len(vector)):
            if vector[i] >= caps[i]:
                continue
            cost = total + costs[i]
            if budget is not None and cost > budget:
                continue
            successor = vector[:i] + (vector[i] + 1,) + vector[i + 1:]
            heapq.heappush(heap, (cost, successor, i))
    logger.info("exact augmentation: no feasible vector among %d", visited)
    return None

