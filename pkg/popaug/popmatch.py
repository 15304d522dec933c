"""
Popular matchings

Popularity comparison between two matchings, the structural popularity
test (the rank-1 part of the matching is maximum in G1 and everyone gets
an f- or s-item), and the two-stage algorithm computing a min-cost popular
matching: a maximum rank-1 matching fixes the labels and the reduced graph,
then every unmatched person is matched along the augmenting path ending at
the cheapest item with a free copy.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Sequence

from dataclasses_json import Exclude, config, dataclass_json

from .config import PopaugError
from .decomposition import (
    Label,
    MatchState,
    fs_sets,
    rank1_labels,
    reduced_graph,
)
from .instance import (
    MAX_COST,
    Instance,
    ItemId,
    LastResortError,
    Matching,
    PersonId,
    is_last_resort,
    matching_cost,
    validate_matching,
)

logger = logging.getLogger(__name__)


class CostOverflowError(PopaugError, OverflowError):
    """A derived cost does not fit in a signed 64-bit integer."""


@dataclass_json
@dataclass
class SolveReport:
    """A popular matching, its cost and how many people got a real item."""

    assignment: Dict[PersonId, Optional[ItemId]] = field(default_factory=dict)
    cost: int = 0
    matched: int = 0
    matching: Optional[Matching] = field(
        default=None, repr=False, compare=False, metadata=config(exclude=Exclude.ALWAYS)
    )

    @classmethod
    def of(cls, inst: Instance, matching: Matching) -> "SolveReport":
        return cls(
            assignment=dict(matching.assignment),
            cost=matching_cost(inst, matching),
            matched=matching.size,
            matching=matching,
        )

    def __iter__(self) -> Iterator:
        yield self.matching
        yield self.cost


def _require_last_resorts(inst: Instance) -> None:
    if not inst.last_resort_enabled:
        raise LastResortError("popularity is defined on instances with last resorts")


def _rank_or_last(inst: Instance, person: PersonId, item_id: Optional[ItemId]) -> int:
    if item_id is None:
        return len(inst.preferences(person)) + 1
    return inst.rank(person, item_id)


def compare(inst: Instance, m1: Matching, m2: Matching) -> int:
    """
    Number of people preferring ``m1`` minus number preferring ``m2``.

    Positive means ``m1`` is more popular. Being on one's last resort (or
    unassigned) ranks below every listed item.
    """
    validate_matching(inst, m1)
    validate_matching(inst, m2)
    margin = 0
    for person in inst.people:
        r1 = _rank_or_last(inst, person, m1.assignment[person])
        r2 = _rank_or_last(inst, person, m2.assignment[person])
        if r1 < r2:
            margin += 1
        elif r2 < r1:
            margin -= 1
    return margin


def is_popular(inst: Instance, m: Matching) -> bool:
    """
    Structural popularity test: the rank-1 edges of ``m`` form a maximum
    matching of G1, and every person holds an item of f(a) or s(a).
    """
    _require_last_resorts(inst)
    validate_matching(inst, m)
    state, labels = rank1_labels(inst)
    rank1_edges = sum(1 for person in inst.people if m.assignment[person] in inst.top_group(person))
    if rank1_edges != state.size:
        logger.debug("not popular: %d rank-1 edges, maximum is %d", rank1_edges, state.size)
        return False
    fs = fs_sets(inst, labels)
    for person in inst.people:
        if m.assignment[person] not in fs.allowed(person):
            logger.debug("not popular: %s holds %s outside f and s", person, m.assignment[person])
            return False
    return True


def min_cost_popular(inst: Instance, cost_override: Optional[Mapping[ItemId, int]] = None) -> Optional[SolveReport]:
    """
    A minimum-cost popular matching of ``inst``, or None if none exists.

    ``cost_override`` replaces item costs when choosing augmenting paths; the
    reported cost always uses the instance's own costs.
    """
    _require_last_resorts(inst)
    m0, labels = rank1_labels(inst)
    fs = fs_sets(inst, labels)
    view = reduced_graph(inst, fs, labels)

    state = MatchState(view)
    for p, person in enumerate(inst.people):
        if m0.mate[p] != -1 and labels.people[person] is not Label.ODD:
            state.assign(p, m0.mate[p])
    logger.debug("stage two starts from %d of %d people matched", state.size, len(inst.people))

    costs: Sequence[int] = [item.cost for item in inst.items]
    if cost_override:
        costs = [cost_override.get(item.id, item.cost) for item in inst.items]

    for p, person in enumerate(inst.people):
        if state.mate[p] != -1:
            continue
        found = state.cheapest_augmenting_path(p, costs.__getitem__)
        if found is None:
            logger.info("no popular matching: %s cannot be matched in the reduced graph", person)
            return None
        end, path = found
        state.augment(path)
        logger.debug("matched %s along %d moves ending at %s", person, len(path), view.item_ids[end])

    report = SolveReport.of(inst, state.to_matching())
    logger.info("min-cost popular matching of cost %d, %d people on real items", report.cost, report.matched)
    return report


def last_resort_penalty(inst: Instance) -> int:
    """1 + sum of copies * cost over real items; exceeds the cost of any matching."""
    total = 1 + sum(item.copies * item.cost for item in inst.real_items)
    if total > MAX_COST:
        raise CostOverflowError(f"last-resort cost {total} exceeds {MAX_COST}")
    return total


def min_cost_max_card_popular(inst: Instance) -> Optional[SolveReport]:
    """
    Among the popular matchings leaving the fewest people on last resorts, one
    of minimum cost; None if the instance has no popular matching.
    """
    _require_last_resorts(inst)
    penalty = last_resort_penalty(inst)
    override = {item.id: penalty for item in inst.items if is_last_resort(item.id)}
    return min_cost_popular(inst, override)


def unmatched_people(m: Matching) -> List[PersonId]:
    return [p for p, b in m.assignment.items() if b is None or is_last_resort(b)]
