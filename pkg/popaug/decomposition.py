"""
Rank-1 structure of a preference instance

Builds the rank-1 graph, computes capacitated maximum matchings by
augmenting paths (the flow network with unit person capacities and
``copies(b)`` item capacities, without materialising it), labels every
vertex odd / even / unreachable without cloning items, and derives the
f- and s-sets and the reduced graph used by the popular matching
algorithms.
"""

import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from .config import PopaugError
from .instance import (
    Instance,
    InvalidMatchingError,
    ItemId,
    LastResortError,
    Matching,
    PersonId,
    is_last_resort,
)

logger = logging.getLogger(__name__)


class NotMaximumMatchingError(PopaugError, RuntimeError):
    """An augmenting path exists where a maximum matching was promised."""


class Label(Enum):
    """Parity class of a vertex with respect to a maximum matching."""
    ODD = "O"
    EVEN = "E"
    UNREACHABLE = "U"


@dataclass(frozen=True)
class BipartiteView:
    """
    A capacitated bipartite graph over the people and items of an instance.

    Vertices are addressed by their declaration index. ``adjacency[p]`` lists
    the items person p may be matched to in this view, best first.
    """

    instance: Instance
    adjacency: Tuple[Tuple[int, ...], ...]
    capacity: Tuple[int, ...]

    @property
    def people(self) -> Tuple[PersonId, ...]:
        return self.instance.people

    @property
    def item_ids(self) -> Tuple[ItemId, ...]:
        return tuple(item.id for item in self.instance.items)

    def reverse_adjacency(self) -> List[List[int]]:
        """Item index to the people adjacent to it, in declaration order."""
        reverse: List[List[int]] = [[] for _ in self.capacity]
        for person, items in enumerate(self.adjacency):
            for b in items:
                reverse[b].append(person)
        return reverse

    def edges(self) -> List[Tuple[PersonId, ItemId]]:
        ids = self.item_ids
        return [(self.people[p], ids[b]) for p, items in enumerate(self.adjacency) for b in items]

    def edge_count(self) -> int:
        return sum(len(items) for items in self.adjacency)


def rank1_graph(inst: Instance) -> BipartiteView:
    """The subgraph G1 of rank-1 edges: each person to its top rank group."""
    index = inst.item_index
    adjacency = tuple(
        tuple(index[b] for b in groups[0]) if groups else ()
        for groups in inst.prefs
    )
    return BipartiteView(inst, adjacency, tuple(item.copies for item in inst.items))


class MatchState:
    """
    Mutable capacitated matching on a BipartiteView.

    ``mate[p]`` is the item index of person p or -1; ``holders[b]`` keeps the
    people assigned to item b in assignment order.
    """

    def __init__(self, view: BipartiteView):
        self.view = view
        self.mate: List[int] = [-1] * len(view.adjacency)
        self.holders: List[Dict[int, None]] = [dict() for _ in view.capacity]

    @classmethod
    def from_matching(cls, view: BipartiteView, matching: Matching) -> "MatchState":
        """Load the edges of ``matching`` that belong to the view."""
        state = cls(view)
        index = view.instance.item_index
        for p, person in enumerate(view.people):
            item_id = matching.assignment.get(person)
            if item_id is None:
                continue
            b = index.get(item_id)
            if b is not None and b in view.adjacency[p]:
                state.assign(p, b)
        for b, holders in enumerate(state.holders):
            if len(holders) > view.capacity[b]:
                raise InvalidMatchingError(f"item {view.item_ids[b]!r} over capacity")
        return state

    @property
    def size(self) -> int:
        return sum(1 for b in self.mate if b != -1)

    def is_full(self, b: int) -> bool:
        return len(self.holders[b]) >= self.view.capacity[b]

    def assign(self, p: int, b: int) -> None:
        if self.mate[p] != -1:
            del self.holders[self.mate[p]][p]
        self.mate[p] = b
        self.holders[b][p] = None

    def unassign(self, p: int) -> None:
        if self.mate[p] != -1:
            del self.holders[self.mate[p]][p]
            self.mate[p] = -1

    def unmatched(self) -> List[int]:
        return [p for p, b in enumerate(self.mate) if b == -1]

    def augment(self, path: Sequence[Tuple[int, int]]) -> None:
        """Apply an augmenting path given as (person, new item) moves."""
        for p, b in reversed(path):
            self.assign(p, b)

    def _search(
        self,
        root: int,
        stop_early: bool,
        blocked: Optional[List[bool]] = None,
    ) -> Tuple[Dict[int, int], Dict[int, int], List[int]]:
        """
        Breadth-first Hungarian tree from an unmatched person.

        Returns the parent maps (item -> person that reached it, person ->
        item it holds) and the free-capacity items reached, in BFS order.
        """
        adjacency = self.view.adjacency
        item_parent: Dict[int, int] = {}
        person_parent: Dict[int, int] = {root: -1}
        terminals: List[int] = []
        queue = deque([root])
        while queue:
            p = queue.popleft()
            for b in adjacency[p]:
                if b in item_parent or (blocked is not None and blocked[b]):
                    continue
                item_parent[b] = p
                if not self.is_full(b):
                    terminals.append(b)
                    if stop_early:
                        return item_parent, person_parent, terminals
                for h in self.holders[b]:
                    if h not in person_parent:
                        person_parent[h] = b
                        queue.append(h)
        return item_parent, person_parent, terminals

    @staticmethod
    def _trace(item_parent: Dict[int, int], person_parent: Dict[int, int], end: int) -> List[Tuple[int, int]]:
        moves = []
        b = end
        while True:
            p = item_parent[b]
            moves.append((p, b))
            b = person_parent[p]
            if b == -1:
                break
        moves.reverse()
        return moves

    def find_augmenting_path(self, root: int, blocked: Optional[List[bool]] = None) -> Optional[List[Tuple[int, int]]]:
        item_parent, person_parent, terminals = self._search(root, True, blocked)
        if not terminals:
            if blocked is not None:
                for b in item_parent:
                    blocked[b] = True
            return None
        return self._trace(item_parent, person_parent, terminals[0])

    def cheapest_augmenting_path(
        self, root: int, cost: Callable[[int], int]
    ) -> Optional[Tuple[int, List[Tuple[int, int]]]]:
        """
        Grow the full Hungarian tree of ``root`` and return the path to the
        cheapest free item (lowest declaration index on ties) with its item.
        """
        item_parent, person_parent, terminals = self._search(root, False)
        if not terminals:
            return None
        end = min(terminals, key=lambda b: (cost(b), b))
        return end, self._trace(item_parent, person_parent, end)

    def maximize(self, order: Optional[Sequence[int]] = None) -> int:
        """
        Extend to a maximum matching: a greedy pass, then one augmenting-path
        search per unmatched person. Returns the number of augmentations.
        """
        order = range(len(self.mate)) if order is None else order
        for p in order:
            if self.mate[p] != -1:
                continue
            for b in self.view.adjacency[p]:
                if not self.is_full(b):
                    self.assign(p, b)
                    break
        blocked = [False] * len(self.view.capacity)
        augmented = 0
        for p in order:
            if self.mate[p] != -1:
                continue
            path = self.find_augmenting_path(p, blocked)
            if path is not None:
                self.augment(path)
                augmented += 1
        return augmented

    def to_matching(self) -> Matching:
        """Matching on the view's instance; people without a mate are unmatched."""
        inst = self.view.instance
        ids = self.view.item_ids
        assignment = {person: (ids[b] if b != -1 else None) for person, b in zip(inst.people, self.mate)}
        return Matching.build(inst, assignment)


def max_matching(view: BipartiteView, order: Optional[Sequence[int]] = None) -> MatchState:
    """Capacitated maximum matching of any view."""
    state = MatchState(view)
    augmented = state.maximize(order)
    logger.debug("maximum matching of size %d (%d augmentations)", state.size, augmented)
    return state


def max_matching_rank1(inst: Instance, order: Optional[Sequence[PersonId]] = None) -> Matching:
    """
    Maximum matching of the rank-1 graph.

    ``order`` fixes the sequence in which people are matched and augmented
    from; any order yields a maximum matching. People left unmatched in G1
    are unmatched in the result.
    """
    positions = None if order is None else [inst.person_index[p] for p in order]
    return max_matching(rank1_graph(inst), positions).to_matching()


@dataclass(frozen=True)
class GeLabels:
    """Odd / even / unreachable label of every person and every item."""

    people: Mapping[PersonId, Label]
    items: Mapping[ItemId, Label]

    def person(self, person: PersonId) -> Label:
        return self.people[person]

    def item(self, item_id: ItemId) -> Label:
        return self.items[item_id]

    def items_with(self, label: Label) -> List[ItemId]:
        return [b for b, lab in self.items.items() if lab is label]

    def people_with(self, label: Label) -> List[PersonId]:
        return [p for p, lab in self.people.items() if lab is label]

    def lines(self) -> List[str]:
        return [f"{v} {lab.value}" for v, lab in list(self.people.items()) + list(self.items.items())]


def alternating_labels(state: MatchState) -> Tuple[List[Label], List[Label]]:
    """
    Label people and items of ``state.view`` by alternating reachability.

    Roots are unmatched people and items with free capacity, in declaration
    order. An even person makes its neighbours odd, an odd item makes its
    holders even, an even item makes all its neighbours odd (its free copies
    reach them), an odd person makes its mate even. Each vertex is visited
    once. Meeting a vertex with both parities means the matching can be
    augmented.
    """
    view = state.view
    n_people, n_items = len(view.adjacency), len(view.capacity)
    reverse = view.reverse_adjacency()
    person_label: List[Optional[Label]] = [None] * n_people
    item_label: List[Optional[Label]] = [None] * n_items
    queue: deque = deque()

    for p in range(n_people):
        if state.mate[p] == -1:
            person_label[p] = Label.EVEN
            queue.append((0, p))
    for b in range(n_items):
        if not state.is_full(b):
            item_label[b] = Label.EVEN
            queue.append((1, b))

    def reach_person(p: int, label: Label) -> None:
        if person_label[p] is None:
            person_label[p] = label
            queue.append((0, p))
        elif person_label[p] is not label:
            raise NotMaximumMatchingError(f"person {view.people[p]!r} is both odd and even")

    def reach_item(b: int, label: Label) -> None:
        if item_label[b] is None:
            item_label[b] = label
            queue.append((1, b))
        elif item_label[b] is not label:
            raise NotMaximumMatchingError(f"item {view.item_ids[b]!r} is both odd and even")

    while queue:
        side, v = queue.popleft()
        if side == 0:
            if person_label[v] is Label.EVEN:
                for b in view.adjacency[v]:
                    if b != state.mate[v]:
                        reach_item(b, Label.ODD)
            else:
                reach_item(state.mate[v], Label.EVEN)
        elif item_label[v] is Label.ODD:
            for h in state.holders[v]:
                reach_person(h, Label.EVEN)
        else:
            for p in reverse[v]:
                reach_person(p, Label.ODD)

    return (
        [lab or Label.UNREACHABLE for lab in person_label],
        [lab or Label.UNREACHABLE for lab in item_label],
    )


def _labels_from(state: MatchState) -> GeLabels:
    people, items = alternating_labels(state)
    view = state.view
    return GeLabels(dict(zip(view.people, people)), dict(zip(view.item_ids, items)))


def gallai_edmonds(inst: Instance, m0: Matching) -> GeLabels:
    """
    Label every vertex odd, even or unreachable with respect to ``m0``, a
    maximum matching of the rank-1 graph. Items are never cloned; all copies
    of an item share one label.
    """
    view = rank1_graph(inst)
    index = inst.item_index
    for p, person in enumerate(inst.people):
        item_id = m0.assignment.get(person)
        if item_id is None or index.get(item_id) in view.adjacency[p]:
            continue
        if not is_last_resort(item_id):
            raise InvalidMatchingError(f"{person!r} -> {item_id!r} is not a rank-1 edge")
    state = MatchState.from_matching(view, m0)
    return _labels_from(state)


def rank1_labels(inst: Instance) -> Tuple[MatchState, GeLabels]:
    """Maximum rank-1 matching of ``inst`` and the labels it induces."""
    state = max_matching(rank1_graph(inst))
    return state, _labels_from(state)


@dataclass(frozen=True)
class FsSets:
    """Per person: f, the top rank group, and s, the best group's even items."""

    f: Mapping[PersonId, FrozenSet[ItemId]]
    s: Mapping[PersonId, FrozenSet[ItemId]]

    def allowed(self, person: PersonId) -> FrozenSet[ItemId]:
        return self.f[person] | self.s[person]


def fs_sets(inst: Instance, labels: GeLabels) -> FsSets:
    """
    Compute f(a) and s(a) for every person.

    s(a) is the set of even items in the first rank group that holds one.
    A person whose only entry is the last resort has it as the top group,
    unreachable in G1; there s(a) = f(a).
    """
    if not inst.last_resort_enabled:
        raise LastResortError("f/s sets need last resorts")
    f: Dict[PersonId, FrozenSet[ItemId]] = {}
    s: Dict[PersonId, FrozenSet[ItemId]] = {}
    for person, groups in zip(inst.people, inst.prefs):
        f[person] = frozenset(groups[0])
        s[person] = f[person]
        for group in groups:
            even = frozenset(b for b in group if labels.items[b] is Label.EVEN)
            if even:
                s[person] = even
                break
    return FsSets(f, s)


def reduced_graph(inst: Instance, fs: FsSets, labels: GeLabels) -> BipartiteView:
    """
    The graph G': f-edges of every person and s-edges of even people, minus
    edges joining an odd person to an odd or unreachable item.
    """
    index = inst.item_index
    adjacency = []
    for person, groups in zip(inst.people, inst.prefs):
        person_label = labels.people[person]
        wanted = set(fs.f[person])
        if person_label is Label.EVEN:
            wanted |= fs.s[person]
        items = []
        for group in groups:
            for b in group:
                if b not in wanted:
                    continue
                if person_label is Label.ODD and labels.items[b] is not Label.EVEN:
                    continue
                items.append(index[b])
        adjacency.append(tuple(items))
    return BipartiteView(inst, tuple(adjacency), tuple(item.copies for item in inst.items))


def decompose(inst: Instance) -> Tuple[GeLabels, FsSets, BipartiteView]:
    """Labels, f/s sets and reduced graph of ``inst`` (last resorts enabled)."""
    _, labels = rank1_labels(inst)
    fs = fs_sets(inst, labels)
    return labels, fs, reduced_graph(inst, fs, labels)


__all__ = [
    "BipartiteView",
    "FsSets",
    "GeLabels",
    "Label",
    "MatchState",
    "NotMaximumMatchingError",
    "alternating_labels",
    "decompose",
    "fs_sets",
    "gallai_edmonds",
    "max_matching",
    "max_matching_rank1",
    "rank1_graph",
    "rank1_labels",
    "reduced_graph",
]
