"""
Brute-force reference implementations

Everything here works from the definitions on an explicit expansion of
each item into its copies and shares no algorithmic code with the
decomposition and popular matching modules, so agreement between the two
is meaningful. Every routine is exhaustive and guarded by OracleLimits;
exceeding a guard raises, it never truncates.
"""

import heapq
import logging
from typing import Dict, Iterator, List, Optional, Tuple

import networkx as nx
import numpy as np

from .config import DEFAULT_ORACLE_LIMITS, OracleLimits
from .instance import (
    CopyVector,
    Instance,
    ItemId,
    Matching,
    PersonId,
    ensure_last_resorts,
    is_last_resort,
    last_resort_id,
)

logger = logging.getLogger(__name__)

OracleResult = Tuple[Matching, int]


def _check_size(inst: Instance, limits: OracleLimits) -> None:
    limits.check("max_people", len(inst.people), "oracle people")
    limits.check("max_item_clones", sum(item.copies for item in inst.real_items), "oracle item clones")


def _options(inst: Instance) -> List[List[ItemId]]:
    """Per person: listed real items best first, then the last resort."""
    return [
        [b for group in groups for b in group if not is_last_resort(b)] + [last_resort_id(person)]
        for person, groups in zip(inst.people, inst.prefs)
    ]


def _assignments(inst: Instance, limits: OracleLimits, complete: bool = False) -> Iterator[Tuple[ItemId, ...]]:
    options = _options(inst)
    remaining = {item.id: item.copies for item in inst.items}
    n = len(inst.people)
    chosen: List[ItemId] = []
    produced = 0

    def extend(i: int) -> Iterator[Tuple[ItemId, ...]]:
        nonlocal produced
        if i == n:
            produced += 1
            limits.check("max_matchings", produced, "enumerated matchings")
            yield tuple(chosen)
            return
        for b in options[i]:
            if complete and is_last_resort(b):
                continue
            if remaining[b] == 0:
                continue
            remaining[b] -= 1
            chosen.append(b)
            yield from extend(i + 1)
            chosen.pop()
            remaining[b] += 1

    return extend(0)


def _as_matching(inst: Instance, chosen: Tuple[ItemId, ...]) -> Matching:
    return Matching.build(inst, dict(zip(inst.people, chosen)))


def enumerate_matchings(inst: Instance, limits: OracleLimits = DEFAULT_ORACLE_LIMITS) -> Iterator[Matching]:
    """Every matching of ``inst`` exactly once, people on a listed item or their last resort."""
    inst = ensure_last_resorts(inst)
    _check_size(inst, limits)
    for chosen in _assignments(inst, limits):
        yield _as_matching(inst, chosen)


def _rank_table(inst: Instance) -> List[Dict[ItemId, int]]:
    return [
        {b: r for r, group in enumerate(groups, start=1) for b in group}
        for groups in inst.prefs
    ]


class _MatchingTable:
    """All matchings of an instance as numpy arrays of ranks and costs."""

    def __init__(self, inst: Instance, limits: OracleLimits):
        self.inst = inst
        ranks = _rank_table(inst)
        cost_of = {item.id: item.cost for item in inst.items}
        rows, costs, real = [], [], []
        self.choices: List[Tuple[ItemId, ...]] = []
        for chosen in _assignments(inst, limits):
            self.choices.append(chosen)
            rows.append([ranks[i][b] for i, b in enumerate(chosen)])
            costs.append(sum(cost_of[b] for b in chosen))
            real.append(sum(1 for b in chosen if not is_last_resort(b)))
        n = len(inst.people)
        self.ranks = np.array(rows, dtype=np.int16).reshape(len(rows), n)
        self.costs = np.array(costs, dtype=object)
        self.real = np.array(real, dtype=np.int64)
        self._ranks = ranks

    def margins_against(self, row: int) -> np.ndarray:
        """compare(m', m) for every enumerated m' against matching ``row``."""
        target = self.ranks[row]
        better = (self.ranks < target).sum(axis=1)
        worse = (self.ranks > target).sum(axis=1)
        return better - worse

    def is_popular(self, row: int) -> bool:
        if self.ranks.shape[1] == 0:
            return True
        if _beaten_by_single_move(self.inst, self.choices[row], self._ranks):
            return False
        return bool((self.margins_against(row) <= 0).all())

    def matching(self, row: int) -> Matching:
        return _as_matching(self.inst, self.choices[row])


def _oracle_compare(ranks: List[Dict[ItemId, int]], people: Tuple[PersonId, ...], m1: Matching, m2: Matching) -> int:
    r1 = np.array([ranks[i][m1.assignment[p]] for i, p in enumerate(people)], dtype=np.int64)
    r2 = np.array([ranks[i][m2.assignment[p]] for i, p in enumerate(people)], dtype=np.int64)
    return int((r1 < r2).sum() - (r2 < r1).sum())


def brute_is_popular(inst: Instance, m: Matching, limits: OracleLimits = DEFAULT_ORACLE_LIMITS) -> bool:
    """True iff no enumerated matching is preferred by more people than ``m``."""
    inst = ensure_last_resorts(inst)
    _check_size(inst, limits)
    m = Matching.build(inst, m.assignment)
    ranks = _rank_table(inst)
    for other in enumerate_matchings(inst, limits):
        if _oracle_compare(ranks, inst.people, other, m) > 0:
            return False
    return True


def _first_popular(table: _MatchingTable, order: np.ndarray) -> Optional[int]:
    for row in order:
        if table.is_popular(int(row)):
            return int(row)
    return None


def brute_min_cost_popular(inst: Instance, limits: OracleLimits = DEFAULT_ORACLE_LIMITS) -> Optional[OracleResult]:
    """Cheapest matching among those no other matching beats, or None."""
    inst = ensure_last_resorts(inst)
    _check_size(inst, limits)
    table = _MatchingTable(inst, limits)
    order = sorted(range(len(table.choices)), key=lambda row: table.costs[row])
    row = _first_popular(table, np.array(order, dtype=np.int64))
    if row is None:
        return None
    return table.matching(row), int(table.costs[row])


def brute_min_cost_max_card_popular(inst: Instance, limits: OracleLimits = DEFAULT_ORACLE_LIMITS) -> Optional[OracleResult]:
    """Among popular matchings with the most people on real items, the cheapest."""
    inst = ensure_last_resorts(inst)
    _check_size(inst, limits)
    table = _MatchingTable(inst, limits)
    order = sorted(range(len(table.choices)), key=lambda row: (-int(table.real[row]), table.costs[row]))
    row = _first_popular(table, np.array(order, dtype=np.int64))
    if row is None:
        return None
    return table.matching(row), int(table.costs[row])


def popular_matchings(inst: Instance, limits: OracleLimits = DEFAULT_ORACLE_LIMITS) -> List[Matching]:
    """All popular matchings of ``inst``."""
    inst = ensure_last_resorts(inst)
    _check_size(inst, limits)
    table = _MatchingTable(inst, limits)
    return [table.matching(row) for row in range(len(table.choices)) if table.is_popular(row)]


# ---------------------------------------------------------------------------
# Explicit clone graph
# ---------------------------------------------------------------------------


def _clone_counts(inst: Instance, spare: int) -> Dict[ItemId, int]:
    """Clones per item: its copies, capped at listers plus ``spare``."""
    return {item.id: min(item.copies, inst.listers(item.id) + spare) for item in inst.items}


def _clone_graph(inst: Instance, clones: Dict[ItemId, int], rank1_only: bool) -> nx.Graph:
    graph = nx.Graph()
    for person in inst.people:
        graph.add_node(("a", person), bipartite=0)
    for item in inst.items:
        for k in range(clones[item.id]):
            graph.add_node(("b", item.id, k), bipartite=1)
    for person, groups in zip(inst.people, inst.prefs):
        for group in groups[:1] if rank1_only else groups:
            for b in group:
                for k in range(clones[b]):
                    graph.add_edge(("a", person), ("b", b, k))
    return graph


def popularity_margin(inst: Instance, m: Matching) -> Tuple[int, Matching]:
    """
    max over all matchings m' of compare(m', m), with a maximiser.

    Solved as a maximum-weight person-perfect matching on the clone graph:
    an edge to an item the person prefers to m(a) weighs 3, an equally
    ranked one 2, a worse one 1. Last resorts keep every person matchable.
    """
    inst = ensure_last_resorts(inst)
    m = Matching.build(inst, m.assignment)
    ranks = _rank_table(inst)
    # a person-perfect matching never uses more clones of b than people listing b
    graph = _clone_graph(inst, _clone_counts(inst, 0), rank1_only=False)
    for i, person in enumerate(inst.people):
        own = ranks[i][m.assignment[person]]
        for _, clone in graph.edges(("a", person)):
            r = ranks[i][clone[1]]
            graph[("a", person)][clone]["weight"] = 2 + (r < own) - (r > own)
    pairs = nx.max_weight_matching(graph, maxcardinality=True, weight="weight")
    assignment: Dict[PersonId, ItemId] = {}
    total = 0
    for u, v in pairs:
        person_node, clone = (u, v) if u[0] == "a" else (v, u)
        assignment[person_node[1]] = clone[1]
        total += graph[u][v]["weight"]
    witness = Matching.build(inst, assignment)
    return total - 2 * len(inst.people), witness


def clone_labels(inst: Instance) -> Tuple[Dict[PersonId, str], Dict[ItemId, str], int]:
    """
    Odd/even/unreachable letters ("O", "E", "U") of people and items in the
    explicitly cloned rank-1 graph, plus its maximum matching size.

    Raises ValueError if the copies of one item disagree.
    """
    # one surplus clone stays free and keeps every clone of the item even
    clones = _clone_counts(inst, 1)
    graph = _clone_graph(inst, clones, rank1_only=True)
    people = [("a", p) for p in inst.people]
    mate = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=people) if graph.number_of_nodes() else {}
    size = sum(1 for node in people if node in mate)

    label: Dict[tuple, str] = {}
    frontier = [v for v in graph.nodes if v not in mate]
    for v in frontier:
        label[v] = "E"
    while frontier:
        following = []
        for v in frontier:
            if label[v] == "E":
                for w in graph.neighbors(v):
                    if mate.get(v) != w and w not in label:
                        label[w] = "O"
                        following.append(w)
            else:
                w = mate[v]
                if w not in label:
                    label[w] = "E"
                    following.append(w)
        frontier = following

    people_labels = {p: label.get(("a", p), "U") for p in inst.people}
    item_labels: Dict[ItemId, str] = {}
    for item in inst.items:
        letters = {label.get(("b", item.id, k), "U") for k in range(clones[item.id])}
        if len(letters) != 1:
            raise ValueError(f"copies of {item.id!r} carry different labels {sorted(letters)}")
        item_labels[item.id] = letters.pop()
    return people_labels, item_labels, size


# ---------------------------------------------------------------------------
# Min-cost popular instance
# ---------------------------------------------------------------------------


def _beaten_by_single_move(inst: Instance, chosen: Tuple[ItemId, ...], ranks: List[Dict[ItemId, int]]) -> bool:
    used: Dict[ItemId, int] = {}
    for b in chosen:
        used[b] = used.get(b, 0) + 1
    for i, b in enumerate(chosen):
        own = ranks[i][b]
        for other, r in ranks[i].items():
            if r < own and used.get(other, 0) < inst.item(other).copies:
                return True
    return False


def admits_complete_popular(
    universe: Instance, copies: Dict[ItemId, int], limits: OracleLimits = DEFAULT_ORACLE_LIMITS
) -> bool:
    """
    Whether the universe with the given copy counts has a popular matching
    giving every person a real item.
    """
    inst = ensure_last_resorts(universe.with_copies(copies))
    if any(len(groups) == 1 for groups in inst.prefs):
        return False
    _check_size(inst, limits)
    ranks = _rank_table(inst)
    for chosen in _assignments(inst, limits, complete=True):
        if _beaten_by_single_move(inst, chosen, ranks):
            continue
        margin, _ = popularity_margin(inst, _as_matching(inst, chosen))
        if margin <= 0:
            return True
    return False


def brute_min_cost_popular_instance(
    universe: Instance, limits: OracleLimits = DEFAULT_ORACLE_LIMITS
) -> Optional[CopyVector]:
    """
    Cheapest copy vector over the universe's items admitting a popular
    matching that matches everybody.

    The universe's people and lists are fixed; its copy counts are ignored.
    Each item takes 0..(number of people listing it) copies and every copy
    is paid for. Vectors are tried in (cost, vector) order.
    """
    items = universe.real_items
    caps = [universe.listers(item.id) for item in items]
    space = 1
    for cap in caps:
        space *= cap + 1
    limits.check("max_copy_vectors", space, "copy vectors")

    heap: List[Tuple[int, Tuple[int, ...], int]] = [(0, tuple(0 for _ in items), 0)]
    tried = 0
    while heap:
        cost, vector, first = heapq.heappop(heap)
        tried += 1
        copies = {item.id: n for item, n in zip(items, vector)}
        if admits_complete_popular(universe, copies, limits):
            logger.info("cheapest popular instance costs %d (%d vectors tried)", cost, tried)
            return CopyVector(copies, cost)
        for i in range(first, len(vector)):
            if vector[i] < caps[i]:
                successor = vector[:i] + (vector[i] + 1,) + vector[i + 1:]
                heapq.heappush(heap, (cost + items[i].cost, successor, i))
    return None
