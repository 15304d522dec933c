"""
Named oracle subproblems for the command line.

Each entry maps a subproblem name to a callable taking an instance and
returning an OracleAnswer, with a schema describing it for ``--help``.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List

from .config import DEFAULT_ORACLE_LIMITS, OracleLimits, PopaugError
from .instance import Instance, ensure_last_resorts, serialize_matching
from . import oracle


class UnknownSubproblemError(PopaugError, KeyError):
    """No oracle subproblem is registered under the requested name."""


@dataclass
class OracleAnswer:
    """Printable answer of an oracle subproblem."""

    lines: List[str] = field(default_factory=list)
    found: bool = True
    payload: Dict[str, Any] = field(default_factory=dict)


class OracleRegistry:
    """Registry of brute-force subproblems sharing one set of limits."""

    def __init__(self, limits: OracleLimits = DEFAULT_ORACLE_LIMITS):
        self.limits = limits

    def get_subproblems(self) -> Dict[str, Callable[[Instance], OracleAnswer]]:
        return {
            "popular": self._popular,
            "max-card": self._max_card,
            "count": self._count,
            "labels": self._labels,
            "instance": self._instance,
        }

    def get_subproblem_schemas(self) -> Dict[str, Dict[str, str]]:
        return {
            "popular": {
                "description": "min-cost popular matching by enumeration",
                "returns": "matching lines and 'cost <c>', or NO_POPULAR_MATCHING",
            },
            "max-card": {
                "description": "min-cost popular matching among those matching the most people",
                "returns": "matching lines and 'cost <c>', or NO_POPULAR_MATCHING",
            },
            "count": {
                "description": "number of matchings of the instance",
                "returns": "'count <n>'",
            },
            "labels": {
                "description": "odd/even/unreachable labels on the explicitly cloned rank-1 graph",
                "returns": "'<vertex> <O|E|U>' lines and 'size <n>'",
            },
            "instance": {
                "description": "cheapest copy vector admitting a popular matching that matches everybody",
                "returns": "'<item> <copies>' lines and 'total <c>', or NO_POPULAR_INSTANCE",
            },
        }

    def run(self, name: str, inst: Instance) -> OracleAnswer:
        handler = self.get_subproblems().get(name)
        if handler is None:
            raise UnknownSubproblemError(f"unknown oracle subproblem {name!r}")
        return handler(inst)

    def _solved(self, inst: Instance, result) -> OracleAnswer:
        if result is None:
            return OracleAnswer(["NO_POPULAR_MATCHING"], found=False)
        matching, cost = result
        lines = serialize_matching(inst, matching).splitlines() + [f"cost {cost}"]
        return OracleAnswer(lines, payload={"assignment": dict(matching.assignment), "cost": cost})

    def _popular(self, inst: Instance) -> OracleAnswer:
        inst = ensure_last_resorts(inst)
        return self._solved(inst, oracle.brute_min_cost_popular(inst, self.limits))

    def _max_card(self, inst: Instance) -> OracleAnswer:
        inst = ensure_last_resorts(inst)
        return self._solved(inst, oracle.brute_min_cost_max_card_popular(inst, self.limits))

    def _count(self, inst: Instance) -> OracleAnswer:
        count = sum(1 for _ in oracle.enumerate_matchings(inst, self.limits))
        return OracleAnswer([f"count {count}"], payload={"count": count})

    def _labels(self, inst: Instance) -> OracleAnswer:
        people, items, size = oracle.clone_labels(ensure_last_resorts(inst))
        lines = [f"{v} {letter}" for v, letter in list(people.items()) + list(items.items())]
        lines.append(f"size {size}")
        return OracleAnswer(lines, payload={"people": people, "items": items, "size": size})

    def _instance(self, inst: Instance) -> OracleAnswer:
        vector = oracle.brute_min_cost_popular_instance(inst, self.limits)
        if vector is None:
            return OracleAnswer(["NO_POPULAR_INSTANCE"], found=False)
        lines = [f"{item_id} {count}" for item_id, count in vector.copies.items()]
        lines.append(f"total {vector.total_cost}")
        return OracleAnswer(lines, payload=vector.to_dict())
