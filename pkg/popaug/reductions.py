"""
Monotone 1-in-3 SAT gadgets

Generators turning a monotone 1-in-3 SAT instance into the preference
instances whose optimal cost encodes satisfiability: the min-cost popular
instance gadget, the min-cost augmentation gadget, its triplet-replicated
inapproximability variant and the perfect augmentation gadget. Also a
small backtracking 1-in-3 solver and the constructive copy settings that
turn a satisfying assignment into a plan.

Naming is deterministic: variables are u<j> (public items) and x<j>
(their owners), clause internals carry the clause number, people of
clause i are a<i>_<k>.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .augment import AugmentationPlan
from .config import DEFAULT_SAT_LIMITS, PopaugError, SatLimits
from .instance import CopyVector, Instance, Item, ItemId, ParseError, PersonId

logger = logging.getLogger(__name__)

Clause = Tuple[int, int, int]
Assignment = Tuple[bool, ...]


class ReductionError(PopaugError, ValueError):
    """Invalid SAT instance or gadget parameters."""


class SatFormatError(ParseError):
    """Malformed SAT file."""


class UnsatisfyingAssignmentError(ReductionError):
    """The assignment does not set exactly one variable true per clause."""


class GadgetKind(Enum):
    INSTANCE = "instance"
    AUGMENT = "augment"
    INAPPROX = "inapprox"
    PERFECT = "perfect"


@dataclass(frozen=True)
class SatInstance:
    """Monotone 3-clauses over variables 1..n_vars."""

    n_vars: int
    clauses: Tuple[Clause, ...] = ()

    def __post_init__(self):
        if isinstance(self.n_vars, bool) or not isinstance(self.n_vars, int) or self.n_vars < 1:
            raise ReductionError("n_vars must be a positive integer")
        for clause in self.clauses:
            if len(clause) != 3:
                raise ReductionError(f"clause {clause} does not have exactly 3 literals")
            if len(set(clause)) != 3:
                raise ReductionError(f"clause {clause} repeats a variable")
            for var in clause:
                if not 1 <= var <= self.n_vars:
                    raise ReductionError(f"variable {var} out of range 1..{self.n_vars}")

    @property
    def m(self) -> int:
        return len(self.clauses)

    def sorted_clauses(self) -> List[Clause]:
        return [tuple(sorted(clause)) for clause in self.clauses]

    def occurrences(self) -> Dict[int, int]:
        """c_j: number of clauses containing variable j, for every j."""
        counts = {j: 0 for j in range(1, self.n_vars + 1)}
        for clause in self.clauses:
            for var in clause:
                counts[var] += 1
        return counts

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        """Exactly one true variable in every clause."""
        if len(assignment) != self.n_vars:
            return False
        return all(sum(assignment[v - 1] for v in clause) == 1 for clause in self.clauses)


def parse_sat(text: str) -> SatInstance:
    """``vars <n>`` then one ``c <i> <j> <k>`` line per clause; ``#`` comments."""
    n_vars = None
    clauses: List[Clause] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if n_vars is None:
            if len(tokens) != 2 or tokens[0] != "vars" or not tokens[1].isdigit():
                raise SatFormatError(line_no, "expected 'vars <n>' first")
            n_vars = int(tokens[1])
            continue
        if len(tokens) != 4 or tokens[0] != "c" or not all(t.isdigit() for t in tokens[1:]):
            raise SatFormatError(line_no, "expected 'c <i> <j> <k>'")
        clause = tuple(int(t) for t in tokens[1:])
        if len(set(clause)) != 3 or not all(1 <= v <= n_vars for v in clause):
            raise SatFormatError(line_no, f"invalid clause {clause}")
        clauses.append(clause)
    if n_vars is None:
        raise SatFormatError(0, "missing 'vars <n>' line")
    try:
        return SatInstance(n_vars, tuple(clauses))
    except ReductionError as exc:
        raise SatFormatError(0, str(exc)) from exc


def serialize_sat(sat: SatInstance) -> str:
    lines = [f"vars {sat.n_vars}"] + [f"c {i} {j} {k}" for i, j, k in sat.clauses]
    return "\n".join(lines) + "\n"


def solve_1in3(sat: SatInstance, limits: SatLimits = DEFAULT_SAT_LIMITS) -> Optional[Assignment]:
    """
    A 1-in-3 satisfying assignment (index j-1 holds X_j), or None.

    Variables are decided in index order, false before true, so the result
    is the lexicographically least satisfying assignment.
    """
    limits.check("max_vars", sat.n_vars, "1-in-3 SAT variables")
    values: List[bool] = []

    def consistent(var: int) -> bool:
        # clauses containing var; only variables <= var are decided
        for clause in sat.clauses:
            if var not in clause:
                continue
            decided = [values[v - 1] for v in clause if v <= var]
            if sum(decided) > 1:
                return False
            if len(decided) == 3 and sum(decided) != 1:
                return False
        return True

    def search(var: int) -> bool:
        if var > sat.n_vars:
            return True
        for value in (False, True):
            values.append(value)
            if consistent(var) and search(var + 1):
                return True
            values.pop()
        return False

    if search(1):
        return tuple(values)
    return None


# ---------------------------------------------------------------------------
# Gadgets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Gadget:
    """A generated instance and a total item order all its lists respect."""

    kind: GadgetKind
    instance: Instance
    master_list: Tuple[ItemId, ...]


class _GadgetBuilder:
    def __init__(self):
        self.items: List[Item] = []
        self.people: List[PersonId] = []
        self.prefs: List[Tuple[Tuple[ItemId, ...], ...]] = []

    def item(self, item_id: ItemId, cost: int, copies: int = 1) -> None:
        self.items.append(Item(item_id, copies, cost))

    def person(self, person: PersonId, *items: ItemId) -> None:
        self.people.append(person)
        self.prefs.append(tuple((b,) for b in items))

    def build(self, kind: GadgetKind) -> Gadget:
        inst = Instance(tuple(self.people), tuple(self.items), tuple(self.prefs))
        logger.debug("%s gadget: %d people, %d items", kind.value, len(inst.people), len(inst.items))
        return Gadget(kind, inst, tuple(item.id for item in self.items))


def _u(j: int) -> ItemId:
    return f"u{j}"


def gen_popular_instance(sat: SatInstance) -> Gadget:
    """
    Nine people per clause over public items u<j> (cost 3) and internal
    items p<i>_<t> (cost 1) and q<i> (cost 0). Copy counts are placeholders:
    the instance is a universe for the min-cost popular instance search.
    """
    builder = _GadgetBuilder()
    for j in range(1, sat.n_vars + 1):
        builder.item(_u(j), 3)
    for i in range(1, sat.m + 1):
        for t in (1, 2, 3):
            builder.item(f"p{i}_{t}", 1)
    for i in range(1, sat.m + 1):
        builder.item(f"q{i}", 0)

    for i, (j1, j2, j3) in enumerate(sat.sorted_clauses(), start=1):
        builder.person(f"a{i}_1", _u(j1), _u(j2))
        builder.person(f"a{i}_2", _u(j2), _u(j3))
        builder.person(f"a{i}_3", _u(j1), _u(j3))
        for t, j in enumerate((j1, j2, j3), start=1):
            builder.person(f"a{i}_{3 + t}", _u(j), f"p{i}_{t}")
        for t in (1, 2, 3):
            builder.person(f"a{i}_{6 + t}", f"p{i}_{t}", f"q{i}")
    return builder.build(GadgetKind.INSTANCE)


def _clause_heads(builder: _GadgetBuilder, i: int, clause: Clause, tail: Optional[ItemId]) -> None:
    for k, j in enumerate(clause, start=1):
        if tail is None:
            builder.person(f"a{i}_{k}", f"p{i}", _u(j))
        else:
            builder.person(f"a{i}_{k}", f"p{i}", _u(j), tail)


def gen_augmentation(sat: SatInstance) -> Gadget:
    """
    Six people per clause (p<i> > u > q<i> and r<i> > u) plus one person
    x<j> per variable listing only u<j>. Internal items cost 2, public 1,
    every item has one copy.
    """
    builder = _GadgetBuilder()
    for i in range(1, sat.m + 1):
        builder.item(f"p{i}", 2)
    for i in range(1, sat.m + 1):
        builder.item(f"r{i}", 2)
    for j in range(1, sat.n_vars + 1):
        builder.item(_u(j), 1)
    for i in range(1, sat.m + 1):
        builder.item(f"q{i}", 2)

    for i, clause in enumerate(sat.sorted_clauses(), start=1):
        _clause_heads(builder, i, clause, f"q{i}")
        for k, j in enumerate(clause, start=1):
            builder.person(f"a{i}_{3 + k}", f"r{i}", _u(j))
    for j in range(1, sat.n_vars + 1):
        builder.person(f"x{j}", _u(j))
    return builder.build(GadgetKind.AUGMENT)


def gen_inapprox(sat: SatInstance, triplets: int, internal_cost: int) -> Gadget:
    """
    The augmentation gadget with the r<i> triplet replaced by ``triplets``
    triplets, triplet t using its own item r<i>_<t> and people
    a<i>_<3t+1..3t+3>. Internal items cost ``internal_cost``, public 1.
    """
    if triplets < 1 or internal_cost < 1:
        raise ReductionError("triplets and internal_cost must be positive")
    builder = _GadgetBuilder()
    for i in range(1, sat.m + 1):
        builder.item(f"p{i}", internal_cost)
    for i in range(1, sat.m + 1):
        for t in range(1, triplets + 1):
            builder.item(f"r{i}_{t}", internal_cost)
    for j in range(1, sat.n_vars + 1):
        builder.item(_u(j), 1)
    for i in range(1, sat.m + 1):
        builder.item(f"q{i}", internal_cost)

    for i, clause in enumerate(sat.sorted_clauses(), start=1):
        _clause_heads(builder, i, clause, f"q{i}")
        for t in range(1, triplets + 1):
            for k, j in enumerate(clause, start=1):
                builder.person(f"a{i}_{3 * t + k}", f"r{i}_{t}", _u(j))
    for j in range(1, sat.n_vars + 1):
        builder.person(f"x{j}", _u(j))
    return builder.build(GadgetKind.INAPPROX)


def default_inapprox_parameters(m: int) -> Tuple[int, int]:
    """(triplets, internal_cost) = (m^3 + 1, m^3) separating cost m from cost > m^3."""
    return m**3 + 1, m**3


def gen_perfect_aug(sat: SatInstance, internal_cost: Optional[int] = None) -> Gadget:
    """
    Six people per clause (p<i> > u and u > q<i>) plus x<j> listing u<j>;
    strict lists of length at most two. Internal items cost
    ``internal_cost`` (default: the number of clauses), public 1.
    """
    if internal_cost is None:
        internal_cost = max(sat.m, 1)
    if internal_cost < 1:
        raise ReductionError("internal_cost must be positive")
    builder = _GadgetBuilder()
    for i in range(1, sat.m + 1):
        builder.item(f"p{i}", internal_cost)
    for j in range(1, sat.n_vars + 1):
        builder.item(_u(j), 1)
    for i in range(1, sat.m + 1):
        builder.item(f"q{i}", internal_cost)

    for i, clause in enumerate(sat.sorted_clauses(), start=1):
        _clause_heads(builder, i, clause, None)
        for k, j in enumerate(clause, start=1):
            builder.person(f"a{i}_{3 + k}", _u(j), f"q{i}")
    for j in range(1, sat.n_vars + 1):
        builder.person(f"x{j}", _u(j))
    return builder.build(GadgetKind.PERFECT)


def is_master_list_consistent(inst: Instance, master_list: Sequence[ItemId]) -> bool:
    """Whether every preference list is strictly increasing in ``master_list``."""
    position = {b: k for k, b in enumerate(master_list)}
    for groups in inst.prefs:
        order = [position.get(b) for group in groups for b in group]
        if any(len(group) > 1 for group in groups) or None in order:
            return False
        if order != sorted(order):
            return False
    return True


def _default_gadget(sat: SatInstance, kind: GadgetKind) -> Gadget:
    if kind is GadgetKind.AUGMENT:
        return gen_augmentation(sat)
    if kind is GadgetKind.PERFECT:
        return gen_perfect_aug(sat)
    if kind is GadgetKind.INAPPROX:
        return gen_inapprox(sat, *default_inapprox_parameters(sat.m))
    return gen_popular_instance(sat)


def assignment_to_plan(
    sat: SatInstance,
    assignment: Sequence[bool],
    kind: GadgetKind,
    gadget: Optional[Gadget] = None,
) -> Union[AugmentationPlan, CopyVector]:
    """
    Copy setting that realises ``assignment`` on the gadget of ``kind``.

    Augmentation and inapproximability gadgets: c_j extra copies of u<j> for
    every true X_j. Perfect gadget: 2 c_j extra copies for every false X_j.
    Popular instance gadget: an absolute copy vector in which true variables
    get no public copies.

    Plans are priced against ``gadget`` when given, else against the gadget
    of ``kind`` built with its default parameters.
    """
    if gadget is not None and gadget.kind is not kind:
        raise ReductionError(f"gadget is a {gadget.kind.value} gadget, expected {kind.value}")
    if not sat.satisfied_by(assignment):
        raise UnsatisfyingAssignmentError("assignment is not 1-in-3 satisfying")
    occurrences = sat.occurrences()

    if kind in (GadgetKind.AUGMENT, GadgetKind.INAPPROX, GadgetKind.PERFECT):
        if kind is GadgetKind.PERFECT:
            extra = {_u(j): 2 * c for j, c in occurrences.items() if not assignment[j - 1] and c}
        else:
            extra = {_u(j): c for j, c in occurrences.items() if assignment[j - 1] and c}
        if gadget is None:
            gadget = _default_gadget(sat, kind)
        return AugmentationPlan.priced(gadget.instance, extra)

    universe = (gadget or gen_popular_instance(sat)).instance
    copies: Dict[ItemId, int] = {item.id: 0 for item in universe.items}
    for i, clause in enumerate(sat.sorted_clauses(), start=1):
        false_vars = [j for j in clause if not assignment[j - 1]]
        copies[_u(false_vars[0])] += 2
        copies[_u(false_vars[1])] += 1
        for t, j in enumerate(clause, start=1):
            copies[f"p{i}_{t}"] = 1 if assignment[j - 1] else 2
        copies[f"q{i}"] = 1
    return CopyVector.priced(universe, copies)


GENERATORS = {
    GadgetKind.INSTANCE: gen_popular_instance,
    GadgetKind.AUGMENT: gen_augmentation,
    GadgetKind.INAPPROX: gen_inapprox,
    GadgetKind.PERFECT: gen_perfect_aug,
}
