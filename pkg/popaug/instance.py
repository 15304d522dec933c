"""
Preference instances and matchings

An instance is a set of people, a set of items with a number of copies and a
per-copy cost, and for every person a ranked preference list whose rank
groups may contain ties. This module holds the immutable data model, its
validation rules and the line-based text formats for instances and
matchings.
"""

import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from dataclasses_json import dataclass_json
from typing_extensions import TypeAlias

from .config import PopaugError

logger = logging.getLogger(__name__)

PersonId: TypeAlias = str
ItemId: TypeAlias = str
RankGroup: TypeAlias = Tuple[ItemId, ...]
PreferenceList: TypeAlias = Tuple[RankGroup, ...]

LAST_RESORT_PREFIX = "_last:"
MAX_COST = 2**63 - 1
UNMATCHED_TOKEN = "-"

_IDENTIFIER = re.compile(r"[^\s()>:#]+")
_GROUP_TOKEN = re.compile(r"\(|\)|>|[^\s()>]+")


class InstanceError(PopaugError, ValueError):
    """An instance violates one of its structural rules."""


class ParseError(InstanceError):
    """Malformed instance, matching or SAT text."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        self.message = message
        super().__init__(f"line {line_no}: {message}")


class InvalidMatchingError(InstanceError):
    """A matching is not valid for the instance it is used with."""


class LastResortError(InstanceError):
    """Last-resort items are missing where required, or added twice."""


def last_resort_id(person: PersonId) -> ItemId:
    """Id of the synthetic last-resort item of ``person``."""
    return f"{LAST_RESORT_PREFIX}{person}"


def is_last_resort(item_id: ItemId) -> bool:
    return item_id.startswith(LAST_RESORT_PREFIX)


@dataclass(frozen=True)
class Item:
    """An item with ``copies`` available copies, each costing ``cost``."""

    id: ItemId
    copies: int = 1
    cost: int = 0


@dataclass(frozen=True)
class Instance:
    """
    A capacitated one-sided preference instance.

    ``prefs[i]`` is the preference list of ``people[i]``: a tuple of rank
    groups, best first, each group a tuple of tied item ids. Iteration order
    of people and items is their declaration order; every tie-break in the
    package is defined over it.
    """

    people: Tuple[PersonId, ...]
    items: Tuple[Item, ...]
    prefs: Tuple[PreferenceList, ...]
    last_resort_enabled: bool = False

    def __post_init__(self):
        _validate_instance(self)

    @cached_property
    def item_index(self) -> Dict[ItemId, int]:
        return {item.id: i for i, item in enumerate(self.items)}

    @cached_property
    def person_index(self) -> Dict[PersonId, int]:
        return {person: i for i, person in enumerate(self.people)}

    @cached_property
    def _ranks(self) -> Tuple[Dict[ItemId, int], ...]:
        return tuple(
            {item_id: rank for rank, group in enumerate(groups, start=1) for item_id in group}
            for groups in self.prefs
        )

    @cached_property
    def _listers(self) -> Dict[ItemId, int]:
        counts: Counter = Counter()
        for ranks in self._ranks:
            counts.update(ranks.keys())
        return dict(counts)

    def item(self, item_id: ItemId) -> Item:
        try:
            return self.items[self.item_index[item_id]]
        except KeyError:
            raise InstanceError(f"unknown item {item_id!r}") from None

    def preferences(self, person: PersonId) -> PreferenceList:
        try:
            return self.prefs[self.person_index[person]]
        except KeyError:
            raise InstanceError(f"unknown person {person!r}") from None

    def rank(self, person: PersonId, item_id: ItemId) -> Optional[int]:
        """1-based rank of ``item_id`` in the person's list, None if unlisted."""
        return self._ranks[self.person_index[person]].get(item_id)

    def top_group(self, person: PersonId) -> RankGroup:
        groups = self.preferences(person)
        return groups[0] if groups else ()

    def listed_items(self, person: PersonId) -> Tuple[ItemId, ...]:
        return tuple(item_id for group in self.preferences(person) for item_id in group)

    def listers(self, item_id: ItemId) -> int:
        """Number of people whose preference list contains ``item_id``."""
        return self._listers.get(item_id, 0)

    @property
    def real_items(self) -> Tuple[Item, ...]:
        return tuple(item for item in self.items if not is_last_resort(item.id))

    @property
    def entry_count(self) -> int:
        """Total number of preference entries (edges), last resorts excluded."""
        return sum(1 for groups in self.prefs for group in groups for b in group if not is_last_resort(b))

    def with_extra_copies(self, extra: Mapping[ItemId, int]) -> "Instance":
        """Copy of this instance with ``extra[b]`` copies added to each item b."""
        copies = {}
        for item_id, count in extra.items():
            if count < 0:
                raise InstanceError(f"negative extra copies for {item_id!r}")
            copies[item_id] = self.item(item_id).copies + count
        return self.with_copies(copies)

    def with_copies(self, copies: Mapping[ItemId, int]) -> "Instance":
        """
        Copy of this instance with absolute copy counts for the given items.

        Items set to zero copies disappear from the item list and from every
        preference list; rank groups left empty are dropped.
        """
        for item_id, count in copies.items():
            self.item(item_id)
            if count < 0:
                raise InstanceError(f"negative copies for {item_id!r}")
            if is_last_resort(item_id) and count != 1:
                raise LastResortError(f"last-resort item {item_id!r} must keep one copy")

        dropped = {item_id for item_id, count in copies.items() if count == 0}
        items = tuple(
            Item(item.id, copies.get(item.id, item.copies), item.cost)
            for item in self.items
            if item.id not in dropped
        )
        prefs = self.prefs
        if dropped:
            prefs = tuple(
                tuple(
                    kept
                    for kept in (tuple(b for b in group if b not in dropped) for group in groups)
                    if kept
                )
                for groups in self.prefs
            )
        return Instance(self.people, items, prefs, self.last_resort_enabled)


def _validate_instance(inst: Instance) -> None:
    if len(inst.prefs) != len(inst.people):
        raise InstanceError("prefs must hold one preference list per person")

    seen_people = set()
    for person in inst.people:
        if not isinstance(person, str) or not _IDENTIFIER.fullmatch(person) or person == UNMATCHED_TOKEN:
            raise InstanceError(f"invalid person id {person!r}")
        if person in seen_people:
            raise InstanceError(f"duplicate person {person!r}")
        seen_people.add(person)

    known = {}
    for item in inst.items:
        if item.id in known:
            raise InstanceError(f"duplicate item {item.id!r}")
        if isinstance(item.copies, bool) or not isinstance(item.copies, int) or item.copies < 1:
            raise InstanceError(f"item {item.id!r}: copies must be a positive integer")
        if isinstance(item.cost, bool) or not isinstance(item.cost, int) or item.cost < 0:
            raise InstanceError(f"item {item.id!r}: cost must be a non-negative integer")
        if item.cost > MAX_COST:
            raise InstanceError(f"item {item.id!r}: cost exceeds {MAX_COST}")
        if not is_last_resort(item.id) and (not _IDENTIFIER.fullmatch(item.id) or item.id == UNMATCHED_TOKEN):
            raise InstanceError(f"invalid item id {item.id!r}")
        known[item.id] = item

    for person, groups in zip(inst.people, inst.prefs):
        listed = set()
        for group in groups:
            if not group:
                raise InstanceError(f"person {person!r} has an empty rank group")
            for item_id in group:
                if item_id not in known:
                    raise InstanceError(f"person {person!r} lists undeclared item {item_id!r}")
                if item_id in listed:
                    raise InstanceError(f"person {person!r} lists item {item_id!r} twice")
                listed.add(item_id)

    _validate_last_resorts(inst, known)


def _validate_last_resorts(inst: Instance, known: Mapping[ItemId, Item]) -> None:
    synthetic = [item.id for item in inst.items if is_last_resort(item.id)]
    if not inst.last_resort_enabled:
        if synthetic:
            raise InstanceError(f"item id prefix {LAST_RESORT_PREFIX!r} is reserved: {synthetic[0]!r}")
        return

    expected = [last_resort_id(person) for person in inst.people]
    if synthetic != expected or [item.id for item in inst.items[len(inst.items) - len(expected):]] != expected:
        raise LastResortError("last-resort items must follow the real items, one per person in order")
    for person, groups in zip(inst.people, inst.prefs):
        own = last_resort_id(person)
        item = known[own]
        if item.copies != 1 or item.cost != 0:
            raise LastResortError(f"{own!r} must have copies=1 and cost=0")
        if not groups or groups[-1] != (own,):
            raise LastResortError(f"{own!r} must be the final singleton group of {person!r}")
        for group in groups[:-1]:
            for item_id in group:
                if is_last_resort(item_id):
                    raise LastResortError(f"person {person!r} lists foreign last resort {item_id!r}")


def add_last_resorts(inst: Instance) -> Instance:
    """Append ``_last:<p>`` as a final singleton rank group for every person."""
    if inst.last_resort_enabled:
        raise LastResortError("last resorts are already enabled")
    items = inst.items + tuple(Item(last_resort_id(person), 1, 0) for person in inst.people)
    prefs = tuple(
        groups + ((last_resort_id(person),),) for person, groups in zip(inst.people, inst.prefs)
    )
    return Instance(inst.people, items, prefs, True)


def ensure_last_resorts(inst: Instance) -> Instance:
    return inst if inst.last_resort_enabled else add_last_resorts(inst)


def strip_last_resorts(inst: Instance) -> Instance:
    """Inverse of add_last_resorts."""
    if not inst.last_resort_enabled:
        return inst
    items = inst.real_items
    prefs = tuple(groups[:-1] for groups in inst.prefs)
    return Instance(inst.people, items, prefs, False)


@dataclass_json
@dataclass
class CopyVector:
    """Absolute copy counts for the items of a universe and what they cost."""

    copies: Dict[ItemId, int] = field(default_factory=dict)
    total_cost: int = 0

    @classmethod
    def priced(cls, inst: Instance, copies: Mapping[ItemId, int]) -> "CopyVector":
        total = sum(count * inst.item(item_id).cost for item_id, count in copies.items())
        return cls(dict(copies), total)

    def __iter__(self) -> Iterator:
        yield self.copies
        yield self.total_cost


# ---------------------------------------------------------------------------
# Matchings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Matching:
    """
    A person to item assignment together with per-item usage counts.

    Once last resorts are enabled every person is assigned and the last
    resort stands for "unmatched"; before that ``None`` does.
    """

    assignment: Mapping[PersonId, Optional[ItemId]]
    usage: Mapping[ItemId, int]

    @classmethod
    def build(cls, inst: Instance, assignment: Mapping[PersonId, Optional[ItemId]]) -> "Matching":
        """
        Build and validate a matching.

        People missing from ``assignment`` (or mapped to None) are unmatched:
        they go to their last resort when the instance has them.
        """
        unknown = set(assignment) - set(inst.people)
        if unknown:
            raise InvalidMatchingError(f"unknown person {sorted(unknown)[0]!r}")
        full: Dict[PersonId, Optional[ItemId]] = {}
        for person in inst.people:
            item_id = assignment.get(person)
            if item_id is None and inst.last_resort_enabled:
                item_id = last_resort_id(person)
            full[person] = item_id
        usage = Counter(item_id for item_id in full.values() if item_id is not None)
        matching = cls(full, dict(usage))
        validate_matching(inst, matching)
        return matching

    def __getitem__(self, person: PersonId) -> Optional[ItemId]:
        return self.assignment[person]

    def matched_people(self) -> List[PersonId]:
        """People assigned to a real item."""
        return [p for p, b in self.assignment.items() if b is not None and not is_last_resort(b)]

    @property
    def size(self) -> int:
        return len(self.matched_people())

    def key(self) -> Tuple[Tuple[PersonId, Optional[ItemId]], ...]:
        return tuple(sorted(self.assignment.items(), key=lambda pair: pair[0]))


def validate_matching(inst: Instance, matching: Matching) -> None:
    """Raise InvalidMatchingError unless ``matching`` is valid for ``inst``."""
    people = set(inst.people)
    for person in matching.assignment:
        if person not in people:
            raise InvalidMatchingError(f"unknown person {person!r}")
    for person in inst.people:
        if person not in matching.assignment:
            raise InvalidMatchingError(f"person {person!r} is not assigned")
        item_id = matching.assignment[person]
        if item_id is None:
            if inst.last_resort_enabled:
                raise InvalidMatchingError(f"person {person!r} is unassigned but last resorts are enabled")
            continue
        if inst.rank(person, item_id) is None:
            raise InvalidMatchingError(f"person {person!r} does not list {item_id!r}")

    fibres = Counter(b for b in matching.assignment.values() if b is not None)
    for item_id, count in matching.usage.items():
        if item_id not in inst.item_index:
            raise InvalidMatchingError(f"usage refers to unknown item {item_id!r}")
        if count != fibres.get(item_id, 0):
            raise InvalidMatchingError(f"usage of {item_id!r} is {count}, assignment uses it {fibres.get(item_id, 0)} times")
    for item_id, count in fibres.items():
        if matching.usage.get(item_id, 0) != count:
            raise InvalidMatchingError(f"usage of {item_id!r} does not match the assignment")
        if count > inst.item(item_id).copies:
            raise InvalidMatchingError(f"item {item_id!r} used {count} times but has {inst.item(item_id).copies} copies")


def matching_cost(inst: Instance, matching: Matching) -> int:
    """Sum over items of usage times cost."""
    total = 0
    for item_id, count in matching.usage.items():
        if item_id not in inst.item_index:
            raise InvalidMatchingError(f"matching refers to unknown item {item_id!r}")
        total += count * inst.item(item_id).cost
    return total


# ---------------------------------------------------------------------------
# Text formats
# ---------------------------------------------------------------------------


class _InstanceParser:
    """Line-by-line parser; each directive has a ``_parse_<directive>`` method."""

    def __init__(self):
        self.items: List[Item] = []
        self.item_ids: Dict[ItemId, int] = {}
        self.people: List[PersonId] = []
        self.prefs: List[PreferenceList] = []
        self.last_resorts = False

    def parse(self, text: str) -> Instance:
        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if self.last_resorts:
                raise ParseError(line_no, "nothing may follow the last-resorts directive")
            directive = line.split(None, 1)[0]
            handler = getattr(self, f"_parse_{directive.replace('-', '_')}", None)
            if handler is None:
                raise ParseError(line_no, f"unknown directive {directive!r}")
            handler(line_no, line)
        try:
            inst = Instance(tuple(self.people), tuple(self.items), tuple(self.prefs))
            return add_last_resorts(inst) if self.last_resorts else inst
        except InstanceError as exc:
            raise ParseError(0, str(exc)) from exc

    def _parse_item(self, line_no: int, line: str) -> None:
        if self.people:
            raise ParseError(line_no, "item lines must precede person lines")
        tokens = line.split()
        if len(tokens) != 4:
            raise ParseError(line_no, "expected 'item <id> copies=<int> cost=<int>'")
        item_id = self._identifier(line_no, tokens[1], "item")
        if item_id in self.item_ids:
            raise ParseError(line_no, f"duplicate item {item_id!r}")
        fields = {}
        for token in tokens[2:]:
            key, sep, value = token.partition("=")
            if not sep or key not in ("copies", "cost") or key in fields:
                raise ParseError(line_no, f"unexpected attribute {token!r}")
            if not re.fullmatch(r"-?\d+", value):
                raise ParseError(line_no, f"{key} must be an integer, got {value!r}")
            fields[key] = int(value)
        if fields["copies"] < 1:
            raise ParseError(line_no, f"item {item_id!r}: copies must be at least 1")
        if fields["cost"] < 0:
            raise ParseError(line_no, f"item {item_id!r}: negative cost")
        if fields["cost"] > MAX_COST:
            raise ParseError(line_no, f"item {item_id!r}: cost exceeds {MAX_COST}")
        self.item_ids[item_id] = len(self.items)
        self.items.append(Item(item_id, fields["copies"], fields["cost"]))

    def _parse_person(self, line_no: int, line: str) -> None:
        head, sep, rest = line[len("person"):].partition(":")
        if not sep:
            raise ParseError(line_no, "expected 'person <id> : <groups>'")
        person = self._identifier(line_no, head.strip(), "person")
        if person in self.people:
            raise ParseError(line_no, f"duplicate person {person!r}")
        groups = self._groups(line_no, _GROUP_TOKEN.findall(rest))
        listed = set()
        for group in groups:
            for item_id in group:
                if item_id not in self.item_ids:
                    raise ParseError(line_no, f"undeclared item {item_id!r}")
                if item_id in listed:
                    raise ParseError(line_no, f"item {item_id!r} listed twice")
                listed.add(item_id)
        self.people.append(person)
        self.prefs.append(groups)

    def _parse_last_resorts(self, line_no: int, line: str) -> None:
        if line != "last-resorts":
            raise ParseError(line_no, "the last-resorts directive takes no arguments")
        self.last_resorts = True

    def _groups(self, line_no: int, tokens: List[str]) -> PreferenceList:
        groups: List[RankGroup] = []
        pos = 0
        while pos < len(tokens):
            if groups:
                if tokens[pos] != ">":
                    raise ParseError(line_no, f"expected '>' before {tokens[pos]!r}")
                pos += 1
                if pos == len(tokens):
                    raise ParseError(line_no, "dangling '>'")
            if tokens[pos] == "(":
                close = pos + 1
                while close < len(tokens) and tokens[close] not in (")", "(", ">"):
                    close += 1
                if close == len(tokens) or tokens[close] != ")":
                    raise ParseError(line_no, "unterminated tie group")
                members = tokens[pos + 1:close]
                if not members:
                    raise ParseError(line_no, "empty tie group")
                groups.append(tuple(self._identifier(line_no, t, "item") for t in members))
                pos = close + 1
            elif tokens[pos] in (")", ">"):
                raise ParseError(line_no, f"unexpected {tokens[pos]!r}")
            else:
                groups.append((self._identifier(line_no, tokens[pos], "item"),))
                pos += 1
        return tuple(groups)

    @staticmethod
    def _identifier(line_no: int, token: str, kind: str) -> str:
        if not _IDENTIFIER.fullmatch(token) or token == UNMATCHED_TOKEN:
            raise ParseError(line_no, f"invalid {kind} id {token!r}")
        if token.startswith(LAST_RESORT_PREFIX):
            raise ParseError(line_no, f"{kind} id prefix {LAST_RESORT_PREFIX!r} is reserved")
        return token


def parse_instance(text: str) -> Instance:
    """Parse the instance text format; see docs/FILE_FORMATS.md."""
    return _InstanceParser().parse(text)


def _format_group(group: RankGroup) -> str:
    return group[0] if len(group) == 1 else "(" + " ".join(group) + ")"


def serialize_instance(inst: Instance) -> str:
    """Inverse of parse_instance: parse_instance(serialize_instance(x)) == x."""
    lines = [f"item {item.id} copies={item.copies} cost={item.cost}" for item in inst.real_items]
    for person, groups in zip(inst.people, inst.prefs):
        if inst.last_resort_enabled:
            groups = groups[:-1]
        body = " > ".join(_format_group(group) for group in groups)
        lines.append(f"person {person} : {body}".rstrip())
    if inst.last_resort_enabled:
        lines.append("last-resorts")
    return "\n".join(lines) + "\n"


def parse_matching(inst: Instance, text: str) -> Matching:
    """Parse ``<person> -> <item>`` lines; ``-`` marks an unmatched person."""
    assignment: Dict[PersonId, Optional[ItemId]] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 3 or tokens[1] != "->":
            raise ParseError(line_no, "expected '<person> -> <item>'")
        person, _, item_id = tokens
        if person in assignment:
            raise ParseError(line_no, f"person {person!r} assigned twice")
        assignment[person] = None if item_id == UNMATCHED_TOKEN else item_id
    missing = [p for p in inst.people if p not in assignment]
    if missing:
        raise InvalidMatchingError(f"person {missing[0]!r} is not assigned")
    return Matching.build(inst, assignment)


def serialize_matching(inst: Instance, matching: Matching) -> str:
    lines = []
    for person in inst.people:
        item_id = matching.assignment[person]
        if item_id is None or is_last_resort(item_id):
            item_id = UNMATCHED_TOKEN
        lines.append(f"{person} -> {item_id}")
    return "\n".join(lines) + ("\n" if lines else "")


def build_instance(
    items: Iterable[Tuple[ItemId, int, int]],
    prefs: Mapping[PersonId, Iterable[Iterable[ItemId]]],
    last_resorts: bool = False,
) -> Instance:
    """Convenience constructor: ``items`` as (id, copies, cost), ``prefs`` keyed by person."""
    inst = Instance(
        people=tuple(prefs),
        items=tuple(Item(item_id, copies, cost) for item_id, copies, cost in items),
        prefs=tuple(tuple(tuple(group) for group in groups) for groups in prefs.values()),
    )
    return add_last_resorts(inst) if last_resorts else inst
