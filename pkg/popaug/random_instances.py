"""
Seeded random instance generators.

``random_scale_instance`` backs the ``generate`` command and the scale checks;
``random_instance`` gives small reproducible instances for seeded regression
suites. Property tests draw their instances from hypothesis strategies.
"""

import random
from typing import List, Optional, Tuple

from .instance import Instance, Item, ItemId, add_last_resorts


def _group(rng: random.Random, chosen: List[ItemId], tie_probability: float) -> Tuple[Tuple[ItemId, ...], ...]:
    groups: List[List[ItemId]] = []
    for item_id in chosen:
        if groups and rng.random() < tie_probability:
            groups[-1].append(item_id)
        else:
            groups.append([item_id])
    return tuple(tuple(group) for group in groups)


def random_instance(
    rng: random.Random,
    n_people: int,
    n_items: int,
    max_list: int = 4,
    max_copies: int = 2,
    max_cost: int = 9,
    tie_probability: float = 0.2,
    last_resorts: bool = True,
) -> Instance:
    """Lists of 0..max_list distinct items, ties joined with ``tie_probability``."""
    items = tuple(
        Item(f"b{k}", rng.randint(1, max_copies), rng.randint(0, max_cost)) for k in range(1, n_items + 1)
    )
    ids = [item.id for item in items]
    prefs = []
    for _ in range(n_people):
        length = rng.randint(0, min(max_list, n_items))
        prefs.append(_group(rng, rng.sample(ids, length), tie_probability))
    inst = Instance(tuple(f"a{k}" for k in range(1, n_people + 1)), items, tuple(prefs))
    return add_last_resorts(inst) if last_resorts else inst


def random_scale_instance(
    rng: random.Random,
    n_people: int,
    n_entries: int,
    n_items: Optional[int] = None,
    max_copies: int = 3,
    max_cost: int = 100,
    tie_probability: float = 0.1,
) -> Instance:
    """About ``n_entries`` preference entries spread evenly over ``n_people``."""
    n_items = n_items or max(1, n_people // 2)
    items = tuple(
        Item(f"b{k}", rng.randint(1, max_copies), rng.randint(0, max_cost)) for k in range(1, n_items + 1)
    )
    ids = [item.id for item in items]
    base, extra = divmod(n_entries, max(n_people, 1))
    prefs = []
    for k in range(n_people):
        length = min(base + (1 if k < extra else 0), n_items)
        prefs.append(_group(rng, rng.sample(ids, length), tie_probability))
    inst = Instance(tuple(f"a{k}" for k in range(1, n_people + 1)), items, tuple(prefs))
    return add_last_resorts(inst)
