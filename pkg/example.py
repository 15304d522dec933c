#!/usr/bin/env python3
"""
Walk through the three-person example: no popular matching, the cheapest
copy that fixes it, and the resulting min-cost popular matching.
"""

from popaug import (
    augment_length2,
    decompose,
    exact_augmentation,
    min_cost_popular,
    parse_instance,
    serialize_matching,
)
from popaug.augment import apply_plan

INTRO = """\
item b1 copies=1 cost=3
item b2 copies=1 cost=2
item b3 copies=1 cost=1
person a1 : b1 > b2 > b3
person a2 : b1 > b2 > b3
person a3 : b1 > b2 > b3
last-resorts
"""


def main():
    print("popaug: min-cost popular matchings")
    print("=" * 34)

    inst = parse_instance(INTRO)
    labels, fs, view = decompose(inst)
    print("\nLabels on the rank-1 graph:")
    for line in labels.lines():
        if not line.startswith("_last:"):
            print(f"  {line}")
    for person in inst.people:
        print(f"  f({person}) = {sorted(fs.f[person])}  s({person}) = {sorted(fs.s[person])}")

    print("\nMin-cost popular matching:", min_cost_popular(inst))

    plan = exact_augmentation(inst)
    print("\nCheapest augmentation:")
    for line in plan.lines(inst):
        print(f"  {line}")

    augmented = apply_plan(inst, plan)
    report = min_cost_popular(augmented)
    print(f"\nAfter augmenting (cost {report.cost}):")
    print(serialize_matching(augmented, report.matching), end="")

    short = parse_instance(INTRO.replace(" > b3", ""))
    greedy = augment_length2(short)
    print("\nWith lists cut to two items, the greedy duplication agrees:")
    for step in greedy.steps:
        print(f"  +1 {step.item}: matching {step.size_before} -> {step.size_after}")
    print(f"  total {greedy.total_cost}")


if __name__ == "__main__":
    main()
