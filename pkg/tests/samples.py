"""Fixed instances and SAT files shared by the tests."""

from popaug.instance import Instance, add_last_resorts, parse_instance

FIX_INTRO = """\
item b1 copies=1 cost=3
item b2 copies=1 cost=2
item b3 copies=1 cost=1
person a1 : b1 > b2 > b3
person a2 : b1 > b2 > b3
person a3 : b1 > b2 > b3
"""

FIX_UNSAT = """\
vars 4
c 1 2 3
c 1 2 4
c 1 3 4
c 2 3 4
"""

ONE_CLAUSE = """\
vars 3
c 1 2 3
"""

# X1 true satisfies both clauses
TWO_CLAUSES = """\
vars 5
c 1 2 3
c 1 4 5
"""

# three people contend for b1 > b2; then three more for c1 > c2
TWO_CONTESTS = """\
item b1 copies=1 cost=3
item b2 copies=1 cost=2
item c1 copies=1 cost=1
item c2 copies=1 cost=5
person a1 : b1 > b2
person a2 : b1 > b2
person a3 : b1 > b2
person a4 : c1 > c2
person a5 : c1 > c2
person a6 : c1 > c2
"""


def fix_intro(last_resorts: bool = True) -> Instance:
    inst = parse_instance(FIX_INTRO)
    return add_last_resorts(inst) if last_resorts else inst
