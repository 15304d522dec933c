"""
Command-line front end

    popaug solve <instance> [--max-card]
    popaug decompose <instance>
    popaug augment <instance> --mode {length2,exact} [--perfect] [--budget B]
    popaug oracle <subproblem> <instance>
    popaug reduce --gadget <kind> <satfile> [--triplets N] [--internal-cost W]
    popaug check <instance> <matching>
    popaug sat <satfile>
    popaug generate --people N --entries M --seed S

``-`` reads stdin or writes stdout. Exit status 0 means success (a popular
matching, plan or assignment exists), 1 means the answer is negative, 2
means bad usage or bad input.
"""

import argparse
import json
import logging
import random
import sys
from typing import List, Optional, Sequence, TextIO

from .augment import augment_length2, exact_augmentation
from .config import OracleLimits, PopaugError, SearchLimits
from .decomposition import decompose
from .instance import (
    Instance,
    ParseError,
    ensure_last_resorts,
    parse_instance,
    parse_matching,
    serialize_instance,
    serialize_matching,
)
from .oracle import popularity_margin
from .popmatch import is_popular, min_cost_max_card_popular, min_cost_popular
from .random_instances import random_scale_instance
from .reductions import (
    GENERATORS,
    GadgetKind,
    default_inapprox_parameters,
    gen_inapprox,
    gen_perfect_aug,
    parse_sat,
    solve_1in3,
)
from .registry import OracleRegistry

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2

_LOG_LEVELS = [logging.WARNING, logging.INFO, logging.DEBUG]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="popaug", description="Min-cost popular matchings and augmentation")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="log progress to stderr (repeat for debug)")
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="min-cost popular matching")
    solve.add_argument("instance")
    solve.add_argument("--max-card", action="store_true", help="prefer matchings leaving nobody on a last resort")
    solve.add_argument("--json", action="store_true")

    dec = commands.add_parser("decompose", help="odd/even/unreachable labels and f/s sets")
    dec.add_argument("instance")
    dec.add_argument("--json", action="store_true")

    aug = commands.add_parser("augment", help="min-cost augmentation plan")
    aug.add_argument("instance")
    aug.add_argument("--mode", choices=["length2", "exact"], required=True)
    aug.add_argument("--perfect", action="store_true", help="require a popular matching with nobody unmatched")
    aug.add_argument("--budget", type=int, default=None, help="only look for plans costing at most this much")
    aug.add_argument("--max-states", type=int, default=None, help="copy-vector limit for the exact search")
    aug.add_argument("--json", action="store_true")

    registry = OracleRegistry()
    schemas = registry.get_subproblem_schemas()
    orc = commands.add_parser(
        "oracle",
        help="brute-force answers for cross-checking",
        epilog="; ".join(f"{name}: {schema['description']}" for name, schema in schemas.items()),
    )
    orc.add_argument("subproblem", choices=sorted(schemas))
    orc.add_argument("instance")
    orc.add_argument("--max-people", type=int, default=None)
    orc.add_argument("--max-item-clones", type=int, default=None)
    orc.add_argument("--max-matchings", type=int, default=None)
    orc.add_argument("--json", action="store_true")

    red = commands.add_parser("reduce", help="generate a 1-in-3 SAT gadget instance")
    red.add_argument("--gadget", choices=[kind.value for kind in GadgetKind], required=True)
    red.add_argument("satfile")
    red.add_argument("--triplets", type=int, default=None)
    red.add_argument("--internal-cost", type=int, default=None)
    red.add_argument("-o", "--output", default="-")

    chk = commands.add_parser("check", help="test a matching for popularity")
    chk.add_argument("instance")
    chk.add_argument("matching")

    sat = commands.add_parser("sat", help="solve a monotone 1-in-3 SAT instance")
    sat.add_argument("satfile")

    gen = commands.add_parser("generate", help="print a random instance")
    gen.add_argument("--people", type=int, required=True)
    gen.add_argument("--entries", type=int, required=True)
    gen.add_argument("--items", type=int, default=None)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("-o", "--output", default="-")
    return parser


class _Session:
    """Streams and helpers shared by the command handlers of one run."""

    def __init__(self, stdin: TextIO, stdout: TextIO, stderr: TextIO):
        self.stdin = stdin
        self.stdout = stdout
        self.stderr = stderr

    def read(self, path: str) -> str:
        try:
            if path == "-":
                return self.stdin.read()
            with open(path, "rb") as handle:
                return handle.read().decode("utf-8")
        except UnicodeDecodeError as exc:
            raw = exc.object if isinstance(exc.object, bytes) else b""
            line_no = raw[: exc.start].count(b"\n") + 1 if raw else 0
            raise ParseError(line_no, f"not valid UTF-8 ({exc.reason})") from exc

    def write(self, lines: Sequence[str], path: str = "-") -> None:
        text = "".join(f"{line}\n" for line in lines)
        if path == "-":
            self.stdout.write(text)
        else:
            with open(path, "w", encoding="utf-8") as handle:
                handle.write(text)

    def instance(self, path: str) -> Instance:
        return ensure_last_resorts(parse_instance(self.read(path)))

    def _cmd_solve(self, args) -> int:
        inst = self.instance(args.instance)
        report = min_cost_max_card_popular(inst) if args.max_card else min_cost_popular(inst)
        if report is None:
            self.write(["NO_POPULAR_MATCHING"])
            return EXIT_NEGATIVE
        if args.json:
            self.write([report.to_json()])
        else:
            self.write(serialize_matching(inst, report.matching).splitlines() + [f"cost {report.cost}"])
        return EXIT_OK

    def _cmd_decompose(self, args) -> int:
        inst = self.instance(args.instance)
        labels, fs, _ = decompose(inst)

        def ordered(person, chosen):
            return [b for group in inst.preferences(person) for b in group if b in chosen]

        if args.json:
            payload = {
                "people": {p: lab.value for p, lab in labels.people.items()},
                "items": {b: lab.value for b, lab in labels.items.items()},
                "f": {p: ordered(p, fs.f[p]) for p in inst.people},
                "s": {p: ordered(p, fs.s[p]) for p in inst.people},
            }
            self.write([json.dumps(payload)])
            return EXIT_OK
        lines = labels.lines()
        for person in inst.people:
            lines.append(f"f {person} : {' '.join(ordered(person, fs.f[person]))}")
            lines.append(f"s {person} : {' '.join(ordered(person, fs.s[person]))}")
        self.write(lines)
        return EXIT_OK

    def _cmd_augment(self, args) -> int:
        inst = self.instance(args.instance)
        if args.mode == "length2":
            if args.perfect or args.budget is not None:
                raise PopaugError("--perfect and --budget need --mode exact")
            plan = augment_length2(inst)
        else:
            limits = SearchLimits() if args.max_states is None else SearchLimits(max_states=args.max_states)
            plan = exact_augmentation(inst, perfect=args.perfect, limits=limits, budget=args.budget)
        if plan is None:
            self.write(["NO_PLAN"])
            return EXIT_NEGATIVE
        self.write([plan.to_json()] if args.json else plan.lines(inst))
        return EXIT_OK

    def _cmd_oracle(self, args) -> int:
        overrides = {
            key: value
            for key, value in (
                ("max_people", args.max_people),
                ("max_item_clones", args.max_item_clones),
                ("max_matchings", args.max_matchings),
            )
            if value is not None
        }
        registry = OracleRegistry(OracleLimits(**overrides))
        inst = parse_instance(self.read(args.instance))
        answer = registry.run(args.subproblem, inst)
        if args.json:
            self.write([json.dumps({"found": answer.found, **answer.payload})])
        else:
            self.write(answer.lines)
        return EXIT_OK if answer.found else EXIT_NEGATIVE

    def _cmd_reduce(self, args) -> int:
        sat = parse_sat(self.read(args.satfile))
        kind = GadgetKind(args.gadget)
        if kind is GadgetKind.INAPPROX:
            triplets, internal_cost = default_inapprox_parameters(sat.m)
            gadget = gen_inapprox(
                sat,
                args.triplets if args.triplets is not None else triplets,
                args.internal_cost if args.internal_cost is not None else internal_cost,
            )
        elif kind is GadgetKind.PERFECT:
            gadget = gen_perfect_aug(sat, args.internal_cost)
        else:
            gadget = GENERATORS[kind](sat)
        header = [f"# {kind.value} gadget, master list: {' '.join(gadget.master_list)}"]
        self.write(header + serialize_instance(gadget.instance).splitlines(), args.output)
        return EXIT_OK

    def _cmd_check(self, args) -> int:
        inst = self.instance(args.instance)
        matching = parse_matching(inst, self.read(args.matching))
        if is_popular(inst, matching):
            self.write(["POPULAR"])
            return EXIT_OK
        margin, witness = popularity_margin(inst, matching)
        self.write(["NOT_POPULAR", f"# margin {margin}"] + serialize_matching(inst, witness).splitlines())
        return EXIT_NEGATIVE

    def _cmd_sat(self, args) -> int:
        sat = parse_sat(self.read(args.satfile))
        assignment = solve_1in3(sat)
        if assignment is None:
            self.write(["UNSATISFIABLE"])
            return EXIT_NEGATIVE
        lines = ["SATISFIABLE"] + [f"X{j} = {str(value).lower()}" for j, value in enumerate(assignment, start=1)]
        self.write(lines)
        return EXIT_OK

    def _cmd_generate(self, args) -> int:
        rng = random.Random(args.seed)
        inst = random_scale_instance(rng, args.people, args.entries, args.items)
        self.write(serialize_instance(inst).splitlines(), args.output)
        return EXIT_OK


_handler: Optional[logging.Handler] = None


def _configure_logging(verbosity: int, stream: TextIO) -> None:
    global _handler
    package_logger = logging.getLogger("popaug")
    package_logger.setLevel(_LOG_LEVELS[min(verbosity, len(_LOG_LEVELS) - 1)])
    if _handler is not None:
        package_logger.removeHandler(_handler)
    _handler = logging.StreamHandler(stream)
    _handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    package_logger.addHandler(_handler)


def run(
    argv: Optional[Sequence[str]] = None,
    stdin: Optional[TextIO] = None,
    stdout: Optional[TextIO] = None,
    stderr: Optional[TextIO] = None,
) -> int:
    """Run one command and return its exit status."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    _configure_logging(args.verbose, stderr)
    session = _Session(stdin, stdout, stderr)
    handler = getattr(session, f"_cmd_{args.command}")
    try:
        return handler(args)
    except (PopaugError, OSError) as exc:
        logger.debug("command %s failed", args.command, exc_info=True)
        stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
