"""Command-line front end.

Exit codes for ``check`` and ``decide``: 0 consistent / fixpoint reached,
1 inconsistent, 2 usage or parse error. ``validate-tables`` and ``verify``
exit 1 when any check fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import calculi
from .calculi import CalculusError, CalculusFormatError
from .engine import EmptyDomain
from .pc_oracle import compare_pc_gac, enumerate_atomic, random_instances
from .qsrfile import ScenarioFileError, read_scenario
from .scenarios import ScenarioError, build, decide, link_topo_size

EXIT_OK, EXIT_INCONSISTENT, EXIT_USAGE = 0, 1, 2


def _key_fields(key, scenario) -> dict:
    aspect, objects, t = key
    out = {"aspect": aspect, "objects": list(objects)}
    if scenario.time_steps is not None:
        out["time"] = t
    return out


def _key_text(key, scenario) -> str:
    aspect, objects, t = key
    stamp = f" @{t}" if scenario.time_steps is not None else ""
    return f"{aspect} {' '.join(objects)}{stamp}"


def _load(path: str):
    scenario = read_scenario(path)
    try:
        return scenario, build(scenario)
    except EmptyDomain:
        return scenario, None


def cmd_check(args) -> int:
    scenario, net = _load(args.file)
    result = net.check() if net is not None else None
    if result is None or result.inconsistent:
        print(json.dumps({"status": "inconsistent"}) if args.json else "INCONSISTENT")
        return EXIT_INCONSISTENT
    if args.json:
        domains = [dict(_key_fields(k, scenario), relations=list(v)) for k, v in result.domains.items()]
        print(json.dumps({"status": "fixpoint", "domains": domains}))
    else:
        print("FIXPOINT")
        for key, rels in result.domains.items():
            print(f"{_key_text(key, scenario)} : {' '.join(rels)}")
    return EXIT_OK


def _emit_assignment(assignment: dict, scenario, args, index: int | None):
    if args.json:
        rels = [dict(_key_fields(k, scenario), relation=v) for k, v in assignment.items()]
        print(json.dumps({"scenario": index, "relations": rels} if index is not None else {"relations": rels}))
        return
    if index is not None:
        print(f"scenario {index}")
    for key, rel in assignment.items():
        print(f"{_key_text(key, scenario)} = {rel}")
    if index is not None:
        print()


def cmd_decide(args) -> int:
    scenario, net = _load(args.file)
    if net is None:
        return EXIT_INCONSISTENT
    found = 0
    for assignment in net.solutions():
        found += 1
        _emit_assignment(assignment, scenario, args, found if args.all else None)
        if not args.all:
            break
    return EXIT_OK if found else EXIT_INCONSISTENT


def table_checks(rcc8_path: str | None = None) -> list[tuple[str, bool, str]]:
    """Every shipped or derived table against the relation-algebra laws and the published counts."""
    checks: list[tuple[str, bool, str]] = []

    def add(name: str, ok: bool, detail: str = ""):
        checks.append((name, ok, detail))

    try:
        text = Path(rcc8_path).read_text() if rcc8_path else None
        rcc8 = calculi.parse_calculus(text) if text is not None else calculi.load_rcc8()
    except (CalculusFormatError, CalculusError, OSError) as e:
        add("rcc8 load", False, str(e))
        rcc8 = None
    if rcc8 is not None:
        violations = calculi.validate_calculus(rcc8)
        add("rcc8 axioms", not violations, "; ".join(violations))
        n = len(rcc8.comp_triples())
        add("rcc8 composition triples = 193", n == 193, str(n))

    size = calculi.derive_size_pa()
    violations = calculi.validate_calculus(size)
    add("size axioms", not violations, "; ".join(violations))
    n = len(size.comp_triples())
    add("size composition triples = 13", n == 13, str(n))
    n = len(link_topo_size().tuples)
    add("topo_size link pairs = 14", n == 14, str(n))

    pointcd = calculi.derive_point_cd()
    violations = calculi.validate_calculus(pointcd)
    add("pointcd axioms", not violations, "; ".join(violations))

    try:
        cyc = calculi.derive_cyc()
    except CalculusError as e:
        add("cyc derivation", False, str(e))
    else:
        add("cyc relations = 24", len(cyc.relations) == 24, str(len(cyc.relations)))
        violations = calculi.validate_ternary(cyc)
        add("cyc axioms", not violations, "; ".join(violations[:5]))
        failures = calculi.cyc_geometric_soundness(cyc, samples=1000, seed=0)
        add("cyc composition geometric soundness (1000 samples)", not failures, str(failures[:3]))
        again = calculi.derive_cyc.__wrapped__()
        add("cyc derivation deterministic",
            calculi.dump_ternary(cyc) == calculi.dump_ternary(again))

    try:
        dirsets = calculi.derive_valid_direction_sets()
    except CalculusError as e:
        add("valid direction sets = 218", False, str(e))
    else:
        add("valid direction sets = 218", len(dirsets.valid_sets) == 218, str(len(dirsets.valid_sets)))
    return checks


def cmd_validate_tables(args) -> int:
    checks = table_checks(args.rcc8)
    for name, ok, detail in checks:
        if args.json:
            print(json.dumps({"check": name, "ok": ok, "detail": detail}))
        else:
            print(f"{'ok  ' if ok else 'FAIL'} {name}" + (f": {detail}" if detail and not ok else ""))
    return EXIT_OK if all(ok for _, ok, _ in checks) else EXIT_INCONSISTENT


def verify_report(instances: int, max_n: int, seed: int, min_n: int = 3, p: float = 0.5) -> dict:
    rcc8 = calculi.load_rcc8()
    nets = random_instances(rcc8, instances, min_n, max_n, seed, p) if instances else []
    equal = 0
    small = agree = 0
    pc_inconsistent = 0
    for net in nets:
        cmp = compare_pc_gac(net)
        equal += cmp.equal
        pc_inconsistent += cmp.pc_failed
        if net.n <= 4:
            small += 1
            agree += enumerate_atomic(net) == decide(net.to_scenario()).consistent
    return {
        "instances": len(nets),
        "pc_gac_equal": equal,
        "pc_inconsistent": pc_inconsistent,
        "small_instances": small,
        "decide_enumerate_agree": agree,
        "pass": equal == len(nets) and agree == small,
    }


def cmd_verify(args) -> int:
    if args.instances < 0 or args.max_n < args.min_n or args.min_n < 1:
        print("verify: need --instances >= 0 and 1 <= --min-n <= --max-n", file=sys.stderr)
        return EXIT_USAGE
    report = verify_report(args.instances, args.max_n, args.seed, args.min_n, args.p)
    if args.json:
        print(json.dumps(report))
    else:
        print(f"pc_gac_equal {report['pc_gac_equal']}/{report['instances']}")
        print(f"pc_inconsistent {report['pc_inconsistent']}")
        print(f"decide_enumerate_agree {report['decide_enumerate_agree']}/{report['small_instances']}")
        print("PASS" if report["pass"] else "FAIL")
    return EXIT_OK if report["pass"] else EXIT_INCONSISTENT


def cmd_derive(args) -> int:
    if args.table == "cyc":
        text = calculi.dump_ternary(calculi.derive_cyc())
    elif args.table == "size":
        text = calculi.dump_calculus(calculi.derive_size_pa())
    elif args.table == "pointcd":
        text = calculi.dump_calculus(calculi.derive_point_cd())
    else:
        text = calculi.dump_direction_sets(calculi.derive_valid_direction_sets())
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relvar", description="Qualitative spatial reasoning with relation variables.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="propagate a scenario file to a fixpoint")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("decide", help="search for an atomic scenario")
    p.add_argument("file")
    p.add_argument("--all", action="store_true", help="stream every atomic scenario")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("validate-tables", help="check every calculus table")
    p.add_argument("--rcc8", metavar="PATH", help="validate this RCC-8 file instead of the shipped one")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate_tables)

    p = sub.add_parser("verify", help="compare path consistency with GAC on random RCC-8 networks")
    p.add_argument("--instances", type=int, default=500)
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--min-n", type=int, default=3)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--p", type=float, default=0.5, help="probability of keeping each base relation")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("derive", help="emit a derived table")
    p.add_argument("table", choices=["cyc", "size", "pointcd", "dirsets"])
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_derive)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioFileError, ScenarioError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
