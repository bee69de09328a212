"""Reading and writing line-oriented scenario files (``.qsr``).

Directives, one per line, ``#`` starts a comment::

    aspect topo rcc8
    aspect dir dirsets set_valued
    objects a b c
    time 3
    rel topo a b { DC EC }
    rel topo a b @2 { PO }
    link topo_size topo size
    neighbour rcc8 topo
"""

from __future__ import annotations

from pathlib import Path

from .calculi import DirectionUniverse, calculus_by_name
from .scenarios import LINK_TABLES, NEIGHBOUR_TABLES, AspectDecl, Restriction, Scenario, ScenarioError


class ScenarioFileError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def parse_scenario(text: str) -> Scenario:
    aspects: list[AspectDecl] = []
    objects: tuple[str, ...] | None = None
    time_steps = None
    rels: list[tuple[int, Restriction]] = []
    links = []
    neighbours = []

    def find_aspect(name: str, lineno: int) -> AspectDecl:
        for a in aspects:
            if a.name == name:
                return a
        raise ScenarioFileError(f"undeclared aspect {name!r}", lineno)

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *args = line.split()
        if head == "aspect":
            if len(args) not in (2, 3) or (len(args) == 3 and args[2] != "set_valued"):
                raise ScenarioFileError("usage: aspect <name> <calculus> [set_valued]", lineno)
            try:
                calc = calculus_by_name(args[1])
            except KeyError as e:
                raise ScenarioFileError(e.args[0], lineno) from None
            set_valued = isinstance(calc, DirectionUniverse)
            if len(args) == 3 and not set_valued:
                raise ScenarioFileError(f"calculus {args[1]} is not set-valued", lineno)
            if any(a.name == args[0] for a in aspects):
                raise ScenarioFileError(f"aspect {args[0]!r} declared twice", lineno)
            aspects.append(AspectDecl(args[0], calc, set_valued))
        elif head == "objects":
            if objects is not None:
                raise ScenarioFileError("objects declared twice", lineno)
            if not args:
                raise ScenarioFileError("empty objects list", lineno)
            objects = tuple(args)
        elif head == "time":
            if len(args) != 1 or not args[0].isdigit() or int(args[0]) < 1:
                raise ScenarioFileError("usage: time <positive count>", lineno)
            time_steps = int(args[0])
        elif head == "rel":
            rels.append((lineno, _parse_rel(args, lineno, find_aspect)))
        elif head == "link":
            if not args or args[0] not in LINK_TABLES:
                raise ScenarioFileError(f"unknown link table; known: {', '.join(LINK_TABLES)}", lineno)
            for a in args[1:]:
                find_aspect(a, lineno)
            try:
                links.append(LINK_TABLES[args[0]]().bind(*args[1:]))
            except ScenarioError as e:
                raise ScenarioFileError(str(e), lineno) from None
        elif head == "neighbour":
            if len(args) != 2 or args[0] not in NEIGHBOUR_TABLES:
                raise ScenarioFileError(f"usage: neighbour <{'|'.join(NEIGHBOUR_TABLES)}> <aspect>", lineno)
            find_aspect(args[1], lineno)
            neighbours.append(NEIGHBOUR_TABLES[args[0]](args[1]))
        else:
            raise ScenarioFileError(f"unknown directive {head!r}", lineno)

    if objects is None:
        raise ScenarioFileError("missing 'objects' directive")
    known = set(objects)
    steps = time_steps or 1
    for lineno, r in rels:
        unknown = [o for o in r.objects if o not in known]
        if unknown:
            raise ScenarioFileError(f"undeclared objects {unknown}", lineno)
        if r.time is not None and r.time >= steps:
            raise ScenarioFileError(f"time {r.time} outside 0..{steps - 1}", lineno)
    try:
        return Scenario(objects, tuple(aspects), tuple(r for _, r in rels), tuple(links),
                        tuple(neighbours), time_steps)
    except ScenarioError as e:
        raise ScenarioFileError(str(e)) from None


def _parse_rel(args: list[str], lineno: int, find_aspect) -> Restriction:
    usage = "usage: rel <aspect> <objects...> [@t] { <relation>... }"
    if "{" not in args or args[-1] != "}":
        raise ScenarioFileError(usage, lineno)
    brace = args.index("{")
    head, symbols = args[:brace], args[brace + 1:-1]
    if len(head) < 2:
        raise ScenarioFileError(usage, lineno)
    aspect = find_aspect(head[0], lineno)
    objs = head[1:]
    time = None
    if objs[-1].startswith("@"):
        stamp = objs.pop()[1:]
        if not stamp.isdigit():
            raise ScenarioFileError(f"bad time stamp @{stamp}", lineno)
        time = int(stamp)
    if len(objs) != aspect.arity:
        raise ScenarioFileError(f"{aspect.name} relates {aspect.arity} objects, got {len(objs)}", lineno)
    if not symbols:
        raise ScenarioFileError("empty relation set", lineno)
    allowed = set()
    for sym in symbols:
        try:
            allowed.add(aspect.canonical(sym))
            aspect.calculus.index(aspect.canonical(sym))
        except KeyError:
            raise ScenarioFileError(f"{sym!r} is not a relation of {aspect.calculus.name}", lineno) from None
    return Restriction(aspect.name, tuple(objs), frozenset(allowed), time)


def format_scenario(scenario: Scenario) -> str:
    lines = []
    for a in scenario.aspects:
        lines.append(f"aspect {a.name} {a.calculus.name}" + (" set_valued" if a.set_valued else ""))
    lines.append("objects " + " ".join(scenario.objects))
    if scenario.time_steps is not None:
        lines.append(f"time {scenario.time_steps}")
    for r in scenario.restrictions:
        calc = scenario.aspect(r.aspect).calculus
        symbols = [s for s in calc.relations if s in r.allowed]
        stamp = f" @{r.time}" if r.time is not None else ""
        lines.append(f"rel {r.aspect} {' '.join(r.objects)}{stamp} {{ {' '.join(symbols)} }}")
    for link in scenario.links:
        if link.name not in LINK_TABLES:
            raise ScenarioError(f"link table {link.name!r} has no file representation")
        lines.append(f"link {link.name} {' '.join(link.aspects)}")
    for nb in scenario.neighbours:
        if nb.name not in NEIGHBOUR_TABLES:
            raise ScenarioError(f"neighbour table {nb.name!r} has no file representation")
        lines.append(f"neighbour {nb.name} {nb.aspect}")
    return "\n".join(lines) + "\n"


def read_scenario(path: str | Path) -> Scenario:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))
