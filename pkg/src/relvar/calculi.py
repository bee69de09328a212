"""Qualitative calculi: base relations with converse and composition tables.

RCC-8 ships as a data file. The size point algebra, the point cardinal
directions, the Cyc orientation calculus and the valid region-direction tile
sets are derived here by enumerating small geometric models, so their tables
never have to be typed in by hand.
"""

from __future__ import annotations

import functools
import itertools
import random
from collections import defaultdict
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .engine import iter_bits


class CalculusFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class CalculusError(ValueError):
    """A table failed validation."""

    def __init__(self, name: str, violations: list[str]):
        self.violations = violations
        super().__init__(f"{name}: " + "; ".join(violations))


class _Symbols:
    """Index/bitmask helpers shared by binary and ternary calculi."""

    relations: tuple[str, ...]

    @functools.cached_property
    def _index(self) -> dict[str, int]:
        return {r: i for i, r in enumerate(self.relations)}

    def __len__(self) -> int:
        return len(self.relations)

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise KeyError(f"{symbol!r} is not a relation of {self.name}") from None

    def mask(self, symbols: Iterable[str]) -> int:
        m = 0
        for s in symbols:
            m |= 1 << self.index(s)
        return m

    def symbols(self, mask: int) -> tuple[str, ...]:
        return tuple(self.relations[i] for i in iter_bits(mask))

    @property
    def full_mask(self) -> int:
        return (1 << len(self.relations)) - 1

    def comp_triples(self) -> list[tuple[int, int, int]]:
        out = []
        for (r, s), ts in self.composition.items():
            out.extend((self.index(r), self.index(s), self.index(t)) for t in ts)
        return sorted(out)


@dataclass(frozen=True, eq=False)
class Calculus(_Symbols):
    """A binary calculus over jointly exhaustive, pairwise disjoint base relations."""

    name: str
    relations: tuple[str, ...]
    converse: Mapping[str, str]
    composition: Mapping[tuple[str, str], frozenset[str]]
    identity: str

    arity = 2

    def compose(self, r: str, s: str) -> frozenset[str]:
        return self.composition.get((r, s), frozenset())

    def conv_pairs(self) -> list[tuple[int, int]]:
        return [(self.index(r), self.index(self.converse[r])) for r in self.relations]

    @functools.cached_property
    def _comp_masks(self) -> list[list[int]]:
        k = len(self.relations)
        table = [[0] * k for _ in range(k)]
        for (r, s), ts in self.composition.items():
            table[self.index(r)][self.index(s)] = self.mask(ts)
        return table

    @functools.cached_property
    def _conv_index(self) -> list[int]:
        return [self.index(self.converse[r]) for r in self.relations]

    def compose_masks(self, m1: int, m2: int) -> int:
        table = self._comp_masks
        out = 0
        for i in iter_bits(m1):
            row = table[i]
            for j in iter_bits(m2):
                out |= row[j]
        return out

    def converse_mask(self, mask: int) -> int:
        conv = self._conv_index
        out = 0
        for i in iter_bits(mask):
            out |= 1 << conv[i]
        return out


@dataclass(frozen=True, eq=False)
class TernaryCalculus(_Symbols):
    """Relations over ordered triples.

    ``converse`` maps Rel[a,b,c] to Rel[a,c,b], ``rotation`` maps Rel[a,b,c]
    to Rel[c,a,b] and ``composition`` maps (Rel[a,b,c], Rel[a,c,d]) to the
    feasible values of Rel[a,b,d].
    """

    name: str
    relations: tuple[str, ...]
    converse: Mapping[str, str]
    rotation: Mapping[str, str]
    composition: Mapping[tuple[str, str], frozenset[str]]

    arity = 3

    def compose(self, r: str, s: str) -> frozenset[str]:
        return self.composition.get((r, s), frozenset())


DIRECTION_TILES = ("B", "N", "NW", "W", "SW", "S", "SE", "E", "NE")

# (column, row) of each tile in the 3x3 grid around the reference box.
_TILE_CELLS = {
    "NW": (0, 0), "N": (1, 0), "NE": (2, 0),
    "W": (0, 1), "B": (1, 1), "E": (2, 1),
    "SW": (0, 2), "S": (1, 2), "SE": (2, 2),
}


def direction_set_name(tiles: Iterable[str]) -> str:
    tiles = set(tiles)
    return "+".join(t for t in DIRECTION_TILES if t in tiles)


@dataclass(frozen=True, eq=False)
class DirectionUniverse(_Symbols):
    """The tile sets a connected region can occupy relative to a reference box.

    Each valid set is one base relation of a set-valued direction aspect and
    is named by joining its tiles with ``+`` (``B+N+NE``). Converse and
    composition tables over these names are optional pluggable data.
    """

    tiles: tuple[str, ...]
    valid_sets: tuple[frozenset[str], ...]
    converse: Mapping[str, str] | None = None
    composition: Mapping[tuple[str, str], frozenset[str]] | None = None
    name: str = "dirsets"

    arity = 2

    @functools.cached_property
    def relations(self) -> tuple[str, ...]:
        return tuple(direction_set_name(s) for s in self.valid_sets)

    @property
    def identity(self) -> str:
        return "B"

    def tile_mask(self, tiles: Iterable[str]) -> int:
        m = 0
        for t in tiles:
            m |= 1 << self.tiles.index(t)
        return m

    def set_masks(self) -> list[int]:
        return [self.tile_mask(s) for s in self.valid_sets]

    def parse_set(self, name: str) -> frozenset[str]:
        tiles = frozenset(name.split("+"))
        unknown = tiles - set(self.tiles)
        if unknown:
            raise KeyError(f"unknown direction tiles {sorted(unknown)}")
        return tiles


# -- RCC-8 ---------------------------------------------------------------------


def load_rcc8(path: str | Path | None = None) -> Calculus:
    """Load and validate the RCC-8 table (the shipped data file by default)."""
    if path is None:
        return _shipped_rcc8()
    return _checked(parse_calculus(Path(path).read_text()))


@functools.lru_cache(maxsize=None)
def _shipped_rcc8() -> Calculus:
    return _checked(parse_calculus(resources.files("relvar").joinpath("data/rcc8.txt").read_text()))


def _checked(calc: Calculus) -> Calculus:
    violations = validate_calculus(calc)
    if violations:
        raise CalculusError(calc.name, violations)
    return calc


def parse_calculus(text: str) -> Calculus:
    """Parse the line-oriented calculus format written by :func:`dump_calculus`."""
    name = "unnamed"
    relations: tuple[str, ...] = ()
    identity = None
    converse: dict[str, str] = {}
    composition: dict[tuple[str, str], frozenset[str]] = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "name":
            name = " ".join(rest)
        elif head == "relations":
            relations = tuple(rest)
            if len(set(relations)) != len(relations):
                raise CalculusFormatError("duplicate relation symbol", lineno)
        elif head == "identity":
            if len(rest) != 1:
                raise CalculusFormatError("identity takes one symbol", lineno)
            identity = rest[0]
        elif head in ("converse", "composition") and not rest:
            section = head
        elif section == "converse":
            if len(rest) != 1:
                raise CalculusFormatError("converse lines are 'R Ri'", lineno)
            if head in converse:
                raise CalculusFormatError(f"duplicate converse entry for {head}", lineno)
            converse[head] = rest[0]
        elif section == "composition":
            if len(rest) < 2 or rest[1] != "->":
                raise CalculusFormatError("composition lines are 'R S -> T...'", lineno)
            key = (head, rest[0])
            if key in composition:
                raise CalculusFormatError(f"duplicate composition entry {key}", lineno)
            composition[key] = frozenset(rest[2:])
        else:
            raise CalculusFormatError(f"unexpected {head!r}", lineno)
    if not relations:
        raise CalculusFormatError("missing 'relations'")
    if identity is None:
        raise CalculusFormatError("missing 'identity'")
    known = set(relations)
    used = [identity, *converse, *converse.values(),
            *itertools.chain.from_iterable(composition), *itertools.chain.from_iterable(composition.values())]
    for sym in used:
        if sym not in known:
            raise CalculusFormatError(f"unknown relation symbol {sym!r}")
    return Calculus(name, relations, converse, composition, identity)


def dump_calculus(calc: Calculus) -> str:
    lines = [f"name {calc.name}", "relations " + " ".join(calc.relations), f"identity {calc.identity}",
             "", "converse"]
    lines += [f"{r} {calc.converse[r]}" for r in calc.relations]
    lines += ["", "composition"]
    for r, s in itertools.product(calc.relations, repeat=2):
        ts = calc.compose(r, s)
        lines.append(f"{r} {s} -> " + " ".join(t for t in calc.relations if t in ts))
    return "\n".join(lines) + "\n"


def dump_ternary(calc: TernaryCalculus) -> str:
    lines = [f"name {calc.name}", "relations " + " ".join(calc.relations), "", "converse"]
    lines += [f"{r} {calc.converse[r]}" for r in calc.relations]
    lines += ["", "rotation"]
    lines += [f"{r} {calc.rotation[r]}" for r in calc.relations]
    lines += ["", "composition"]
    for r, s in itertools.product(calc.relations, repeat=2):
        ts = calc.compose(r, s)
        if ts:
            lines.append(f"{r} {s} -> " + " ".join(t for t in calc.relations if t in ts))
    return "\n".join(lines) + "\n"


def dump_direction_sets(universe: DirectionUniverse) -> str:
    lines = ["name dirsets", "tiles " + " ".join(universe.tiles), "", "valid"]
    lines += universe.relations
    return "\n".join(lines) + "\n"


# -- derived calculi -----------------------------------------------------------


def _calculus_from_models(name: str, relations: tuple[str, ...], identity: str,
                          models: Iterable[tuple[str, str, str]], converse: dict[str, str]) -> Calculus:
    composition: dict[tuple[str, str], set[str]] = defaultdict(set)
    for r, s, t in models:
        composition[r, s].add(t)
    return Calculus(name, relations, dict(converse),
                    {k: frozenset(v) for k, v in sorted(composition.items())}, identity)


def _order(x: int, y: int) -> str:
    return "<" if x < y else "=" if x == y else ">"


@functools.lru_cache(maxsize=None)
def derive_size_pa() -> Calculus:
    """Relative size {<, =, >}, composed over all integer sizes in {0, 1, 2}."""
    models = [(_order(x, y), _order(y, z), _order(x, z))
              for x, y, z in itertools.product(range(3), repeat=3)]
    return _calculus_from_models("size", ("<", "=", ">"), "=", models,
                                 {"<": ">", "=": "=", ">": "<"})


_SIGN_TO_DIRECTION = {
    (0, 1): "N", (-1, 1): "NW", (-1, 0): "W", (-1, -1): "SW",
    (0, -1): "S", (1, -1): "SE", (1, 0): "E", (1, 1): "NE", (0, 0): "EQ",
}
POINT_DIRECTIONS = ("N", "NW", "W", "SW", "S", "SE", "E", "NE", "EQ")


def _sign(v: int) -> int:
    return (v > 0) - (v < 0)


def _point_direction(dx: int, dy: int) -> str:
    return _SIGN_TO_DIRECTION[_sign(dx), _sign(dy)]


@functools.lru_cache(maxsize=None)
def derive_point_cd() -> Calculus:
    """Projection-based cardinal directions between points.

    ``Rel[a,b] = N`` means a lies due north of b (same x, larger y). The
    composition is collected from displacement pairs a-b, b-c with components
    in {-2..2}.
    """
    span = range(-2, 3)
    vectors = list(itertools.product(span, repeat=2))
    models = []
    for (ux, uy), (vx, vy) in itertools.product(vectors, repeat=2):
        models.append((_point_direction(ux, uy), _point_direction(vx, vy),
                       _point_direction(ux + vx, uy + vy)))
    converse = {}
    for (sx, sy), r in _SIGN_TO_DIRECTION.items():
        converse[r] = _SIGN_TO_DIRECTION[-sx, -sy]
    return _calculus_from_models("pointcd", POINT_DIRECTIONS, "EQ", models, converse)


def orientation_class(angle: int) -> str:
    """Qualitative class of the counter-clockwise angle (whole degrees) between two orientations."""
    angle %= 360
    if angle == 0:
        return "e"
    if angle < 180:
        return "l"
    if angle == 180:
        return "o"
    return "r"


def cyc_relation(ta: int, tb: int, tc: int) -> str:
    """Cyc relation of orientations (a, b, c) given their directions in degrees."""
    return orientation_class(tb - ta) + orientation_class(tc - tb) + orientation_class(tc - ta)


CYC_SIZE = 24


@functools.lru_cache(maxsize=None)
def derive_cyc(grid_step: int = 15) -> TernaryCalculus:
    """Cyclic ordering of 2D orientations.

    Relation symbols concatenate the classes of angle(b,a), angle(c,b),
    angle(c,a). Realizable triples, converse and rotation come from all
    whole-degree configurations with a fixed at 0 (every relation is
    invariant under a common rotation). Composition is read off the coarser
    ``grid_step`` grid of four orientations.
    """
    realizable: set[str] = set()
    converse: dict[str, set[str]] = defaultdict(set)
    rotation: dict[str, set[str]] = defaultdict(set)
    for tb, tc in itertools.product(range(360), repeat=2):
        r = cyc_relation(0, tb, tc)
        realizable.add(r)
        converse[r].add(cyc_relation(0, tc, tb))
        rotation[r].add(cyc_relation(tc, 0, tb))
    if len(realizable) != CYC_SIZE:
        raise CalculusError("cyc", [f"{len(realizable)} realizable triples, expected {CYC_SIZE}"])
    for table_name, table in (("converse", converse), ("rotation", rotation)):
        ambiguous = sorted(r for r, images in table.items() if len(images) != 1)
        if ambiguous:
            raise CalculusError("cyc", [f"{table_name} is not a function at {ambiguous}"])

    composition: dict[tuple[str, str], set[str]] = defaultdict(set)
    grid = range(0, 360, grid_step)
    for tb, tc, td in itertools.product(grid, repeat=3):
        composition[cyc_relation(0, tb, tc), cyc_relation(0, tc, td)].add(cyc_relation(0, tb, td))

    relations = tuple(sorted(realizable))
    return TernaryCalculus(
        "cyc", relations,
        {r: next(iter(converse[r])) for r in relations},
        {r: next(iter(rotation[r])) for r in relations},
        {k: frozenset(v) for k, v in sorted(composition.items())},
    )


VALID_DIRECTION_SET_COUNT = 218


def _connected(cells: set[tuple[int, int]]) -> bool:
    start = next(iter(cells))
    seen = {start}
    stack = [start]
    while stack:
        x, y = stack.pop()
        for nb in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if nb in cells and nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(cells)


@functools.lru_cache(maxsize=None)
def derive_valid_direction_sets() -> DirectionUniverse:
    """Non-empty tile sets that are edge-connected in the 3x3 grid."""
    valid = []
    for mask in range(1, 1 << len(DIRECTION_TILES)):
        tiles = [t for i, t in enumerate(DIRECTION_TILES) if mask >> i & 1]
        if _connected({_TILE_CELLS[t] for t in tiles}):
            valid.append(frozenset(tiles))
    if len(valid) != VALID_DIRECTION_SET_COUNT:
        raise CalculusError("dirsets", [f"{len(valid)} connected tile sets, expected {VALID_DIRECTION_SET_COUNT}"])
    return DirectionUniverse(DIRECTION_TILES, tuple(valid))


# -- validation ----------------------------------------------------------------


def validate_calculus(calc: Calculus) -> list[str]:
    """Check the relation-algebra laws a binary calculus table must satisfy.

    Returns a list of human-readable violations; empty means the table passed.
    """
    rels = calc.relations
    known = set(rels)
    out = []
    if calc.identity not in known:
        out.append(f"identity {calc.identity!r} is not a relation")
        return out
    conv = calc.converse
    for r in rels:
        if r not in conv:
            out.append(f"converse missing for {r}")
        elif conv[r] not in known:
            out.append(f"converse of {r} is unknown symbol {conv[r]!r}")
    for (r, s), ts in calc.composition.items():
        bad = set(ts) - known
        if r not in known or s not in known or bad:
            out.append(f"composition ({r}, {s}) uses unknown symbols")
    if out:
        return out
    for r in rels:
        if conv[conv[r]] != r:
            out.append(f"converse not an involution: conv(conv({r})) = {conv[conv[r]]}")

    ident = calc.identity
    for r in rels:
        if calc.compose(r, ident) != {r}:
            out.append(f"identity law: comp({r}, {ident}) = {sorted(calc.compose(r, ident))}")
        if calc.compose(ident, r) != {r}:
            out.append(f"identity law: comp({ident}, {r}) = {sorted(calc.compose(ident, r))}")
    for r, s in itertools.product(rels, repeat=2):
        if not calc.compose(r, s):
            out.append(f"composition not total: comp({r}, {s}) is empty")
    for r, s, t in itertools.product(rels, repeat=3):
        lhs = t in calc.compose(r, s)
        if lhs != (conv[t] in calc.compose(conv[s], conv[r])):
            out.append(f"converse-composition law fails at ({r}, {s}, {t})")
        # cycle law: a r b, b s c, a t c is symmetric under rotating the triangle
        if lhs != (r in calc.compose(t, conv[s])):
            out.append(f"cycle law fails at ({r}, {s}, {t})")
    for r in rels:
        derived = {s for s in rels if ident in calc.compose(r, s)}
        if derived != {conv[r]}:
            out.append(f"converse of {r} not derivable from composition: {sorted(derived)} vs {conv[r]}")
    return out


def validate_ternary(calc: TernaryCalculus) -> list[str]:
    """Ternary counterpart of :func:`validate_calculus` for Cyc-style calculi.

    Checks converse involution, rotation of order three, the
    converse-composition law (swapping b and d) and that composition is
    non-empty exactly for chaining pairs, i.e. when the angle shared between
    Rel[a,b,c] and Rel[a,c,d] agrees.
    """
    rels = calc.relations
    known = set(rels)
    out = []
    for table_name, table in (("converse", calc.converse), ("rotation", calc.rotation)):
        if set(table) != known or not set(table.values()) <= known:
            out.append(f"{table_name} is not a total map on the relations")
        elif set(table.values()) != known:
            out.append(f"{table_name} is not a permutation")
    if out:
        return out
    conv, rot = calc.converse, calc.rotation
    for r in rels:
        if conv[conv[r]] != r:
            out.append(f"converse not an involution at {r}")
        if rot[rot[rot[r]]] != r:
            out.append(f"rotation cubed is not the identity at {r}")
    for r, s in itertools.product(rels, repeat=2):
        chained = r[2] == s[0]
        if bool(calc.compose(r, s)) != chained:
            out.append(f"comp({r}, {s}) {'empty' if chained else 'non-empty'} for a "
                       f"{'chaining' if chained else 'non-chaining'} pair")
    for r, s, t in itertools.product(rels, repeat=3):
        if (t in calc.compose(r, s)) != (conv[t] in calc.compose(conv[s], conv[r])):
            out.append(f"converse-composition law fails at ({r}, {s}, {t})")
    return out


def cyc_geometric_soundness(calc: TernaryCalculus, samples: int = 1000, seed: int = 0) -> list[tuple]:
    """Random whole-degree quadruples whose observed relations escape the composition table."""
    rng = random.Random(seed)
    failures = []
    for _ in range(samples):
        ta, tb, tc, td = (rng.randrange(360) for _ in range(4))
        r, s, t = cyc_relation(ta, tb, tc), cyc_relation(ta, tc, td), cyc_relation(ta, tb, td)
        if t not in calc.compose(r, s):
            failures.append(((ta, tb, tc, td), (r, s, t)))
    return failures


def calculus_by_name(name: str):
    """Calculi addressable from scenario files and the command line."""
    factories = {
        "rcc8": load_rcc8,
        "size": derive_size_pa,
        "pointcd": derive_point_cd,
        "cyc": derive_cyc,
        "dirsets": derive_valid_direction_sets,
    }
    try:
        return factories[name]()
    except KeyError:
        raise KeyError(f"unknown calculus {name!r}; known: {', '.join(factories)}") from None
