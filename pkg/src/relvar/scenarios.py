"""Qualitative scenarios compiled into relation-variable CSPs.

Every ordered tuple of distinct objects gets one relation variable per aspect
(and per time step). The calculus semantics become table constraints between
those variables: converse on each pair, composition on each triple, plus
rotation for ternary calculi. Aspects are tied together by link tables, and
consecutive time steps by conceptual-neighbourhood tables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

from .calculi import Calculus, DirectionUniverse, TernaryCalculus, derive_size_pa, \
    derive_valid_direction_sets, direction_set_name, load_rcc8
from .engine import EmptyDomain, FiniteDomain, SetDomain, Store, VarId

AnyCalculus = Union[Calculus, TernaryCalculus, DirectionUniverse]
Key = tuple[str, tuple[str, ...], int]


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class AspectDecl:
    name: str
    calculus: AnyCalculus
    set_valued: bool = False

    def __post_init__(self):
        if self.set_valued != isinstance(self.calculus, DirectionUniverse):
            raise ScenarioError(f"aspect {self.name}: set_valued must be used exactly with direction sets")

    @property
    def arity(self) -> int:
        return self.calculus.arity

    def canonical(self, symbol: str) -> str:
        """Normalise a relation symbol; direction sets accept any tile order."""
        if self.set_valued:
            return direction_set_name(self.calculus.parse_set(symbol))
        return symbol

    def mask(self, symbols) -> int:
        return self.calculus.mask(self.canonical(s) for s in symbols)


@dataclass(frozen=True)
class Restriction:
    aspect: str
    objects: tuple[str, ...]
    allowed: frozenset[str]
    time: int | None = None


@dataclass(frozen=True)
class LinkTable:
    """Jointly allowed relation combinations across aspects.

    Each slot names an aspect and the positions, within a k-tuple of
    distinct objects, of the relation it reads: ``("topo", (0, 1))`` is
    TopoRel[o0, o1]. The constraint is posted on every ordered k-tuple.
    """

    name: str
    slots: tuple[tuple[str, tuple[int, ...]], ...]
    tuples: frozenset[tuple[str, ...]]

    @property
    def arity(self) -> int:
        return 1 + max(p for _, positions in self.slots for p in positions)

    def bind(self, *aspects: str) -> LinkTable:
        """Rename the slot aspects in first-appearance order."""
        original = list(dict.fromkeys(a for a, _ in self.slots))
        if len(aspects) != len(original):
            raise ScenarioError(f"link {self.name} takes {len(original)} aspects, got {len(aspects)}")
        rename = dict(zip(original, aspects))
        return LinkTable(self.name, tuple((rename[a], pos) for a, pos in self.slots), self.tuples)

    @property
    def aspects(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(a for a, _ in self.slots))


@dataclass(frozen=True)
class NeighbourTable:
    """Relation pairs (R, R') such that R may become R' within one time step."""

    aspect: str
    pairs: frozenset[tuple[str, str]]
    name: str = "neighbour"

    def bind(self, aspect: str) -> NeighbourTable:
        return NeighbourTable(aspect, self.pairs, self.name)


@dataclass(frozen=True)
class Scenario:
    objects: tuple[str, ...]
    aspects: tuple[AspectDecl, ...]
    restrictions: tuple[Restriction, ...] = ()
    links: tuple[LinkTable, ...] = ()
    neighbours: tuple[NeighbourTable, ...] = ()
    time_steps: int | None = None

    def __post_init__(self):
        if not self.objects:
            raise ScenarioError("scenario has no objects")
        if len(set(self.objects)) != len(self.objects):
            raise ScenarioError("object names must be unique")
        names = [a.name for a in self.aspects]
        if len(set(names)) != len(names):
            raise ScenarioError("aspect names must be unique")
        if self.time_steps is not None and self.time_steps < 1:
            raise ScenarioError("time_steps must be positive")
        known = set(self.objects)
        for r in self.restrictions:
            aspect = self.aspect(r.aspect)
            if len(r.objects) != aspect.arity:
                raise ScenarioError(f"{r.aspect} relates {aspect.arity} objects, got {r.objects}")
            unknown = set(r.objects) - known
            if unknown:
                raise ScenarioError(f"undeclared objects {sorted(unknown)}")
            if not r.allowed:
                raise ScenarioError(f"empty relation set for {r.aspect}{r.objects}")
            try:
                aspect.mask(r.allowed)
            except KeyError as e:
                raise ScenarioError(str(e.args[0])) from None
            if r.time is not None and not 0 <= r.time < self.steps:
                raise ScenarioError(f"time {r.time} outside 0..{self.steps - 1}")
        for link in self.links:
            for a in link.aspects:
                self.aspect(a)
        for nb in self.neighbours:
            self.aspect(nb.aspect)

    def aspect(self, name: str) -> AspectDecl:
        for a in self.aspects:
            if a.name == name:
                return a
        raise ScenarioError(f"undeclared aspect {name!r}")

    @property
    def steps(self) -> int:
        return self.time_steps or 1


# -- shipped tables --------------------------------------------------------------


def link_topo_size(topo: str = "topo", size: str = "size") -> LinkTable:
    """Topology/size link: proper parts are smaller, EQ is equal, DC/EC/PO are free."""
    pairs = {("TPP", "<"), ("NTPP", "<"), ("TPPi", ">"), ("NTPPi", ">"), ("EQ", "=")}
    pairs |= {(t, s) for t in ("DC", "EC", "PO") for s in "<=>"}
    return LinkTable("topo_size", ((topo, (0, 1)), (size, (0, 1))), frozenset(pairs))


def link_topo_dir(topo: str = "topo", direction: str = "dir") -> LinkTable:
    """Topology/region-direction link over the valid tile sets."""
    universe = derive_valid_direction_sets()
    pairs = set()
    for tiles in universe.valid_sets:
        name = direction_set_name(tiles)
        for t in ("DC", "EC", "PO"):
            pairs.add((t, name))
        if tiles == {"B"}:
            pairs |= {(t, name) for t in ("EQ", "TPP", "NTPP")}
        if "B" in tiles:
            pairs |= {(t, name) for t in ("TPPi", "NTPPi")}
    return LinkTable("topo_dir", ((topo, (0, 1)), (direction, (0, 1))), frozenset(pairs))


_RCC8_NEIGHBOURS = [("DC", "EC"), ("EC", "PO"), ("PO", "TPP"), ("PO", "TPPi"), ("PO", "EQ"),
                    ("TPP", "NTPP"), ("TPPi", "NTPPi"), ("TPP", "EQ"), ("TPPi", "EQ")]


def neighbour_rcc8(aspect: str = "topo") -> NeighbourTable:
    rels = load_rcc8().relations
    pairs = {(r, r) for r in rels}
    for a, b in _RCC8_NEIGHBOURS:
        pairs |= {(a, b), (b, a)}
    return NeighbourTable(aspect, frozenset(pairs), "rcc8")


LINK_TABLES = {"topo_size": link_topo_size, "topo_dir": link_topo_dir}
NEIGHBOUR_TABLES = {"rcc8": neighbour_rcc8}


# -- network ------------------------------------------------------------------


@dataclass
class CheckResult:
    inconsistent: bool
    domains: dict[Key, tuple[str, ...]] | None = None


@dataclass
class DecideResult:
    consistent: bool
    assignment: dict | None = None


@dataclass
class Network:
    """A built scenario: the engine store plus the variable maps into it."""

    scenario: Scenario
    store: Store = field(default_factory=Store)
    rel_vars: dict[Key, VarId] = field(default_factory=dict)
    set_vars: dict[Key, VarId] = field(default_factory=dict)
    object_vars: dict[str, VarId] = field(default_factory=dict)
    posted: dict[str, list[tuple[str, int]]] = field(default_factory=dict)
    _diagonal: dict[tuple[str, int], VarId] = field(default_factory=dict)

    def var(self, aspect: str, *objects: str, t: int = 0) -> VarId:
        return self.rel_vars[aspect, tuple(objects), t]

    def count(self, kind: str, aspect: str | None = None) -> int:
        return sum(1 for a, _ in self.posted.get(kind, ()) if aspect is None or a == aspect)

    def _log(self, kind: str, aspect: str, cid: int):
        self.posted.setdefault(kind, []).append((aspect, cid))

    def relations(self, key: Key) -> tuple[str, ...]:
        aspect = self.scenario.aspect(key[0])
        return aspect.calculus.symbols(self.store.bits(self.rel_vars[key]))

    def domains(self) -> dict[Key, tuple[str, ...]]:
        return {key: self.relations(key) for key in self.rel_vars}

    def post_set_membership(self, aspect: str, objects: Sequence[str], tile: str, required: bool,
                            t: int = 0) -> int:
        """Require or forbid one direction tile in a set-valued relation."""
        decl = self.scenario.aspect(aspect)
        if not decl.set_valued:
            raise ScenarioError(f"aspect {aspect} is not set-valued")
        var = self.set_vars[aspect, tuple(objects), t]
        return self.store.post_set_membership(var, decl.calculus.tiles.index(tile), required)

    def check(self) -> CheckResult:
        if not self.store.propagate():
            return CheckResult(True)
        return CheckResult(False, self.domains())

    def solutions(self) -> Iterator[dict]:
        for solution in self.store.solutions():
            yield self.decode(solution)

    def decide(self) -> DecideResult:
        for assignment in self.solutions():
            return DecideResult(True, assignment)
        return DecideResult(False)

    def decode(self, solution: dict[VarId, object]) -> dict:
        """Map an engine solution to relation symbols (and object names for object variables)."""
        out: dict = {}
        for key, var in self.rel_vars.items():
            out[key] = self.scenario.aspect(key[0]).calculus.relations[solution[var]]
        for name, var in self.object_vars.items():
            out[name] = self.scenario.objects[solution[var]]
        return out

    def diagonal_var(self, aspect: str, t: int = 0) -> VarId:
        """A bound variable holding the identity relation, for array cells on the diagonal."""
        if (aspect, t) not in self._diagonal:
            calc = self.scenario.aspect(aspect).calculus
            ident = calc.index(calc.identity)
            self._diagonal[aspect, t] = self.store.new_var(FiniteDomain.of([ident], len(calc)))
        return self._diagonal[aspect, t]


def _initial_masks(scenario: Scenario) -> dict[Key, int]:
    masks: dict[Key, int] = {}
    for r in scenario.restrictions:
        aspect = scenario.aspect(r.aspect)
        mask = aspect.mask(r.allowed)
        times = range(scenario.steps) if r.time is None else (r.time,)
        for t in times:
            key = (r.aspect, r.objects, t)
            masks[key] = masks.get(key, aspect.calculus.full_mask) & mask
    return masks


def build(scenario: Scenario) -> Network:
    """Compile a scenario into a constraint network.

    Raises EmptyDomain when a restricted relation set intersects to nothing
    (including a diagonal restriction that excludes the identity).
    """
    net = Network(scenario)
    store = net.store
    masks = _initial_masks(scenario)
    objs = scenario.objects

    for (aspect_name, tup, t), mask in masks.items():
        if len(set(tup)) < len(tup):
            aspect = scenario.aspect(aspect_name)
            if aspect.arity == 3:
                raise ScenarioError(f"{aspect_name}{tup}: ternary relations need distinct objects")
            if not mask >> aspect.calculus.index(aspect.calculus.identity) & 1:
                raise EmptyDomain(f"{aspect_name}{tup} excludes the identity relation")

    for t in range(scenario.steps):
        for aspect in scenario.aspects:
            calc = aspect.calculus
            if aspect.set_valued:
                valid_sets = [[calc.tiles.index(x) for x in s] for s in calc.valid_sets]
            for tup in itertools.permutations(objs, aspect.arity):
                key = (aspect.name, tup, t)
                mask = masks.get(key, calc.full_mask)
                if mask == 0:
                    raise EmptyDomain(f"{aspect.name}{tup} at step {t} has no admissible relation")
                net.rel_vars[key] = store.new_var(FiniteDomain(mask, len(calc)))
                if aspect.set_valued:
                    set_var = store.new_set_var(SetDomain.unconstrained(len(calc.tiles)))
                    net.set_vars[key] = set_var
                    store.channel_set_to_enum(set_var, net.rel_vars[key], valid_sets)
            if aspect.arity == 2:
                _post_binary_integrity(net, aspect, t)
            else:
                _post_ternary_integrity(net, aspect, t)
        for link in scenario.links:
            _post_link(net, link, t)

    for nb in scenario.neighbours:
        aspect = scenario.aspect(nb.aspect)
        calc = aspect.calculus
        pairs = [(calc.index(aspect.canonical(a)), calc.index(aspect.canonical(b))) for a, b in nb.pairs]
        for t in range(scenario.steps - 1):
            for tup in itertools.permutations(objs, aspect.arity):
                cid = store.post_table([net.var(nb.aspect, *tup, t=t), net.var(nb.aspect, *tup, t=t + 1)], pairs)
                net._log("neighbour", nb.aspect, cid)
    return net


def _post_binary_integrity(net: Network, aspect: AspectDecl, t: int):
    calc = aspect.calculus
    if calc.converse is None or calc.composition is None:
        return
    store = net.store
    name = aspect.name
    objs = net.scenario.objects
    conv = [(calc.index(r), calc.index(calc.converse[r])) for r in calc.relations]
    comp = calc.comp_triples()
    for a, b in itertools.combinations(objs, 2):
        cid = store.post_table([net.var(name, a, b, t=t), net.var(name, b, a, t=t)], conv)
        net._log("conv", name, cid)
    for a, b, c in itertools.combinations(objs, 3):
        scope = [net.var(name, a, b, t=t), net.var(name, b, c, t=t), net.var(name, a, c, t=t)]
        net._log("comp", name, store.post_table(scope, comp))


def _post_ternary_integrity(net: Network, aspect: AspectDecl, t: int):
    calc = aspect.calculus
    store = net.store
    name = aspect.name
    objs = net.scenario.objects
    conv = [(calc.index(r), calc.index(calc.converse[r])) for r in calc.relations]
    rot = [(calc.index(r), calc.index(calc.rotation[r])) for r in calc.relations]
    comp = calc.comp_triples()
    for a in objs:
        others = [o for o in objs if o != a]
        for b, c in itertools.combinations(others, 2):
            cid = store.post_table([net.var(name, a, b, c, t=t), net.var(name, a, c, b, t=t)], conv)
            net._log("conv", name, cid)
    for a, b, c in itertools.permutations(objs, 3):
        cid = store.post_table([net.var(name, a, b, c, t=t), net.var(name, c, a, b, t=t)], rot)
        net._log("rotate", name, cid)
    for a, b, c, d in itertools.permutations(objs, 4):
        scope = [net.var(name, a, b, c, t=t), net.var(name, a, c, d, t=t), net.var(name, a, b, d, t=t)]
        net._log("comp", name, store.post_table(scope, comp))


def _post_link(net: Network, link: LinkTable, t: int):
    scenario = net.scenario
    decls = []
    for aspect_name, positions in link.slots:
        decl = scenario.aspect(aspect_name)
        if len(positions) != decl.arity:
            raise ScenarioError(f"link {link.name}: slot {aspect_name}{positions} does not match arity {decl.arity}")
        decls.append(decl)
    try:
        tuples = [tuple(d.calculus.index(d.canonical(sym)) for d, sym in zip(decls, row)) for row in link.tuples]
    except KeyError as e:
        raise ScenarioError(f"link {link.name}: {e.args[0]}") from None
    for objs in itertools.permutations(scenario.objects, link.arity):
        scope = [net.var(a, *(objs[p] for p in positions), t=t) for a, positions in link.slots]
        net._log("link", link.name, net.store.post_table(scope, tuples))


# -- queries over object variables ---------------------------------------------------


def post_object_query(network: Network, object_vars: Sequence[str],
                      constraints: Sequence[tuple[str, Sequence[str], Sequence[str]]], t: int = 0) -> list[int]:
    """Add variables ranging over the objects and array constraints on them.

    Each constraint ``(aspect, (x1, x2), targets)`` requires the relation
    Rel[x1, x2] to lie in ``targets``, with x1 and x2 object variables.
    """
    scenario = network.scenario
    store = network.store
    n = len(scenario.objects)
    for name in object_vars:
        if name in network.object_vars:
            raise ScenarioError(f"object variable {name!r} already defined")
        network.object_vars[name] = store.new_var(FiniteDomain.full(n))
    cids = []
    for aspect_name, index_names, targets in constraints:
        decl = scenario.aspect(aspect_name)
        if len(index_names) != decl.arity:
            raise ScenarioError(f"{aspect_name} takes {decl.arity} object variables, got {len(index_names)}")
        index_vars = [network.object_vars[x] for x in index_names]
        cells = _cell_array(network, decl, t)
        cids.append(store.post_array_constraint(index_vars, cells, decl.mask(targets)))
    return cids


def _cell_array(network: Network, decl: AspectDecl, t: int):
    objs = network.scenario.objects

    def cell(idx: tuple[int, ...]):
        tup = tuple(objs[i] for i in idx)
        if len(set(tup)) == len(tup):
            return network.var(decl.name, *tup, t=t)
        if decl.arity == 2:
            return network.diagonal_var(decl.name, t)
        return None

    def nest(prefix: tuple[int, ...]):
        if len(prefix) == decl.arity:
            return cell(prefix)
        return [nest(prefix + (i,)) for i in range(len(objs))]

    return nest(())


# -- entry points ----------------------------------------------------------------


def check(scenario: Scenario) -> CheckResult:
    """Propagate only. A non-failing fixpoint does not certify consistency."""
    try:
        net = build(scenario)
    except EmptyDomain:
        return CheckResult(True)
    return net.check()


def decide(scenario: Scenario) -> DecideResult:
    """Search for one atomic scenario. Only RCC-8 (and Cyc) results carry a geometric guarantee."""
    try:
        net = build(scenario)
    except EmptyDomain:
        return DecideResult(False)
    return net.decide()


def iter_atomic(scenario: Scenario) -> Iterator[dict]:
    try:
        net = build(scenario)
    except EmptyDomain:
        return
    yield from net.solutions()


def topology_aspect(name: str = "topo") -> AspectDecl:
    return AspectDecl(name, load_rcc8())


def size_aspect(name: str = "size") -> AspectDecl:
    return AspectDecl(name, derive_size_pa())


def gerevini_renz(topology: bool = True, size: bool = True) -> Scenario:
    """The five-region topology and size scenario whose combination is inconsistent."""
    objects = tuple("01234")
    aspects = []
    restrictions = []
    if topology:
        aspects.append(topology_aspect())
        restrictions += [
            Restriction("topo", ("0", "2"), frozenset({"TPP", "EQ"})),
            Restriction("topo", ("1", "0"), frozenset({"TPP", "EQ", "PO"})),
            Restriction("topo", ("1", "2"), frozenset({"TPP", "EQ"})),
            Restriction("topo", ("4", "3"), frozenset({"TPP", "EQ"})),
        ]
    if size:
        aspects.append(size_aspect())
        restrictions += [
            Restriction("size", ("0", "2"), frozenset({"<"})),
            Restriction("size", ("3", "1"), frozenset({"<", "="})),
            Restriction("size", ("2", "4"), frozenset({"<", "="})),
        ]
    links = (link_topo_size(),) if topology and size else ()
    return Scenario(objects, tuple(aspects), tuple(restrictions), links)


def relation_sets(scenario: Scenario, result: CheckResult) -> dict[Key, frozenset[str]]:
    """Fixpoint domains with diagonal cells filled in with the identity."""
    out = {k: frozenset(v) for k, v in result.domains.items()}
    for aspect in scenario.aspects:
        if aspect.arity != 2:
            continue
        for t in range(scenario.steps):
            for o in scenario.objects:
                out[aspect.name, (o, o), t] = frozenset({aspect.calculus.identity})
    return out
