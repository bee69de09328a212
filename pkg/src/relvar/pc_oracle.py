"""Reference relation-constraint reasoning over binary qualitative networks.

Here the relations are constraints between object variables: a network is an
n x n matrix of relation sets, refined by path consistency or decided by
exhaustive enumeration of atomic scenarios. Both serve as independent
oracles for the relation-variable pipeline in :mod:`relvar.scenarios`.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .calculi import Calculus
from .engine import iter_bits
from .scenarios import AspectDecl, Restriction, Scenario, check, relation_sets

MAX_ENUMERATION_OBJECTS = 5


@dataclass
class BinaryNetwork:
    calculus: Calculus
    rel: list[list[int]]

    @classmethod
    def full(cls, calculus: Calculus, n: int) -> BinaryNetwork:
        ident = 1 << calculus.index(calculus.identity)
        rel = [[ident if i == j else calculus.full_mask for j in range(n)] for i in range(n)]
        return cls(calculus, rel)

    @property
    def n(self) -> int:
        return len(self.rel)

    def set(self, i: int, j: int, symbols) -> None:
        """Restrict rel[i][j] (and its converse cell) to ``symbols``."""
        mask = self.calculus.mask(symbols) if not isinstance(symbols, int) else symbols
        self.rel[i][j] &= mask
        self.rel[j][i] &= self.calculus.converse_mask(mask)

    def normalize(self) -> None:
        conv = self.calculus.converse_mask
        for i, j in itertools.combinations(range(self.n), 2):
            both = self.rel[i][j] & conv(self.rel[j][i])
            self.rel[i][j] = both
            self.rel[j][i] = conv(both)

    def copy(self) -> BinaryNetwork:
        return BinaryNetwork(self.calculus, [row[:] for row in self.rel])

    def symbols(self, i: int, j: int) -> frozenset[str]:
        return frozenset(self.calculus.symbols(self.rel[i][j]))

    def to_scenario(self, aspect: str = "topo") -> Scenario:
        objects = tuple(str(i) for i in range(self.n))
        restrictions = []
        for i, j in itertools.permutations(range(self.n), 2):
            if self.rel[i][j] != self.calculus.full_mask:
                restrictions.append(Restriction(aspect, (objects[i], objects[j]),
                                                frozenset(self.calculus.symbols(self.rel[i][j]))))
        return Scenario(objects, (AspectDecl(aspect, self.calculus),), tuple(restrictions))


def pc_enforce(net: BinaryNetwork) -> BinaryNetwork | None:
    """Path consistency by repeated sweeps over all (i, j, k) until nothing changes.

    Returns the refined copy, or None if some relation becomes empty.
    """
    out = net.copy()
    out.normalize()
    rel = out.rel
    calc = out.calculus
    n = out.n
    if any(rel[i][j] == 0 for i in range(n) for j in range(n)):
        return None
    changed = True
    while changed:
        changed = False
        for i, j, k in itertools.permutations(range(n), 3):
            refined = rel[i][k] & calc.compose_masks(rel[i][j], rel[j][k])
            if refined != rel[i][k]:
                if refined == 0:
                    return None
                rel[i][k] = refined
                rel[k][i] = calc.converse_mask(refined)
                changed = True
    return out


def enumerate_atomic(net: BinaryNetwork) -> bool:
    """Exhaustively search for an atomic refinement respecting every composition triple.

    Pairs i < j are assigned in order; a triple is checked as soon as its
    last pair is assigned.
    """
    n = net.n
    if n > MAX_ENUMERATION_OBJECTS:
        raise ValueError(f"enumeration is limited to {MAX_ENUMERATION_OBJECTS} objects, got {n}")
    calc = net.calculus
    work = net.copy()
    work.normalize()
    pairs = list(itertools.combinations(range(n), 2))
    triples_closing_at = {p: [] for p in pairs}
    for i, j, k in itertools.combinations(range(n), 3):
        triples_closing_at[(j, k)].append((i, j, k))
    comp = calc._comp_masks
    choice: dict[tuple[int, int], int] = {}

    def ok(i: int, j: int, k: int) -> bool:
        return bool(comp[choice[i, j]][choice[j, k]] >> choice[i, k] & 1)

    def assign(p: int) -> bool:
        if p == len(pairs):
            return True
        pair = pairs[p]
        for r in iter_bits(work.rel[pair[0]][pair[1]]):
            choice[pair] = r
            if all(ok(*t) for t in triples_closing_at[pair]) and assign(p + 1):
                return True
        choice.pop(pair, None)
        return False

    return assign(0)


@dataclass
class Comparison:
    equal: bool
    pc_failed: bool
    gac_failed: bool
    mismatches: list[tuple[int, int, frozenset[str], frozenset[str]]] = field(default_factory=list)


def compare_pc_gac(net: BinaryNetwork) -> Comparison:
    """Run path consistency and relation-variable propagation on the same network and diff the results."""
    pc = pc_enforce(net)
    if any(0 in row for row in net.rel):
        # an empty cell cannot be written as a restriction; the builder treats it as an empty domain
        return Comparison(pc is None, pc is None, True)
    scenario = net.to_scenario()
    result = check(scenario)
    if pc is None or result.inconsistent:
        return Comparison(pc is None and result.inconsistent, pc is None, result.inconsistent)
    sets = relation_sets(scenario, result)
    objects = scenario.objects
    mismatches = []
    for i, j in itertools.product(range(net.n), repeat=2):
        ours = pc.symbols(i, j)
        theirs = sets[("topo", (objects[i], objects[j]), 0)]
        if ours != theirs:
            mismatches.append((i, j, ours, theirs))
    return Comparison(not mismatches, False, False, mismatches)


def random_network(calculus: Calculus, n: int, rng: random.Random, p: float = 0.5) -> BinaryNetwork:
    """Each pair i < j keeps each base relation with probability p, redrawn if empty."""
    net = BinaryNetwork.full(calculus, n)
    k = len(calculus.relations)
    for i, j in itertools.combinations(range(n), 2):
        mask = 0
        while mask == 0:
            mask = sum(1 << r for r in range(k) if rng.random() < p)
        net.set(i, j, mask)
    return net


def random_instances(calculus: Calculus, count: int, min_n: int, max_n: int, seed: int,
                     p: float = 0.5) -> list[BinaryNetwork]:
    rng = random.Random(seed)
    return [random_network(calculus, rng.randint(min_n, max_n), rng, p) for _ in range(count)]
