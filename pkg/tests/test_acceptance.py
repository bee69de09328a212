"""Acceptance checks, one test per criterion; the terminal summary lists their verdicts."""

import itertools
import random
import time
from math import comb

import pytest

from relvar import calculi
from relvar.pc_oracle import compare_pc_gac, enumerate_atomic, random_instances
from relvar.scenarios import (Restriction, Scenario, build, check, decide, gerevini_renz, iter_atomic,
                              link_topo_size, post_object_query, size_aspect, topology_aspect)

RCC8 = calculi.load_rcc8()


@pytest.mark.criterion(1, "five-region topology+size scenario fails by propagation alone (<1 s)")
def test_gerevini_renz_by_propagation():
    start = time.perf_counter()
    combined = check(gerevini_renz())
    topology_only = check(gerevini_renz(size=False))
    size_only = check(gerevini_renz(topology=False))
    elapsed = time.perf_counter() - start
    assert combined.inconsistent
    assert not topology_only.inconsistent
    assert not size_only.inconsistent
    assert elapsed < 1.0, f"{elapsed:.3f}s"


@pytest.mark.criterion(2, "table counts 193/13/14/24/218")
def test_table_counts():
    counts = (
        len(RCC8.comp_triples()),
        len(calculi.derive_size_pa().comp_triples()),
        len(link_topo_size().tuples),
        len(calculi.derive_cyc().relations),
        len(calculi.derive_valid_direction_sets().valid_sets),
    )
    assert counts == (193, 13, 14, 24, 218)


@pytest.mark.criterion(3, "PC equals GAC on 500 random RCC-8 networks, 3-8 objects (<30 s)")
def test_pc_equals_gac():
    nets = random_instances(RCC8, 500, 3, 8, seed=1)
    start = time.perf_counter()
    results = [compare_pc_gac(net) for net in nets]
    elapsed = time.perf_counter() - start
    failures = [i for i, r in enumerate(results) if not r.equal]
    assert {net.n for net in nets} == set(range(3, 9))
    assert sum(r.equal for r in results) == 500, f"unequal instances {failures[:10]}"
    assert elapsed < 30.0, f"{elapsed:.1f}s"


@pytest.mark.criterion(4, "decide agrees with exhaustive enumeration on 200 networks of at most 4 objects")
def test_decide_matches_enumeration():
    nets = random_instances(RCC8, 200, 3, 4, seed=2)
    agree = sum(decide(net.to_scenario()).consistent == enumerate_atomic(net) for net in nets)
    assert all(net.n <= 4 for net in nets)
    assert agree == 200


def _fixpoint(net, rng=None):
    store = net.store
    if not store.propagate(rng):
        return None
    return {key: store.bits(var) for key, var in net.rel_vars.items()}


@pytest.mark.criterion(5, "fixpoints identical under 20 shuffled propagation orders on 50 instances")
def test_confluence():
    nets = random_instances(RCC8, 25, 3, 7, seed=5) + random_instances(RCC8, 25, 3, 7, seed=6, p=0.25)
    topo_size = Scenario(tuple("abcd"), (topology_aspect(), size_aspect()),
                         (Restriction("topo", ("a", "b"), frozenset({"TPP", "EC"})),
                          Restriction("size", ("b", "c"), frozenset({"<"}))), (link_topo_size(),))
    scenarios = [n.to_scenario() for n in nets[:-1]] + [topo_size]
    identical = 0
    verdicts = set()
    for index, scenario in enumerate(scenarios):
        reference = _fixpoint(build(scenario))
        verdicts.add(reference is None)
        for shuffle in range(20):
            identical += _fixpoint(build(scenario), random.Random(index * 100 + shuffle)) == reference
    assert len(scenarios) == 50
    assert verdicts == {True, False}
    assert identical == 1000


@pytest.mark.criterion(6, "calculus axioms, Cyc rotation cubed, 1000-sample Cyc soundness")
def test_calculus_axioms():
    for calc in (RCC8, calculi.derive_size_pa(), calculi.derive_point_cd()):
        assert calculi.validate_calculus(calc) == [], calc.name
    cyc = calculi.derive_cyc()
    assert calculi.validate_ternary(cyc) == []
    rot = cyc.rotation
    assert all(rot[rot[rot[r]]] == r for r in cyc.relations)
    assert calculi.cyc_geometric_soundness(cyc, samples=1000, seed=0) == []


@pytest.mark.criterion(7, "exactly C(n,2) conv and C(n,3) comp constraints per binary aspect, n=3..20")
def test_constraint_scaling():
    for n in range(3, 21):
        net = build(Scenario(tuple(f"r{i}" for i in range(n)), (topology_aspect(), size_aspect())))
        for aspect in ("topo", "size"):
            assert net.count("conv", aspect) == comb(n, 2), (n, aspect)
            assert net.count("comp", aspect) == comb(n, 3), (n, aspect)
        assert net.store.num_constraints == 2 * (comb(n, 2) + comb(n, 3))


def _four_regions():
    topo = {("a", "d"): "NTPP", ("b", "d"): "TPP", ("c", "d"): "EC",
            ("a", "c"): "DC", ("b", "c"): "EC", ("a", "b"): "DC"}
    size = {("a", "b"): "=", ("a", "c"): "=", ("b", "c"): "=",
            ("a", "d"): "<", ("b", "d"): "<", ("c", "d"): "<"}
    restrictions = [Restriction("topo", k, frozenset({v})) for k, v in topo.items()]
    restrictions += [Restriction("size", k, frozenset({v})) for k, v in size.items()]
    return Scenario(tuple("abcd"), (topology_aspect(), size_aspect()), tuple(restrictions), (link_topo_size(),))


@pytest.mark.criterion(8, "two-object query returns the unique qualifying pair")
def test_object_query():
    scenario = _four_regions()
    atomic = list(iter_atomic(scenario))
    assert len(atomic) == 1

    # oracle: scan every ordered pair of the solved relation arrays
    rels = atomic[0]
    identity = {"topo": "EQ", "size": "="}
    def rel(aspect, x, y):
        return identity[aspect] if x == y else rels[aspect, (x, y), 0]
    expected = [(x, y) for x, y in itertools.product(scenario.objects, repeat=2)
                if rel("size", x, y) == "<" and rel("topo", x, y) in {"DC", "EC"}]
    assert expected == [("c", "d")]

    net = build(scenario)
    post_object_query(net, ["x1", "x2"], [("size", ("x1", "x2"), ["<"]),
                                          ("topo", ("x1", "x2"), ["DC", "EC"])])
    answers = [(s["x1"], s["x2"]) for s in net.solutions()]
    assert answers == expected
