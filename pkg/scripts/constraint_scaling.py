"""Constraint counts and propagation time as the number of regions grows.

Builds an unrestricted topology+size network for each n and one random
RCC-8 network, reporting conv/comp/link counts next to C(n,2) and C(n,3)
and the time for one propagation to fixpoint.
"""

import argparse
import random
import sys
import time
from dataclasses import dataclass
from math import comb

from relvar.calculi import load_rcc8
from relvar.pc_oracle import random_network
from relvar.scenarios import Scenario, build, link_topo_size, size_aspect, topology_aspect


@dataclass
class ScalingConfig:
    min_n: int = 3
    max_n: int = 20
    step: int = 1
    p: float = 0.5
    seed: int = 0


def measure(cfg: ScalingConfig):
    rcc8 = load_rcc8()
    rng = random.Random(cfg.seed)
    for n in range(cfg.min_n, cfg.max_n + 1, cfg.step):
        objects = tuple(f"r{i}" for i in range(n))
        start = time.perf_counter()
        net = build(Scenario(objects, (topology_aspect(), size_aspect()), links=(link_topo_size(),)))
        build_s = time.perf_counter() - start

        random_net = build(random_network(rcc8, n, rng, cfg.p).to_scenario())
        start = time.perf_counter()
        consistent = random_net.store.propagate()
        propagate_s = time.perf_counter() - start
        yield {
            "n": n,
            "conv": net.count("conv", "topo"),
            "C(n,2)": comb(n, 2),
            "comp": net.count("comp", "topo"),
            "C(n,3)": comb(n, 3),
            "link": net.count("link"),
            "build_ms": round(1000 * build_s, 1),
            "propagate_ms": round(1000 * propagate_s, 1),
            "fixpoint": consistent,
        }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    d = ScalingConfig()
    parser.add_argument("--min-n", type=int, default=d.min_n)
    parser.add_argument("--max-n", type=int, default=d.max_n)
    parser.add_argument("--step", type=int, default=d.step)
    parser.add_argument("--p", type=float, default=d.p)
    parser.add_argument("--seed", type=int, default=d.seed)
    args = parser.parse_args()
    cfg = ScalingConfig(args.min_n, args.max_n, args.step, args.p, args.seed)

    rows = list(measure(cfg))
    header = list(rows[0]) if rows else []
    print("\t".join(header))
    for row in rows:
        print("\t".join(str(row[k]) for k in header))
    exact = all(r["conv"] == r["C(n,2)"] and r["comp"] == r["C(n,3)"] for r in rows)
    return 0 if exact else 1


if __name__ == "__main__":
    sys.exit(main())
