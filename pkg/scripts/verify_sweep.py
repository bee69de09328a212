"""Sweep the PC-vs-GAC comparison over seeds and keep-probabilities.

    python3 scripts/verify_sweep.py --seeds 1 2 3 --probs 0.2 0.5 --instances 200

Prints one CSV row per (seed, p): instance count, equal reports, networks
refuted by path consistency, and the mean wall time per instance.
"""

import argparse
import csv
import sys
import time
from dataclasses import dataclass, field

from relvar.calculi import load_rcc8
from relvar.pc_oracle import compare_pc_gac, random_instances


@dataclass
class SweepConfig:
    seeds: list[int] = field(default_factory=lambda: [1, 2, 3])
    probs: list[float] = field(default_factory=lambda: [0.2, 0.35, 0.5])
    instances: int = 200
    min_n: int = 3
    max_n: int = 8


def sweep(cfg: SweepConfig):
    rcc8 = load_rcc8()
    for seed in cfg.seeds:
        for p in cfg.probs:
            nets = random_instances(rcc8, cfg.instances, cfg.min_n, cfg.max_n, seed, p)
            start = time.perf_counter()
            results = [compare_pc_gac(net) for net in nets]
            elapsed = time.perf_counter() - start
            yield {
                "seed": seed,
                "p": p,
                "instances": len(nets),
                "equal": sum(r.equal for r in results),
                "pc_inconsistent": sum(r.pc_failed for r in results),
                "ms_per_instance": round(1000 * elapsed / max(len(nets), 1), 2),
            }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    defaults = SweepConfig()
    parser.add_argument("--seeds", type=int, nargs="+", default=defaults.seeds)
    parser.add_argument("--probs", type=float, nargs="+", default=defaults.probs)
    parser.add_argument("--instances", type=int, default=defaults.instances)
    parser.add_argument("--min-n", type=int, default=defaults.min_n)
    parser.add_argument("--max-n", type=int, default=defaults.max_n)
    args = parser.parse_args()
    cfg = SweepConfig(args.seeds, args.probs, args.instances, args.min_n, args.max_n)

    writer = None
    all_equal = True
    for row in sweep(cfg):
        if writer is None:
            writer = csv.DictWriter(sys.stdout, fieldnames=list(row))
            writer.writeheader()
        writer.writerow(row)
        sys.stdout.flush()
        all_equal &= row["equal"] == row["instances"]
    return 0 if all_equal else 1


if __name__ == "__main__":
    sys.exit(main())
