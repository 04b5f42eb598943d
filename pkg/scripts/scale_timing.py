#!/usr/bin/env python3
"""Time single bipartitions across problem sizes.

For each size, builds a seeded random weighted graph with market-like
density, runs one variational bipartition (and the EDA baseline for
comparison), and prints a CSV of wall times. The largest sizes take a few
minutes each; the full default sweep stays well under an hour.
"""
import argparse
import sys
import time

import numpy as np

from paulicut.market import MarketGraph
from paulicut.optimize import umda_maxcut
from paulicut.partition import cut_value
from paulicut.pce import PceConfig, bipartition_pce

DEFAULT_SIZES = (10, 20, 30, 50, 100, 150, 200, 250)


def market_like_graph(m: int, density: float, seed: int) -> MarketGraph:
    rng = np.random.default_rng(seed)
    pairs, weights = [], []
    for i in range(m):
        for j in range(i + 1, m):
            if rng.random() < density:
                pairs.append((i, j))
                weights.append(1.0 - rng.uniform(0.36, 0.95))
    return MarketGraph(
        vertices=tuple(range(m)),
        edge_index=np.array(pairs, dtype=np.int64),
        weights=np.array(weights),
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default=",".join(map(str, DEFAULT_SIZES)))
    parser.add_argument("--k", type=int, default=3)
    parser.add_argument("--budget", type=int, default=1000)
    parser.add_argument("--density", type=float, default=0.66)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    print("m,edges,pce_wall_s,pce_cut,eda_wall_s,eda_cut")
    for m in sizes:
        g = market_like_graph(m, args.density, args.seed + m)
        cfg = PceConfig(k=args.k, max_evals=args.budget, restarts=1, seed=args.seed)
        _, _, diag = bipartition_pce(g, cfg)
        t0 = time.perf_counter()
        eda_bits = umda_maxcut(g, generations=100, seed=args.seed)
        eda_wall = time.perf_counter() - t0
        eda_cut = cut_value(g, eda_bits)
        print(
            f"{m},{g.n_edges},{diag['wall_time_s']:.2f},{diag['cut_value']:.3f},"
            f"{eda_wall:.2f},{eda_cut:.3f}"
        )
        sys.stdout.flush()


if __name__ == "__main__":
    main()
