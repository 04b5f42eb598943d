#!/usr/bin/env python3
"""Regenerate the bundled synthetic price fixture.

Forty assets over three years of trading days, driven by one market factor
plus five sector factors so the correlation graph has block structure. The
first ten assets concentrate in two sectors, which keeps the 10-asset
subgraph dense. Output is the long-form CSV the loader expects.
"""
import argparse
import string
from pathlib import Path

import numpy as np
import pandas as pd

N_ASSETS = 40
N_SECTORS = 5
N_DAYS = 756
SEED = 20240811


def make_tickers(rng, count):
    tickers = []
    seen = set()
    while len(tickers) < count:
        t = "".join(rng.choice(list(string.ascii_uppercase), size=4))
        if t not in seen:
            seen.add(t)
            tickers.append(t)
    return tickers


def simulate(seed=SEED):
    rng = np.random.default_rng(seed)
    dates = pd.bdate_range("2019-01-02", periods=N_DAYS)
    # two sectors dominate the first ten columns
    sectors = np.array([0] * 6 + [1] * 4 + [rng.integers(0, N_SECTORS) for _ in range(N_ASSETS - 10)])
    beta_market = rng.uniform(0.6, 1.1, N_ASSETS)
    # large caps up front: strong market exposure keeps the m=10 subgraph dense
    beta_market[:10] = rng.uniform(1.0, 1.4, 10)
    beta_sector = rng.uniform(0.9, 1.5, N_ASSETS)
    drift = rng.uniform(-2e-4, 9e-4, N_ASSETS)
    idio_scale = rng.uniform(0.008, 0.013, N_ASSETS)
    idio_scale[:10] = rng.uniform(0.006, 0.009, 10)

    market_shock = rng.normal(1e-4, 0.0085, N_DAYS)
    sector_shock = rng.normal(0.0, 0.009, (N_DAYS, N_SECTORS))
    idio = rng.normal(0.0, 1.0, (N_DAYS, N_ASSETS)) * idio_scale

    returns = (
        drift
        + np.outer(market_shock, beta_market)
        + sector_shock[:, sectors] * beta_sector
        + idio
    )
    start = rng.uniform(25, 240, N_ASSETS)
    prices = start * np.cumprod(1.0 + returns, axis=0)
    tickers = make_tickers(rng, N_ASSETS)
    return dates, tickers, prices


def to_long_frame(dates, tickers, prices):
    rows = []
    for a, name in enumerate(tickers):
        for t, date in enumerate(dates):
            rows.append((date.strftime("%Y-%m-%d"), round(prices[t, a], 4), name))
    return pd.DataFrame(rows, columns=["date", "close", "name"])


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out",
        default=Path(__file__).resolve().parents[1] / "src/paulicut/data/sample_prices.csv",
        type=Path,
    )
    parser.add_argument("--seed", type=int, default=SEED)
    args = parser.parse_args()

    dates, tickers, prices = simulate(args.seed)
    frame = to_long_frame(dates, tickers, prices)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(args.out, index=False)
    print(f"wrote {args.out}: {len(tickers)} assets x {len(dates)} days")


if __name__ == "__main__":
    main()
