"""Train/test splitting, representative selection, and buy-and-hold backtests."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DataError
from .market import PriceTable, ReturnsMatrix
from .partition import ClusterLabels

TRADING_DAYS_PER_YEAR = 252


@dataclass(frozen=True)
class SplitSpec:
    """Chronological split: the first ceil(train_fraction * T) dates train."""

    train_fraction: float = 0.8

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ContractError(
                f"train fraction must be in (0, 1), got {self.train_fraction}"
            )


@dataclass(frozen=True)
class Portfolio:
    """One representative asset per cluster with normalized weights."""

    representatives: tuple[int, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "representatives", tuple(int(r) for r in self.representatives))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.representatives) != len(self.weights):
            raise ContractError("one weight per representative required")
        if len(set(self.representatives)) != len(self.representatives):
            raise ContractError("duplicate representative assets")
        if any(w < 0 for w in self.weights):
            raise ContractError("weights must be nonnegative")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise ContractError(f"weights sum to {sum(self.weights)}, not 1")

    @classmethod
    def equal_weight(cls, representatives) -> "Portfolio":
        reps = tuple(representatives)
        return cls(reps, tuple(1.0 / len(reps) for _ in reps))


@dataclass(frozen=True)
class BacktestResult:
    """Value path of a fixed initial investment plus realized statistics."""

    dates: tuple[str, ...]
    values: np.ndarray = field(repr=False)
    returns: np.ndarray = field(repr=False)  # daily, length len(dates) - 1
    initial: float = 1000.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        returns = np.asarray(self.returns, dtype=float)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "returns", returns)
        object.__setattr__(self, "dates", tuple(self.dates))
        if values.shape != (len(self.dates),):
            raise DataError("value series must align with dates")
        if returns.shape != (max(len(self.dates) - 1, 0),):
            raise DataError("need exactly one return per consecutive date pair")
        if np.any(values <= 0):
            raise DataError("portfolio value series must stay positive")

    @property
    def terminal_value(self) -> float:
        return float(self.values[-1])

    @property
    def mean_daily_return(self) -> float:
        return float(self.returns.mean())

    @property
    def volatility(self) -> float:
        """Sample standard deviation of daily returns."""
        return float(self.returns.std(ddof=1)) if self.returns.size >= 2 else 0.0

    @property
    def sharpe(self) -> float | None:
        """Annualized Sharpe at zero risk-free rate; None when volatility is 0."""
        if self.returns.size < 2 or self.volatility == 0:
            return None
        return sharpe_ratio(self)


def split_train_test(prices: PriceTable, spec: SplitSpec = SplitSpec()) -> tuple[PriceTable, PriceTable]:
    """Split the date axis into contiguous train and test windows."""
    total = prices.n_dates
    if total < 5:
        raise DataError(f"need at least five dates to split, got {total}")
    n_train = math.ceil(spec.train_fraction * total)
    if n_train == 0 or n_train == total:
        raise DataError(f"split leaves an empty window ({n_train}/{total - n_train})")
    train = PriceTable(prices.dates[:n_train], prices.assets, prices.close[:n_train])
    test = PriceTable(prices.dates[n_train:], prices.assets, prices.close[n_train:])
    return train, test


def select_representatives(labels: ClusterLabels, train_returns: ReturnsMatrix) -> Portfolio:
    """Pick the highest-mean-return member of each cluster, equal-weighted.

    Ties break toward the lowest asset index.
    """
    means = train_returns.mean_daily()
    reps = []
    for label in range(labels.n_clusters):
        members = labels.members(label)
        if not members:
            raise ContractError(f"cluster {label} is empty")
        reps.append(max(members, key=lambda a: (means[a], -a)))
    return Portfolio.equal_weight(reps)


def backtest(prices_window: PriceTable, portfolio: Portfolio, initial: float = 1000.0) -> BacktestResult:
    """Buy-and-hold: allocate at the window's first close, hold to the end."""
    if initial <= 0:
        raise ContractError(f"initial investment must be positive, got {initial}")
    for r in portfolio.representatives:
        if not 0 <= r < prices_window.n_assets:
            raise DataError(f"representative asset {r} missing from the price window")
    reps = np.array(portfolio.representatives, dtype=int)
    weights = np.array(portfolio.weights)
    prices = prices_window.close[:, reps]
    shares = initial * weights / prices[0]
    values = prices @ shares
    returns = values[1:] / values[:-1] - 1.0
    return BacktestResult(dates=prices_window.dates, values=values, returns=returns, initial=initial)


def baseline_backtest(prices_window: PriceTable, initial: float = 1000.0) -> BacktestResult:
    """Equal-weight buy-and-hold over every asset in the window."""
    all_assets = Portfolio.equal_weight(range(prices_window.n_assets))
    return backtest(prices_window, all_assets, initial)


def sharpe_ratio(result: BacktestResult, risk_free_daily: float = 0.0, annualize: bool = True) -> float:
    """(mean daily return - risk-free) / daily volatility, annualized by sqrt(252)."""
    if result.returns.size < 2:
        raise DataError("need at least two daily returns for a Sharpe ratio")
    sigma = result.volatility
    if sigma == 0:
        raise DataError("Sharpe undefined: zero return volatility")
    value = (result.mean_daily_return - risk_free_daily) / sigma
    return value * math.sqrt(TRADING_DAYS_PER_YEAR) if annualize else value


def backtest_to_csv(result: BacktestResult, path) -> None:
    """CSV columns (date, value, return); the first row has no return."""
    with open(path, "w") as fh:
        fh.write("date,value,return\n")
        for t, (date, value) in enumerate(zip(result.dates, result.values)):
            ret = "" if t == 0 else f"{result.returns[t - 1]:.12g}"
            fh.write(f"{date},{value:.12g},{ret}\n")


def backtest_summary(result: BacktestResult) -> dict:
    return {
        "initial": result.initial,
        "terminal": result.terminal_value,
        "mean_daily_return": result.mean_daily_return,
        "sigma_daily": result.volatility,
        "sharpe_annualized": result.sharpe,
    }


def write_backtest_summary(result: BacktestResult, path) -> None:
    with open(path, "w") as fh:
        json.dump(backtest_summary(result), fh, indent=2, sort_keys=True)

