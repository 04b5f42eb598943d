import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paulicut.errors import ContractError, DataError
from paulicut.market import PriceTable, ReturnsMatrix, compute_returns, load_prices
from paulicut.partition import ClusterLabels
from paulicut.portfolio import (
    BacktestResult,
    Portfolio,
    SplitSpec,
    backtest,
    backtest_to_csv,
    baseline_backtest,
    select_representatives,
    sharpe_ratio,
    split_train_test,
)


def price_table(matrix, start_day=1):
    matrix = np.asarray(matrix, dtype=float)
    dates = tuple(f"2021-02-{start_day + d:02d}" for d in range(matrix.shape[0]))
    assets = tuple(f"A{j}" for j in range(matrix.shape[1]))
    return PriceTable(dates, assets, matrix)


class TestSplit:
    def test_ten_dates_default(self):
        prices = price_table(np.linspace(10, 20, 10).reshape(10, 1))
        train, test = split_train_test(prices)
        assert train.n_dates == 8 and test.n_dates == 2

    def test_five_dates_ceiling(self):
        prices = price_table(np.linspace(10, 20, 5).reshape(5, 1))
        train, test = split_train_test(prices)
        assert train.n_dates == 4 and test.n_dates == 1

    def test_chronology(self):
        prices = price_table(np.linspace(10, 20, 12).reshape(12, 1))
        train, test = split_train_test(prices, SplitSpec(0.6))
        assert max(train.dates) < min(test.dates)
        assert train.dates + test.dates == prices.dates

    def test_too_few_dates(self):
        prices = price_table(np.ones((4, 1)) * 5)
        with pytest.raises(DataError):
            split_train_test(prices)

    def test_bad_fraction(self):
        with pytest.raises(ContractError):
            SplitSpec(1.0)


def returns_with_means(means, periods=40):
    rng = np.random.default_rng(0)
    noise = rng.standard_normal((periods, len(means))) * 1e-4
    values = np.asarray(means) + noise - noise.mean(axis=0)
    dates = tuple(f"2021-03-{d + 1:02d}" for d in range(periods))
    return ReturnsMatrix(dates, tuple(f"A{j}" for j in range(len(means))), values)


class TestRepresentatives:
    def test_argmax_by_mean_return(self):
        labels = ClusterLabels({0: 0, 1: 0, 2: 1})
        returns = returns_with_means([0.001, 0.002, 0.005])
        folio = select_representatives(labels, returns)
        assert folio.representatives == (1, 2)
        assert folio.weights == (0.5, 0.5)

    def test_singleton_cluster(self):
        labels = ClusterLabels({0: 0, 1: 1})
        returns = returns_with_means([0.001, -0.004])
        folio = select_representatives(labels, returns)
        assert folio.representatives == (0, 1)

    def test_tie_breaks_to_lowest_index(self):
        labels = ClusterLabels({0: 0, 1: 0, 2: 0})
        values = np.zeros((10, 3))
        values[0] = (0.004, 0.004, 0.001)
        returns = ReturnsMatrix(
            tuple(f"2021-04-{d + 1:02d}" for d in range(10)), ("A0", "A1", "A2"), values
        )
        folio = select_representatives(labels, returns)
        assert folio.representatives == (0,)

    def test_no_member_beats_representative(self):
        rng = np.random.default_rng(12)
        means = rng.uniform(-0.002, 0.004, 12)
        labels = ClusterLabels({a: a % 4 for a in range(12)})
        returns = returns_with_means(means)
        folio = select_representatives(labels, returns)
        actual_means = returns.mean_daily()
        for label, rep in enumerate(folio.representatives):
            for member in labels.members(label):
                assert actual_means[member] <= actual_means[rep] + 1e-15


class TestBacktest:
    def test_single_asset_growth(self):
        prices = price_table([[100.0], [110.0]])
        result = backtest(prices, Portfolio.equal_weight([0]), initial=1000.0)
        assert result.terminal_value == pytest.approx(1100.0)

    def test_offsetting_moves_cancel(self):
        prices = price_table([[100.0, 200.0], [110.0, 180.0]])
        result = backtest(prices, Portfolio.equal_weight([0, 1]), initial=1000.0)
        assert result.terminal_value == pytest.approx(1000.0)

    def test_closed_form_terminal(self):
        rng = np.random.default_rng(3)
        prices = price_table(rng.uniform(50, 150, (30, 3)))
        weights = (0.5, 0.25, 0.25)
        folio = Portfolio((0, 1, 2), weights)
        result = backtest(prices, folio, initial=1000.0)
        expected = 1000.0 * sum(
            w * prices.close[-1, a] / prices.close[0, a] for a, w in zip((0, 1, 2), weights)
        )
        assert result.terminal_value == pytest.approx(expected, abs=1e-9)

    def test_multiplicative_recurrence(self):
        rng = np.random.default_rng(4)
        prices = price_table(rng.uniform(20, 80, (50, 4)))
        result = backtest(prices, Portfolio.equal_weight([0, 1, 2, 3]))
        reconstructed = result.values[0] * np.cumprod(1 + result.returns)
        np.testing.assert_allclose(reconstructed, result.values[1:], atol=1e-9)
        assert np.all(result.values > 0)

    def test_missing_representative(self):
        prices = price_table([[100.0], [101.0]])
        with pytest.raises(DataError):
            backtest(prices, Portfolio.equal_weight([3]))

    def test_baseline_single_asset_equivalence(self):
        prices = price_table([[100.0], [104.0], [99.0]])
        direct = backtest(prices, Portfolio.equal_weight([0]))
        base = baseline_backtest(prices)
        np.testing.assert_allclose(base.values, direct.values)

    def test_baseline_identical_paths_equal_single(self):
        path = np.array([[100.0], [103.0], [108.0], [102.0]])
        prices = price_table(np.repeat(path, 4, axis=1))
        base = baseline_backtest(prices)
        single = backtest(prices, Portfolio.equal_weight([2]))
        np.testing.assert_allclose(base.values, single.values, atol=1e-9)

    def test_csv_export(self, tmp_path):
        prices = price_table([[100.0], [110.0], [99.0]])
        result = backtest(prices, Portfolio.equal_weight([0]))
        path = tmp_path / "bt.csv"
        backtest_to_csv(result, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "date,value,return"
        assert len(lines) == 4
        assert lines[1].endswith(",")  # no return on the first date


def synthetic_result(returns, initial=1000.0):
    returns = np.asarray(returns, dtype=float)
    values = initial * np.concatenate([[1.0], np.cumprod(1 + returns)])
    dates = tuple(f"2021-05-{d + 1:02d}" for d in range(values.size))
    return BacktestResult(dates=dates, values=values, returns=returns, initial=initial)


class TestSharpe:
    def test_zero_volatility_is_an_error(self):
        result = synthetic_result([0.01, 0.01, 0.01])
        with pytest.raises(DataError, match="Sharpe undefined"):
            sharpe_ratio(result)

    def test_plain_ratio(self):
        rng = np.random.default_rng(8)
        returns = rng.normal(0.001, 0.01, 300)
        result = synthetic_result(returns)
        expected = returns.mean() / returns.std(ddof=1)
        assert sharpe_ratio(result, annualize=False) == pytest.approx(expected, abs=1e-12)
        assert sharpe_ratio(result) == pytest.approx(expected * math.sqrt(252), abs=1e-9)

    def test_point_one_arithmetic(self):
        # two points a +/- d have mean a and sample std d * sqrt(2)
        d = 0.01 / math.sqrt(2)
        result = synthetic_result([0.001 - d, 0.001 + d])
        assert result.mean_daily_return == pytest.approx(0.001, abs=1e-15)
        assert result.volatility == pytest.approx(0.01, abs=1e-15)
        assert sharpe_ratio(result, annualize=False) == pytest.approx(0.1, abs=1e-12)

    def test_scaling_invariance(self):
        rng = np.random.default_rng(9)
        returns = rng.normal(0.0005, 0.005, 100)
        a = sharpe_ratio(synthetic_result(returns), annualize=False)
        b = sharpe_ratio(synthetic_result(2 * returns), annualize=False)
        assert a == pytest.approx(b, abs=1e-9)

    def test_risk_free_subtraction(self):
        returns = np.array([0.02, 0.0, 0.01, -0.01, 0.03])
        result = synthetic_result(returns)
        rf = 0.005
        expected = (returns.mean() - rf) / returns.std(ddof=1)
        assert sharpe_ratio(result, risk_free_daily=rf, annualize=False) == pytest.approx(expected)

    @given(shift=st.floats(-0.005, 0.005), seed=st.integers(0, 100))
    @settings(max_examples=25, deadline=None)
    def test_shift_moves_mean_not_sigma(self, shift, seed):
        rng = np.random.default_rng(seed)
        returns = rng.normal(0.001, 0.01, 60)
        base = synthetic_result(returns)
        shifted = synthetic_result(returns + shift)
        assert shifted.mean_daily_return == pytest.approx(base.mean_daily_return + shift, abs=1e-12)
        assert shifted.volatility == pytest.approx(base.volatility, abs=1e-12)

    def test_too_few_returns(self):
        result = synthetic_result([0.01])
        with pytest.raises(DataError):
            sharpe_ratio(result)


class TestPipelineOnSample:
    def test_sample_round_trip(self, sample_csv):
        prices = load_prices(sample_csv, 12)
        train, test = split_train_test(prices)
        returns = compute_returns(train)
        labels = ClusterLabels({a: a % 3 for a in range(12)})
        folio = select_representatives(labels, returns)
        result = backtest(test, folio)
        assert result.terminal_value > 0
        assert result.values.size == test.n_dates
