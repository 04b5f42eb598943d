"""Price ingestion, return/correlation estimation, and market-graph construction.

A market graph connects two assets when the absolute Pearson correlation of
their daily returns exceeds a threshold; the edge weight is one minus that
absolute correlation, so strongly co-moving assets are *cheap* to keep on the
same side of a cut.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import networkx as nx
import numpy as np
import pandas as pd

from .errors import ContractError, DataError

DEFAULT_THRESHOLD = 0.35
MIN_DATE_COVERAGE = 0.95


@dataclass(frozen=True)
class PriceTable:
    """Wide table of daily close prices: rows are dates, columns are assets."""

    dates: tuple[str, ...]
    assets: tuple[str, ...]
    close: np.ndarray = field(repr=False)  # shape (n_dates, n_assets)

    def __post_init__(self):
        close = np.asarray(self.close, dtype=float)
        object.__setattr__(self, "close", close)
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "assets", tuple(self.assets))
        if close.shape != (len(self.dates), len(self.assets)):
            raise DataError(
                f"close matrix {close.shape} does not match "
                f"{len(self.dates)} dates x {len(self.assets)} assets"
            )
        if any(a >= b for a, b in zip(self.dates, self.dates[1:])):
            raise DataError("dates must be strictly increasing")
        if not np.all(np.isfinite(close)):
            raise DataError("close prices contain gaps after cleaning")
        if np.any(close <= 0):
            raise DataError("close prices must be positive")

    @property
    def n_dates(self) -> int:
        return len(self.dates)

    @property
    def n_assets(self) -> int:
        return len(self.assets)


@dataclass(frozen=True)
class ReturnsMatrix:
    """Simple daily returns r_t = P_t / P_{t-1} - 1, one row per return date."""

    dates: tuple[str, ...]
    assets: tuple[str, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "assets", tuple(self.assets))
        if values.shape != (len(self.dates), len(self.assets)):
            raise DataError("returns matrix shape mismatch")

    def mean_daily(self) -> np.ndarray:
        return self.values.mean(axis=0)


@dataclass(frozen=True)
class MarketGraph:
    """Weighted undirected graph over assets.

    ``vertices`` are asset labels (indices into the originating price table);
    ``edge_index`` holds positional pairs (i < j) into ``vertices``.
    """

    vertices: tuple[int, ...]
    edge_index: np.ndarray = field(repr=False)  # shape (E, 2), positional
    weights: np.ndarray = field(repr=False)  # shape (E,)
    threshold: float | None = None

    def __post_init__(self):
        vertices = tuple(int(v) for v in self.vertices)
        edge_index = np.asarray(self.edge_index, dtype=np.int64).reshape(-1, 2)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edge_index", edge_index)
        object.__setattr__(self, "weights", weights)
        if edge_index.shape[0] != weights.shape[0]:
            raise ContractError("edge index and weights disagree on edge count")
        m = len(vertices)
        if edge_index.size:
            if edge_index.min() < 0 or edge_index.max() >= m:
                raise ContractError("edge endpoint out of range")
            if np.any(edge_index[:, 0] >= edge_index[:, 1]):
                raise ContractError("edges must satisfy i < j with no self-loops")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return int(self.weights.size)

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        """Positional (i, j, w) triples with i < j."""
        return [
            (int(i), int(j), float(w))
            for (i, j), w in zip(self.edge_index, self.weights)
        ]

    def subgraph(self, labels) -> "MarketGraph":
        """Induced subgraph on the given vertex labels (weights inherited)."""
        wanted = set(labels)
        keep = [v for v in self.vertices if v in wanted]
        if len(keep) != len(wanted):
            raise ContractError("subgraph labels must be vertices of this graph")
        pos = {v: k for k, v in enumerate(self.vertices)}
        local = {pos[v]: k for k, v in enumerate(keep)}
        rows = []
        w = []
        for (i, j), wij in zip(self.edge_index, self.weights):
            if int(i) in local and int(j) in local:
                a, b = local[int(i)], local[int(j)]
                rows.append((min(a, b), max(a, b)))
                w.append(wij)
        return MarketGraph(
            vertices=tuple(keep),
            edge_index=np.array(rows, dtype=np.int64).reshape(-1, 2),
            weights=np.array(w, dtype=float),
            threshold=self.threshold,
        )


def _first_bad_line(series: pd.Series, parsed: pd.Series) -> int:
    bad = parsed.isna() & series.notna()
    # +2: one for the header row, one for 1-based line numbers
    return int(bad.idxmax()) + 2


def load_prices(path, m: int) -> PriceTable:
    """Load a CSV of close prices and keep the first ``m`` clean assets.

    Accepts long form (columns ``date``, ``close``, ``name``; extra columns
    ignored) or wide form (a date column followed by one column per symbol).
    Assets covering fewer than 95% of dates are dropped; remaining gaps are
    forward- then back-filled. Asset order follows the file.
    """
    if m < 1:
        raise ContractError(f"asset count must be positive, got {m}")
    try:
        raw = pd.read_csv(path)
    except pd.errors.ParserError as exc:
        raise DataError(f"unparsable CSV {path}: {exc}") from exc
    raw.columns = [str(c).strip().lower() for c in raw.columns]
    if raw.empty:
        raise DataError(f"{path} holds no rows")

    if {"date", "close", "name"}.issubset(raw.columns):
        close = pd.to_numeric(raw["close"], errors="coerce")
        if close.isna().any() and raw["close"].notna().any():
            bad = close.isna() & raw["close"].notna()
            if bad.any():
                raise DataError(
                    f"unparsable close value at line {_first_bad_line(raw['close'], close)}"
                )
        dates = pd.to_datetime(raw["date"], errors="coerce")
        if dates.isna().any():
            raise DataError(
                f"unparsable date at line {_first_bad_line(raw['date'], dates)}"
            )
        frame = pd.DataFrame({"date": dates, "name": raw["name"].astype(str), "close": close})
        symbol_order = list(frame["name"].drop_duplicates())
        wide = frame.pivot_table(index="date", columns="name", values="close", aggfunc="first")
        wide = wide.reindex(columns=symbol_order)
    else:
        date_col = "date" if "date" in raw.columns else raw.columns[0]
        dates = pd.to_datetime(raw[date_col], errors="coerce")
        if dates.isna().any():
            raise DataError(
                f"unparsable date at line {_first_bad_line(raw[date_col], dates)}"
            )
        symbol_order = [c for c in raw.columns if c != date_col]
        wide = raw[symbol_order].copy()
        for col in symbol_order:
            parsed = pd.to_numeric(wide[col], errors="coerce")
            bad = parsed.isna() & wide[col].notna()
            if bad.any():
                raise DataError(
                    f"unparsable close value at line {_first_bad_line(wide[col], parsed)}"
                )
            wide[col] = parsed
        wide.index = dates
        wide = wide[~wide.index.duplicated(keep="first")]

    wide = wide.sort_index()
    coverage = wide.notna().mean()
    survivors = [c for c in wide.columns if coverage[c] >= MIN_DATE_COVERAGE]
    if len(survivors) < m:
        raise DataError(
            f"only {len(survivors)} assets survive the coverage filter, need {m}"
        )
    kept = survivors[:m]
    table = wide[kept].ffill().bfill()
    return PriceTable(
        dates=tuple(d.strftime("%Y-%m-%d") for d in table.index),
        assets=tuple(str(c) for c in kept),
        close=table.to_numpy(dtype=float),
    )


def compute_returns(prices: PriceTable) -> ReturnsMatrix:
    """Simple daily returns; one fewer row than the price table."""
    if prices.n_dates < 2:
        raise DataError("need at least two dates to compute returns")
    values = prices.close[1:] / prices.close[:-1] - 1.0
    return ReturnsMatrix(dates=prices.dates[1:], assets=prices.assets, values=values)


def pearson_matrix(returns: ReturnsMatrix) -> np.ndarray:
    """Sample Pearson correlation matrix of the return columns."""
    values = returns.values
    if values.shape[0] < 3:
        raise DataError("need at least three return observations")
    stds = values.std(axis=0, ddof=1)
    flat = np.flatnonzero(stds == 0)
    if flat.size:
        raise DataError(f"asset {returns.assets[flat[0]]} has zero return variance")
    rho = np.corrcoef(values, rowvar=False)
    rho = np.atleast_2d(rho)
    if np.max(np.abs(rho)) > 1 + 1e-12:
        raise AssertionError("correlation magnitude exceeded 1 beyond tolerance")
    rho = np.clip(rho, -1.0, 1.0)
    np.fill_diagonal(rho, 1.0)
    return rho


def covariance_matrix(returns: ReturnsMatrix) -> np.ndarray:
    """Sample covariance matrix (n-1 normalization) of the return columns."""
    if returns.values.shape[0] < 2:
        raise DataError("need at least two return observations")
    return np.atleast_2d(np.cov(returns.values, rowvar=False, ddof=1))


def build_graph(rho: np.ndarray, threshold: float = DEFAULT_THRESHOLD) -> MarketGraph:
    """Market graph: edge (i, j) with weight 1 - |rho_ij| iff |rho_ij| > threshold."""
    rho = np.asarray(rho, dtype=float)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ContractError(f"correlation matrix must be square, got {rho.shape}")
    if not 0 <= threshold < 1:
        raise ContractError(f"threshold must lie in [0, 1), got {threshold}")
    m = rho.shape[0]
    pairs = []
    weights = []
    for i in range(m):
        for j in range(i + 1, m):
            strength = abs(rho[i, j])
            w = 1.0 - strength
            # perfectly correlated pairs carry zero cut weight; skip them
            if strength > threshold and w > 0:
                pairs.append((i, j))
                weights.append(w)
    return MarketGraph(
        vertices=tuple(range(m)),
        edge_index=np.array(pairs, dtype=np.int64).reshape(-1, 2),
        weights=np.array(weights, dtype=float),
        threshold=threshold,
    )


@dataclass(frozen=True)
class GraphStats:
    nodes: int
    edges: int
    density: float
    average_degree: float
    clustering: float

    def as_dict(self) -> dict:
        return {
            "nodes": self.nodes,
            "edges": self.edges,
            "density": self.density,
            "average_degree": self.average_degree,
            "clustering": self.clustering,
        }


def graph_stats(g: MarketGraph) -> GraphStats:
    """Structural summary: density, average degree, mean local clustering."""
    m, e = g.n_vertices, g.n_edges
    density = 2 * e / (m * (m - 1)) if m > 1 else 0.0
    avg_degree = 2 * e / m if m > 0 else 0.0
    nxg = nx.Graph()
    nxg.add_nodes_from(range(m))
    nxg.add_edges_from((int(i), int(j)) for i, j in g.edge_index)
    clustering = nx.average_clustering(nxg) if m > 0 else 0.0
    return GraphStats(m, e, density, avg_degree, clustering)


def graph_to_json(g: MarketGraph) -> dict:
    """JSON document {vertices, edges: [{i, j, w}], lambda} in label space."""
    return {
        "vertices": list(g.vertices),
        "edges": [
            {"i": int(g.vertices[i]), "j": int(g.vertices[j]), "w": float(w)}
            for (i, j), w in zip(g.edge_index, g.weights)
        ],
        "lambda": g.threshold,
    }


def graph_from_json(doc: dict) -> MarketGraph:
    vertices = tuple(int(v) for v in doc["vertices"])
    pos = {v: k for k, v in enumerate(vertices)}
    pairs = []
    weights = []
    for e in doc["edges"]:
        a, b = pos[int(e["i"])], pos[int(e["j"])]
        pairs.append((min(a, b), max(a, b)))
        weights.append(float(e["w"]))
    return MarketGraph(
        vertices=vertices,
        edge_index=np.array(pairs, dtype=np.int64).reshape(-1, 2),
        weights=np.array(weights, dtype=float),
        threshold=doc.get("lambda"),
    )


def write_graph_json(g: MarketGraph, path) -> None:
    with open(path, "w") as fh:
        json.dump(graph_to_json(g), fh, indent=2, sort_keys=True)


def write_edge_list(g: MarketGraph, path) -> None:
    """Plain text edge list, one "i j w" line per edge (label space)."""
    with open(path, "w") as fh:
        for (i, j), w in zip(g.edge_index, g.weights):
            fh.write(f"{g.vertices[i]} {g.vertices[j]} {w:.12g}\n")
