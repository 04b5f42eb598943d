"""Command-line front end: ingest -> graph -> partition -> backtest -> report.

Verbs: ``sizing`` (resource tables), ``graph`` (market graph artifacts),
``partition`` (graph + recursive clustering), ``backtest`` (full pipeline),
``benchmark`` (solver sweep with timing). Exit codes: 0 success, 2 contract
violation, 3 data problem.
"""
from __future__ import annotations

import csv
import functools
import json
import os
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path

import click
import yaml

from . import market, partition, pce, portfolio, qaoa
from .errors import ContractError, DataError
from .optimize import brute_force_maxcut
from .solvers import SOLVER_NAMES, make_solver

OUTDIR_ENV_VAR = "PAULICUT_OUTDIR"
# Published split schedule: anchors below 100 assets, (m // 10) - 1 above.
AUTO_SPLIT_ANCHORS = {10: 2, 20: 4, 30: 6, 50: 9}


def auto_n_splits(m: int) -> int:
    """Split budget for ``m`` assets under the published schedule.

    Unlisted sizes below 100 interpolate linearly between anchors.
    """
    if m >= 100:
        return m // 10 - 1
    if m in AUTO_SPLIT_ANCHORS:
        return AUTO_SPLIT_ANCHORS[m]
    anchors = sorted(AUTO_SPLIT_ANCHORS)
    if m <= anchors[0]:
        return max(1, min(m - 1, m // 5))
    for lo, hi in zip(anchors, anchors[1:]):
        if lo < m < hi:
            frac = (m - lo) / (hi - lo)
            value = AUTO_SPLIT_ANCHORS[lo] + frac * (AUTO_SPLIT_ANCHORS[hi] - AUTO_SPLIT_ANCHORS[lo])
            return max(1, min(m - 1, round(value)))
    return max(1, min(m - 1, round(AUTO_SPLIT_ANCHORS[anchors[-1]] * m / anchors[-1])))


@dataclass
class RunConfig:
    data: str = ""
    m: int = 10
    threshold: float = market.DEFAULT_THRESHOLD
    solver: str = "pce"
    k: int = 2
    n_splits: str = "auto"
    seed: int = 0
    budget: int = 400
    restarts: int = 3
    qaoa_p: int = 5
    train_fraction: float = 0.8
    initial: float = 1000.0
    outdir: str = "runs"

    def resolved_splits(self) -> int:
        if self.n_splits == "auto":
            return auto_n_splits(self.m)
        try:
            value = int(self.n_splits)
        except ValueError:
            raise ContractError(f"n_splits must be an integer or 'auto', got {self.n_splits!r}")
        return value

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def load_config_file(path) -> dict:
    """Flat key/value mapping in YAML syntax; keys mirror the CLI flags."""
    with open(path) as fh:
        doc = yaml.safe_load(fh) or {}
    if not isinstance(doc, dict):
        raise DataError(f"config file {path} must hold a flat key/value mapping")
    known = {f.name for f in fields(RunConfig)} | {"lambda"}
    unknown = set(doc) - known
    if unknown:
        raise DataError(f"unknown config keys: {sorted(unknown)}")
    if "lambda" in doc:
        doc["threshold"] = doc.pop("lambda")
    return doc


def build_config(config_file, **flags) -> RunConfig:
    merged = {}
    if config_file:
        merged.update(load_config_file(config_file))
    merged.update({k: v for k, v in flags.items() if v is not None})
    if "outdir" not in merged and os.environ.get(OUTDIR_ENV_VAR):
        merged["outdir"] = os.environ[OUTDIR_ENV_VAR]
    cfg = RunConfig(**merged)
    if cfg.solver not in SOLVER_NAMES:
        raise ContractError(f"unknown solver {cfg.solver!r}; choose from {SOLVER_NAMES}")
    return cfg


class _ArtifactDir:
    """Collects written files so a failed run leaves nothing behind."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.written: list[Path] = []

    def path(self, name: str) -> Path:
        p = self.root / name
        self.written.append(p)
        return p

    def discard(self):
        for p in self.written:
            p.unlink(missing_ok=True)


def _exit_codes(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ContractError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except DataError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(3)

    return wrapper


@click.group()
def cli():
    """Market-graph bipartition portfolios with quantum and classical solvers."""


def _common_options(fn):
    options = [
        click.option("--data", type=click.Path(exists=True, dir_okay=False), default=None, help="Price CSV (long or wide form)."),
        click.option("--m", type=int, default=None, help="Number of assets to keep (file order)."),
        click.option("--lambda", "threshold", type=float, default=None, help="Correlation threshold for drawing edges."),
        click.option("--solver", type=click.Choice(SOLVER_NAMES), default=None),
        click.option("--k", type=int, default=None, help="Encoding order for the pce solver."),
        click.option("--n-splits", type=str, default=None, help="Recursive split count or 'auto'."),
        click.option("--seed", type=int, default=None),
        click.option("--budget", type=int, default=None, help="Optimizer evaluations per restart."),
        click.option("--restarts", type=int, default=None),
        click.option("--qaoa-p", type=int, default=None, help="QAOA layer count."),
        click.option("--train-fraction", type=float, default=None),
        click.option("--initial", type=float, default=None, help="Backtest starting capital."),
        click.option("--outdir", type=click.Path(file_okay=False), default=None),
        click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False), default=None, help="YAML key/value file mirroring these flags."),
    ]
    for opt in reversed(options):
        fn = opt(fn)
    return fn


@cli.command()
@click.option("--m-list", default="10,20,30,50,100,150,200,250", help="Comma-separated variable counts.")
@click.option("--k-list", default="2,3", help="Comma-separated encoding orders.")
@click.option("--edges-list", default=None, help="Optional comma-separated edge counts parallel to --m-list (enables the QAOA columns).")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write CSV here instead of stdout.")
@_exit_codes
def sizing(m_list, k_list, edges_list, out):
    """Qubit/layer/gate-count table across problem sizes."""
    ms = [int(v) for v in m_list.split(",") if v.strip()]
    ks = [int(v) for v in k_list.split(",") if v.strip()]
    edges = None
    if edges_list:
        edges = [int(v) for v in edges_list.split(",") if v.strip()]
        if len(edges) != len(ms):
            raise ContractError("--edges-list must be parallel to --m-list")
    rows = sizing_table(ms, ks, edges)
    text = render_sizing_csv(rows)
    if out:
        Path(out).write_text(text)
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)


def sizing_table(ms, ks, edges=None) -> list[dict]:
    rows = []
    for idx, m in enumerate(ms):
        n_edges = edges[idx] if edges else None
        for k in ks:
            s = pce.compute_sizing(m, k)
            circuit_gates = pce.build_hea(s).gate_count
            row = {
                "m": m,
                "k": k,
                "n": s.n,
                "p": s.p,
                "pce_gates": circuit_gates,
                "qaoa_p1_gates": qaoa.qaoa_gate_count(m, n_edges, 1) if n_edges is not None else "",
                "qaoa_p2_gates": qaoa.qaoa_gate_count(m, n_edges, 2) if n_edges is not None else "",
            }
            rows.append(row)
    return rows


def render_sizing_csv(rows) -> str:
    header = ["m", "k", "n", "p", "pce_gates", "qaoa_p1_gates", "qaoa_p2_gates"]
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(str(row[h]) for h in header))
    return "\n".join(lines) + "\n"


def _load_graph_inputs(cfg: RunConfig):
    if not cfg.data:
        raise DataError("no price data given; pass --data or set it in --config")
    prices = market.load_prices(cfg.data, cfg.m)
    train, test = portfolio.split_train_test(prices, portfolio.SplitSpec(cfg.train_fraction))
    train_returns = market.compute_returns(train)
    rho = market.pearson_matrix(train_returns)
    graph = market.build_graph(rho, cfg.threshold)
    return prices, train, test, train_returns, graph


def _write_graph_artifacts(out: _ArtifactDir, graph) -> dict:
    market.write_graph_json(graph, out.path("graph.json"))
    market.write_edge_list(graph, out.path("graph_edges.txt"))
    stats = market.graph_stats(graph).as_dict()
    with open(out.path("graph_stats.json"), "w") as fh:
        json.dump(stats, fh, indent=2, sort_keys=True)
    return stats


@cli.command()
@_common_options
@_exit_codes
def graph(config_file, **flags):
    """Build the market graph from the training window and export it."""
    cfg = build_config(config_file, **flags)
    out = _ArtifactDir(cfg.outdir)
    try:
        _, _, _, _, g = _load_graph_inputs(cfg)
        stats = _write_graph_artifacts(out, g)
    except Exception:
        out.discard()
        raise
    click.echo(json.dumps(stats, indent=2, sort_keys=True))


def _run_partition(cfg: RunConfig, graph):
    solver = make_solver(
        cfg.solver, k=cfg.k, budget=cfg.budget, restarts=cfg.restarts, qaoa_p=cfg.qaoa_p
    )
    n_splits = cfg.resolved_splits()
    if cfg.solver == "qaoa" and graph.n_vertices > qaoa.QAOA_QUBIT_CAP:
        raise ContractError(
            f"qaoa solver capped at {qaoa.QAOA_QUBIT_CAP} assets, got {graph.n_vertices}"
        )
    tree, labels = partition.recursive_bipartition(graph, n_splits, solver, seed=cfg.seed)
    _validate_split_records(graph, tree)
    return tree, labels


def _validate_split_records(graph, tree):
    for record in tree.split_records:
        node = tree.nodes[record["node_id"]]
        view = graph.subgraph(node.vertices)
        left = set(tree.nodes[node.children[0]].vertices)
        bits = [1 if v in left else 0 for v in view.vertices]
        if abs(partition.cut_value(view, bits) - record["cut_value"]) > 1e-12:
            raise AssertionError(
                f"recorded cut {record['cut_value']} fails re-validation at split "
                f"{record['split_order']}"
            )


@cli.command("partition")
@_common_options
@_exit_codes
def partition_cmd(config_file, **flags):
    """Recursively bipartition the market graph into clusters."""
    cfg = build_config(config_file, **flags)
    out = _ArtifactDir(cfg.outdir)
    try:
        _, _, _, _, g = _load_graph_inputs(cfg)
        _write_graph_artifacts(out, g)
        tree, labels = _run_partition(cfg, g)
        partition.write_dendrogram(tree, out.path("dendrogram.json"))
        labels.to_csv(out.path("labels.csv"))
    except Exception:
        out.discard()
        raise
    click.echo(f"{labels.n_clusters} clusters; leaf sizes {tree.leaf_sizes()}")


def run_pipeline(cfg: RunConfig, outdir=None) -> dict:
    """Full run: ingest, graph, partition, select, backtest, report.

    Writes artifacts under ``outdir`` (defaults to ``cfg.outdir``) and
    returns the summary document. The summary contains no timing data, so a
    fixed seed reproduces it byte for byte.
    """
    out = _ArtifactDir(outdir if outdir is not None else cfg.outdir)
    try:
        prices, train, test, train_returns, g = _load_graph_inputs(cfg)
        stats = _write_graph_artifacts(out, g)
        tree, labels = _run_partition(cfg, g)
        partition.write_dendrogram(tree, out.path("dendrogram.json"))
        labels.to_csv(out.path("labels.csv"))
        folio = portfolio.select_representatives(labels, train_returns)
        results = {}
        for window_name, window in (("train", train), ("test", test)):
            strategy = portfolio.backtest(window, folio, cfg.initial)
            baseline = portfolio.baseline_backtest(window, cfg.initial)
            portfolio.backtest_to_csv(strategy, out.path(f"backtest_strategy_{window_name}.csv"))
            portfolio.backtest_to_csv(baseline, out.path(f"backtest_baseline_{window_name}.csv"))
            results[window_name] = {
                "strategy": portfolio.backtest_summary(strategy),
                "baseline": portfolio.backtest_summary(baseline),
            }
        config_echo = {k: v for k, v in cfg.as_dict().items() if k != "outdir"}
        leaf_sizes = tree.leaf_sizes()
        summary = {
            "config": config_echo,
            "resolved_n_splits": cfg.resolved_splits(),
            "graph_stats": stats,
            "leaf_sizes": leaf_sizes,
            "leaf_size_max": max(leaf_sizes),
            "leaf_size_min": min(leaf_sizes),
            "cut_values": [r["cut_value"] for r in tree.split_records],
            "representatives": [
                {"cluster": i, "asset": int(a), "symbol": prices.assets[a]}
                for i, a in enumerate(folio.representatives)
            ],
            "backtests": results,
        }
        with open(out.path("summary.json"), "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
    except Exception:
        out.discard()
        raise
    return summary


@cli.command()
@_common_options
@_exit_codes
def backtest(config_file, **flags):
    """Run the full pipeline and back-test the selected portfolio."""
    cfg = build_config(config_file, **flags)
    summary = run_pipeline(cfg)
    test_stats = summary["backtests"]["test"]
    click.echo(json.dumps(
        {
            "terminal_strategy_test": test_stats["strategy"]["terminal"],
            "terminal_baseline_test": test_stats["baseline"]["terminal"],
            "sharpe_strategy_test": test_stats["strategy"]["sharpe_annualized"],
            "sharpe_baseline_test": test_stats["baseline"]["sharpe_annualized"],
            "outdir": cfg.outdir,
        },
        indent=2,
        sort_keys=True,
    ))


ORACLE_VERTEX_CAP = 16


def benchmark_rows(cfg: RunConfig, solvers) -> list[dict]:
    """One row per solver: timed single bipartition plus pipeline metrics."""
    rows = []
    for name in solvers:
        row = {"solver": name, "m": cfg.m, "status": "ok", "error": ""}
        try:
            solver_cfg = RunConfig(**{**cfg.as_dict(), "solver": name})
            _, _, _, _, g = _load_graph_inputs(solver_cfg)
            if name == "qaoa" and g.n_vertices > qaoa.QAOA_QUBIT_CAP:
                raise ContractError(
                    f"qaoa solver capped at {qaoa.QAOA_QUBIT_CAP} assets"
                )
            solver = make_solver(name, k=cfg.k, budget=cfg.budget, restarts=cfg.restarts, qaoa_p=cfg.qaoa_p)
            started = time.perf_counter()
            _, _, diag = solver.solve(g, cfg.seed)
            wall = time.perf_counter() - started
            row["bipartition_wall_s"] = round(wall, 6)
            row["cut_value"] = diag["cut_value"]
            if g.n_vertices <= ORACLE_VERTEX_CAP:
                _, oracle = brute_force_maxcut(g)
                row["oracle_cut"] = oracle
                row["cut_ratio"] = diag["cut_value"] / oracle if oracle > 0 else 1.0
            else:
                row["oracle_cut"] = ""
                row["cut_ratio"] = ""
            sizing_info = pce.compute_sizing(cfg.m, cfg.k)
            row["pce_gates"] = pce.build_hea(sizing_info).gate_count
            row["qaoa_gates"] = qaoa.qaoa_gate_count(cfg.m, g.n_edges, cfg.qaoa_p)
            summary = run_pipeline(solver_cfg, outdir=Path(cfg.outdir) / name)
            row["terminal_test"] = summary["backtests"]["test"]["strategy"]["terminal"]
            row["sharpe_train"] = summary["backtests"]["train"]["strategy"]["sharpe_annualized"]
            row["sharpe_test"] = summary["backtests"]["test"]["strategy"]["sharpe_annualized"]
        except (ContractError, DataError) as exc:
            row["status"] = "failed"
            row["error"] = str(exc)
        rows.append(row)
    return rows


BENCHMARK_COLUMNS = [
    "solver", "m", "status", "bipartition_wall_s", "cut_value", "oracle_cut",
    "cut_ratio", "pce_gates", "qaoa_gates", "terminal_test", "sharpe_train",
    "sharpe_test", "error",
]


@cli.command()
@click.option("--solvers", default="pce,eda,local", help="Comma-separated solver names.")
@_common_options
@_exit_codes
def benchmark(solvers, config_file, **flags):
    """Sweep solvers on one instance; emit a timing/quality CSV."""
    cfg = build_config(config_file, **flags)
    names = [s.strip() for s in solvers.split(",") if s.strip()]
    for name in names:
        if name not in SOLVER_NAMES:
            raise ContractError(f"unknown solver {name!r}; choose from {SOLVER_NAMES}")
    rows = benchmark_rows(cfg, names)
    out = Path(cfg.outdir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "benchmark.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=BENCHMARK_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({c: row.get(c, "") for c in BENCHMARK_COLUMNS})
    click.echo(f"wrote {path} ({len(rows)} rows)")


def main():
    cli(prog_name="paulicut")


if __name__ == "__main__":
    main()
