"""Adapters exposing every cut method behind the common solver contract."""
from __future__ import annotations

import time
from dataclasses import replace

import numpy as np

from .errors import ContractError
from .market import MarketGraph
from .optimize import brute_force_maxcut, local_search_cut, random_bitstring, umda_maxcut
from .partition import CutSolverHandle, cut_value, ensure_two_sided, sides_from_bits
from .pce import PceConfig, bipartition_pce
from .qaoa import QaoaConfig, solve_qaoa

SOLVER_NAMES = ("pce", "qaoa", "eda", "local", "brute")


def _finalize(g: MarketGraph, bits: np.ndarray, started: float, extra: dict) -> tuple:
    bits = ensure_two_sided(g, bits)
    s1, s2 = sides_from_bits(g, bits)
    diag = {
        "cut_value": cut_value(g, bits),
        "wall_time_s": time.perf_counter() - started,
        **extra,
    }
    return s1, s2, diag


def make_solver(
    name: str,
    k: int = 2,
    budget: int = 400,
    restarts: int = 3,
    qaoa_p: int = 5,
    eda_generations: int = 100,
) -> CutSolverHandle:
    """Build a named solver handle; the per-split seed arrives at solve time."""
    if name == "pce":
        base = PceConfig(k=k, max_evals=budget, restarts=restarts)

        def solve(view: MarketGraph, seed: int):
            return bipartition_pce(view, replace(base, seed=seed))

    elif name == "qaoa":
        qbase = QaoaConfig(p=qaoa_p, max_evals=budget, restarts=restarts)

        def solve(view: MarketGraph, seed: int):
            return solve_qaoa(view, replace(qbase, seed=seed))

    elif name == "eda":

        def solve(view: MarketGraph, seed: int):
            started = time.perf_counter()
            bits = umda_maxcut(view, generations=eda_generations, seed=seed)
            pop = max(10, round(20 * np.sqrt(view.n_vertices)))
            return _finalize(view, bits, started, {"evaluations": pop * eda_generations})

    elif name == "local":

        def solve(view: MarketGraph, seed: int):
            started = time.perf_counter()
            rng = np.random.default_rng(seed)
            bits = local_search_cut(view, random_bitstring(view.n_vertices, rng), seed=seed)
            return _finalize(view, bits, started, {})

    elif name == "brute":

        def solve(view: MarketGraph, seed: int):
            started = time.perf_counter()
            bits, cut = brute_force_maxcut(view)
            return _finalize(view, bits, started, {"exact": True})

    else:
        raise ContractError(f"unknown solver {name!r}; choose from {SOLVER_NAMES}")

    return CutSolverHandle(name=name, solve=solve)
