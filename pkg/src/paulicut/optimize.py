"""Classical search engines: derivative-free continuous minimization plus
combinatorial max-cut baselines (UMDA, hill climbing, exact enumeration).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .errors import ContractError, ResourceError
from .market import MarketGraph
from .partition import ensure_two_sided

DEFAULT_BUDGET = 1000
DEFAULT_TOL = 1e-6
# Initial trust-region radius. Sized for angle-valued parameter spaces, where
# steps of ~2 rad explore meaningfully; small radii stall in curved valleys.
DEFAULT_RHOBEG = 2.0
BRUTE_FORCE_CAP = 22


class NonFiniteObjectiveError(RuntimeError):
    """The objective produced NaN/inf; carries the offending input."""

    def __init__(self, value, params):
        super().__init__(f"objective returned {value!r} at {np.asarray(params)!r}")
        self.value = value
        self.params = np.asarray(params).copy()


class _BudgetExhausted(Exception):
    pass


@dataclass
class ObjectiveHandle:
    """Counting wrapper around a deterministic scalar objective.

    Tracks the best (params, value) pair ever evaluated and enforces an
    optional evaluation budget. Any stochasticity must live in the caller's
    seeding; ``fn`` itself must be deterministic for a fixed input.
    """

    fn: Callable[[np.ndarray], float]
    arity: int
    budget: int | None = None
    evaluations: int = 0
    best_value: float = math.inf
    best_params: np.ndarray | None = field(default=None, repr=False)

    def evaluate(self, params) -> float:
        params = np.asarray(params, dtype=float)
        if params.shape != (self.arity,):
            raise ContractError(f"expected {self.arity} parameters, got {params.size}")
        if self.budget is not None and self.evaluations >= self.budget:
            raise _BudgetExhausted
        self.evaluations += 1
        value = float(self.fn(params))
        if not math.isfinite(value):
            raise NonFiniteObjectiveError(value, params)
        if value < self.best_value:
            self.best_value = value
            self.best_params = params.copy()
        return value

    __call__ = evaluate


@dataclass(frozen=True)
class OptResult:
    best_params: np.ndarray
    best_value: float
    evaluations_used: int
    converged: bool


def minimize(
    obj,
    x0,
    budget: int = DEFAULT_BUDGET,
    tol: float = DEFAULT_TOL,
    method: str = "cobyla",
    rhobeg: float = DEFAULT_RHOBEG,
) -> OptResult:
    """Derivative-free minimization with a hard evaluation budget.

    ``method="cobyla"`` uses linear-approximation trust regions (the default);
    ``method="nelder-mead"`` is the documented simplex fallback. Either way
    the best evaluated point is returned, so the result never regresses below
    the start and exhausting the budget is not an error.
    """
    x0 = np.asarray(x0, dtype=float)
    if not isinstance(obj, ObjectiveHandle):
        obj = ObjectiveHandle(fn=obj, arity=x0.size)
    if obj.arity != x0.size:
        raise ContractError(f"x0 has {x0.size} entries but the objective takes {obj.arity}")
    if budget < obj.arity + 2:
        raise ContractError(f"budget {budget} below minimum {obj.arity + 2}")
    start = obj.evaluations
    obj.budget = start + budget
    converged = False
    try:
        if method == "cobyla":
            res = _scipy_minimize(
                obj.evaluate,
                x0,
                method="COBYLA",
                tol=tol,
                options={"maxiter": budget, "rhobeg": rhobeg},
            )
            converged = bool(res.success)
        elif method == "nelder-mead":
            res = _scipy_minimize(
                obj.evaluate,
                x0,
                method="Nelder-Mead",
                options={"maxfev": budget, "xatol": tol, "fatol": tol},
            )
            converged = bool(res.success)
        else:
            raise ContractError(f"unknown method {method!r}")
    except _BudgetExhausted:
        converged = False
    if obj.best_params is None:
        raise ContractError("budget too small to evaluate the start point")
    return OptResult(
        best_params=obj.best_params.copy(),
        best_value=obj.best_value,
        evaluations_used=obj.evaluations - start,
        converged=converged,
    )


def _cut_values_for_population(g: MarketGraph, population: np.ndarray) -> np.ndarray:
    if g.n_edges == 0:
        return np.zeros(population.shape[0])
    ei, ej = g.edge_index[:, 0], g.edge_index[:, 1]
    return (population[:, ei] != population[:, ej]).astype(float) @ g.weights


def umda_maxcut(
    g: MarketGraph,
    pop: int | None = None,
    trunc: float = 0.5,
    generations: int = 100,
    seed: int = 0,
) -> np.ndarray:
    """Univariate marginal EDA maximizing the cut; returns the best bitstring.

    Per-bit marginals start at 1/2, are refit on the top ``trunc`` fraction
    each generation, and stay clamped to [1/m, 1 - 1/m] so no bit freezes.
    """
    m = g.n_vertices
    if m < 2:
        raise ContractError("need at least two vertices")
    if pop is None:
        pop = max(10, round(20 * math.sqrt(m)))
    if pop < 10:
        raise ContractError(f"population must be at least 10, got {pop}")
    if not 0 < trunc < 1:
        raise ContractError(f"truncation fraction must be in (0, 1), got {trunc}")
    if generations < 1:
        raise ContractError(f"need at least one generation, got {generations}")
    rng = np.random.default_rng(seed)
    marginals = np.full(m, 0.5)
    lo, hi = 1.0 / m, 1.0 - 1.0 / m
    n_elite = max(1, int(math.ceil(trunc * pop)))
    best_bits = None
    best_cut = -1.0
    for _ in range(generations):
        population = (rng.random((pop, m)) < marginals).astype(np.int8)
        cuts = _cut_values_for_population(g, population)
        order = np.argsort(-cuts)
        if cuts[order[0]] > best_cut:
            best_cut = float(cuts[order[0]])
            best_bits = population[order[0]].copy()
        marginals = population[order[:n_elite]].mean(axis=0).clip(lo, hi)
    return ensure_two_sided(g, best_bits)


def local_search_cut(g: MarketGraph, start, seed: int = 0) -> np.ndarray:
    """Single-bit-flip hill climbing from ``start`` to a local cut maximum."""
    bits = np.asarray(start).copy()
    if bits.shape != (g.n_vertices,):
        raise ContractError("start vector must cover all vertices")
    rng = np.random.default_rng(seed)
    neighbors: list[list[tuple[int, float]]] = [[] for _ in range(g.n_vertices)]
    for (i, j), w in zip(g.edge_index, g.weights):
        neighbors[int(i)].append((int(j), float(w)))
        neighbors[int(j)].append((int(i), float(w)))
    improved = True
    while improved:
        improved = False
        for v in rng.permutation(g.n_vertices):
            gain = sum(w if bits[u] == bits[v] else -w for u, w in neighbors[v])
            if gain > 1e-15:
                bits[v] = 1 - bits[v]
                improved = True
    return bits


def brute_force_maxcut(g: MarketGraph) -> tuple[np.ndarray, float]:
    """Exact max cut by enumeration with vertex 0 pinned to side 0."""
    m = g.n_vertices
    if m > BRUTE_FORCE_CAP:
        raise ResourceError(
            f"{m} vertices exceeds the exact-enumeration cap of {BRUTE_FORCE_CAP}"
        )
    if m == 1:
        return np.zeros(1, dtype=np.int8), 0.0
    best_code = 0
    best_cut = -1.0
    chunk = 1 << 20
    total = 1 << (m - 1)
    ei, ej = g.edge_index[:, 0], g.edge_index[:, 1]
    for lo in range(0, total, chunk):
        codes = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        cuts = np.zeros(codes.size)
        for i, j, w in zip(ei, ej, g.weights):
            # vertex v >= 1 lives in bit v-1; vertex 0 is fixed at side 0
            bi = (codes >> (i - 1)) & 1 if i > 0 else np.zeros(codes.size, dtype=np.int64)
            bj = (codes >> (j - 1)) & 1
            cuts += w * (bi != bj)
        k = int(np.argmax(cuts))
        if cuts[k] > best_cut:
            best_cut = float(cuts[k])
            best_code = int(codes[k])
    bits = np.zeros(m, dtype=np.int8)
    for v in range(1, m):
        bits[v] = (best_code >> (v - 1)) & 1
    return bits, max(best_cut, 0.0)


def random_bitstring(m: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.random(m) < 0.5).astype(np.int8)
