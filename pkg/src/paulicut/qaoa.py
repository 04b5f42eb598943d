"""Reference QAOA max-cut solver for small instances, one qubit per vertex.

The problem layer multiplies each basis amplitude by a phase proportional to
the weight it cuts (the composition of the per-edge two-qubit phase
interactions), and the mixer applies an RX rotation to every qubit. The
final answer is the most probable basis state of the optimized circuit.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, ResourceError
from .market import MarketGraph
from .optimize import ObjectiveHandle, minimize
from .partition import cut_value, ensure_two_sided, sides_from_bits
from .statevector import StateVector

QAOA_QUBIT_CAP = 14


@dataclass(frozen=True)
class QaoaConfig:
    """Layer count, per-restart optimizer budget, and seeding."""

    p: int = 5
    max_evals: int = 400
    restarts: int = 3
    seed: int = 0
    tol: float = 1e-6
    ramp_init: bool = True

    def __post_init__(self):
        if self.p < 1:
            raise ContractError(f"layer count must be at least 1, got {self.p}")
        if self.restarts < 1:
            raise ContractError(f"restarts must be at least 1, got {self.restarts}")


def qaoa_gate_count(m: int, n_edges: int, p: int) -> int:
    """Gate total for the CZ-built circuit: p*E + (p+1)*m.

    One initial superposition gate per qubit, then per layer one phase gate
    per edge and one mixer rotation per qubit.
    """
    if m < 1 or n_edges < 0 or p < 1:
        raise ContractError(f"invalid gate-count query (m={m}, E={n_edges}, p={p})")
    return p * n_edges + (p + 1) * m


def _cut_spectrum(g: MarketGraph) -> np.ndarray:
    """Cut value of every basis bitstring; vertex q lives in bit q."""
    m = g.n_vertices
    codes = np.arange(1 << m, dtype=np.int64)
    cuts = np.zeros(codes.size)
    for (i, j), w in zip(g.edge_index, g.weights):
        cuts += w * (((codes >> int(i)) & 1) != ((codes >> int(j)) & 1))
    return cuts


def _apply_mixer(amps: np.ndarray, beta: float, m: int) -> np.ndarray:
    c, s = math.cos(beta / 2.0), math.sin(beta / 2.0)
    rx = np.array([[c, -1j * s], [-1j * s, c]])
    out = amps
    for q in range(m):
        a = out.reshape(2 ** (m - 1 - q), 2, 2**q)
        out = np.einsum("ab,ibj->iaj", rx, a).reshape(-1)
    return out


def qaoa_state(g: MarketGraph, params, p: int) -> StateVector:
    """Evolve |+...+> through p alternating phase/mixer layers.

    ``params`` holds the p phase angles followed by the p mixer angles.
    """
    m = g.n_vertices
    params = np.asarray(params, dtype=float)
    if params.shape != (2 * p,):
        raise ContractError(f"expected {2 * p} angles, got {params.size}")
    gammas, betas = params[:p], params[p:]
    cuts = _cut_spectrum(g)
    amps = np.full(1 << m, 1.0 / math.sqrt(1 << m), dtype=np.complex128)
    for layer in range(p):
        amps = amps * np.exp(-1j * gammas[layer] * cuts)
        amps = _apply_mixer(amps, betas[layer], m)
    return StateVector(m, amps)


def _ramp_start(p: int) -> np.ndarray:
    # phase angles ramp up, mixer angles ramp down across layers
    steps = np.arange(1, p + 1) / p
    return np.concatenate([0.7 * steps, 0.7 * (1 - steps) + 0.05])


def solve_qaoa(
    g: MarketGraph,
    config: QaoaConfig,
    minimizer=None,
) -> tuple[tuple[int, ...], tuple[int, ...], dict]:
    """Optimize the 2p angles and decode the most probable basis state.

    Restart 0 starts from a deterministic ramp schedule when ``ramp_init``
    is set; remaining restarts draw uniform angles from a per-restart PCG64
    stream. Returns (side-1 labels, side-0 labels, diagnostics).
    """
    m = g.n_vertices
    if m < 2:
        raise ContractError(f"cannot bipartition {m} vertices")
    if m > QAOA_QUBIT_CAP:
        raise ResourceError(
            f"{m} vertices exceeds the one-qubit-per-vertex cap of {QAOA_QUBIT_CAP}"
        )
    if minimizer is None:
        minimizer = minimize
    t_start = time.perf_counter()
    cuts = _cut_spectrum(g)
    p = config.p

    def negative_expected_cut(params: np.ndarray) -> float:
        state = qaoa_state(g, params, p)
        return -float(np.real(np.vdot(state.amplitudes, cuts * state.amplitudes)))

    streams = np.random.SeedSequence(config.seed).spawn(config.restarts)
    best = None
    total_evals = 0
    for r in range(config.restarts):
        if r == 0 and config.ramp_init:
            x0 = _ramp_start(p)
        else:
            rng = np.random.Generator(np.random.PCG64(streams[r]))
            x0 = rng.uniform(-np.pi, np.pi, 2 * p)
        handle = ObjectiveHandle(fn=negative_expected_cut, arity=2 * p)
        result = minimizer(handle, x0, budget=config.max_evals, tol=config.tol)
        total_evals += result.evaluations_used
        state = qaoa_state(g, result.best_params, p)
        code = int(np.argmax(state.probabilities()))
        bits = ((code >> np.arange(m)) & 1).astype(np.int8)
        bits = ensure_two_sided(g, bits)
        cut = cut_value(g, bits)
        if best is None or cut > best[0]:
            best = (cut, r, bits, -result.best_value)
    cut, winner, bits, expected_cut = best
    s1, s2 = sides_from_bits(g, bits)
    diag = {
        "final_loss": -expected_cut,
        "expected_cut": expected_cut,
        "cut_value": cut,
        "evaluations": total_evals,
        "wall_time_s": time.perf_counter() - t_start,
        "winning_restart": winner,
        "n_qubits": m,
        "layers": p,
        "gate_count": qaoa_gate_count(m, g.n_edges, p),
        "n_parameters": 2 * p,
    }
    return s1, s2, diag
