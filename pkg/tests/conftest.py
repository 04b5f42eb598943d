import functools

import numpy as np
import pytest

from paulicut import sample_prices_path
from paulicut.market import MarketGraph
from paulicut.statevector import pauli_matrix


def dense_pauli_matrix(letters: str) -> np.ndarray:
    """Kronecker-product oracle; qubit 0 is the least significant bit."""
    mats = [pauli_matrix(c) for c in reversed(letters)]
    return functools.reduce(np.kron, mats)


def dense_expectation(amplitudes: np.ndarray, letters: str) -> float:
    mat = dense_pauli_matrix(letters)
    return float(np.real(np.vdot(amplitudes, mat @ amplitudes)))


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    amps = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return amps / np.linalg.norm(amps)


def graph_from_edges(m, triples) -> MarketGraph:
    pairs = [(min(i, j), max(i, j)) for i, j, _ in triples]
    weights = [w for _, _, w in triples]
    return MarketGraph(
        vertices=tuple(range(m)),
        edge_index=np.array(pairs, dtype=np.int64).reshape(-1, 2),
        weights=np.array(weights, dtype=float),
    )


def random_weighted_graph(m: int, edge_prob: float, seed: int) -> MarketGraph:
    """Seeded Erdos-Renyi graph with uniform weights in (0, 1]."""
    rng = np.random.default_rng(seed)
    triples = []
    for i in range(m):
        for j in range(i + 1, m):
            if rng.random() < edge_prob:
                triples.append((i, j, rng.uniform(0.05, 1.0)))
    return graph_from_edges(m, triples)


@pytest.fixture(scope="session")
def sample_csv() -> str:
    return sample_prices_path()


@pytest.fixture
def triangle() -> MarketGraph:
    return graph_from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])


@pytest.fixture
def path4() -> MarketGraph:
    return graph_from_edges(5, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)])


@pytest.fixture
def k22() -> MarketGraph:
    return graph_from_edges(4, [(0, 2, 1.0), (0, 3, 1.0), (1, 2, 1.0), (1, 3, 1.0)])
