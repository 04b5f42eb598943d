"""Recursive FIFO bipartitioning of a market graph into asset clusters.

Any cut solver that maps a graph view and a seed to a two-sided partition can
drive the recursion; solvers are injected through :class:`CutSolverHandle`.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ContractError
from .market import MarketGraph


def cut_value(g: MarketGraph, x) -> float:
    """Total weight of edges crossing the partition encoded by bit vector ``x``.

    ``x[i]`` is the side of the vertex at position ``i`` of ``g.vertices``;
    an edge counts when its endpoints sit on different sides, regardless of
    which side is labeled 1.
    """
    x = np.asarray(x)
    if x.shape != (g.n_vertices,):
        raise ContractError(
            f"bit vector of length {x.size} does not cover {g.n_vertices} vertices"
        )
    if not np.isin(x, (0, 1)).all():
        raise ContractError("bit vector entries must be 0 or 1")
    if g.n_edges == 0:
        return 0.0
    ei, ej = g.edge_index[:, 0], g.edge_index[:, 1]
    return float(np.sum(g.weights * (x[ei] != x[ej])))


def incident_weight(g: MarketGraph) -> np.ndarray:
    """Total edge weight touching each vertex position."""
    inc = np.zeros(g.n_vertices)
    if g.n_edges:
        np.add.at(inc, g.edge_index[:, 0], g.weights)
        np.add.at(inc, g.edge_index[:, 1], g.weights)
    return inc


def ensure_two_sided(g: MarketGraph, bits: np.ndarray) -> np.ndarray:
    """Repair a one-sided bit vector by moving the lightest vertex across.

    The vertex with minimal total incident weight (lowest position on ties)
    switches sides; two-sided inputs pass through unchanged.
    """
    bits = np.asarray(bits).copy()
    total = int(bits.sum())
    if 0 < total < bits.size or bits.size < 2:
        return bits
    mover = int(np.argmin(incident_weight(g)))
    bits[mover] = 1 - bits[mover]
    return bits


def sides_from_bits(g: MarketGraph, bits) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Map a positional bit vector to (side-1 labels, side-0 labels)."""
    bits = np.asarray(bits)
    s1 = tuple(sorted(g.vertices[i] for i in np.flatnonzero(bits == 1)))
    s2 = tuple(sorted(g.vertices[i] for i in np.flatnonzero(bits == 0)))
    return s1, s2


@dataclass(frozen=True)
class CutSolverHandle:
    """Named strategy mapping (graph view, seed) -> (S1, S2, diagnostics)."""

    name: str
    solve: Callable[[MarketGraph, int], tuple[tuple, tuple, dict]]


@dataclass
class TreeNode:
    id: int
    vertices: tuple[int, ...]
    parent: int | None = None
    children: tuple[int, int] | None = None
    split_order: int | None = None


@dataclass
class PartitionTree:
    """Binary split history; node ids follow creation order, root is node 0."""

    nodes: list[TreeNode]
    split_records: list[dict] = field(default_factory=list, compare=False, repr=False)

    @property
    def root(self) -> TreeNode:
        return self.nodes[0]

    @property
    def leaves(self) -> list[int]:
        """Ids of childless nodes in creation order."""
        return [n.id for n in self.nodes if n.children is None]

    def leaf_sizes(self) -> list[int]:
        return [len(self.nodes[i].vertices) for i in self.leaves]


@dataclass(frozen=True)
class ClusterLabels:
    """Cluster label per asset, labels 0..L-1 in tree-leaf order."""

    labels: dict[int, int]

    @property
    def n_clusters(self) -> int:
        return len(set(self.labels.values()))

    def members(self, label: int) -> tuple[int, ...]:
        return tuple(sorted(a for a, l in self.labels.items() if l == label))

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("asset,label\n")
            for asset in sorted(self.labels):
                fh.write(f"{asset},{self.labels[asset]}\n")


def labels_from_tree(tree: PartitionTree) -> ClusterLabels:
    labels = {}
    for k, leaf_id in enumerate(tree.leaves):
        for asset in tree.nodes[leaf_id].vertices:
            labels[asset] = k
    return ClusterLabels(labels)


def recursive_bipartition(
    g: MarketGraph,
    n_splits: int,
    solver: CutSolverHandle,
    seed: int = 0,
) -> tuple[PartitionTree, ClusterLabels]:
    """Split ``g`` into ``n_splits + 1`` clusters by repeated bipartition.

    Subgraphs are processed first-in-first-out. Singleton subgraphs are
    finalized without consuming split budget. Each effective split ``s``
    seeds its solver with ``seed ^ s``.
    """
    if n_splits < 1:
        raise ContractError(f"n_splits must be at least 1, got {n_splits}")
    if n_splits + 1 > g.n_vertices:
        raise ContractError(
            f"cannot make {n_splits + 1} clusters out of {g.n_vertices} vertices"
        )
    root = TreeNode(id=0, vertices=tuple(sorted(g.vertices)))
    tree = PartitionTree(nodes=[root])
    queue: deque[tuple[int, MarketGraph]] = deque([(0, g)])
    effective = 0
    stale_rotations = 0
    while effective < n_splits and stale_rotations < len(queue):
        node_id, view = queue.popleft()
        if view.n_vertices == 1:
            queue.append((node_id, view))
            stale_rotations += 1
            continue
        stale_rotations = 0
        s1, s2, diag = solver.solve(view, seed ^ effective)
        _check_sides(view, s1, s2)
        left = TreeNode(id=len(tree.nodes), vertices=tuple(sorted(s1)), parent=node_id)
        tree.nodes.append(left)
        right = TreeNode(id=len(tree.nodes), vertices=tuple(sorted(s2)), parent=node_id)
        tree.nodes.append(right)
        tree.nodes[node_id].children = (left.id, right.id)
        tree.nodes[node_id].split_order = effective
        tree.split_records.append(
            {"split_order": effective, "node_id": node_id, "solver": solver.name, **diag}
        )
        queue.append((left.id, view.subgraph(s1)))
        queue.append((right.id, view.subgraph(s2)))
        effective += 1
    return tree, labels_from_tree(tree)


def _check_sides(view: MarketGraph, s1, s2) -> None:
    s1, s2 = set(s1), set(s2)
    if not s1 or not s2:
        raise ContractError(f"solver returned an empty side on {view.n_vertices} vertices")
    if s1 & s2 or s1 | s2 != set(view.vertices):
        raise ContractError("solver sides must partition the view's vertices")


def export_dendrogram(tree: PartitionTree) -> dict:
    """Nested {id, assets, split_order, children} document rooted at node 0."""

    def emit(node_id: int) -> dict:
        node = tree.nodes[node_id]
        return {
            "id": node.id,
            "assets": list(node.vertices),
            "split_order": node.split_order,
            "children": [emit(c) for c in (node.children or ())],
        }

    return emit(0)


def load_dendrogram(doc: dict) -> PartitionTree:
    """Rebuild a tree from :func:`export_dendrogram` output."""
    nodes: dict[int, TreeNode] = {}

    def walk(entry: dict, parent: int | None):
        node = TreeNode(
            id=int(entry["id"]),
            vertices=tuple(int(a) for a in entry["assets"]),
            parent=parent,
            split_order=entry.get("split_order"),
        )
        nodes[node.id] = node
        kids = entry.get("children") or []
        if kids:
            if len(kids) != 2:
                raise ContractError("dendrogram nodes must have 0 or 2 children")
            node.children = (int(kids[0]["id"]), int(kids[1]["id"]))
            for kid in kids:
                walk(kid, node.id)

    walk(doc, None)
    return PartitionTree(nodes=[nodes[i] for i in sorted(nodes)])


def write_dendrogram(tree: PartitionTree, path) -> None:
    with open(path, "w") as fh:
        json.dump(export_dendrogram(tree), fh, indent=2, sort_keys=True)


def read_dendrogram(path) -> PartitionTree:
    with open(path) as fh:
        return load_dendrogram(json.load(fh))
