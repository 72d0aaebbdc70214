"""Role graphs and block-structured Erdos-Renyi instances with planted roles.

Every ordered node pair (i, j) draws its uniform from a Philox stream keyed by
(seed, i), at position j. A pair's outcome therefore depends only on
(seed, i, j): rows can be generated in any order or in parallel.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
import numpy.typing as npt

from rolesim.core.exceptions import DomainError
from rolesim.core.logging import get_logger
from rolesim.models.benchmark import GeneratedInstance, RoleModel
from rolesim.models.graph import DirectedGraph, Partition
from rolesim.schemas.benchmark import GenerationParams
from rolesim.services.graph_io import load_edge_list

logger = get_logger(__name__)

PRESET_KINDS = ("community", "cycle", "custom")


def _check_role_count(k: int) -> None:
    if k < 1:
        raise DomainError("a role graph needs at least one role", k=k)


def community_role_graph(k: int) -> DirectedGraph:
    """k roles that only connect to themselves."""
    _check_role_count(k)
    return DirectedGraph.from_edges(k, [(role, role) for role in range(k)])


def cycle_role_graph(k: int) -> DirectedGraph:
    """Directed k-cycle; for k = 1 this degenerates to one self-loop."""
    _check_role_count(k)
    return DirectedGraph.from_edges(k, [(role, (role + 1) % k) for role in range(k)])


def complement_role_graph(role_graph: DirectedGraph) -> DirectedGraph:
    """The role graph of ``11^T - B``, self-loops included."""
    present = role_graph.to_dense() > 0
    return DirectedGraph.from_matrix((~present).astype(np.float64))


def check_binary(role_graph: DirectedGraph) -> DirectedGraph:
    if not np.all(role_graph.weight == 1.0):
        raise DomainError("role graph weights must all be 1")
    return role_graph


def preset_role_graph(kind: str, k: int = 0, path: Path | str | None = None) -> DirectedGraph:
    """Build a community or cycle role graph, or load a binary one from ``path``."""
    if kind == "community":
        return community_role_graph(k)
    if kind == "cycle":
        return cycle_role_graph(k)
    if kind == "custom":
        if path is None:
            raise DomainError("custom role graph needs a file path")
        graph = check_binary(load_edge_list(path))
        if k and graph.n != k:
            raise DomainError("custom role graph has an unexpected role count", k=k, found=graph.n)
        return graph
    raise DomainError(f"unknown role graph kind '{kind}'", choices=list(PRESET_KINDS))


def pair_uniforms(seed: int, row: int, n: int) -> npt.NDArray[np.float64]:
    """Uniforms in [0, 1) for the pairs (row, 0..n-1)."""
    key = (int(row) << 64) | (int(seed) & 0xFFFFFFFFFFFFFFFF)
    return np.random.Generator(np.random.Philox(key=key)).random(n)


def generate(model: RoleModel, p_in: float, p_out: float, seed: int = 0) -> GeneratedInstance:
    """Sample a directed graph whose block pattern follows ``model.role_graph``.

    Pair (i, j), i != j, becomes an edge with probability ``p_in`` when
    (R(i), R(j)) is an edge of the role graph and ``p_out`` otherwise.
    """
    params = GenerationParams(p_in=p_in, p_out=p_out, seed=seed)
    roles = model.role_labels()
    blocks = model.block_matrix()
    n = model.n

    src_parts: list[npt.NDArray[np.int64]] = []
    dst_parts: list[npt.NDArray[np.int64]] = []
    for i in range(n):
        probability = np.where(blocks[roles[i], roles], params.p_in, params.p_out)
        hits = pair_uniforms(params.seed, i, n) < probability
        hits[i] = False
        targets = np.flatnonzero(hits)
        src_parts.append(np.full(targets.size, i, dtype=np.int64))
        dst_parts.append(targets.astype(np.int64))

    src = np.concatenate(src_parts) if src_parts else np.zeros(0, dtype=np.int64)
    dst = np.concatenate(dst_parts) if dst_parts else np.zeros(0, dtype=np.int64)
    graph = DirectedGraph(n=n, src=src, dst=dst, weight=np.ones(src.size))
    logger.debug(
        "Generated block graph",
        n=n,
        roles=model.k,
        edges=graph.edge_count,
        p_in=params.p_in,
        p_out=params.p_out,
        seed=params.seed,
    )
    return GeneratedInstance(graph=graph, truth=Partition(labels=roles), params=params)


def expected_edge_count(model: RoleModel, p_in: float, p_out: float) -> float:
    """Mean edge count over ordered pairs i != j."""
    sizes = np.asarray(model.sizes, dtype=np.float64)
    pair_counts = np.outer(sizes, sizes) - np.diag(sizes)
    inside = float(pair_counts[model.block_matrix()].sum())
    return p_in * inside + p_out * (float(pair_counts.sum()) - inside)
