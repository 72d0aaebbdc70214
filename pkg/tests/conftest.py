from __future__ import annotations

import numpy as np
import pytest

from rolesim.core.config import get_settings
from rolesim.models.benchmark import RoleModel
from rolesim.models.graph import DirectedGraph, Partition
from rolesim.services.benchgen import community_role_graph, cycle_role_graph, generate


def block_cycle(k: int, m: int) -> tuple[DirectedGraph, Partition]:
    """Every node of role a points to every node of role a+1 (mod k)."""
    instance = generate(RoleModel.uniform(cycle_role_graph(k), m), p_in=1.0, p_out=0.0)
    return instance.graph, instance.truth


def random_digraph(n: int, p: float, seed: int) -> DirectedGraph:
    """Erdos-Renyi digraph without self-loops; never empty."""
    rng = np.random.default_rng(seed)
    dense = (rng.random((n, n)) < p).astype(np.float64)
    np.fill_diagonal(dense, 0.0)
    if not dense.any():
        dense[0, n - 1] = 1.0
    return DirectedGraph.from_matrix(dense)


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch: pytest.MonkeyPatch):
    monkeypatch.delenv("ROLESIM_JOBS", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def triangle() -> DirectedGraph:
    return DirectedGraph.from_edges(3, [(0, 1), (1, 2), (2, 0)])


@pytest.fixture
def community_model() -> RoleModel:
    return RoleModel.uniform(community_role_graph(3), 10)
