from __future__ import annotations

import numpy as np
import pytest

from conftest import block_cycle
from rolesim.core.exceptions import DomainError
from rolesim.models.graph import DenseSymMatrix, DirectedGraph, Partition
from rolesim.models.similarity import LowRankFactor
from rolesim.services import graph_io, role_extraction
from rolesim.services.evaluation import nmi


def test_similarity_graph_drops_diagonal_and_negative_entries():
    S = np.array([[5.0, 2.0, -1.0], [2.0, 4.0, 0.0], [-1.0, 0.0, 3.0]])
    graph = role_extraction.similarity_graph(DenseSymMatrix(values=S))
    assert graph.edges == [(0, 1, 2.0), (1, 0, 2.0)]
    assert graph.is_symmetric()


def test_similarity_graph_from_factor():
    factor = LowRankFactor(X=np.array([[1.0], [1.0], [0.0]]), r=1)
    graph = role_extraction.similarity_graph(factor)
    assert graph.edges == [(0, 1, 1.0), (1, 0, 1.0)]


def test_similarity_graph_rejects_non_square():
    with pytest.raises(DomainError):
        role_extraction.similarity_graph(np.zeros((2, 3)))


def test_cluster_finds_disjoint_cliques():
    weights = np.kron(np.eye(3), np.ones((4, 4)))
    hierarchy = role_extraction.cluster(role_extraction.similarity_graph(weights))
    assert hierarchy.top.labels.tolist() == np.repeat([0, 1, 2], 4).tolist()


def test_cluster_keeps_complete_graph_together():
    hierarchy = role_extraction.cluster(role_extraction.similarity_graph(np.ones((6, 6))))
    assert hierarchy.top.k == 1


def test_canonical_order_ignores_node_ids():
    weights = np.array([[0.0, 3.0, 1.0], [3.0, 0.0, 2.0], [1.0, 2.0, 0.0]])
    sim_graph = role_extraction.similarity_graph(weights)
    # sorted rows: node 0 -> (3, 1), node 1 -> (3, 2), node 2 -> (2, 1)
    assert role_extraction.canonical_order(sim_graph).tolist() == [2, 0, 1]
    moved = graph_io.permute(sim_graph, [1, 2, 0])
    assert role_extraction.canonical_order(moved).tolist() == [0, 1, 2]


def test_cluster_keeps_isolated_nodes_apart():
    sim_graph = DirectedGraph.from_edges(4, [(0, 1, 1.0), (1, 0, 1.0)])
    hierarchy = role_extraction.cluster(sim_graph)
    assert hierarchy.top.k == 3
    assert hierarchy.top.labels[0] == hierarchy.top.labels[1]


def test_cluster_of_empty_graph_is_singletons():
    hierarchy = role_extraction.cluster(DirectedGraph.from_edges(3, []))
    assert hierarchy.top == Partition(labels=np.arange(3))


def test_cluster_is_deterministic_for_a_seed():
    rng = np.random.default_rng(0)
    weights = rng.random((20, 20))
    sim_graph = role_extraction.similarity_graph(weights + weights.T)
    first = role_extraction.cluster(sim_graph, seed=4)
    second = role_extraction.cluster(sim_graph, seed=4)
    assert first.levels == second.levels


def test_cluster_levels_are_nested():
    rng = np.random.default_rng(1)
    weights = np.kron(np.eye(4), np.ones((5, 5))) + 0.05 * rng.random((20, 20))
    hierarchy = role_extraction.cluster(role_extraction.similarity_graph(weights + weights.T))
    counts = hierarchy.cluster_counts()
    assert counts == sorted(counts, reverse=True)


def test_resolution_must_be_positive(triangle):
    with pytest.raises(DomainError):
        role_extraction.cluster(triangle, resolution=0.0)


@pytest.mark.parametrize("k", [2, 3, 5])
@pytest.mark.parametrize("full", [False, True])
def test_block_cycle_roles_are_recovered(k, full):
    graph, truth = block_cycle(k, 20)
    hierarchy = role_extraction.extract_roles(graph, r=k, full=full)
    assert nmi(truth, hierarchy.top) == 1.0


def test_default_rank_is_capped_by_node_count():
    graph, truth = block_cycle(2, 3)
    hierarchy = role_extraction.extract_roles(graph)
    assert nmi(truth, hierarchy.top) == 1.0
