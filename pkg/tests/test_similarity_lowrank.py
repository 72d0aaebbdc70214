from __future__ import annotations

import numpy as np
import pytest

from conftest import block_cycle, random_digraph
from rolesim.core.exceptions import CapabilityError, DomainError
from rolesim.models.graph import DirectedGraph
from rolesim.models.similarity import ConvergenceReport, LowRankFactor
from rolesim.services import similarity_exact as exact
from rolesim.services import similarity_lowrank as lowrank


def test_orient_columns_makes_largest_entry_positive():
    U = np.array([[0.1, -0.9], [-0.8, 0.2]])
    oriented = lowrank.orient_columns(U)
    assert oriented[1, 0] == 0.8
    assert oriented[0, 1] == 0.9


def test_truncate_factor_sorts_pads_and_collapses():
    U = np.eye(3)
    X, rank, tie = lowrank.truncate_factor(U, np.array([1.0, 3.0, 1e-15]), 4)
    assert X.shape == (3, 4)
    assert np.allclose(np.linalg.norm(X, axis=0), [3.0, 1.0, 0.0, 0.0])
    assert rank == 2
    assert not tie


def test_truncate_factor_reports_ties():
    _, _, tie = lowrank.truncate_factor(np.eye(3), np.array([2.0, 1.0, 1.0]), 2)
    assert tie


def test_lowrank_s1_is_best_approximation():
    graph = random_digraph(8, 0.4, seed=2)
    s1 = exact.first_order_term(graph)
    factor = lowrank.lowrank_s1(graph, 3)
    eigenvalues = np.sort(np.linalg.eigvalsh(s1))[::-1]
    assert np.allclose(factor.singular_values, eigenvalues[:3], rtol=1e-8, atol=1e-10)
    assert np.linalg.norm(s1 - factor.materialize()) == pytest.approx(
        np.sqrt(np.sum(eigenvalues[3:] ** 2)), rel=1e-8, abs=1e-10
    )


def test_rank_bounds_are_checked(triangle):
    with pytest.raises(DomainError):
        lowrank.lowrank_s1(triangle, 0)
    with pytest.raises(DomainError):
        lowrank.lowrank_similarity(triangle, 4)


def test_step_from_zero_is_s1_projection():
    graph = random_digraph(7, 0.4, seed=8)
    X1 = lowrank.lowrank_s1(graph, 2)
    step = lowrank.lowrank_step(graph, 0.1, LowRankFactor.zeros(7, 2), X1)
    assert np.allclose(step.materialize(), X1.materialize(), atol=1e-10)


def test_step_checks_dimensions():
    graph = random_digraph(5, 0.5, seed=1)
    with pytest.raises(DomainError):
        lowrank.lowrank_step(graph, 0.1, LowRankFactor.zeros(5, 2), LowRankFactor.zeros(5, 3))


def test_factored_difference_norm_matches_dense():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((9, 3))
    Z = rng.standard_normal((9, 2))
    expected = np.linalg.norm(X @ X.T - Z @ Z.T)
    assert lowrank.factored_difference_norm(X, Z) == pytest.approx(expected, rel=1e-10)
    assert lowrank.factored_difference_norm(X, X) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("seed", range(5))
def test_full_rank_matches_full_similarity(seed):
    graph = random_digraph(8, 0.3, seed=seed)
    beta = 0.5 * exact.beta_max_easy(graph)
    full, _ = exact.full_similarity(graph, beta, tol=1e-12)
    factor, report = lowrank.lowrank_similarity(graph, 8, beta, tol=1e-10)
    assert report.converged
    assert np.linalg.norm(factor.materialize() - full.values) <= 1e-6 * full.frobenius()


def test_block_cycle_is_recovered_at_its_rank():
    graph, _ = block_cycle(3, 20)
    full, _ = exact.full_similarity(graph)
    factor, report = lowrank.lowrank_similarity(graph, 3)
    assert report.converged
    assert np.linalg.norm(factor.materialize() - full.values) <= 1e-6 * full.frobenius()


def test_extra_rank_collapses_on_low_rank_similarity():
    graph, _ = block_cycle(2, 6)
    factor, report = lowrank.lowrank_similarity(graph, 5)
    assert report.converged
    assert report.rank_collapse == 2
    assert factor.rank == 2


def test_stop_rule_and_report_shape():
    graph = random_digraph(6, 0.4, seed=3)
    factor, report = lowrank.lowrank_similarity(graph, 2, max_iter=3)
    assert isinstance(report, ConvergenceReport)
    assert report.iterations <= 3
    assert len(report.residuals) == report.iterations
    assert factor.r == 2


def test_materialize_guard():
    factor = LowRankFactor.zeros(10, 1)
    with pytest.raises(CapabilityError):
        lowrank.materialize(factor, guard=5)
    assert lowrank.materialize(factor).shape == (10, 10)


def test_identity_graph_s1_factor_picks_one_axis():
    graph = DirectedGraph.from_edges(2, [(0, 0), (1, 1)])
    factor = lowrank.lowrank_s1(graph, 1)
    assert factor.frobenius() == pytest.approx(2.0, rel=1e-12)
    assert np.count_nonzero(np.abs(factor.X[:, 0]) > 1e-12) == 1


def test_lowrank_s1_at_full_rank_is_s1():
    graph = random_digraph(6, 0.4, seed=5)
    s1 = exact.first_order_term(graph)
    assert np.linalg.norm(lowrank.lowrank_s1(graph, 6).materialize() - s1) <= 1e-10 * np.linalg.norm(s1)


def test_empty_graph_gives_zero_factor():
    factor, report = lowrank.lowrank_similarity(DirectedGraph.from_edges(4, []), 2)
    assert report.converged
    assert not factor.X.any()


def test_full_rank_step_is_one_full_iteration():
    graph = random_digraph(5, 0.5, seed=6)
    beta = 0.5 * exact.beta_max_easy(graph)
    X1 = lowrank.lowrank_s1(graph, 5)
    X_k = lowrank.lowrank_step(graph, beta, X1, X1)
    S_k = X_k.materialize()
    expected = exact.first_order_term(graph) + beta * beta * exact.gamma_apply(graph, S_k)
    assert np.linalg.norm(lowrank.lowrank_step(graph, beta, X_k, X1).materialize() - expected) <= 1e-10 * np.linalg.norm(expected)
