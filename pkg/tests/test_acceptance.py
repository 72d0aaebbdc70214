"""End-to-end checks on planted-role benchmarks.

The calibration runs over many seeds are marked ``slow``.
"""
from __future__ import annotations

import numpy as np
import pytest

from conftest import block_cycle, random_digraph
from rolesim.models.benchmark import RoleModel
from rolesim.pipelines.experiment import nmi_grid
from rolesim.services import benchgen
from rolesim.services import similarity_exact as exact
from rolesim.services.evaluation import nmi, rank_sweep
from rolesim.services.role_extraction import extract_roles
from rolesim.services.similarity_lowrank import lowrank_similarity


@pytest.mark.parametrize("seed", range(50))
def test_iteration_matches_direct_solve(seed):
    n = 3 + seed % 10
    graph = random_digraph(n, 0.3, seed=seed)
    beta = 0.5 * exact.beta_max_easy(graph)
    S, report = exact.full_similarity(graph, beta)
    oracle = exact.kronecker_direct_solve(graph, beta)
    assert report.converged
    assert np.linalg.norm(S.values - oracle.values) <= 1e-8 * oracle.frobenius()


@pytest.mark.parametrize("k", [2, 3, 5])
def test_block_cycle_similarity_has_rank_k(k):
    graph, truth = block_cycle(k, 20)
    S, _ = exact.full_similarity(graph)
    singular = np.linalg.svd(S.values, compute_uv=False)
    assert singular[k] / singular[0] < 1e-8
    assert singular[k - 1] / singular[0] > 1e-3

    factor, report = lowrank_similarity(graph, k)
    assert report.converged
    assert np.linalg.norm(factor.materialize() - S.values) <= 1e-6 * S.frobenius()
    assert nmi(truth, extract_roles(graph, r=k).top) == 1.0


def _role_model(kind: str) -> RoleModel:
    role_graph = benchgen.community_role_graph(3) if kind == "community" else benchgen.cycle_role_graph(3)
    return RoleModel.uniform(role_graph, 50)


@pytest.mark.slow
@pytest.mark.parametrize("kind", ["community", "cycle"])
def test_knee_marks_the_role_count(kind):
    model = _role_model(kind)
    structured = [
        rank_sweep(benchgen.generate(model, 0.9, 0.1, seed=seed).graph, 4, max_iter=2000).knee
        for seed in range(20)
    ]
    structureless = [
        rank_sweep(benchgen.generate(model, 0.5, 0.5, seed=seed).graph, 4, max_iter=2000).knee
        for seed in range(20)
    ]
    assert sum(knee == 3 for knee in structured) >= 15
    assert sum(knee is None for knee in structureless) >= 15


def _mean_top_nmi(model: RoleModel, p_in: float, p_out: float) -> float:
    scores = []
    for seed in range(20):
        instance = benchgen.generate(model, p_in, p_out, seed=seed)
        scores.append(nmi(instance.truth, extract_roles(instance.graph).top))
    return float(np.mean(scores))


@pytest.mark.slow
def test_roles_recovered_at_low_noise():
    model = _role_model("community")
    assert _mean_top_nmi(model, 0.9, 0.1) >= 0.95
    assert _mean_top_nmi(model, 0.8, 0.2) >= 0.95
    assert _mean_top_nmi(model, 0.6, 0.4) >= 0.5


@pytest.mark.slow
def test_structureless_graphs_yield_no_roles():
    assert _mean_top_nmi(_role_model("community"), 0.5, 0.5) <= 0.2


@pytest.mark.slow
def test_full_and_low_rank_pipelines_agree():
    model = RoleModel.uniform(benchgen.community_role_graph(3), 30)
    grid = nmi_grid(model, step=0.1, realizations=10, r=10, jobs=4)
    assert len(grid.cells) == 121
    assert grid.agreement_rate(0.1) >= 0.9
    assert grid.cell(1.0, 0.0).nmi_full == pytest.approx(1.0)
