from __future__ import annotations

import pytest

from rolesim.core.exceptions import DomainError
from rolesim.schemas.benchmark import NoiseLevel
from rolesim.pipelines import experiment


def test_grid_values_require_a_divisor_of_one():
    assert experiment.grid_values(0.25) == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert len(experiment.grid_values(0.05)) == 21
    with pytest.raises(DomainError):
        experiment.grid_values(0.3)
    with pytest.raises(DomainError):
        experiment.grid_values(0.0)


def test_realization_seeds_are_stable_and_distinct():
    assert experiment.realization_seed(0, 1, 2, 3) == experiment.realization_seed(0, 1, 2, 3)
    seeds = {experiment.realization_seed(0, i, j, 0) for i in range(4) for j in range(4)}
    assert len(seeds) == 16


def test_nmi_grid_cells_and_exact_corner(community_model):
    grid = experiment.nmi_grid(community_model, step=0.5, realizations=2, r=3, jobs=1)
    assert len(grid.cells) == 9
    assert all(cell.n_realizations == 2 for cell in grid.cells)
    corner = grid.cell(1.0, 0.0)
    assert corner.nmi_full == pytest.approx(1.0)
    assert corner.nmi_lowrank == pytest.approx(1.0)
    assert grid.to_csv().splitlines()[0] == "p_in,p_out,nmi_full,nmi_lowrank,n_realizations"


def test_nmi_grid_is_identical_for_any_job_count(community_model):
    serial = experiment.nmi_grid(community_model, step=0.5, realizations=1, r=3, seed_base=7, jobs=1)
    parallel = experiment.nmi_grid(community_model, step=0.5, realizations=1, r=3, seed_base=7, jobs=2)
    assert serial.to_csv() == parallel.to_csv()


def test_nmi_grid_jobs_fall_back_to_settings(community_model, monkeypatch, mocker):
    monkeypatch.setenv("ROLESIM_JOBS", "3")
    experiment.get_settings.cache_clear()
    run = mocker.patch.object(
        experiment,
        "_run_tasks",
        side_effect=lambda tasks, jobs: [experiment.RealizationResult(1.0, 1.0) for _ in tasks],
    )
    grid = experiment.nmi_grid(community_model, step=1.0, realizations=2)
    assert run.call_args.args[1] == 3
    assert len(grid.cells) == 4


def test_nmi_grid_validates_arguments(community_model):
    with pytest.raises(DomainError):
        experiment.nmi_grid(community_model, realizations=0)
    with pytest.raises(DomainError):
        experiment.nmi_grid(community_model, step=0.3)


def test_noise_panel_reports_every_level(community_model):
    levels = [NoiseLevel(p_in=1.0, p_out=0.0), NoiseLevel(p_in=0.9, p_out=0.1)]
    panel = experiment.noise_panel(community_model, levels, r=3, seed=0, r_max=3)
    exact_rows = [row for row in panel.rows if row.p_in == 1.0]
    assert exact_rows[-1].nmi == pytest.approx(1.0)
    assert exact_rows[-1].n_clusters == 3
    assert {row.knee for row in exact_rows} == {3}
    assert [row.level for row in exact_rows] == list(range(len(exact_rows)))
    assert panel.to_csv().splitlines()[0] == "p_in,p_out,level,n_clusters,nmi,knee"
