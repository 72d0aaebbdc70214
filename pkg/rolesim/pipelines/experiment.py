"""Seeded experiments over generated benchmark graphs.

Every realization draws its seed from ``SeedSequence([seed_base, i, j, rep])``
so the grid can be scheduled on any number of workers and still reduce to the
same numbers.
"""
from __future__ import annotations

from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from rolesim.core.config import get_settings
from rolesim.core.exceptions import DomainError
from rolesim.core.logging import get_logger, log_execution_time
from rolesim.models.benchmark import RoleModel
from rolesim.schemas.benchmark import NoiseLevel
from rolesim.schemas.reports import NmiCell, NmiGrid, NoisePanel, PanelRow
from rolesim.services import benchgen
from rolesim.services.evaluation import nmi, rank_sweep
from rolesim.services.role_extraction import extract_roles

logger = get_logger(__name__)

STEP_RTOL = 1e-9


@dataclass(slots=True)
class RealizationTask:
    model: RoleModel
    p_in: float
    p_out: float
    seed: int
    rank: int


@dataclass(slots=True)
class RealizationResult:
    nmi_full: float
    nmi_lowrank: float


def realization_seed(*entropy: int) -> int:
    """64-bit seed derived from the given integers, independent of scheduling."""
    return int(np.random.SeedSequence(list(entropy)).generate_state(1, np.uint64)[0])


def grid_values(step: float) -> list[float]:
    """``0, step, ..., 1``; ``step`` has to divide 1."""
    if not 0.0 < step <= 1.0:
        raise DomainError("step must lie in (0, 1]", step=step)
    count = round(1.0 / step)
    if abs(count * step - 1.0) > STEP_RTOL:
        raise DomainError("step must divide 1", step=step)
    return [index / count for index in range(count + 1)]


def run_realization(task: RealizationTask) -> RealizationResult:
    instance = benchgen.generate(task.model, task.p_in, task.p_out, seed=task.seed)
    full = extract_roles(instance.graph, full=True, seed=0)
    lowrank = extract_roles(instance.graph, r=task.rank, seed=0)
    return RealizationResult(
        nmi_full=nmi(instance.truth, full.top),
        nmi_lowrank=nmi(instance.truth, lowrank.top),
    )


def _run_tasks(tasks: Sequence[RealizationTask], jobs: int) -> list[RealizationResult]:
    if jobs <= 1 or len(tasks) <= 1:
        return [run_realization(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as executor:
        # map keeps submission order, so the reduction below is schedule independent
        return list(executor.map(run_realization, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


@log_execution_time
def nmi_grid(
    model: RoleModel,
    step: float = 0.05,
    realizations: int = 20,
    r: int = 10,
    seed_base: int = 0,
    jobs: int | None = None,
) -> NmiGrid:
    """Mean top-level NMI of the full and low-rank pipelines on every (p_in, p_out) cell."""
    if realizations < 1:
        raise DomainError("realizations must be at least 1", realizations=realizations)
    if r < 1:
        raise DomainError("rank must be at least 1", r=r)
    jobs = get_settings().jobs if jobs is None else jobs
    if jobs < 1:
        raise DomainError("jobs must be at least 1", jobs=jobs)

    values = grid_values(step)
    rank = min(r, model.n)
    tasks = [
        RealizationTask(
            model=model,
            p_in=p_in,
            p_out=p_out,
            seed=realization_seed(seed_base, i, j, rep),
            rank=rank,
        )
        for i, p_in in enumerate(values)
        for j, p_out in enumerate(values)
        for rep in range(realizations)
    ]
    logger.info("Running NMI grid", cells=len(values) ** 2, realizations=realizations, jobs=jobs)
    results = _run_tasks(tasks, jobs)

    cells = []
    for offset in range(0, len(tasks), realizations):
        chunk = results[offset : offset + realizations]
        task = tasks[offset]
        cells.append(
            NmiCell(
                p_in=task.p_in,
                p_out=task.p_out,
                nmi_full=float(np.mean([result.nmi_full for result in chunk])),
                nmi_lowrank=float(np.mean([result.nmi_lowrank for result in chunk])),
                n_realizations=realizations,
            )
        )
    return NmiGrid(step=step, cells=cells)


@log_execution_time
def noise_panel(
    model: RoleModel,
    levels: Iterable[NoiseLevel],
    r: int = 10,
    seed: int = 0,
    *,
    r_max: int = 6,
) -> NoisePanel:
    """One realization per noise level: knee of the rank sweep and NMI at every hierarchy level."""
    rows = []
    for index, level in enumerate(levels):
        instance = benchgen.generate(
            model, level.p_in, level.p_out, seed=realization_seed(seed, index)
        )
        sweep = rank_sweep(instance.graph, r_max)
        hierarchy = extract_roles(instance.graph, r=min(r, model.n), seed=0)
        for depth, partition in enumerate(hierarchy.levels):
            rows.append(
                PanelRow(
                    p_in=level.p_in,
                    p_out=level.p_out,
                    level=depth,
                    n_clusters=partition.k,
                    nmi=nmi(instance.truth, partition),
                    knee=sweep.knee,
                )
            )
        logger.info(
            "Panel setting finished",
            p_in=level.p_in,
            p_out=level.p_out,
            knee=sweep.knee,
            clusters=hierarchy.cluster_counts(),
        )
    return NoisePanel(rows=rows)
