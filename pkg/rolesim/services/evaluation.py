from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from sklearn.metrics import normalized_mutual_info_score

from rolesim.core.config import get_settings
from rolesim.core.exceptions import CapabilityError, DomainError, NumericalError
from rolesim.core.logging import get_logger, log_execution_time
from rolesim.models.graph import Partition
from rolesim.schemas.reports import RankSweepReport, RankSweepRow
from rolesim.services.similarity_exact import BetaLike, GraphLike, as_sparse, full_similarity, resolve_beta
from rolesim.services.similarity_lowrank import factored_difference_norm, lowrank_similarity

logger = get_logger(__name__)

STEP_FLOOR_RTOL = 1e-12


def nmi(p1: Partition, p2: Partition) -> float:
    """``2 I(P1;P2) / (H(P1) + H(P2))`` with natural logs.

    Two single-cluster partitions score 1; a single cluster against a
    non-trivial partition scores 0.
    """
    if p1.n != p2.n:
        raise DomainError("partitions cover different node counts", n1=p1.n, n2=p2.n)
    if p1.k == 1 or p2.k == 1:
        return 1.0 if p1.k == p2.k else 0.0
    score = normalized_mutual_info_score(p1.labels, p2.labels, average_method="arithmetic")
    return float(min(1.0, max(0.0, score)))


def detect_knee(step_norms: Sequence[float], floor: float, threshold: float | None = None) -> int | None:
    """Smallest rank r >= 2 maximising ``step(r-1) / step(r)``, if that ratio exceeds ``threshold``.

    ``step_norms[i]`` belongs to rank ``i + 1``. Norms at or below ``floor``
    count as zero: a drop onto zero is an infinite ratio, zero after zero is
    no drop.
    """
    threshold = get_settings().knee_threshold if threshold is None else threshold
    best_rank: int | None = None
    best_ratio = 0.0
    for index in range(1, len(step_norms)):
        previous, current = step_norms[index - 1], step_norms[index]
        if previous <= floor:
            continue
        ratio = math.inf if current <= floor else previous / current
        if ratio > best_ratio:
            best_ratio = ratio
            best_rank = index + 1
    if best_rank is None or best_ratio <= threshold:
        return None
    return best_rank


@log_execution_time
def rank_sweep(
    A: GraphLike,
    r_max: int,
    beta: BetaLike = None,
    tol: float | None = None,
    *,
    max_iter: int | None = None,
    knee_threshold: float | None = None,
) -> RankSweepReport:
    """``||S* - S^(r)||_F`` and ``||S^(r) - S^(r+1)||_F`` for r = 1..r_max, plus the knee."""
    adjacency = as_sparse(A)
    n = adjacency.shape[0]
    guard = get_settings().sweep_guard
    if n > guard:
        raise CapabilityError("rank_sweep", f"n = {n} exceeds the dense guard {guard}", n=n)
    if r_max < 1:
        raise DomainError("r_max must be at least 1", r_max=r_max)

    scaling = resolve_beta(adjacency, beta)
    exact, convergence = full_similarity(adjacency, scaling, tol, max_iter)
    if not convergence.converged:
        raise NumericalError(
            "rank_sweep",
            "full-rank similarity did not converge; the sweep would be meaningless",
            iterations=convergence.iterations,
        )
    full_norm = exact.frobenius()

    # S^(r) for r = 1..r_max + 1; ranks past n repeat the rank-n solution
    factors = []
    for r in range(1, r_max + 2):
        factor, lowrank_report = lowrank_similarity(adjacency, min(r, n), scaling, tol, max_iter)
        if not lowrank_report.converged:
            logger.warning("Rank sweep iterate did not converge", r=r, iterations=lowrank_report.iterations)
        factors.append(factor)

    rows = []
    for r in range(1, r_max + 1):
        dense = factors[r - 1].materialize()
        rows.append(
            RankSweepRow(
                r=r,
                full_gap=float(np.linalg.norm(exact.values - dense)),
                step_norm=factored_difference_norm(factors[r - 1].X, factors[r].X),
            )
        )

    knee = detect_knee(
        [row.step_norm for row in rows],
        floor=STEP_FLOOR_RTOL * max(full_norm, 1.0),
        threshold=knee_threshold,
    )
    report = RankSweepReport(rows=rows, knee=knee, full_norm=full_norm)
    increases = report.gap_increases()
    if increases:
        logger.warning("full_gap is not monotone in the rank", ranks=increases)
    logger.info("Rank sweep finished", n=n, r_max=r_max, knee=knee)
    return report
