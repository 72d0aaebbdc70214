"""Rank-r projected similarity iteration.

Each step forms ``Y_k = [X_1 | beta A X_k | beta A^T X_k]`` (n x 3r), takes
``Y_k = Q_k R_k`` and a truncated SVD of the small ``R_k``, and sets
``X_{k+1} = Q_k U_k Omega_k``. Nothing n x n is ever formed.
"""
from __future__ import annotations

import math

import numpy as np
import numpy.typing as npt
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg

from rolesim.core.config import get_settings
from rolesim.core.exceptions import CapabilityError, DomainError
from rolesim.core.logging import get_logger
from rolesim.models.similarity import ConvergenceReport, LowRankFactor, ScalingParameter
from rolesim.services.similarity_exact import (
    BetaLike,
    GraphLike,
    as_sparse,
    first_order_term,
    resolve_beta,
)

logger = get_logger(__name__)

COLLAPSE_RTOL = 1e-12
GAP_RTOL = 1e-10
DENSE_S1_MAX_N = 2000
SVDS_SEED = 0


def orient_columns(U: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """Flip each column so that its largest-magnitude entry is positive."""
    if U.size == 0:
        return U
    pivots = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[pivots, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs


def truncate_factor(
    U: npt.NDArray[np.float64], s: npt.NDArray[np.float64], r: int
) -> tuple[npt.NDArray[np.float64], int, bool]:
    """Keep the r dominant pairs ``(U[:, i], s[i])`` as the factor ``U_r diag(s_r)``.

    Returns the n x r factor, its numerical rank and whether s_r ties s_{r+1}.
    Values below ``COLLAPSE_RTOL * s_max`` count as zero; missing columns are
    zero-padded.
    """
    n = U.shape[0]
    order = np.argsort(-s, kind="stable")
    s = s[order]
    U = U[:, order]

    top = float(s[0]) if s.size else 0.0
    if top <= 0.0:
        return np.zeros((n, r)), 0, False
    s = np.where(s > COLLAPSE_RTOL * top, s, 0.0)

    tie = bool(s.size > r and s[r - 1] > 0.0 and s[r - 1] - s[r] <= GAP_RTOL * top)
    keep = min(r, s.size)
    X = np.zeros((n, r))
    X[:, :keep] = orient_columns(U[:, :keep]) * s[:keep]
    return X, int(np.count_nonzero(s[:keep])), tie


def _check_rank(r: int, n: int) -> None:
    if not 1 <= r <= n:
        raise DomainError("rank must satisfy 1 <= r <= n", r=r, n=n)


def lowrank_s1(A: GraphLike, r: int) -> LowRankFactor:
    """Best rank-r factor of ``S1 = [A | A^T][A | A^T]^T``."""
    adjacency = as_sparse(A)
    n = adjacency.shape[0]
    _check_rank(r, n)

    if n <= DENSE_S1_MAX_N:
        eigenvalues, eigenvectors = scipy.linalg.eigh(first_order_term(adjacency))
        scales = np.sqrt(np.clip(eigenvalues, 0.0, None))
        X, rank, tie = truncate_factor(eigenvectors, scales, r)
    else:
        concatenated = sp.hstack([adjacency, adjacency.T]).tocsr()
        k = min(r + 1, n - 1)
        v0 = np.random.default_rng(SVDS_SEED).standard_normal(n)
        U, scales, _ = scipy.sparse.linalg.svds(concatenated, k=k, v0=v0)
        X, rank, tie = truncate_factor(U, scales, r)

    if tie:
        logger.warning("S1 has no spectral gap at the requested rank; tie broken by order", r=r)
    logger.debug("Computed rank-r factor of S1", r=r, rank=rank)
    return LowRankFactor(X=X, r=r)


def lowrank_step(
    A: GraphLike,
    beta: float | ScalingParameter,
    X_k: LowRankFactor,
    X1: LowRankFactor,
    report: ConvergenceReport | None = None,
) -> LowRankFactor:
    """One projected step: ``X_{k+1} X_{k+1}^T = Pi_r[X1 X1^T + beta^2 Gamma_A[X_k X_k^T]]``."""
    adjacency = as_sparse(A)
    if not (X_k.n == X1.n == adjacency.shape[0]):
        raise DomainError("factor dimensions do not match the graph", n=adjacency.shape[0])
    if X_k.r != X1.r:
        raise DomainError("iterate and S1 factor must share the rank bound", r_k=X_k.r, r_1=X1.r)
    value = beta.beta if isinstance(beta, ScalingParameter) else float(beta)
    r = X1.r

    stacked = np.hstack(
        [
            X1.X,
            value * np.asarray(adjacency @ X_k.X),
            value * np.asarray(adjacency.T @ X_k.X),
        ]
    )
    Q, R = scipy.linalg.qr(stacked, mode="economic")
    U, scales, _ = scipy.linalg.svd(R, full_matrices=False, lapack_driver="gesvd")
    X, rank, tie = truncate_factor(Q @ U, scales, r)

    if report is not None:
        if rank < r:
            report.rank_collapse = rank if report.rank_collapse is None else min(report.rank_collapse, rank)
        report.spectral_gap_tie = tie
    return LowRankFactor(X=X, r=r)


def factored_difference_norm(X: npt.ArrayLike, Z: npt.ArrayLike) -> float:
    """``||X X^T - Z Z^T||_F`` from a QR of ``[X | Z]``, without n x n products.

    With ``[X | Z] = Q R`` the difference is ``Q (R_X R_X^T - R_Z R_Z^T) Q^T``
    and Q has orthonormal columns, so only a 2r x 2r matrix is formed.
    """
    X = np.asarray(X, dtype=np.float64)
    Z = np.asarray(Z, dtype=np.float64)
    width = X.shape[1]
    _, R = scipy.linalg.qr(np.hstack([X, Z]), mode="economic")
    R_x, R_z = R[:, :width], R[:, width:]
    return float(np.linalg.norm(R_x @ R_x.T - R_z @ R_z.T))


def lowrank_similarity(
    A: GraphLike,
    r: int,
    beta: BetaLike = None,
    tol: float | None = None,
    max_iter: int | None = None,
    *,
    force: bool = False,
) -> tuple[LowRankFactor, ConvergenceReport]:
    """Fixed point ``S^(r) = X X^T`` of the projected iteration, starting from ``X_0 = 0``.

    Stops once ``||X_{k+1} X_{k+1}^T - X_k X_k^T||_F <= tol ||X_k X_k^T||_F``.
    """
    settings = get_settings()
    tol = settings.tol if tol is None else tol
    max_iter = settings.max_iter if max_iter is None else max_iter
    if tol <= 0:
        raise DomainError("tol must be positive", tol=tol)
    if max_iter < 1:
        raise DomainError("max_iter must be at least 1", max_iter=max_iter)

    adjacency = as_sparse(A)
    n = adjacency.shape[0]
    _check_rank(r, n)
    scaling = resolve_beta(adjacency, beta, force=force)

    X1 = lowrank_s1(adjacency, r)
    current = LowRankFactor.zeros(n, r)
    report = ConvergenceReport()
    for _ in range(max_iter):
        following = lowrank_step(adjacency, scaling, current, X1, report)
        residual = factored_difference_norm(following.X, current.X)
        report.record(residual)
        reference = current.frobenius()
        current = following
        if residual <= tol * reference:
            report.converged = True
            break

    if report.spectral_gap_tie:
        logger.warning(
            "Low-rank fixed point has no spectral gap at rank r; result depends on tie-breaking",
            r=r,
        )
    if report.rank_collapse is not None:
        logger.info("Low-rank iterate collapsed below the rank bound", r=r, rank=report.rank_collapse)
    if not report.converged:
        logger.warning(
            "Low-rank similarity did not converge",
            r=r,
            iterations=report.iterations,
            residual=report.final_residual if report.residuals else math.nan,
        )
    return current, report


def materialize(factor: LowRankFactor, guard: int | None = None) -> npt.NDArray[np.float64]:
    """Dense ``X X^T``, refused above the configured size guard."""
    limit = get_settings().dense_guard if guard is None else guard
    if factor.n > limit:
        raise CapabilityError("materialize", f"n = {factor.n} exceeds the dense guard {limit}", n=factor.n)
    dense = factor.materialize()
    return (dense + dense.T) / 2.0
