"""Full-rank neighborhood-pattern similarity.

S* is the fixed point of ``S = S1 + beta^2 Gamma_A[S]`` with
``S1 = A A^T + A^T A`` and ``Gamma_A[X] = A X A^T + A^T X A``. The iteration
keeps A sparse and S dense (S fills in as the pattern length grows).
"""
from __future__ import annotations

import itertools
import math
from typing import Callable, Union

import numpy as np
import numpy.typing as npt
import scipy.linalg
import scipy.sparse as sp

from rolesim.core.config import get_settings
from rolesim.core.exceptions import CapabilityError, DomainError, NumericalError
from rolesim.core.logging import get_logger
from rolesim.models.graph import DenseSymMatrix, DirectedGraph
from rolesim.models.similarity import ConvergenceReport, ScalingParameter

logger = get_logger(__name__)

GraphLike = Union[DirectedGraph, npt.ArrayLike, sp.spmatrix]
BetaLike = Union[float, ScalingParameter, None]

MAX_PATTERN_LENGTH = 12
EXACT_BOUND_MAX_DIM = 4096  # n^2 for the Kronecker operator
DIRECT_SOLVE_MAX_N = 30
POWER_SEED = 0


def as_sparse(A: GraphLike) -> sp.csr_matrix:
    """CSR adjacency of a graph, dense array or sparse matrix."""
    if isinstance(A, DirectedGraph):
        return A.to_sparse()
    matrix = sp.csr_matrix(A, dtype=np.float64)
    if matrix.shape[0] != matrix.shape[1]:
        raise DomainError("adjacency matrix must be square", shape=matrix.shape)
    return matrix


def gamma_apply(A: GraphLike, X: npt.ArrayLike, symmetrize: bool = True) -> npt.NDArray[np.float64]:
    """``A X A^T + A^T X A``; averaged with its transpose unless ``symmetrize`` is off."""
    adjacency = as_sparse(A)
    X = np.asarray(X, dtype=np.float64)
    if X.shape != adjacency.shape:
        raise DomainError("dimension mismatch", adjacency=adjacency.shape, matrix=X.shape)
    # A X A^T = A (A X^T)^T keeps every product sparse @ dense
    forward = adjacency @ np.asarray(adjacency @ X.T).T
    backward = adjacency.T @ np.asarray(adjacency.T @ X.T).T
    result = np.asarray(forward + backward)
    if symmetrize:
        result = (result + result.T) / 2.0
    return result


def first_order_term(A: GraphLike) -> npt.NDArray[np.float64]:
    """``S1 = A A^T + A^T A``: common children plus common parents."""
    adjacency = as_sparse(A)
    s1 = (adjacency @ adjacency.T + adjacency.T @ adjacency).toarray()
    return (s1 + s1.T) / 2.0


def pattern_count(A: GraphLike, ell: int, method: str = "recursive") -> DenseSymMatrix:
    """Common-target counts ``N_ell`` over neighborhood patterns of length ``ell``.

    ``recursive`` applies Gamma_A ``ell - 1`` times to ``N_1``; ``words`` sums
    ``W W^T`` over the 2^ell products ``W`` of A / A^T factors.
    """
    if ell < 1:
        raise DomainError("pattern length starts at 1", ell=ell)
    if ell > MAX_PATTERN_LENGTH:
        raise CapabilityError("pattern_count", f"ell must be at most {MAX_PATTERN_LENGTH}", ell=ell)
    adjacency = as_sparse(A)

    if method == "recursive":
        counts = first_order_term(adjacency)
        for _ in range(ell - 1):
            counts = gamma_apply(adjacency, counts)
        return DenseSymMatrix.symmetrized(counts)

    if method == "words":
        dense = adjacency.toarray()
        letters = (dense, dense.T)
        total = np.zeros_like(dense)
        for word in itertools.product(letters, repeat=ell):
            product = np.linalg.multi_dot(word) if ell > 1 else word[0]
            total += product @ product.T
        return DenseSymMatrix.symmetrized(total)

    raise DomainError(f"unknown pattern_count method '{method}'", choices=["recursive", "words"])


def spectral_radius(
    apply: Callable[[npt.NDArray[np.float64]], npt.NDArray[np.float64]],
    dim: int,
    *,
    tol: float | None = None,
    max_iter: int | None = None,
) -> float:
    """Spectral radius of a symmetric operator by power iteration on its square.

    Squaring makes +rho and -rho collapse onto one dominant eigenvalue, so
    bipartite-like spectra converge. Stops when the relative residual of the
    squared operator falls below ``sqrt(tol)``, which puts the eigenvalue
    error near ``tol``.
    """
    settings = get_settings()
    tol = settings.power_tol if tol is None else tol
    max_iter = settings.power_max_iter if max_iter is None else max_iter

    rng = np.random.default_rng(POWER_SEED)
    x = rng.standard_normal(dim)
    x /= np.linalg.norm(x)

    estimate = 0.0
    for iteration in range(1, max_iter + 1):
        y = apply(apply(x))
        estimate = float(x @ y)
        y_norm = float(np.linalg.norm(y))
        if y_norm == 0.0:
            return 0.0
        residual = float(np.linalg.norm(y - estimate * x))
        x = y / y_norm
        if residual <= math.sqrt(tol) * estimate:
            break
    else:
        logger.warning(
            "Power iteration hit its iteration cap",
            iterations=max_iter,
            estimate=math.sqrt(max(estimate, 0.0)),
        )
    return math.sqrt(max(estimate, 0.0))


def beta_max_easy(A: GraphLike) -> float:
    """``1 / rho(A + A^T)``; ``inf`` for the empty graph, where any beta converges."""
    adjacency = as_sparse(A)
    if adjacency.nnz == 0 or not np.any(adjacency.data):
        return math.inf
    symmetric = (adjacency + adjacency.T).tocsr()
    rho = spectral_radius(lambda v: symmetric @ v, adjacency.shape[0])
    return math.inf if rho == 0.0 else 1.0 / rho


def beta_max_exact(A: GraphLike) -> float:
    """``1 / sqrt(rho(A (x) A + (A (x) A)^T))``.

    The Kronecker operator acts on vec(X) exactly as Gamma_A acts on X, so the
    power iteration runs on n x n matrices without forming the n^2 x n^2 matrix.
    """
    adjacency = as_sparse(A)
    n = adjacency.shape[0]
    if n * n > EXACT_BOUND_MAX_DIM:
        raise CapabilityError(
            "beta_max_exact",
            f"n^2 = {n * n} exceeds {EXACT_BOUND_MAX_DIM}; use beta_max_easy instead",
            n=n,
        )
    if adjacency.nnz == 0 or not np.any(adjacency.data):
        return math.inf

    def apply(v: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return gamma_apply(adjacency, v.reshape(n, n), symmetrize=False).ravel()

    rho = spectral_radius(apply, n * n)
    return math.inf if rho == 0.0 else 1.0 / math.sqrt(rho)


def resolve_beta(
    A: GraphLike,
    beta: BetaLike = None,
    *,
    force: bool = False,
    safety_factor: float | None = None,
) -> ScalingParameter:
    """Check ``beta`` against the easy bound, or derive it as a fraction of the bound."""
    if isinstance(beta, ScalingParameter):
        return beta

    easy = beta_max_easy(A)
    if beta is None:
        factor = get_settings().beta_safety_factor if safety_factor is None else safety_factor
        value = 1.0 if math.isinf(easy) else factor * easy
        logger.info("Resolved beta automatically", beta=value, easy_bound=easy, factor=factor)
        return ScalingParameter(beta=value, easy_bound=easy)

    scaling = ScalingParameter(beta=float(beta), easy_bound=easy, forced=force)
    if scaling.violates_bound:
        logger.warning(
            "beta exceeds the easy convergence bound; iteration may diverge",
            beta=scaling.beta,
            easy_bound=easy,
        )
    return scaling


def similarity_iterate(A: GraphLike, beta: BetaLike, k: int) -> DenseSymMatrix:
    """The k-th iterate from ``S_0 = 0``, i.e. ``sum_{l=1..k} beta^(2(l-1)) N_l``."""
    if k < 0:
        raise DomainError("iteration count must be non-negative", k=k)
    adjacency = as_sparse(A)
    b2 = resolve_beta(adjacency, beta).squared
    s1 = first_order_term(adjacency)
    current = np.zeros_like(s1)
    for _ in range(k):
        current = s1 + b2 * gamma_apply(adjacency, current)
    return DenseSymMatrix.symmetrized(current)


def full_similarity(
    A: GraphLike,
    beta: BetaLike = None,
    tol: float | None = None,
    max_iter: int | None = None,
    *,
    initial: npt.ArrayLike | None = None,
    force: bool = False,
) -> tuple[DenseSymMatrix, ConvergenceReport]:
    """Fixed point of ``S_{k+1} = S1 + beta^2 Gamma_A[S_k]``.

    Starts from ``S_0 = 0`` unless ``initial`` is given. Stops once
    ``||S_{k+1} - S_k||_F <= tol ||S_{k+1}||_F``; without convergence the last
    iterate is returned with ``report.converged`` false.
    """
    settings = get_settings()
    tol = settings.tol if tol is None else tol
    max_iter = settings.max_iter if max_iter is None else max_iter
    if tol <= 0:
        raise DomainError("tol must be positive", tol=tol)
    if max_iter < 1:
        raise DomainError("max_iter must be at least 1", max_iter=max_iter)

    adjacency = as_sparse(A)
    b2 = resolve_beta(adjacency, beta, force=force).squared
    s1 = first_order_term(adjacency)

    if initial is None:
        current = np.zeros_like(s1)
    else:
        current = np.array(DenseSymMatrix.symmetrized(initial).values)
        if current.shape != s1.shape:
            raise DomainError("initial matrix has the wrong shape", shape=current.shape)

    report = ConvergenceReport()
    for _ in range(max_iter):
        following = s1 + b2 * gamma_apply(adjacency, current)
        residual = float(np.linalg.norm(following - current))
        report.record(residual)
        current = following
        if residual <= tol * float(np.linalg.norm(current)):
            report.converged = True
            break

    if report.converged:
        logger.debug("Full similarity converged", iterations=report.iterations, residual=report.final_residual)
    else:
        logger.warning(
            "Full similarity did not converge",
            iterations=report.iterations,
            residual=report.final_residual,
            tol=tol,
        )
    return DenseSymMatrix.symmetrized(current), report


def fixed_point_residual(A: GraphLike, beta: float, S: npt.ArrayLike) -> float:
    """``||S - S1 - beta^2 Gamma_A[S]||_F``."""
    adjacency = as_sparse(A)
    S = np.asarray(S, dtype=np.float64)
    return float(np.linalg.norm(S - first_order_term(adjacency) - beta * beta * gamma_apply(adjacency, S)))


def kronecker_direct_solve(A: GraphLike, beta: BetaLike) -> DenseSymMatrix:
    """Solve ``[I - beta^2 (A (x) A + (A (x) A)^T)] vec(S) = vec(S1)`` densely.

    Only meant as a small-scale oracle for the iteration.
    """
    adjacency = as_sparse(A)
    n = adjacency.shape[0]
    if n > DIRECT_SOLVE_MAX_N:
        raise CapabilityError("kronecker_direct_solve", f"n must be at most {DIRECT_SOLVE_MAX_N}", n=n)
    value = beta.beta if isinstance(beta, ScalingParameter) else beta
    if value is None:
        value = resolve_beta(adjacency).beta

    exact = beta_max_exact(adjacency)
    if value >= exact * (1.0 - 1e-12):
        raise NumericalError(
            "kronecker_direct_solve",
            "system is singular or indefinite: beta is at or above the exact bound",
            beta=value,
            exact_bound=exact,
        )

    dense = adjacency.toarray()
    kron = np.kron(dense, dense)
    system = np.eye(n * n) - value * value * (kron + kron.T)
    rhs = first_order_term(adjacency).flatten(order="F")
    try:
        solution = scipy.linalg.solve(system, rhs, assume_a="sym")
    except scipy.linalg.LinAlgError as exc:
        raise NumericalError("kronecker_direct_solve", str(exc), beta=value) from exc
    return DenseSymMatrix.symmetrized(solution.reshape((n, n), order="F"))
