from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from rolesim.core.exceptions import DomainError

ORTHOGONALITY_RTOL = 1e-9


@dataclass(frozen=True, slots=True)
class ScalingParameter:
    """The damping weight beta together with the bound it was checked against.

    ``easy_bound`` is ``1 / rho(A + A^T)``; a beta above it is only accepted
    with ``forced=True`` and the violation stays recorded on the instance.
    """

    beta: float
    easy_bound: float
    forced: bool = False

    def __post_init__(self) -> None:
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise DomainError("beta must be a positive finite number", beta=self.beta)
        if self.beta > self.easy_bound and not self.forced:
            raise DomainError(
                "beta exceeds the convergence bound 1/rho(A+A^T); pass force to override",
                beta=self.beta,
                bound=self.easy_bound,
            )

    @property
    def violates_bound(self) -> bool:
        return self.beta > self.easy_bound

    @property
    def squared(self) -> float:
        return self.beta * self.beta


@dataclass(slots=True)
class ConvergenceReport:
    iterations: int = 0
    residuals: list[float] = field(default_factory=list)
    converged: bool = False
    # Smallest rank reached by a low-rank iterate, when it collapsed below r
    rank_collapse: int | None = None
    spectral_gap_tie: bool = False

    def record(self, residual: float) -> None:
        self.iterations += 1
        self.residuals.append(float(residual))

    @property
    def final_residual(self) -> float:
        return self.residuals[-1] if self.residuals else math.nan


@dataclass(frozen=True, slots=True, eq=False)
class LowRankFactor:
    """n x r factor X representing the similarity ``X X^T``.

    Columns are mutually orthogonal with non-increasing norms (the ``U Sigma``
    form of a truncated SVD). Columns past the numerical rank are zero.
    """

    X: npt.NDArray[np.float64]
    r: int

    def __post_init__(self) -> None:
        X = np.array(self.X, dtype=np.float64, copy=True)
        if X.ndim != 2:
            raise DomainError("factor must be a 2-D array", shape=X.shape)
        if not 1 <= self.r:
            raise DomainError("rank bound must be at least 1", r=self.r)
        if X.shape[1] != self.r:
            raise DomainError("factor width must equal the rank bound", shape=X.shape, r=self.r)
        if not np.all(np.isfinite(X)):
            raise DomainError("factor entries must be finite")

        gram = X.T @ X
        scale = float(np.linalg.norm(gram))
        off_diagonal = gram - np.diag(np.diag(gram))
        if scale > 0 and float(np.linalg.norm(off_diagonal)) > ORTHOGONALITY_RTOL * scale:
            raise DomainError("factor columns are not orthogonal")
        norms = np.diag(gram)
        if np.any(np.diff(norms) > ORTHOGONALITY_RTOL * max(scale, 1.0)):
            raise DomainError("factor column norms must be non-increasing")

        X.setflags(write=False)
        object.__setattr__(self, "X", X)

    @classmethod
    def zeros(cls, n: int, r: int) -> LowRankFactor:
        return cls(X=np.zeros((n, r)), r=r)

    @property
    def n(self) -> int:
        return int(self.X.shape[0])

    @property
    def rank(self) -> int:
        """Number of non-zero columns."""
        return int(np.count_nonzero(np.any(self.X != 0.0, axis=0)))

    @property
    def singular_values(self) -> npt.NDArray[np.float64]:
        """Eigenvalues of ``X X^T`` (squared column norms), descending."""
        return np.einsum("ij,ij->j", self.X, self.X)

    def gram(self) -> npt.NDArray[np.float64]:
        return self.X.T @ self.X

    def frobenius(self) -> float:
        """``||X X^T||_F`` computed from the r x r Gram matrix."""
        return float(np.linalg.norm(self.gram()))

    def materialize(self) -> npt.NDArray[np.float64]:
        return self.X @ self.X.T

    def __repr__(self) -> str:
        return f"LowRankFactor(n={self.n}, r={self.r}, rank={self.rank})"
