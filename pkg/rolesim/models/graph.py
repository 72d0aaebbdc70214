"""Immutable graph, partition and dense symmetric matrix types.

Arrays held by these types are flagged read-only after validation, so the
instances can be shared freely across threads.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np
import numpy.typing as npt
import scipy.sparse as sp

from rolesim.core.exceptions import DomainError

SYMMETRY_RTOL = 1e-12


def _frozen(array: npt.NDArray) -> npt.NDArray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, slots=True, eq=False)
class DirectedGraph:
    """Weighted directed graph on nodes ``0..n-1``.

    Edges are kept sorted by ``(src, dst)``; duplicate pairs, negative or
    non-finite weights are rejected. Self-loops are allowed.
    """

    n: int
    src: npt.NDArray[np.int64]
    dst: npt.NDArray[np.int64]
    weight: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        if int(self.n) < 1:
            raise DomainError("graph must have at least one node", n=self.n)
        src = np.asarray(self.src, dtype=np.int64).ravel()
        dst = np.asarray(self.dst, dtype=np.int64).ravel()
        weight = np.asarray(self.weight, dtype=np.float64).ravel()
        if not (src.shape == dst.shape == weight.shape):
            raise DomainError("src, dst and weight must have equal length")
        if src.size:
            if src.min() < 0 or dst.min() < 0 or src.max() >= self.n or dst.max() >= self.n:
                raise DomainError("edge endpoint outside [0, n)", n=self.n)
            if not np.all(np.isfinite(weight)):
                raise DomainError("edge weights must be finite")
            if np.any(weight < 0):
                raise DomainError("edge weights must be non-negative")

        order = np.lexsort((dst, src))
        src, dst, weight = src[order], dst[order], weight[order]
        if src.size > 1:
            repeated = (src[1:] == src[:-1]) & (dst[1:] == dst[:-1])
            if np.any(repeated):
                at = int(np.argmax(repeated))
                raise DomainError(
                    "duplicate edge", src=int(src[at]), dst=int(dst[at])
                )

        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "src", _frozen(src))
        object.__setattr__(self, "dst", _frozen(dst))
        object.__setattr__(self, "weight", _frozen(weight))

    @classmethod
    def from_edges(
        cls, n: int, edges: Iterable[tuple[int, int] | tuple[int, int, float]]
    ) -> DirectedGraph:
        src: list[int] = []
        dst: list[int] = []
        weight: list[float] = []
        for edge in edges:
            src.append(int(edge[0]))
            dst.append(int(edge[1]))
            weight.append(float(edge[2]) if len(edge) > 2 else 1.0)  # type: ignore[misc]
        return cls(n=n, src=np.array(src), dst=np.array(dst), weight=np.array(weight))

    @classmethod
    def from_matrix(cls, matrix: npt.ArrayLike | sp.spmatrix) -> DirectedGraph:
        """Build from a square adjacency matrix; zero entries are not edges."""
        coo = sp.coo_matrix(matrix)
        if coo.shape[0] != coo.shape[1]:
            raise DomainError("adjacency matrix must be square", shape=coo.shape)
        coo.sum_duplicates()
        keep = coo.data != 0
        return cls(n=coo.shape[0], src=coo.row[keep], dst=coo.col[keep], weight=coo.data[keep])

    @property
    def edge_count(self) -> int:
        return int(self.src.size)

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return list(zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist()))

    def __iter__(self) -> Iterator[tuple[int, int, float]]:
        return iter(self.edges)

    def to_sparse(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.weight, (self.src, self.dst)), shape=(self.n, self.n))

    def to_dense(self) -> npt.NDArray[np.float64]:
        dense = np.zeros((self.n, self.n))
        dense[self.src, self.dst] = self.weight
        return dense

    def is_symmetric(self) -> bool:
        sparse = self.to_sparse()
        return (sparse != sparse.T).nnz == 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.weight, other.weight)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.src.tobytes(), self.dst.tobytes(), self.weight.tobytes()))

    def __repr__(self) -> str:
        return f"DirectedGraph(n={self.n}, edges={self.edge_count})"


@dataclass(frozen=True, slots=True, eq=False)
class Partition:
    """Cluster label per node; labels form the contiguous range ``[0, k)``."""

    labels: npt.NDArray[np.int64]

    def __post_init__(self) -> None:
        labels = np.asarray(self.labels)
        if labels.ndim != 1 or labels.size == 0:
            raise DomainError("partition needs a non-empty 1-D label array")
        if not np.issubdtype(labels.dtype, np.integer):
            if not np.all(np.equal(np.mod(labels, 1), 0)):
                raise DomainError("partition labels must be integers")
        labels = labels.astype(np.int64)
        if labels.min() < 0:
            raise DomainError("partition labels must be non-negative")
        present = np.unique(labels)
        if present[-1] != present.size - 1:
            raise DomainError(
                "partition labels must form a contiguous range", labels=present.tolist()
            )
        object.__setattr__(self, "labels", _frozen(labels))

    @classmethod
    def from_labels(cls, raw: npt.ArrayLike) -> Partition:
        """Relabel arbitrary non-negative ids onto ``0..k-1``, preserving their order."""
        values = np.asarray(raw)
        if values.size and np.min(values) < 0:
            raise DomainError("partition labels must be non-negative")
        _, inverse = np.unique(values, return_inverse=True)
        return cls(labels=inverse.astype(np.int64))

    @classmethod
    def from_clusters(cls, n: int, clusters: Iterable[Iterable[int]]) -> Partition:
        """Label clusters by their smallest member so the numbering is canonical."""
        members = [sorted(int(node) for node in cluster) for cluster in clusters]
        members = [cluster for cluster in members if cluster]
        members.sort(key=lambda cluster: cluster[0])
        labels = np.full(n, -1, dtype=np.int64)
        for label, cluster in enumerate(members):
            if np.any(labels[cluster] >= 0):
                raise DomainError("clusters overlap")
            labels[cluster] = label
        if np.any(labels < 0):
            raise DomainError("clusters do not cover every node", n=n)
        return cls(labels=labels)

    @property
    def n(self) -> int:
        return int(self.labels.size)

    @property
    def k(self) -> int:
        return int(self.labels.max()) + 1

    def clusters(self) -> list[list[int]]:
        return [np.flatnonzero(self.labels == c).tolist() for c in range(self.k)]

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.labels, other.labels)

    def __hash__(self) -> int:
        return hash(self.labels.tobytes())

    def __repr__(self) -> str:
        return f"Partition(n={self.n}, k={self.k})"


@dataclass(frozen=True, slots=True, eq=False)
class DenseSymMatrix:
    """Dense real symmetric matrix, e.g. a similarity matrix."""

    values: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise DomainError("matrix must be square", shape=values.shape)
        if not np.all(np.isfinite(values)):
            raise DomainError("matrix entries must be finite")
        scale = max(1.0, float(np.linalg.norm(values)))
        asymmetry = float(np.max(np.abs(values - values.T))) if values.size else 0.0
        if asymmetry > SYMMETRY_RTOL * scale:
            raise DomainError("matrix is not symmetric", asymmetry=asymmetry)
        object.__setattr__(self, "values", _frozen(values))

    @classmethod
    def symmetrized(cls, values: npt.ArrayLike) -> DenseSymMatrix:
        """Wrap ``values`` after averaging with its transpose."""
        array = np.asarray(values, dtype=np.float64)
        return cls(values=(array + array.T) / 2.0)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def __array__(self, dtype: npt.DTypeLike = None, copy: bool | None = None) -> npt.NDArray:
        if dtype is not None:
            return self.values.astype(dtype)
        return self.values.copy() if copy else self.values

    def frobenius(self) -> float:
        return float(np.linalg.norm(self.values))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DenseSymMatrix):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash(self.values.tobytes())

    def __repr__(self) -> str:
        return f"DenseSymMatrix(n={self.n})"
