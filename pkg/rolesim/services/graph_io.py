"""Text formats for graphs, partitions, matrices, factors and hierarchies.

Edge lists and partitions are TSV with 0-based node indices; matrices and
factors are CSV with a ``#dim`` header. Floats are written with 17 significant
digits so that a save/load round trip is exact.
"""
from __future__ import annotations

import math
from pathlib import Path
from typing import Iterator, TextIO

import numpy as np
import numpy.typing as npt
import pandas as pd

from rolesim.core.exceptions import DomainError, GraphIOError, GraphParseError
from rolesim.core.logging import get_logger
from rolesim.models.graph import DenseSymMatrix, DirectedGraph, Partition
from rolesim.models.roles import Hierarchy
from rolesim.models.similarity import ConvergenceReport, LowRankFactor

logger = get_logger(__name__)

FLOAT_FMT = ".17g"


def _format_float(value: float) -> str:
    return format(float(value), FLOAT_FMT)


def _read_lines(path: Path) -> list[str]:
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise GraphIOError(path, exc.strerror or str(exc)) from exc
    try:
        return raw.decode("utf-8").splitlines()
    except UnicodeDecodeError as exc:
        line_number = raw.count(b"\n", 0, exc.start) + 1
        raise GraphParseError(path, line_number, "file is not valid UTF-8") from exc


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise GraphIOError(path, exc.strerror or str(exc)) from exc


def _data_lines(lines: list[str]) -> Iterator[tuple[int, list[str]]]:
    for line_number, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield line_number, stripped.split()


def _parse_index(token: str, path: Path, line_number: int, what: str) -> int:
    try:
        value = int(token)
    except ValueError as exc:
        raise GraphParseError(path, line_number, f"{what} '{token}' is not an integer") from exc
    if value < 0:
        raise GraphParseError(path, line_number, f"{what} {value} is negative")
    return value


# ----- edge lists -----


def load_edge_list(path: Path | str) -> DirectedGraph:
    """Read ``src<TAB>dst[<TAB>weight]`` lines; ``#nodes N`` fixes the node count."""
    path = Path(path)
    lines = _read_lines(path)

    declared_nodes: int | None = None
    for line_number, raw in enumerate(lines, start=1):
        tokens = raw.strip().split()
        if len(tokens) >= 2 and tokens[0] == "#nodes":
            declared_nodes = _parse_index(tokens[1], path, line_number, "node count")

    src: list[int] = []
    dst: list[int] = []
    weight: list[float] = []
    seen: dict[tuple[int, int], int] = {}
    for line_number, tokens in _data_lines(lines):
        if len(tokens) not in (2, 3):
            raise GraphParseError(
                path, line_number, f"expected 'src dst [weight]', got {len(tokens)} fields"
            )
        i = _parse_index(tokens[0], path, line_number, "source")
        j = _parse_index(tokens[1], path, line_number, "target")
        w = 1.0
        if len(tokens) == 3:
            try:
                w = float(tokens[2])
            except ValueError as exc:
                raise GraphParseError(path, line_number, f"weight '{tokens[2]}' is not a number") from exc
            if not math.isfinite(w):
                raise GraphParseError(path, line_number, f"weight '{tokens[2]}' is not finite")
            if w < 0:
                raise DomainError("negative edge weight", path=str(path), line=line_number, weight=w)
        if (i, j) in seen:
            raise DomainError(
                "duplicate edge", path=str(path), line=line_number, first_line=seen[(i, j)], src=i, dst=j
            )
        seen[(i, j)] = line_number
        src.append(i)
        dst.append(j)
        weight.append(w)

    inferred = 1 + max(max(src, default=-1), max(dst, default=-1))
    if declared_nodes is None:
        if inferred == 0:
            raise DomainError("empty edge list without a '#nodes N' header", path=str(path))
        n = inferred
    else:
        if declared_nodes < inferred:
            raise DomainError(
                "'#nodes' header is smaller than the largest node index",
                path=str(path),
                declared=declared_nodes,
                required=inferred,
            )
        n = declared_nodes

    return DirectedGraph(n=n, src=np.array(src), dst=np.array(dst), weight=np.array(weight))


def save_edge_list(graph: DirectedGraph, path: Path | str) -> None:
    lines = [f"#nodes {graph.n}"]
    lines.extend(f"{i}\t{j}\t{_format_float(w)}" for i, j, w in graph.edges)
    _write_text(Path(path), "\n".join(lines) + "\n")


# ----- partitions -----


def load_partition(path: Path | str) -> Partition:
    """Read ``node<TAB>label`` lines; label gaps are closed with a warning."""
    path = Path(path)
    assignments: dict[int, int] = {}
    for line_number, tokens in _data_lines(_read_lines(path)):
        if len(tokens) != 2:
            raise GraphParseError(path, line_number, f"expected 'node label', got {len(tokens)} fields")
        node = _parse_index(tokens[0], path, line_number, "node")
        label = _parse_index(tokens[1], path, line_number, "label")
        if node in assignments:
            raise GraphParseError(path, line_number, f"node {node} assigned twice")
        assignments[node] = label

    if not assignments:
        raise DomainError("partition file has no assignments", path=str(path))
    n = max(assignments) + 1
    missing = [node for node in range(n) if node not in assignments]
    if missing:
        raise DomainError("partition does not label every node", path=str(path), missing=missing[:10])

    raw = np.array([assignments[node] for node in range(n)], dtype=np.int64)
    present = np.unique(raw)
    if present[-1] != present.size - 1:
        logger.warning(
            "Partition labels are not contiguous; relabeling",
            path=str(path),
            labels=present.tolist()[:20],
        )
    return Partition.from_labels(raw)


def save_partition(partition: Partition, path: Path | str) -> None:
    lines = [f"{node}\t{label}" for node, label in enumerate(partition.labels.tolist())]
    _write_text(Path(path), "\n".join(lines) + "\n")


# ----- permutations -----


def _check_permutation(perm: npt.ArrayLike, n: int) -> npt.NDArray[np.int64]:
    array = np.asarray(perm, dtype=np.int64).ravel()
    if array.size != n or not np.array_equal(np.sort(array), np.arange(n)):
        raise DomainError("permutation is not a bijection of [0, n)", n=n)
    return array


def inverse_permutation(perm: npt.ArrayLike) -> npt.NDArray[np.int64]:
    array = np.asarray(perm, dtype=np.int64).ravel()
    array = _check_permutation(array, array.size)
    inverse = np.empty_like(array)
    inverse[array] = np.arange(array.size)
    return inverse


def permute(graph: DirectedGraph, perm: npt.ArrayLike) -> DirectedGraph:
    """Relabel node ``i`` as ``perm[i]``."""
    mapping = _check_permutation(perm, graph.n)
    return DirectedGraph(
        n=graph.n, src=mapping[graph.src], dst=mapping[graph.dst], weight=graph.weight.copy()
    )


def permute_partition(partition: Partition, perm: npt.ArrayLike) -> Partition:
    mapping = _check_permutation(perm, partition.n)
    labels = np.empty_like(partition.labels)
    labels[mapping] = partition.labels
    return Partition(labels=labels)


# ----- matrices and factors -----


def _write_csv_block(handle: TextIO, header: str, values: npt.NDArray[np.float64]) -> None:
    handle.write(header + "\n")
    for row in values:
        handle.write(",".join(_format_float(v) for v in row) + "\n")


def _read_dim_csv(path: Path, expected_fields: int) -> tuple[list[int], npt.NDArray[np.float64]]:
    lines = _read_lines(path)
    if not lines or not lines[0].startswith("#dim"):
        raise GraphParseError(path, 1, "missing '#dim' header")
    header = lines[0].split()[1:]
    if len(header) != expected_fields:
        raise GraphParseError(path, 1, f"'#dim' header needs {expected_fields} value(s)")
    dims = [_parse_index(token, path, 1, "dimension") for token in header]

    rows: list[list[float]] = []
    for line_number, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        try:
            rows.append([float(token) for token in raw.split(",")])
        except ValueError as exc:
            raise GraphParseError(path, line_number, "non-numeric matrix entry") from exc
        if len(rows[-1]) != len(rows[0]):
            raise GraphParseError(path, line_number, "row length differs from the first row")
    if not rows:
        return dims, np.zeros((0, 0))
    return dims, np.array(rows, dtype=np.float64)


def save_matrix(matrix: DenseSymMatrix, path: Path | str) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as handle:
            _write_csv_block(handle, f"#dim {matrix.n}", matrix.values)
    except OSError as exc:
        raise GraphIOError(path, exc.strerror or str(exc)) from exc


def load_matrix(path: Path | str) -> DenseSymMatrix:
    path = Path(path)
    (n,), values = _read_dim_csv(path, 1)
    if values.shape != (n, n):
        raise GraphParseError(path, 1, f"expected a {n}x{n} matrix, found {values.shape}")
    return DenseSymMatrix(values=values)


def save_factor(factor: LowRankFactor, path: Path | str) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as handle:
            _write_csv_block(handle, f"#dim {factor.n} {factor.r}", factor.X)
    except OSError as exc:
        raise GraphIOError(path, exc.strerror or str(exc)) from exc


def load_factor(path: Path | str) -> LowRankFactor:
    path = Path(path)
    (n, r), values = _read_dim_csv(path, 2)
    if values.shape != (n, r):
        raise GraphParseError(path, 1, f"expected a {n}x{r} factor, found {values.shape}")
    return LowRankFactor(X=values, r=r)


def save_convergence(report: ConvergenceReport, path: Path | str) -> None:
    frame = pd.DataFrame(
        {
            "iteration": np.arange(1, len(report.residuals) + 1),
            "residual": report.residuals,
        }
    )
    body = frame.to_csv(index=False, float_format="%.17g", lineterminator="\n")
    _write_text(Path(path), f"#converged {str(report.converged).lower()}\n{body}")


# ----- hierarchies -----


def save_hierarchy(hierarchy: Hierarchy, prefix: Path | str, converged: bool = True) -> Path:
    """Write one partition TSV per level plus ``<prefix>.levels.tsv`` as index.

    The index starts with ``#converged true|false`` for the similarity the
    levels were clustered from.
    """
    prefix = Path(prefix)
    index_lines = [f"#converged {str(converged).lower()}", "#level\tclusters\tpath"]
    for level, partition in enumerate(hierarchy.levels):
        level_path = prefix.with_name(f"{prefix.name}.level{level}.tsv")
        save_partition(partition, level_path)
        index_lines.append(f"{level}\t{partition.k}\t{level_path.name}")
    index_path = prefix.with_name(f"{prefix.name}.levels.tsv")
    _write_text(index_path, "\n".join(index_lines) + "\n")
    return index_path


def load_hierarchy(index_path: Path | str) -> Hierarchy:
    index_path = Path(index_path)
    levels: list[Partition] = []
    for line_number, tokens in _data_lines(_read_lines(index_path)):
        if len(tokens) != 3:
            raise GraphParseError(index_path, line_number, "expected 'level clusters path'")
        levels.append(load_partition(index_path.parent / tokens[2]))
    return Hierarchy(levels=tuple(levels))


# ----- reports -----


def save_report(text: str, path: Path | str) -> None:
    """Write an already formatted CSV report."""
    _write_text(Path(path), text)
