"""Ensemble model: label matrices, pooled cluster records, and wire formats.

A base clustering assigns every object exactly one cluster label; an ensemble
stacks M base clusterings over the same N objects column-wise. Labels are
remapped to dense 0-based integers per column on ingest (original labels are
kept for diagnostics), so downstream code can index clusters by dense id.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

__all__ = [
    "DegenerateClusteringWarning",
    "LabelMatrix",
    "ClusterRecord",
    "EnsembleView",
    "ConsensusResult",
    "parse_label_matrix",
    "build_ensemble_view",
    "write_label_matrix",
    "read_labels",
    "write_labels",
    "relabel_first_appearance",
]


class DegenerateClusteringWarning(UserWarning):
    """A base clustering puts every object into a single cluster."""


def _dense_remap(column: np.ndarray) -> tuple[np.ndarray, tuple[int, ...]]:
    """Remap arbitrary integer labels to dense 0-based ids, in order of first appearance."""
    uniq, first, inverse = np.unique(column, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty(uniq.size, dtype=np.int64)
    rank[order] = np.arange(uniq.size)
    return rank[inverse], tuple(int(v) for v in uniq[order])


def relabel_first_appearance(labels: np.ndarray) -> np.ndarray:
    """Canonical labeling: group ids renumbered 0..k-1 by first appearance.

    First appearance along the vector coincides with ordering groups by their
    smallest member index.
    """
    dense, _ = _dense_remap(np.asarray(labels))
    return dense


@dataclass(frozen=True)
class LabelMatrix:
    """N x M integer matrix; column m holds base clustering m as dense 0-based labels."""

    labels: np.ndarray
    original_labels: tuple[tuple[int, ...], ...]

    @classmethod
    def from_array(cls, raw) -> "LabelMatrix":
        arr = np.asarray(raw)
        if arr.ndim != 2:
            raise ValueError(f"label matrix must be 2-D, got shape {arr.shape}")
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError("label matrix must contain integers")
        n, m = arr.shape
        if n < 2:
            raise ValueError(f"need at least 2 objects, got {n}")
        if m < 1:
            raise ValueError("need at least 1 base clustering")
        dense = np.empty((n, m), dtype=np.int64)
        originals = []
        for col in range(m):
            dense[:, col], orig = _dense_remap(arr[:, col])
            originals.append(orig)
            if len(orig) == 1:
                warnings.warn(
                    f"base clustering {col} is degenerate (single cluster)",
                    DegenerateClusteringWarning,
                    stacklevel=2,
                )
        dense.flags.writeable = False
        return cls(labels=dense, original_labels=tuple(originals))

    @property
    def n_objects(self) -> int:
        return self.labels.shape[0]

    @property
    def n_clusterings(self) -> int:
        return self.labels.shape[1]

    @property
    def clusters_per_column(self) -> tuple[int, ...]:
        return tuple(len(orig) for orig in self.original_labels)

    @property
    def n_clusters_total(self) -> int:
        return sum(self.clusters_per_column)


@dataclass(eq=False)
class ClusterRecord:
    """One pooled cluster: its source clustering, members, and (once computed)
    its ensemble uncertainty in bits and reliability weight."""

    id: int
    source: int
    label: int
    members: np.ndarray
    uncertainty: float | None = None
    eci: float | None = None

    @property
    def size(self) -> int:
        return int(self.members.size)


@dataclass(frozen=True)
class EnsembleView:
    """Label matrix plus the pooled cluster set and per-cell cluster ids."""

    labels: LabelMatrix
    clusters: tuple[ClusterRecord, ...]
    column_offsets: np.ndarray
    cluster_ids: np.ndarray

    @property
    def n_objects(self) -> int:
        return self.labels.n_objects

    @property
    def n_clusterings(self) -> int:
        return self.labels.n_clusterings

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)

    def column_clusters(self, column: int) -> tuple[ClusterRecord, ...]:
        lo = int(self.column_offsets[column])
        hi = int(self.column_offsets[column + 1])
        return self.clusters[lo:hi]


def build_ensemble_view(labels: LabelMatrix) -> EnsembleView:
    """Materialize the pooled cluster set from a label matrix.

    The dense per-column label representation makes the partition invariants
    (disjoint clusters covering all objects within a column) hold by
    construction; member lists come out sorted by object index.
    """
    n, m = labels.labels.shape
    counts = labels.clusters_per_column
    offsets = np.concatenate(([0], np.cumsum(counts)))
    records: list[ClusterRecord] = []
    for col in range(m):
        column = labels.labels[:, col]
        order = np.argsort(column, kind="stable")
        bounds = np.cumsum(np.bincount(column, minlength=counts[col]))
        start = 0
        for label, stop in enumerate(bounds):
            members = order[start:stop].copy()
            members.flags.writeable = False
            if members.size == 0:
                raise ValueError(f"empty cluster {label} in column {col}")
            records.append(
                ClusterRecord(
                    id=int(offsets[col]) + label,
                    source=col,
                    label=label,
                    members=members,
                )
            )
            start = stop
    cluster_ids = labels.labels + offsets[:-1][None, :]
    cluster_ids.flags.writeable = False
    offsets.flags.writeable = False
    return EnsembleView(
        labels=labels,
        clusters=tuple(records),
        column_offsets=offsets,
        cluster_ids=cluster_ids,
    )


@dataclass(frozen=True)
class ConsensusResult:
    """A consensus labeling: length-N vector with values in [0, k)."""

    labels: np.ndarray
    k: int
    method: str

    def __post_init__(self):
        arr = np.asarray(self.labels, dtype=np.int64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("labels must be a non-empty 1-D vector")
        if arr.min() < 0 or arr.max() >= self.k:
            raise ValueError(f"labels must lie in [0, {self.k})")
        arr.flags.writeable = False
        object.__setattr__(self, "labels", arr)

    @property
    def n_groups(self) -> int:
        return int(np.unique(self.labels).size)


def _read_text(source: str | IO[str] | Iterable[str]) -> str:
    if hasattr(source, "read"):
        return source.read()
    if isinstance(source, str):
        return source
    return "\n".join(source)


def parse_label_matrix(source: str | IO[str] | Iterable[str]) -> LabelMatrix:
    """Parse the label-matrix wire format.

    Comma-separated integers, one row per object, one column per base
    clustering. An optional single header row starting with '#' may precede
    the data; blank lines are ignored. Raises ValueError on ragged rows,
    non-integer or negative cells, or empty input. A column with a single
    distinct label is accepted but flagged with DegenerateClusteringWarning.
    """
    rows: list[list[int]] = []
    width = None
    seen_header = False
    for lineno, line in enumerate(_read_text(source).splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            if rows or seen_header:
                raise ValueError(f"line {lineno}: unexpected '#' row (only a single leading header is allowed)")
            seen_header = True
            continue
        cells = [cell.strip() for cell in stripped.split(",")]
        try:
            values = [int(cell) for cell in cells]
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer cell in {stripped!r}") from None
        if any(v < 0 for v in values):
            raise ValueError(f"line {lineno}: negative cluster label")
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise ValueError(f"line {lineno}: ragged rows ({len(values)} cells, expected {width})")
        rows.append(values)
    if not rows:
        raise ValueError("empty label matrix")
    return LabelMatrix.from_array(np.asarray(rows, dtype=np.int64))


def write_label_matrix(matrix: LabelMatrix, out: str | IO[str]) -> None:
    """Serialize dense labels as CSV (the same wire format parse accepts)."""
    text = "\n".join(",".join(str(v) for v in row) for row in matrix.labels) + "\n"
    if hasattr(out, "write"):
        out.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def read_labels(source: str | IO[str] | Iterable[str]) -> np.ndarray:
    """Read a single-column label file: one non-negative integer per line."""
    values: list[int] = []
    for lineno, line in enumerate(_read_text(source).splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            values.append(int(stripped))
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer label {stripped!r}") from None
    if not values:
        raise ValueError("empty label file")
    return np.asarray(values, dtype=np.int64)


def write_labels(labels: np.ndarray, out: str | IO[str]) -> None:
    """Write one integer label per line (0-based)."""
    text = "\n".join(str(int(v)) for v in np.asarray(labels)) + "\n"
    if hasattr(out, "write"):
        out.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)
