"""Co-association matrices: plain co-occurrence counts and their locally weighted form.

Entry (i, j) of the plain matrix is the fraction of base clusterings that put
objects i and j in the same cluster. The locally weighted variant scales each
co-occurrence by the reliability weight of the shared cluster, so evidence
from unstable clusters counts for less.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO

import numpy as np

from .ensemble import EnsembleView
from .validity import ValidityReport

__all__ = ["CoassocMatrix", "build_ca", "build_lwca", "write_lower_triangle"]


@dataclass(frozen=True)
class CoassocMatrix:
    """Symmetric N x N similarity with entries in [0, 1]."""

    values: np.ndarray
    kind: str  # "ca" | "lwca"

    @property
    def n(self) -> int:
        return self.values.shape[0]


def build_ca(view: EnsembleView) -> CoassocMatrix:
    """Plain co-association: per-pair co-occurrence count divided by M.

    Accumulates over clusters rather than object pairs: each cluster
    contributes one count to every pair of its members, which is O(sum |C|^2)
    work and exact (integer counts, single final division).
    """
    n = view.n_objects
    counts = np.zeros((n, n), dtype=np.int64)
    for record in view.clusters:
        idx = np.ix_(record.members, record.members)
        counts[idx] += 1
    values = counts / view.n_clusterings
    values.flags.writeable = False
    return CoassocMatrix(values=values, kind="ca")


def build_lwca(view: EnsembleView, report: ValidityReport) -> CoassocMatrix:
    """Locally weighted co-association: each co-occurrence weighted by its cluster's ECI.

    The diagonal becomes the mean reliability of the clusters containing each
    object; off-diagonal entries are dominated by the plain co-association.
    """
    if len(report.eci) != view.n_clusters:
        raise ValueError(
            f"report covers {len(report.eci)} clusters, view has {view.n_clusters}"
        )
    n = view.n_objects
    values = np.zeros((n, n))
    for record in view.clusters:
        idx = np.ix_(record.members, record.members)
        values[idx] += report.eci[record.id]
    values /= view.n_clusterings
    values.flags.writeable = False
    return CoassocMatrix(values=values, kind="lwca")


def write_lower_triangle(matrix: CoassocMatrix, out: str | IO[str]) -> None:
    """Dump the lower triangle (diagonal included) as plain-text CSV rows."""
    lines = [
        ",".join(f"{v:.10g}" for v in matrix.values[i, : i + 1])
        for i in range(matrix.n)
    ]
    text = "\n".join(lines) + "\n"
    if hasattr(out, "write"):
        out.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)
