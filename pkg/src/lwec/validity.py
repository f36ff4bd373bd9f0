"""Cluster uncertainty against the ensemble, and the reliability weight built on it.

A cluster's uncertainty w.r.t. another base clustering is the entropy (base 2)
of how its members scatter over that clustering's clusters; summing over all
base clusterings gives the ensemble uncertainty. The reliability weight maps
uncertainty H into (0, 1] as exp(-H / (theta * M)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO

import numpy as np

from .ensemble import ClusterRecord, EnsembleView

__all__ = [
    "ValidityReport",
    "uncertainty_wrt_clustering",
    "uncertainty_wrt_ensemble",
    "eci",
    "annotate_validity",
    "write_validity_csv",
]

# Suggested operating range for theta is [0.2, 1]; 0.4 is the default used
# throughout the harness.
DEFAULT_THETA = 0.4


def _entropy_bits(counts: np.ndarray) -> float:
    # 0 * log 0 taken as 0: empty intersections are skipped
    total = counts.sum()
    p = counts[counts > 0] / total
    return float(max(-(p * np.log2(p)).sum(), 0.0))


def uncertainty_wrt_clustering(cluster: ClusterRecord, column: int, view: EnsembleView) -> float:
    """Entropy in bits of the cluster's member distribution over one column's clusters."""
    target = view.labels.labels[cluster.members, column]
    counts = np.bincount(target, minlength=view.labels.clusters_per_column[column])
    return _entropy_bits(counts)


def uncertainty_wrt_ensemble(cluster: ClusterRecord, view: EnsembleView) -> float:
    """Sum of per-column uncertainties; the cluster's own column contributes 0."""
    return sum(
        uncertainty_wrt_clustering(cluster, column, view)
        for column in range(view.n_clusterings)
    )


def eci(uncertainty: float, theta: float, ensemble_size: int) -> float:
    """Reliability weight exp(-uncertainty / (theta * ensemble_size)), in (0, 1]."""
    if theta <= 0:
        raise ValueError(f"theta must be positive, got {theta}")
    if ensemble_size < 1:
        raise ValueError(f"ensemble size must be >= 1, got {ensemble_size}")
    if uncertainty < 0:
        raise ValueError(f"uncertainty must be >= 0, got {uncertainty}")
    return math.exp(-uncertainty / (theta * ensemble_size))


@dataclass(frozen=True)
class ValidityReport:
    """Per-cluster uncertainty (bits) and reliability weight for one ensemble."""

    uncertainty: np.ndarray
    eci: np.ndarray
    theta: float
    ensemble_size: int


def annotate_validity(view: EnsembleView, theta: float = DEFAULT_THETA) -> ValidityReport:
    """Compute uncertainty and reliability for every pooled cluster.

    Intersection counts come from per-column-pair contingency tables built in
    one pass over the objects, so the whole annotation is O(N * M^2). The
    per-cluster fields on the view's ClusterRecords are filled in as well.
    """
    if theta <= 0:
        raise ValueError(f"theta must be positive, got {theta}")
    labels = view.labels.labels
    counts = view.labels.clusters_per_column
    offsets = view.column_offsets
    m = view.n_clusterings
    total = np.zeros(view.n_clusters)
    for a in range(m):
        for b in range(m):
            if a == b:
                continue
            joint = labels[:, a] * counts[b] + labels[:, b]
            table = np.bincount(joint, minlength=counts[a] * counts[b]).reshape(
                counts[a], counts[b]
            )
            sizes = table.sum(axis=1, keepdims=True)
            p = table / sizes
            safe_p = np.where(table > 0, p, 1.0)
            ent = -(p * np.log2(safe_p)).sum(axis=1)
            total[offsets[a]:offsets[a + 1]] += np.maximum(ent, 0.0)
    weights = np.exp(-total / (theta * m))
    for record, u, w in zip(view.clusters, total, weights):
        record.uncertainty = float(u)
        record.eci = float(w)
    total.flags.writeable = False
    weights.flags.writeable = False
    return ValidityReport(uncertainty=total, eci=weights, theta=theta, ensemble_size=m)


def write_validity_csv(report: ValidityReport, view: EnsembleView, out: str | IO[str]) -> None:
    """Export per-cluster validity as CSV: cluster, source, size, uncertainty, eci."""
    lines = ["cluster,source,size,uncertainty,eci"]
    for record in view.clusters:
        u = report.uncertainty[record.id]
        w = report.eci[record.id]
        lines.append(f"{record.id},{record.source},{record.size},{u:.12g},{w:.12g}")
    text = "\n".join(lines) + "\n"
    if hasattr(out, "write"):
        out.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)
