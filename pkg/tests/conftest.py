"""Shared fixtures and hypothesis strategies."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st

from lwec import LabelMatrix, build_ensemble_view

# Hand-built 16-object, 3-clustering ensemble with a known uncertainty profile:
# the first clustering has clusters of sizes 8/3/5, the 8-object cluster splits
# 2/3/3 over the second clustering and 4/4 over the third, the 3-object cluster
# is co-clustered everywhere, and one 4-object group is perfectly stable.
# This layout is the unique contingency structure (up to relabeling) whose nine
# per-cluster ensemble uncertainties round to WORKED_UNCERTAINTY below.
WORKED_ROWS = (
    [[0, 0, 0]] * 2
    + [[0, 1, 0]] * 2
    + [[0, 1, 1]]
    + [[0, 2, 1]] * 3
    + [[1, 0, 0]] * 3
    + [[2, 2, 1]]
    + [[2, 2, 2]] * 4
)

WORKED_UNCERTAINTY = (2.56, 0.00, 0.72, 0.97, 0.92, 1.95, 1.85, 1.44, 0.00)


@pytest.fixture(scope="session")
def worked_matrix() -> LabelMatrix:
    return LabelMatrix.from_array(np.array(WORKED_ROWS))


@pytest.fixture(scope="session")
def worked_view(worked_matrix):
    return build_ensemble_view(worked_matrix)


def random_label_array(rng: np.random.Generator, n: int, m: int, max_clusters: int = 5) -> np.ndarray:
    """Random dense label matrix with 2..max_clusters non-empty clusters per column."""
    cols = []
    for _ in range(m):
        c = int(rng.integers(2, min(max_clusters, n) + 1))
        # force every label to appear at least once
        col = np.concatenate([np.arange(c), rng.integers(0, c, size=n - c)])
        cols.append(rng.permutation(col))
    return np.column_stack(cols)


@st.composite
def label_arrays(draw, min_n=2, max_n=10, min_m=1, max_m=3, max_clusters=4):
    """Hypothesis strategy for raw integer label matrices (possibly degenerate)."""
    n = draw(st.integers(min_n, max_n))
    m = draw(st.integers(min_m, max_m))
    cols = []
    for _ in range(m):
        c = draw(st.integers(1, min(max_clusters, n)))
        col = draw(
            st.lists(st.integers(0, c - 1), min_size=n, max_size=n)
        )
        cols.append(col)
    return np.array(cols).T
