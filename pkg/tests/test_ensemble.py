"""Label-matrix parsing, the pooled cluster view, and wire-format round trips."""

import io

import numpy as np
import pytest
from hypothesis import given, settings

from lwec import (
    ConsensusResult,
    DegenerateClusteringWarning,
    LabelMatrix,
    build_ensemble_view,
    parse_label_matrix,
    read_labels,
    write_label_matrix,
    write_labels,
)
from lwec.ensemble import relabel_first_appearance

from conftest import label_arrays, random_label_array


class TestParsing:
    def test_small_matrix_counts(self):
        m = parse_label_matrix("0,0\n0,1\n1,1")
        assert m.n_objects == 3
        assert m.n_clusterings == 2
        assert m.n_clusters_total == 4

    def test_ragged_rows_rejected(self):
        with pytest.raises(ValueError, match="ragged"):
            parse_label_matrix("0,0\n0,1,1")

    def test_non_integer_cell_rejected(self):
        with pytest.raises(ValueError, match="non-integer"):
            parse_label_matrix("0,0\n0,x")

    def test_negative_label_rejected(self):
        with pytest.raises(ValueError, match="negative"):
            parse_label_matrix("0,0\n0,-1")

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            parse_label_matrix("")
        with pytest.raises(ValueError, match="empty"):
            parse_label_matrix("# just a header\n\n")

    def test_single_row_rejected(self):
        with pytest.raises(ValueError, match="at least 2 objects"):
            parse_label_matrix("0,1")

    def test_header_and_blanks_skipped(self):
        m = parse_label_matrix("# a,b\n\n0,0\n\n0,1\n1,1\n")
        assert m.n_objects == 3

    def test_header_after_data_rejected(self):
        with pytest.raises(ValueError, match="header"):
            parse_label_matrix("0,0\n# too late\n1,1")

    def test_degenerate_column_warns(self):
        with pytest.warns(DegenerateClusteringWarning):
            parse_label_matrix("0,3\n1,3\n0,3")

    def test_file_object_source(self):
        m = parse_label_matrix(io.StringIO("0,0\n0,1\n1,1"))
        assert m.n_objects == 3

    def test_labels_remapped_dense_first_appearance(self):
        m = parse_label_matrix("7,10\n7,2\n3,2")
        assert m.labels[:, 0].tolist() == [0, 0, 1]
        assert m.labels[:, 1].tolist() == [0, 1, 1]
        assert m.original_labels == ((7, 3), (10, 2))

    def test_worked_example_shape(self, worked_matrix):
        assert worked_matrix.n_objects == 16
        assert worked_matrix.clusters_per_column == (3, 3, 3)
        assert worked_matrix.n_clusters_total == 9


class TestEnsembleView:
    def test_worked_example_first_column_sizes(self, worked_view):
        sizes = [c.size for c in worked_view.column_clusters(0)]
        assert sizes == [8, 3, 5]

    def test_single_degenerate_column(self):
        with pytest.warns(DegenerateClusteringWarning):
            m = LabelMatrix.from_array(np.full((5, 1), 9))
        view = build_ensemble_view(m)
        assert view.n_clusters == 1
        assert view.clusters[0].members.tolist() == [0, 1, 2, 3, 4]

    def test_duplicate_columns_duplicate_members(self):
        col = np.array([0, 1, 0, 2, 1])
        view = build_ensemble_view(LabelMatrix.from_array(np.column_stack([col, col])))
        assert view.n_clusters == 6
        for a, b in zip(view.column_clusters(0), view.column_clusters(1)):
            assert a.members.tolist() == b.members.tolist()

    def test_cluster_ids_consistent_with_members(self):
        rng = np.random.default_rng(5)
        arr = random_label_array(rng, 20, 3)
        view = build_ensemble_view(LabelMatrix.from_array(arr))
        for rec in view.clusters:
            cells = np.flatnonzero(view.cluster_ids[:, rec.source] == rec.id)
            assert cells.tolist() == rec.members.tolist()

    @given(label_arrays())
    @settings(max_examples=60)
    def test_columns_partition_objects(self, arr):
        view = build_ensemble_view(LabelMatrix.from_array(arr))
        n = view.n_objects
        for col in range(view.n_clusterings):
            seen = np.concatenate([c.members for c in view.column_clusters(col)])
            assert sorted(seen.tolist()) == list(range(n))

    @given(label_arrays())
    @settings(max_examples=60)
    def test_cluster_count_is_column_sum(self, arr):
        m = LabelMatrix.from_array(arr)
        view = build_ensemble_view(m)
        assert view.n_clusters == sum(m.clusters_per_column)
        assert view.n_clusters == m.n_clusters_total


class TestRoundTrip:
    @given(label_arrays())
    @settings(max_examples=40)
    def test_parse_write_parse_identical(self, arr):
        m = LabelMatrix.from_array(arr)
        buf = io.StringIO()
        write_label_matrix(m, buf)
        again = parse_label_matrix(buf.getvalue())
        assert np.array_equal(m.labels, again.labels)

    def test_label_column_roundtrip(self, tmp_path):
        labels = np.array([0, 2, 1, 1, 0])
        path = tmp_path / "labels.txt"
        write_labels(labels, str(path))
        assert path.read_text() == "0\n2\n1\n1\n0\n"
        assert np.array_equal(read_labels(path.read_text()), labels)

    def test_read_labels_errors(self):
        with pytest.raises(ValueError, match="empty"):
            read_labels("")
        with pytest.raises(ValueError, match="non-integer"):
            read_labels("1\nx\n")


class TestConsensusResult:
    def test_valid_result(self):
        res = ConsensusResult(labels=np.array([0, 1, 0]), k=2, method="lwea")
        assert res.n_groups == 2

    def test_out_of_range_labels_rejected(self):
        with pytest.raises(ValueError):
            ConsensusResult(labels=np.array([0, 2]), k=2, method="lwea")
        with pytest.raises(ValueError):
            ConsensusResult(labels=np.array([-1, 0]), k=2, method="lwea")

    def test_relabel_first_appearance(self):
        assert relabel_first_appearance(np.array([5, 3, 5, 9, 3])).tolist() == [0, 1, 0, 2, 1]
