"""Nearest-neighbor queries and eigenstate neighbor tables."""

import numpy as np
import pytest

from qdense.algebra import ZeroNormError, pack
from qdense.corpus import Vocabulary
from qdense.neighbors import UnsupportedKindError, eigen_neighbors, nearest
from qdense.trainer import Model


def build_model(kind, dim, rows):
    words = list(rows)
    vocab = Vocabulary(
        words,
        np.ones(len(words), dtype=np.int64),
        len(words),
        {w: i for i, w in enumerate(words)},
    )
    table = np.array([rows[w] for w in words], dtype=np.float32)
    return Model(kind=kind, dim=dim, vocab=vocab, word=table)


def vector_model():
    return build_model(
        "vector",
        2,
        {
            "east": [1.0, 0.0],
            "eastish": [0.9, 0.1],
            "north": [0.0, 1.0],
            "west": [-1.0, 0.0],
            "zero": [0.0, 0.0],
        },
    )


class TestNearest:
    def test_orders_by_cosine_excluding_self(self):
        got = nearest(vector_model(), "east", k=3)
        assert [w for w, _ in got] == ["eastish", "north", "west"]
        sims = [s for _, s in got]
        assert sims[0] == pytest.approx(0.9 / np.hypot(0.9, 0.1), rel=1e-6)
        assert sims == sorted(sims, reverse=True)

    def test_similarities_clipped_to_unit_interval(self):
        for _, s in nearest(vector_model(), "east", k=4):
            assert -1.0 <= s <= 1.0

    def test_zero_norm_rows_never_surface(self):
        got = nearest(vector_model(), "east", k=10)
        assert "zero" not in [w for w, _ in got]
        assert len(got) == 3  # k clipped to the valid candidates

    def test_matrix_kind_uses_trace_cosine(self):
        eye = pack(np.eye(2))
        e11 = pack(np.diag([1.0, 0.0]))
        model = build_model(
            "matrix", 2, {"id": list(eye), "axis": list(e11), "anti": list(-eye)}
        )
        got = nearest(model, "id", k=2)
        assert [w for w, _ in got] == ["axis", "anti"]
        assert got[0][1] == pytest.approx(1.0 / np.sqrt(2.0), rel=1e-6)
        assert got[1][1] == pytest.approx(-1.0, rel=1e-6)

    def test_unknown_word(self):
        with pytest.raises(KeyError, match="not in the vocabulary"):
            nearest(vector_model(), "absent")

    def test_zero_query_raises(self):
        with pytest.raises(ZeroNormError):
            nearest(vector_model(), "zero")


def matrix_fixture():
    """Five 2x2 packed words around a word with one +1 and one -1 eigenstate."""
    rows = {
        "probe": list(pack(np.diag([1.0, -1.0]))),
        "up": list(pack(np.diag([1.0, 0.0]))),
        "down": list(pack(np.diag([0.0, 1.0]))),
        "antidown": list(pack(np.diag([0.0, -1.0]))),
        "mixed": list(pack(np.array([[0.5, 0.5], [0.5, 0.5]]))),
    }
    return build_model("matrix", 2, rows)


class TestEigenNeighbors:
    def test_column_layout(self):
        table = eigen_neighbors(matrix_fixture(), "probe", k=4)
        assert table.word == "probe"
        assert len(table.columns) == 3  # full + one per eigenstate
        assert table.columns[0].label == "full"
        assert table.columns[0].eigenvalue is None
        evs = [c.eigenvalue for c in table.columns[1:]]
        assert evs == sorted(evs)  # ascending
        assert evs == [-1.0, 1.0]
        assert table.columns[1].label == "-1.0000"
        assert table.columns[2].label == "+1.0000"

    def test_eigenstate_columns_rank_by_signed_projector(self):
        table = eigen_neighbors(matrix_fixture(), "probe", k=2)
        by_label = {c.label: [w for w, _ in c.neighbors] for c in table.columns}
        # the -1 eigenstate lives on axis 2: its signed projector is -e22,
        # most aligned with "antidown", most opposed to "down"
        assert by_label["-1.0000"][0] == "antidown"
        # the +1 eigenstate lives on axis 1: aligned with "up"
        assert by_label["+1.0000"][0] == "up"

    def test_full_column_matches_nearest(self):
        model = matrix_fixture()
        table = eigen_neighbors(model, "probe", k=3)
        assert table.columns[0].neighbors == nearest(model, "probe", k=3)

    def test_query_word_absent_from_every_column(self):
        table = eigen_neighbors(matrix_fixture(), "probe", k=10)
        for col in table.columns:
            assert "probe" not in [w for w, _ in col.neighbors]

    def test_vector_kind_rejected(self):
        with pytest.raises(UnsupportedKindError):
            eigen_neighbors(vector_model(), "east")

    def test_unknown_word(self):
        with pytest.raises(KeyError):
            eigen_neighbors(matrix_fixture(), "absent")

    def test_zero_word_raises(self):
        model = build_model(
            "matrix", 2, {"z": [0.0, 0.0, 0.0], "w": [1.0, 0.0, 1.0]}
        )
        with pytest.raises(ZeroNormError):
            eigen_neighbors(model, "z")


class TestRendering:
    def test_to_text_grid(self):
        table = eigen_neighbors(matrix_fixture(), "probe", k=2)
        text = table.to_text()
        lines = text.splitlines()
        assert "probe" in lines[0]
        assert "full" in lines[1] and "+1.0000" in lines[1]
        assert len(lines) == 2 + 2  # title + header + k rows

    def test_to_delimited_schema(self):
        table = eigen_neighbors(matrix_fixture(), "probe", k=2)
        lines = table.to_delimited().splitlines()
        assert lines[0] == "column\teigenvalue\trank\tword\tsimilarity"
        body = [ln.split("\t") for ln in lines[1:]]
        assert len(body) == 3 * 2  # three columns x k rows
        full_rows = [r for r in body if r[0] == "full"]
        assert full_rows[0][1] == ""  # no eigenvalue on the full column
        assert [r[2] for r in full_rows] == ["1", "2"]
        eig_rows = [r for r in body if r[0] != "full"]
        assert all(float(r[1]) in (-1.0, 1.0) for r in eig_rows)
        for r in body:
            float(r[4])  # similarity parses
