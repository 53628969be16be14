import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gfkanalogy.embeddings import (
    EmbeddingTable,
    load_text_embeddings,
    save_text_embeddings,
)


def write(tmp_path, text, name="emb.txt"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestLoad:
    def test_basic_readback(self, tmp_path):
        table = load_text_embeddings(write(tmp_path, "2 3\na 1 0 0\nb 0 1 0\n"))
        assert table.dim == 3
        assert len(table) == 2
        np.testing.assert_array_equal(table.lookup("a"), [1, 0, 0])
        np.testing.assert_array_equal(table.lookup("b"), [0, 1, 0])

    def test_normalize_leaves_unit_rows_untouched(self, tmp_path):
        path = write(tmp_path, "2 3\na 1 0 0\nb 0 1 0\n")
        plain = load_text_embeddings(path)
        normed = load_text_embeddings(path, normalize=True)
        np.testing.assert_array_equal(plain.vectors, normed.vectors)

    def test_normalize_3_4_5(self, tmp_path):
        table = load_text_embeddings(write(tmp_path, "1 2\na 3 4\n"), normalize=True)
        np.testing.assert_allclose(table.lookup("a"), [0.6, 0.8], rtol=0, atol=1e-15)

    def test_scientific_notation_accepted(self, tmp_path):
        table = load_text_embeddings(write(tmp_path, "1 2\na 1e-3 2.5E+1\n"))
        np.testing.assert_array_equal(table.lookup("a"), [1e-3, 25.0])

    def test_malformed_header(self, tmp_path):
        with pytest.raises(ValueError, match="line 1"):
            load_text_embeddings(write(tmp_path, "banana\na 1 2\n"))
        with pytest.raises(ValueError, match="line 1"):
            load_text_embeddings(write(tmp_path, "2\na 1 2\n"))

    def test_dimension_mismatch_reports_line(self, tmp_path):
        with pytest.raises(ValueError, match="line 3"):
            load_text_embeddings(write(tmp_path, "2 3\na 1 0 0\nb 0 1\n"))

    def test_non_numeric_reports_line(self, tmp_path):
        with pytest.raises(ValueError, match="line 2"):
            load_text_embeddings(write(tmp_path, "1 2\na x y\n"))

    def test_duplicate_keeps_first_and_warns(self, tmp_path):
        path = write(tmp_path, "2 2\na 1 2\na 3 4\n")
        with pytest.warns(UserWarning, match="duplicate"):
            table = load_text_embeddings(path)
        assert len(table) == 1
        np.testing.assert_array_equal(table.lookup("a"), [1, 2])

    def test_zero_vector_dropped_with_warning(self, tmp_path):
        path = write(tmp_path, "2 2\na 0 0\nb 1 0\n")
        with pytest.warns(UserWarning, match="zero vector"):
            table = load_text_embeddings(path)
        assert "a" not in table
        assert "b" in table

    def test_header_count_mismatch_warns(self, tmp_path):
        with pytest.warns(UserWarning, match="declares 5"):
            load_text_embeddings(write(tmp_path, "5 2\na 1 2\n"))


class TestLookupAndStack:
    @pytest.fixture
    def table(self):
        return EmbeddingTable(["a", "b"], np.array([[1.0, 0, 0], [0, 1.0, 0]]))

    def test_lookup_absent_is_none(self, table):
        assert table.lookup("zzz") is None

    def test_stack_rows(self, table):
        np.testing.assert_array_equal(
            table.stack_rows(["a", "b"]), [[1, 0, 0], [0, 1, 0]]
        )

    def test_stack_rows_repeats(self, table):
        out = table.stack_rows(["a", "a"])
        np.testing.assert_array_equal(out[0], out[1])

    def test_stack_rows_names_missing_word(self, table):
        with pytest.raises(ValueError, match="zzz"):
            table.stack_rows(["a", "zzz"])

    def test_resolve_case_insensitive_fallback(self):
        table = EmbeddingTable(["Athens", "athens", "b"], np.eye(3))
        assert table.resolve("Athens") == 0
        assert table.resolve("athens") == 1  # exact match wins
        assert table.resolve("ATHENS") == 0  # first case-insensitive hit
        assert table.resolve("zzz") is None

    def test_vectors_are_read_only(self, table):
        with pytest.raises(ValueError):
            table.vectors[0, 0] = 5.0

    def test_duplicate_words_rejected_in_constructor(self):
        with pytest.raises(ValueError, match="duplicate"):
            EmbeddingTable(["a", "a"], np.eye(2))


class TestRoundTripAndNormalize:
    def test_save_load_identity(self, tmp_path):
        rng = np.random.default_rng(3)
        vecs = rng.standard_normal((7, 5)) * np.logspace(-8, 8, 5)
        vecs[0, 0] = 0.1  # non-representable decimal
        table = EmbeddingTable([f"w{i}" for i in range(7)], vecs)
        path = str(tmp_path / "emb.txt")
        save_text_embeddings(table, path)
        back = load_text_embeddings(path)
        assert back.words == table.words
        np.testing.assert_array_equal(back.vectors, table.vectors)

    def test_save_load_save_stable(self, tmp_path):
        table = EmbeddingTable(["a"], np.array([[1 / 3, 2 / 7]]))
        p1, p2 = str(tmp_path / "a.txt"), str(tmp_path / "b.txt")
        save_text_embeddings(table, p1)
        save_text_embeddings(load_text_embeddings(p1), p2)
        assert open(p1).read() == open(p2).read()

    @given(
        st.lists(
            st.lists(
                st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
                min_size=4, max_size=4,
            ).filter(lambda row: any(abs(v) > 1e-6 for v in row)),
            min_size=1, max_size=8,
        )
    )
    @settings(max_examples=50, deadline=None)
    def test_normalize_idempotent_exactly(self, rows):
        table = EmbeddingTable([f"w{i}" for i in range(len(rows))], np.array(rows))
        once = table.normalized()
        twice = once.normalized()
        np.testing.assert_array_equal(once.vectors, twice.vectors)
        np.testing.assert_allclose(
            np.linalg.norm(once.vectors, axis=1), 1.0, rtol=0, atol=1e-12
        )

    def test_normalize_rejects_zero_rows(self):
        table = EmbeddingTable(["a", "z"], np.array([[1.0, 0], [0, 0]]))
        with pytest.raises(ValueError, match="zero vector"):
            table.normalized()
