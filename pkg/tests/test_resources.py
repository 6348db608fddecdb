from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from corpuscope.errors import ParseError
from corpuscope.resources import (
    LabelSet,
    cosine,
    coverage_report,
    import_sentence_embeddings,
    load_label_set,
    load_norms,
    load_vectors,
)

from conftest import build_document, document_from_words, write_embeddings_jsonl
from corpuscope.corpus import Pos


class TestCosine:
    def test_parallel(self):
        assert cosine([1, 0], [1, 0]) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine([1, 0], [0, 1]) == pytest.approx(0.0)

    def test_hand_value(self):
        assert cosine([1, 1], [1, 0]) == pytest.approx(0.7071, abs=1e-4)

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            cosine([0, 0], [1, 0])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            cosine([1, 0], [1, 0, 0])

    @given(st.lists(st.floats(min_value=-100, max_value=100), min_size=2, max_size=6),
           st.lists(st.floats(min_value=-100, max_value=100), min_size=2, max_size=6))
    def test_symmetry_and_bounds(self, u, v):
        n = min(len(u), len(v))
        u, v = np.array(u[:n]), np.array(v[:n])
        if np.linalg.norm(u) == 0 or np.linalg.norm(v) == 0:
            return
        assert cosine(u, v) == pytest.approx(cosine(v, u))
        assert abs(cosine(u, v)) <= 1 + 1e-12
        assert cosine(u, u) == pytest.approx(1.0, abs=1e-12)


class TestLoadVectors:
    def test_text_header(self, tmp_path):
        path = tmp_path / "vec.txt"
        path.write_text("2 3\na 1 0 0\nb 0 1 0\n", encoding="utf-8")
        store = load_vectors(path)
        assert store.dimension == 3
        assert len(store) == 2
        assert np.allclose(store.get("a"), [1, 0, 0])

    def test_short_row_reports_line(self, tmp_path):
        path = tmp_path / "vec.txt"
        path.write_text("2 3\na 1 0 0\nb 0 1\n", encoding="utf-8")
        with pytest.raises(ParseError, match=":3:"):
            load_vectors(path)

    def test_miss_recorded(self, tmp_path):
        path = tmp_path / "vec.txt"
        path.write_text("1 2\na 1 0\n", encoding="utf-8")
        store = load_vectors(path)
        assert store.get("fehlt") is None
        assert store.misses == 1
        assert store.hits == 0

    def test_duplicate_last_wins_with_warning(self, tmp_path):
        path = tmp_path / "vec.txt"
        path.write_text("2 2\na 1 0\na 0 1\n", encoding="utf-8")
        with pytest.warns(UserWarning, match="duplicate"):
            store = load_vectors(path)
        assert np.allclose(store.get("a"), [0, 1])

    def test_tsv_format(self, tmp_path):
        path = tmp_path / "vec.tsv"
        path.write_text("a\t1\t0\nb\t0\t1\n", encoding="utf-8")
        store = load_vectors(path, fmt="tsv")
        assert store.dimension == 2
        assert len(store) == 2

    def test_case_normalization_default(self, tmp_path):
        path = tmp_path / "vec.txt"
        path.write_text("1 2\nHaus 1 0\n", encoding="utf-8")
        store = load_vectors(path)
        assert store.get("haus") is not None
        assert store.get("HAUS") is not None
        exact = load_vectors(path, normalize_case=False)
        assert exact.get("haus") is None
        assert exact.get("Haus") is not None

    def test_loading_is_idempotent(self, tmp_path):
        path = tmp_path / "vec.txt"
        path.write_text("2 2\na 1 0\nb 0 1\n", encoding="utf-8")
        first = load_vectors(path)
        second = load_vectors(path)
        assert set(first.words()) == set(second.words())
        for w in first.words():
            assert np.array_equal(first.get(w), second.get(w))


class TestNorms:
    def test_missing_cells_allowed(self, tmp_path):
        path = tmp_path / "norms.tsv"
        path.write_text("haus\t5.0\t4.0\t\t2.0\nhund\t3.0\t6.0\t1.0\t2.5\n",
                        encoding="utf-8")
        norms = load_norms(path)
        assert norms.get("haus", "valence") is None
        assert norms.get("haus", "concreteness") == 5.0
        assert norms.get("hund", "imageability") == 6.0

    def test_bad_column_count(self, tmp_path):
        path = tmp_path / "norms.tsv"
        path.write_text("haus\t5.0\t4.0\n", encoding="utf-8")
        with pytest.raises(ParseError, match=":1:"):
            load_norms(path)

    def test_unknown_field_rejected(self, tmp_path):
        path = tmp_path / "norms.tsv"
        path.write_text("haus\t5.0\t4.0\t3.0\t2.0\n", encoding="utf-8")
        norms = load_norms(path)
        with pytest.raises(ValueError):
            norms.get("haus", "frequency")


class TestLabelSet:
    def test_loading(self, tmp_path):
        pos = tmp_path / "pos.txt"
        neg = tmp_path / "neg.txt"
        fear = tmp_path / "fear.txt"
        pos.write_text("Liebe\nFreude\n", encoding="utf-8")
        neg.write_text("Hass\n", encoding="utf-8")
        fear.write_text("Angst\nFurcht\n", encoding="utf-8")
        labels = load_label_set(pos, neg, {"fear": fear})
        assert labels.positive == ["Liebe", "Freude"]
        assert labels.negative == ["Hass"]
        assert labels.emotions["fear"] == ["Angst", "Furcht"]

    def test_empty_polarity_rejected(self):
        with pytest.raises(ValueError):
            LabelSet(positive=[], negative=["x"])


class TestCoverage:
    def test_all_present(self, tmp_path):
        doc = document_from_words("d", ["haus", "hund"])
        path = tmp_path / "vec.txt"
        path.write_text("2 2\nhaus 1 0\nhund 0 1\n", encoding="utf-8")
        report = coverage_report([doc], load_vectors(path))
        assert report["overall"] == 1.0

    def test_none_present(self, tmp_path):
        doc = document_from_words("d", ["haus", "hund"])
        path = tmp_path / "vec.txt"
        path.write_text("1 2\nkatze 1 0\n", encoding="utf-8")
        report = coverage_report([doc], load_vectors(path))
        assert report["overall"] == 0.0

    def test_eleven_of_twenty(self, tmp_path):
        words = [f"wort{i}" for i in range(20)]
        doc = document_from_words("d", words)
        rows = "\n".join(f"wort{i} 1 0" for i in range(11))
        path = tmp_path / "vec.txt"
        path.write_text(f"11 2\n{rows}\n", encoding="utf-8")
        report = coverage_report([doc], load_vectors(path))
        assert report["overall"] == pytest.approx(0.55)
        assert report["per_document"]["d"] == pytest.approx(0.55)


class TestImportEmbeddings:
    def test_uniform_dimension(self, tmp_path):
        rows = [
            {"doc_id": "a", "sentence_index": 0, "vector": [0.0] * 768},
            {"doc_id": "a", "sentence_index": 1, "vector": [1.0] * 768},
        ]
        path = write_embeddings_jsonl(tmp_path / "emb.jsonl", rows)
        loaded = import_sentence_embeddings(path)
        assert len(loaded) == 2
        assert loaded.dimension == 768

    def test_ragged_dimension_rejected(self, tmp_path):
        rows = [
            {"doc_id": "a", "sentence_index": 0, "vector": [0.0] * 768},
            {"doc_id": "a", "sentence_index": 1, "vector": [1.0] * 767},
        ]
        path = write_embeddings_jsonl(tmp_path / "emb.jsonl", rows)
        with pytest.raises(ParseError, match=":2:"):
            import_sentence_embeddings(path)

    def test_duplicate_last_wins_with_warning(self, tmp_path):
        rows = [
            {"doc_id": "a", "sentence_index": 0, "vector": [0.0, 0.0]},
            {"doc_id": "a", "sentence_index": 0, "vector": [1.0, 1.0]},
        ]
        path = write_embeddings_jsonl(tmp_path / "emb.jsonl", rows)
        with pytest.warns(UserWarning, match="duplicate"):
            loaded = import_sentence_embeddings(path)
        assert np.allclose(loaded.get("a", 0), [1.0, 1.0])

    def test_unknown_document_rejected_with_warning(self, tmp_path):
        rows = [
            {"doc_id": "a", "sentence_index": 0, "vector": [0.0, 0.0]},
            {"doc_id": "ghost", "sentence_index": 0, "vector": [1.0, 1.0]},
        ]
        path = write_embeddings_jsonl(tmp_path / "emb.jsonl", rows)
        with pytest.warns(UserWarning, match="unknown"):
            loaded = import_sentence_embeddings(path, known_ids={"a"})
        assert len(loaded) == 1

    def test_coverage_fraction(self, tmp_path):
        doc = build_document("a", [[("Haus", Pos.NOUN)], [("Hund", Pos.NOUN)]])
        rows = [{"doc_id": "a", "sentence_index": 0, "vector": [1.0, 0.0]}]
        path = write_embeddings_jsonl(tmp_path / "emb.jsonl", rows)
        loaded = import_sentence_embeddings(path)
        assert loaded.coverage(doc) == pytest.approx(0.5)
