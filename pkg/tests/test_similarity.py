from __future__ import annotations

import math
from collections import Counter
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from corpuscope.corpus import Pos
from corpuscope.errors import ConfigError, NumericError, ResourceError
from corpuscope.resources import cosine
from corpuscope.similarity import (
    chunk_centroid_embed,
    derive_pair_seed,
    fms_similarity,
    fowlkes_mallows,
    jaccard,
    kmeans,
    lsa_embed,
    lsa_singular_values,
    similarity_matrix,
    tfidf_matrix,
)

from conftest import build_document, document_from_words, store_from_dict


def jaccard_set_oracle(words_a, words_b):
    a, b = set(words_a), set(words_b)
    shared = sum(1 for w in a if w in b)
    union = len(a) + len(b) - shared
    return shared / union


def jaccard_bag_oracle(words_a, words_b):
    ca, cb = Counter(words_a), Counter(words_b)
    lo = hi = 0
    for w in set(list(ca) + list(cb)):
        lo += min(ca.get(w, 0), cb.get(w, 0))
        hi += max(ca.get(w, 0), cb.get(w, 0))
    return lo / hi


def fms_oracle(truth, pred):
    """Quadratic pair enumeration, independent of the contingency version."""
    tp = fp = fn = 0
    for i, j in combinations(range(len(truth)), 2):
        same_true = truth[i] == truth[j]
        same_pred = pred[i] == pred[j]
        if same_true and same_pred:
            tp += 1
        elif same_pred:
            fp += 1
        elif same_true:
            fn += 1
    if tp + fp == 0 or tp + fn == 0:
        return 0.0
    return tp / math.sqrt((tp + fp) * (tp + fn))


class TestJaccard:
    def test_identical_documents(self):
        doc = document_from_words("a", ["x", "y", "x"])
        twin = document_from_words("b", ["x", "y", "x"])
        assert jaccard(doc, twin, "set") == 1.0
        assert jaccard(doc, twin, "bag") == 1.0

    def test_disjoint_vocabularies(self):
        a = document_from_words("a", ["x", "y"])
        b = document_from_words("b", ["u", "v"])
        assert jaccard(a, b, "set") == 0.0
        assert jaccard(a, b, "bag") == 0.0

    def test_hand_case(self):
        a = document_from_words("a", ["a", "b", "c"])
        b = document_from_words("b", ["b", "c", "d"])
        assert jaccard(a, b, "set") == pytest.approx(0.5)

    def test_word_order_invariance(self):
        a = document_from_words("a", ["x", "y", "z"])
        b = document_from_words("b", ["z", "y", "x"])
        assert jaccard(a, b, "set") == 1.0
        assert jaccard(a, b, "bag") == 1.0

    def test_empty_documents_rejected(self):
        a = build_document("a", [[(".", Pos.PUNCT)]])
        b = build_document("b", [[(".", Pos.PUNCT)]])
        with pytest.raises(ValueError):
            jaccard(a, b, "set")

    def test_stopwords_excluded_when_given(self):
        a = document_from_words("a", ["und", "wahl", "land"])
        b = document_from_words("b", ["und", "meer", "land"])
        plain = jaccard(a, b, "set")
        filtered = jaccard(a, b, "set", stopwords=frozenset({"und"}))
        assert plain == pytest.approx(2 / 4)
        assert filtered == pytest.approx(1 / 3)

    @given(st.lists(st.sampled_from("abcde"), min_size=1, max_size=12),
           st.lists(st.sampled_from("abcde"), min_size=1, max_size=12))
    def test_matches_enumeration_oracle(self, words_a, words_b):
        a = document_from_words("a", list(words_a))
        b = document_from_words("b", list(words_b))
        assert jaccard(a, b, "set") == jaccard_set_oracle(words_a, words_b)
        assert jaccard(a, b, "bag") == jaccard_bag_oracle(words_a, words_b)
        assert jaccard(a, b, "set") == jaccard(b, a, "set")
        assert jaccard(a, b, "bag") == jaccard(b, a, "bag")


class TestLsa:
    def test_identical_multisets_coincide(self):
        a = document_from_words("a", ["x", "y", "x"])
        b = document_from_words("b", ["y", "x", "x"])
        c = document_from_words("c", ["z", "w", "q"])
        coords = lsa_embed([a, b, c], dims=2)
        assert np.allclose(coords["a"], coords["b"], atol=1e-10)

    def test_rank_one_second_singular_value(self):
        a = document_from_words("a", ["x", "y"])
        b = document_from_words("b", ["x", "y", "x", "y"])
        singular = lsa_singular_values([a, b])
        assert singular[1] < 1e-10

    def test_three_doc_cosine_ordering_matches_full_space(self):
        a = document_from_words("a", ["wahl", "land", "land", "arbeit"])
        b = document_from_words("b", ["wahl", "land", "steuer", "arbeit"])
        c = document_from_words("c", ["meer", "wind", "sonne", "regen"])
        docs = [a, b, c]
        matrix, _ = tfidf_matrix(docs)
        full = {}
        for i, j in combinations(range(3), 2):
            full[(i, j)] = cosine(matrix[:, i], matrix[:, j])
        coords = lsa_embed(docs, dims=2)
        reduced = {}
        ids = ["a", "b", "c"]
        for i, j in combinations(range(3), 2):
            reduced[(i, j)] = cosine(coords[ids[i]], coords[ids[j]])
        full_order = sorted(full, key=full.get)
        reduced_order = sorted(reduced, key=reduced.get)
        assert full_order == reduced_order

    def test_too_few_documents(self):
        a = document_from_words("a", ["x"])
        with pytest.raises(ConfigError):
            lsa_embed([a], dims=2)

    def test_document_order_invariance(self):
        a = document_from_words("a", ["wahl", "land", "land"])
        b = document_from_words("b", ["wahl", "steuer", "geld"])
        c = document_from_words("c", ["meer", "wind", "geld"])
        forward = lsa_embed([a, b, c], dims=2)
        backward = lsa_embed([c, a, b], dims=2)
        for doc_id in ("a", "b", "c"):
            assert np.allclose(np.abs(forward[doc_id]), np.abs(backward[doc_id]),
                               atol=1e-10)

    def test_dims_beyond_rank_bound(self):
        # 3 documents over a 2-term vocabulary: rank is at most 2.
        a = document_from_words("a", ["x", "y"])
        b = document_from_words("b", ["y", "x"])
        c = document_from_words("c", ["x", "x"])
        with pytest.raises(NumericError):
            lsa_embed([a, b, c], dims=3)


class TestChunkCentroids:
    def test_single_word_chunk(self):
        store = store_from_dict({"wort": [1.0, 2.0]})
        doc = document_from_words("d", ["wort"], chunk_size=10)
        chunks, doc_vector = chunk_centroid_embed(doc, store)
        assert np.allclose(chunks[0], [1.0, 2.0])
        assert np.allclose(doc_vector, [1.0, 2.0])

    def test_mean_of_two_vectors(self):
        store = store_from_dict({"eins": [1.0, 0.0], "zwei": [0.0, 1.0]})
        doc = document_from_words("d", ["eins", "zwei"], chunk_size=10)
        chunks, _ = chunk_centroid_embed(doc, store)
        assert np.allclose(chunks[0], [0.5, 0.5])

    def test_two_identical_chunks(self):
        store = store_from_dict({"wort": [2.0, 4.0]})
        doc = document_from_words("d", ["wort", "wort"], chunk_size=1)
        chunks, doc_vector = chunk_centroid_embed(doc, store)
        assert chunks.shape == (2, 2)
        assert np.allclose(doc_vector, chunks[0])

    def test_uncovered_chunk_skipped_with_warning(self):
        store = store_from_dict({"wort": [1.0, 0.0]})
        doc = document_from_words("d", ["wort", "fremd"], chunk_size=1)
        with pytest.warns(UserWarning, match="skipped"):
            chunks, _ = chunk_centroid_embed(doc, store)
        assert chunks.shape == (1, 2)

    def test_no_coverage_at_all(self):
        store = store_from_dict({"anders": [1.0, 0.0]})
        doc = document_from_words("d", ["fremd"], chunk_size=1)
        with pytest.raises(ResourceError):
            with pytest.warns(UserWarning):
                chunk_centroid_embed(doc, store)


class TestKmeans:
    def test_separated_pairs_cluster_together(self):
        points = np.array([[0.0, 0.0], [0.1, 0.0], [10.0, 10.0], [10.1, 10.0]])
        labels, _, inertia = kmeans(points, 2, seed=1)
        assert labels[0] == labels[1]
        assert labels[2] == labels[3]
        assert labels[0] != labels[2]
        # Exhaustive oracle: no 2-partition beats the returned inertia.
        best = min(_partition_inertia(points, assignment)
                   for assignment in _all_two_partitions(4))
        assert inertia == pytest.approx(best)

    def test_identical_points_zero_inertia(self):
        points = np.ones((5, 3))
        _, _, inertia = kmeans(points, 2, seed=0)
        assert inertia == pytest.approx(0.0)

    def test_inertia_non_increasing_over_lloyd_iterations(self):
        from corpuscope.similarity import _kmeans_pp, _lloyd

        rng = np.random.default_rng(4)
        points = rng.normal(size=(40, 2))
        start = _kmeans_pp(points, 3, np.random.default_rng(7))
        inertias = []
        for max_iter in range(1, 8):
            _, _, inertia = _lloyd(points, start.copy(), max_iter=max_iter)
            inertias.append(inertia)
        assert all(a >= b - 1e-9 for a, b in zip(inertias, inertias[1:]))

    def test_fewer_points_than_k(self):
        with pytest.raises(ValueError):
            kmeans(np.zeros((1, 2)), 2, seed=0)

    def test_deterministic_for_fixed_seed(self):
        rng = np.random.default_rng(11)
        points = rng.normal(size=(30, 3))
        first = kmeans(points, 3, seed=5)
        second = kmeans(points, 3, seed=5)
        assert np.array_equal(first[0], second[0])
        assert first[2] == second[2]


def _all_two_partitions(n):
    for mask in range(1, 2 ** (n - 1)):
        yield [(mask >> i) & 1 for i in range(n)]


def _partition_inertia(points, assignment):
    assignment = np.array(assignment)
    total = 0.0
    for label in (0, 1):
        members = points[assignment == label]
        if len(members):
            total += float(np.sum((members - members.mean(axis=0)) ** 2))
    return total


class TestFowlkesMallows:
    def test_identical_labelings(self):
        assert fowlkes_mallows([0, 0, 1, 1], [5, 5, 9, 9]) == pytest.approx(1.0)

    def test_all_merged_prediction(self):
        value = fowlkes_mallows([0, 0, 1, 1], [0, 0, 0, 0])
        assert value == pytest.approx(2 / math.sqrt(12))

    def test_total_mismatch(self):
        assert fowlkes_mallows([0, 0, 1, 1], [0, 1, 0, 1]) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            fowlkes_mallows([0, 1], [0, 1, 0])

    def test_singleton_clusters_give_zero(self):
        assert fowlkes_mallows([0, 1, 2], [0, 0, 0]) == 0.0

    @given(st.lists(st.integers(0, 3), min_size=2, max_size=12),
           st.data())
    def test_matches_pair_enumeration(self, truth, data):
        pred = data.draw(st.lists(st.integers(0, 3), min_size=len(truth),
                                  max_size=len(truth)))
        assert fowlkes_mallows(truth, pred) == fms_oracle(truth, pred)

    @given(st.lists(st.integers(0, 2), min_size=2, max_size=10), st.data())
    def test_invariant_under_relabeling(self, truth, data):
        pred = data.draw(st.lists(st.integers(0, 2), min_size=len(truth),
                                  max_size=len(truth)))
        relabeled = [{0: 7, 1: 5, 2: 6}[p] for p in pred]
        assert fowlkes_mallows(truth, pred) == pytest.approx(
            fowlkes_mallows(truth, relabeled))


class TestFmsSimilarity:
    def test_separable_clouds_score_near_zero(self):
        rng = np.random.default_rng(2)
        a = rng.normal(size=(30, 3))
        b = rng.normal(size=(30, 3)) + np.array([50.0, 0.0, 0.0])
        assert fms_similarity(a, b, seed=3) <= 0.05

    def test_symmetry_is_exact(self):
        rng = np.random.default_rng(8)
        a = rng.normal(size=(20, 3))
        b = rng.normal(size=(25, 3))
        assert fms_similarity(a, b, seed=9) == fms_similarity(b, a, seed=9)

    def test_low_variance_across_seeds_on_separable_data(self):
        rng = np.random.default_rng(12)
        a = rng.normal(size=(25, 2))
        b = rng.normal(size=(25, 2)) + 40.0
        scores = [fms_similarity(a, b, seed=s) for s in range(100)]
        assert np.var(scores) < 1e-3

    def test_too_few_vectors(self):
        with pytest.raises(ValueError):
            fms_similarity(np.zeros((1, 2)), np.ones((5, 2)), seed=0)


class TestSimilarityMatrix:
    def _corpus(self):
        return [
            document_from_words("a", ["wahl", "land", "arbeit", "wahl"], chunk_size=2),
            document_from_words("b", ["wahl", "land", "steuer", "geld"], chunk_size=2),
            document_from_words("c", ["meer", "wind", "sonne", "regen"], chunk_size=2),
        ]

    def test_identical_documents_full_similarity(self):
        docs = [document_from_words("a", ["x", "y"]),
                document_from_words("b", ["x", "y"])]
        matrix = similarity_matrix(docs, "jaccard")
        assert np.allclose(matrix.values, 1.0)

    def test_mean_column_excludes_diagonal(self):
        matrix = similarity_matrix(self._corpus(), "jaccard")
        means = matrix.mean_similarity()
        for i, doc_id in enumerate(matrix.doc_ids):
            expected = np.mean([matrix.values[i, j] for j in range(3) if j != i])
            assert means[doc_id] == pytest.approx(expected)

    def test_matches_pairwise_recomputation(self):
        docs = self._corpus()
        matrix = similarity_matrix(docs, "jaccard")
        for i in range(3):
            for j in range(3):
                if i == j:
                    assert matrix.values[i, j] == 1.0
                else:
                    assert matrix.values[i, j] == jaccard(docs[i], docs[j], "set")

    def test_symmetry_all_methods(self):
        rng = np.random.default_rng(3)
        vocab = [f"w{i}" for i in range(30)]
        store = store_from_dict({w: rng.normal(size=4).tolist() for w in vocab})
        docs = [document_from_words(f"d{j}", [vocab[int(i)] for i in
                                              rng.integers(0, 30, size=24)],
                                    per_sentence=4, chunk_size=6)
                for j in range(3)]
        for method in ("jaccard", "lsa", "centroid", "fms"):
            matrix = similarity_matrix(docs, method, store=store, seed=5)
            assert np.array_equal(matrix.values, matrix.values.T, equal_nan=True)

    def test_fms_diagonal_is_missing(self):
        rng = np.random.default_rng(6)
        vocab = [f"w{i}" for i in range(20)]
        store = store_from_dict({w: rng.normal(size=3).tolist() for w in vocab})
        docs = [document_from_words(f"d{j}", [vocab[int(i)] for i in
                                              rng.integers(0, 20, size=16)],
                                    per_sentence=4)
                for j in range(2)]
        matrix = similarity_matrix(docs, "fms", store=store, seed=1)
        assert np.isnan(matrix.values[0, 0])
        assert not np.isnan(matrix.values[0, 1])

    def test_threads_do_not_change_results(self):
        rng = np.random.default_rng(9)
        vocab = [f"w{i}" for i in range(25)]
        store = store_from_dict({w: rng.normal(size=3).tolist() for w in vocab})
        docs = [document_from_words(f"d{j}", [vocab[int(i)] for i in
                                              rng.integers(0, 25, size=20)],
                                    per_sentence=4)
                for j in range(4)]
        sequential = similarity_matrix(docs, "fms", store=store, seed=2, threads=1)
        threaded = similarity_matrix(docs, "fms", store=store, seed=2, threads=4)
        assert np.array_equal(sequential.values, threaded.values, equal_nan=True)

    def test_unknown_method(self):
        with pytest.raises(ConfigError):
            similarity_matrix(self._corpus(), "euklid")

    def test_pair_seed_is_order_independent(self):
        assert derive_pair_seed(7, "a", "b") == derive_pair_seed(7, "b", "a")
        assert derive_pair_seed(7, "a", "b") != derive_pair_seed(8, "a", "b")

    def test_fms_uses_imported_embeddings(self, tmp_path):
        from corpuscope.resources import import_sentence_embeddings
        from conftest import write_embeddings_jsonl

        rng = np.random.default_rng(14)
        docs = [document_from_words("a", [f"x{i}" for i in range(12)], per_sentence=3),
                document_from_words("b", [f"y{i}" for i in range(12)], per_sentence=3)]
        rows = []
        for doc_id, shift in (("a", 0.0), ("b", 30.0)):
            for index in range(4):
                rows.append({"doc_id": doc_id, "sentence_index": index,
                             "vector": (rng.normal(size=3) + shift).tolist()})
        path = write_embeddings_jsonl(tmp_path / "emb.jsonl", rows)
        embeddings = import_sentence_embeddings(path)
        matrix = similarity_matrix(docs, "fms", embeddings=embeddings, seed=3)
        assert matrix.metadata["vector_source"] == "imported"
        # Far-apart embedding clouds: nearly perfect clustering, low similarity.
        assert matrix.values[0, 1] <= 0.05
