"""Four document-similarity methods over a parsed corpus.

Word-overlap (Jaccard), reduced tf-idf space (LSA), chunk-centroid
document embeddings, and a clustering-based measure: pool two documents'
sentence vectors, cluster with k=2, and read similarity off how badly
the clustering recovers document identity (1 - Fowlkes-Mallows).
"""

from __future__ import annotations

import csv
import hashlib
import json
import warnings
from collections import Counter
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .complexity import pca_project
from .corpus import CONTENT_POS, Document
from .errors import ConfigError, NumericError, ResourceError
from .resources import SentenceEmbeddingSet, VectorStore, cosine, sentence_vectors

METHODS = ("jaccard", "lsa", "centroid", "fms")


def _word_types(document: Document, stopwords: frozenset[str] | None = None) -> set[str]:
    types = {t.normalized for t in document.word_tokens()}
    return types - stopwords if stopwords else types


def _word_counts(document: Document, stopwords: frozenset[str] | None = None) -> Counter:
    return Counter(t.normalized for t in document.word_tokens()
                   if not stopwords or t.normalized not in stopwords)


def jaccard(doc_a: Document, doc_b: Document, mode: str = "set",
            stopwords: frozenset[str] | None = None) -> float:
    """Word-overlap similarity of two documents.

    `set` compares unique normalized word types; `bag` compares
    multisets (sum of per-word min counts over sum of max counts).
    No stop words are removed unless a list is passed.
    """
    if mode not in ("set", "bag"):
        raise ValueError(f"unknown jaccard mode: {mode}")
    if mode == "set":
        a = _word_types(doc_a, stopwords)
        b = _word_types(doc_b, stopwords)
        union = a | b
        if not union:
            raise ValueError("jaccard undefined for two empty documents")
        return len(a & b) / len(union)
    a = _word_counts(doc_a, stopwords)
    b = _word_counts(doc_b, stopwords)
    keys = a.keys() | b.keys()
    if not keys:
        raise ValueError("jaccard undefined for two empty documents")
    minimum = sum(min(a[k], b[k]) for k in keys)
    maximum = sum(max(a[k], b[k]) for k in keys)
    return minimum / maximum


def tfidf_matrix(documents: list[Document],
                 stopwords: frozenset[str] | None = None):
    """Term-by-document tf-idf matrix over normalized word tokens.

    tf is the raw count; idf is ln((1+N)/(1+df)) + 1. The vocabulary is
    sorted for deterministic output.

    Returns (matrix, vocabulary).
    """
    counts = [_word_counts(d, stopwords) for d in documents]
    vocabulary = sorted(set().union(*[c.keys() for c in counts]) if counts else set())
    n_docs = len(documents)
    df = np.array([sum(1 for c in counts if term in c) for term in vocabulary], dtype=float)
    idf = np.log((1.0 + n_docs) / (1.0 + df)) + 1.0
    matrix = np.zeros((len(vocabulary), n_docs))
    for j, c in enumerate(counts):
        for i, term in enumerate(vocabulary):
            if term in c:
                matrix[i, j] = c[term]
    return matrix * idf[:, None], vocabulary


def lsa_embed(documents: list[Document], dims: int = 2,
              stopwords: frozenset[str] | None = None) -> dict[str, np.ndarray]:
    """Reduce the corpus tf-idf matrix with a truncated SVD.

    Document coordinates are the top-`dims` right singular vectors scaled
    by their singular values, with a deterministic sign convention.
    """
    if len(documents) < dims:
        raise ConfigError(f"lsa with {dims} dimensions needs at least {dims} documents")
    matrix, _ = tfidf_matrix(documents, stopwords)
    if dims > min(matrix.shape):
        raise NumericError(f"requested {dims} dimensions exceeds matrix rank bound "
                           f"{min(matrix.shape)}")
    _, singular, vt = np.linalg.svd(matrix, full_matrices=False)
    coords = vt[:dims, :].T * singular[:dims]
    for j in range(dims):
        column = coords[:, j]
        pivot = np.argmax(np.abs(column))
        if column[pivot] < 0:
            coords[:, j] = -column
    return {doc.id: coords[i] for i, doc in enumerate(documents)}


def lsa_singular_values(documents: list[Document]) -> np.ndarray:
    matrix, _ = tfidf_matrix(documents)
    return np.linalg.svd(matrix, compute_uv=False)


def chunk_centroid_embed(document: Document, store: VectorStore):
    """Mean word vector per chunk, plus the document mean of chunk centroids.

    Chunk centroids average the chunk's content words found in the store;
    chunks without any store hit are skipped with a warning.

    Returns (chunk_matrix, document_vector).
    """
    if not document.chunks:
        raise ValueError(f"document {document.id!r} has no chunks")
    words = document.word_tokens()
    centroids = []
    skipped = 0
    for lo, hi in document.chunks:
        hits = [store.get(t.surface) for t in words[lo:hi] if t.pos in CONTENT_POS]
        hits = [h for h in hits if h is not None]
        if not hits:
            skipped += 1
            continue
        centroids.append(np.mean(hits, axis=0))
    if skipped:
        warnings.warn(f"{document.id}: {skipped} chunk(s) without store coverage skipped")
    if not centroids:
        raise ResourceError(f"document {document.id!r} has no chunk with store coverage")
    chunk_matrix = np.vstack(centroids)
    return chunk_matrix, chunk_matrix.mean(axis=0)


def corpus_chunk_vectors(documents: list[Document],
                         store: VectorStore) -> dict[str, np.ndarray]:
    return {d.id: chunk_centroid_embed(d, store)[0] for d in documents}


def chunk_embedding_2d(documents: list[Document], store: VectorStore,
                       dims: int = 2) -> dict[str, dict]:
    """Shared 2d projection of every document's chunk centroids.

    All chunk vectors are pooled before projecting so overlap between
    documents is visible in one coordinate frame.
    """
    by_doc = corpus_chunk_vectors(documents, store)
    stacked = np.vstack(list(by_doc.values()))
    coords, _ = pca_project(stacked, dims)
    out = {}
    offset = 0
    for doc_id, M in by_doc.items():
        count = M.shape[0]
        block = coords[offset : offset + count]
        out[doc_id] = {"chunks": block.tolist(),
                       "centroid": block.mean(axis=0).tolist()}
        offset += count
    return out


def _kmeans_pp(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centroids = [points[rng.integers(n)]]
    for _ in range(1, k):
        d2 = np.min(
            [np.sum((points - c) ** 2, axis=1) for c in centroids], axis=0)
        total = float(d2.sum())
        if total > 0:
            probabilities = d2 / total
            choice = rng.choice(n, p=probabilities)
        else:
            choice = rng.integers(n)
        centroids.append(points[choice])
    return np.array(centroids)


def _lloyd(points: np.ndarray, centroids: np.ndarray, max_iter: int = 300):
    labels = None
    for _ in range(max_iter):
        distances = np.linalg.norm(points[:, None, :] - centroids[None, :, :], axis=2)
        new_labels = np.argmin(distances, axis=1)
        for j in range(centroids.shape[0]):
            members = points[new_labels == j]
            if members.shape[0] == 0:
                # Re-seed an empty cluster at the point farthest from its centroid.
                assigned = distances[np.arange(points.shape[0]), new_labels]
                farthest = int(np.argmax(assigned))
                centroids[j] = points[farthest]
                new_labels[farthest] = j
            else:
                centroids[j] = members.mean(axis=0)
        if labels is not None and np.array_equal(labels, new_labels):
            break
        labels = new_labels
    distances = np.linalg.norm(points[:, None, :] - centroids[None, :, :], axis=2)
    labels = np.argmin(distances, axis=1)
    inertia = float(np.sum(np.min(distances, axis=1) ** 2))
    return labels, centroids, inertia


def kmeans(points, k: int, seed: int, restarts: int = 10):
    """Lloyd's algorithm with k-means++ starts from a seeded generator.

    Keeps the best of `restarts` runs by inertia; assignment ties go to
    the lowest centroid index.

    Returns (labels, centroids, inertia).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError("points must be a 2d array")
    if pts.shape[0] < k:
        raise ValueError(f"kmeans needs at least k={k} points, got {pts.shape[0]}")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        start = _kmeans_pp(pts, k, rng)
        labels, centroids, inertia = _lloyd(pts, start.copy())
        if best is None or inertia < best[2]:
            best = (labels, centroids, inertia)
    return best


def fowlkes_mallows(true_labels, pred_labels) -> float:
    """Pairwise clustering agreement: TP / sqrt((TP+FP)(TP+FN)).

    Counts unordered point pairs co-clustered in both labelings (TP),
    in the prediction only (FP), and in the truth only (FN); zero when
    either radicand factor vanishes.
    """
    true_labels = list(true_labels)
    pred_labels = list(pred_labels)
    if len(true_labels) != len(pred_labels):
        raise ValueError(f"label lengths differ: {len(true_labels)} vs {len(pred_labels)}")
    if len(true_labels) < 2:
        raise ValueError("need at least 2 points")
    contingency = Counter(zip(true_labels, pred_labels))
    tp = sum(comb(c, 2) for c in contingency.values())
    true_pairs = sum(comb(c, 2) for c in Counter(true_labels).values())
    pred_pairs = sum(comb(c, 2) for c in Counter(pred_labels).values())
    if true_pairs == 0 or pred_pairs == 0:
        return 0.0
    return tp / np.sqrt(true_pairs * pred_pairs)


def fms_similarity(a_vectors, b_vectors, seed: int) -> float:
    """Similarity of two documents from sentence-vector clustering.

    The pooled vectors are clustered with k=2; document identity is the
    ground truth. A clustering that recovers the documents perfectly
    means maximal dissimilarity, so the score is 1 - Fowlkes-Mallows.
    The pooling order is canonicalized so the score is exactly symmetric.
    """
    A = np.asarray(a_vectors, dtype=float)
    B = np.asarray(b_vectors, dtype=float)
    if A.shape[0] < 2 or B.shape[0] < 2:
        raise ValueError("each document needs at least 2 sentence vectors")
    if A.tobytes() > B.tobytes():
        A, B = B, A
    pooled = np.vstack([A, B])
    truth = [0] * A.shape[0] + [1] * B.shape[0]
    labels, _, _ = kmeans(pooled, 2, seed)
    return 1.0 - fowlkes_mallows(truth, labels)


def derive_pair_seed(seed: int, id_a: str, id_b: str) -> int:
    """Stable per-pair seed, independent of argument order."""
    lo, hi = sorted([id_a, id_b])
    digest = hashlib.sha256(f"{seed}|{lo}|{hi}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(slots=True)
class SimilarityMatrix:
    method: str
    doc_ids: list[str]
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def mean_similarity(self) -> dict[str, float]:
        """Row means excluding the diagonal (and any missing cells)."""
        out = {}
        n = len(self.doc_ids)
        for i, doc_id in enumerate(self.doc_ids):
            others = [self.values[i, j] for j in range(n)
                      if j != i and not np.isnan(self.values[i, j])]
            out[doc_id] = float(np.mean(others)) if others else float("nan")
        return out

    def to_csv(self, path) -> None:
        means = self.mean_similarity()
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["doc_id", *self.doc_ids, "mean_similarity"])
            for i, doc_id in enumerate(self.doc_ids):
                cells = ["" if np.isnan(v) else repr(float(v)) for v in self.values[i]]
                writer.writerow([doc_id, *cells, repr(means[doc_id])])

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "doc_ids": self.doc_ids,
            "matrix": [[None if np.isnan(v) else float(v) for v in row]
                       for row in self.values],
            "mean_similarity": {k: (None if np.isnan(v) else v)
                                for k, v in self.mean_similarity().items()},
            "metadata": self.metadata,
        }

    def save_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def similarity_matrix(documents: list[Document], method: str,
                      store: VectorStore | None = None,
                      embeddings: SentenceEmbeddingSet | None = None,
                      seed: int = 0, jaccard_mode: str = "set",
                      threads: int = 1, lsa_dims: int = 2,
                      stopwords: frozenset[str] | None = None) -> SimilarityMatrix:
    """Evaluate one method over all unordered document pairs.

    The result is symmetric by construction. The fms method has no
    self-similarity; its diagonal is marked missing. `threads` parallelizes
    the fms pairs; per-pair seeds keep the result schedule-independent.
    """
    if method not in METHODS:
        raise ConfigError(f"unknown similarity method: {method}")
    n = len(documents)
    if n < 2:
        raise ConfigError("similarity needs at least 2 documents")
    ids = [d.id for d in documents]
    values = np.eye(n)
    metadata: dict = {"seed": seed}

    if stopwords:
        metadata["stopwords"] = len(stopwords)
    if method == "jaccard":
        metadata["mode"] = jaccard_mode
        for i in range(n):
            for j in range(i + 1, n):
                score = jaccard(documents[i], documents[j], jaccard_mode, stopwords)
                values[i, j] = values[j, i] = score
    elif method == "lsa":
        coords = lsa_embed(documents, lsa_dims, stopwords)
        metadata["dims"] = lsa_dims
        for i in range(n):
            for j in range(i + 1, n):
                score = cosine(coords[ids[i]], coords[ids[j]])
                values[i, j] = values[j, i] = score
    elif method == "centroid":
        if store is None:
            raise ConfigError("centroid similarity requires a word-vector store")
        doc_vectors = {d.id: chunk_centroid_embed(d, store)[1] for d in documents}
        metadata["space"] = f"{store.dimension}d"
        for i in range(n):
            for j in range(i + 1, n):
                score = cosine(doc_vectors[ids[i]], doc_vectors[ids[j]])
                values[i, j] = values[j, i] = score
    else:  # fms
        if store is None and embeddings is None:
            raise ConfigError("fms similarity requires sentence embeddings or a word-vector store")
        metadata["note"] = ("score is 1 - Fowlkes-Mallows of a k=2 clustering "
                            "against document identity")
        metadata["vector_source"] = "imported" if embeddings is not None else "centroid-fallback"
        vectors = {}
        for doc in documents:
            by_index = sentence_vectors(doc, store, embeddings)
            if len(by_index) < 2:
                raise ResourceError(
                    f"document {doc.id!r} has fewer than 2 sentence vectors")
            vectors[doc.id] = np.vstack([by_index[i] for i in sorted(by_index)])
        np.fill_diagonal(values, np.nan)
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

        def one_pair(pair):
            i, j = pair
            pair_seed = derive_pair_seed(seed, ids[i], ids[j])
            return i, j, fms_similarity(vectors[ids[i]], vectors[ids[j]], pair_seed)

        if threads > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(one_pair, pairs))
        else:
            results = [one_pair(p) for p in pairs]
        for i, j, score in results:
            values[i, j] = values[j, i] = score

    return SimilarityMatrix(method=method, doc_ids=ids, values=values,
                            metadata=metadata)
