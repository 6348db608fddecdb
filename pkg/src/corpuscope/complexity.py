"""Semantic complexity over chunk vectors: dispersion and drift.

Intra-textual variance is the mean squared distance of a document's
chunk vectors to their centroid; stepwise distance is the mean distance
between consecutive chunks. Both operate in the full embedding space; a
PCA projection is provided for display only.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NumericError


def _as_matrix(chunk_vectors) -> np.ndarray:
    rows = [np.asarray(v, dtype=float) for v in chunk_vectors]
    if not rows:
        raise ValueError("need at least one chunk vector")
    dim = rows[0].shape
    for v in rows[1:]:
        if v.shape != dim:
            raise ValueError(f"ragged chunk dimensions: {v.shape} vs {dim}")
    return np.vstack(rows)


def itv(chunk_vectors) -> float:
    """Mean squared Euclidean distance of chunk vectors to their centroid."""
    M = _as_matrix(chunk_vectors)
    centroid = M.mean(axis=0)
    return float(np.mean(np.sum((M - centroid) ** 2, axis=1)))


def sdw(chunk_vectors) -> float | None:
    """Mean Euclidean distance between consecutive chunk vectors.

    Needs at least two chunks; below that the value is missing (None)
    with a warning.
    """
    M = _as_matrix(chunk_vectors)
    if M.shape[0] < 2:
        warnings.warn("stepwise distance needs at least 2 chunks; emitting missing")
        return None
    steps = np.linalg.norm(np.diff(M, axis=0), axis=1)
    return float(np.mean(steps))


def pca_project(vectors, dims: int = 2):
    """Project vectors onto their top principal components.

    Returns (coordinates, explained_variance_fractions). Components carry
    a deterministic sign (largest-magnitude coefficient positive).
    Requesting more dimensions than the data can span is an error.
    """
    M = _as_matrix(vectors)
    n, d = M.shape
    if n < dims:
        raise NumericError(f"need at least {dims} vectors, got {n}")
    max_rank = min(n - 1, d) if n > 1 else d
    if dims > max_rank:
        raise NumericError(f"requested {dims} components but rank is at most {max_rank}")
    centered = M - M.mean(axis=0)
    cov = (centered.T @ centered) / (n - 1) if n > 1 else np.outer(centered[0], centered[0])
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1][:dims]
    components = eigvecs[:, order]
    flip = np.sign(components[np.argmax(np.abs(components), axis=0),
                              np.arange(dims)])
    flip[flip == 0] = 1.0
    components = components * flip
    coordinates = centered @ components
    total = float(np.sum(np.clip(eigvals, 0.0, None)))
    top = np.clip(eigvals[order], 0.0, None)
    explained = top / total if total > 0 else np.zeros(dims)
    return coordinates, explained


@dataclass(slots=True)
class ComplexityReport:
    doc_ids: list[str]
    itv_values: dict[str, float]
    sdw_values: dict[str, float | None]
    n_chunks: dict[str, int]
    projections: dict[str, np.ndarray]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["doc_id", "itv", "sdw", "n_chunks"])
            for doc_id in self.doc_ids:
                sdw_value = self.sdw_values[doc_id]
                writer.writerow([
                    doc_id,
                    repr(self.itv_values[doc_id]),
                    "" if sdw_value is None else repr(sdw_value),
                    self.n_chunks[doc_id],
                ])

    def scatter_json(self) -> dict:
        """Chunk coordinates plus centroids for a dispersion scatter plot."""
        out = {}
        for doc_id in self.doc_ids:
            coords = self.projections.get(doc_id)
            if coords is None:
                continue
            out[doc_id] = {
                "chunks": coords.tolist(),
                "centroid": coords.mean(axis=0).tolist(),
            }
        return out

    def save_scatter(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.scatter_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def complexity_report(chunk_vectors_by_doc: dict[str, np.ndarray],
                      project_dims: int = 2) -> ComplexityReport:
    """ITV/SDW per document plus a shared 2d projection of all chunks.

    The projection is fitted on the pooled chunk vectors so documents are
    directly comparable in the scatter export.
    """
    doc_ids = list(chunk_vectors_by_doc)
    itv_values = {}
    sdw_values = {}
    n_chunks = {}
    for doc_id, M in chunk_vectors_by_doc.items():
        itv_values[doc_id] = itv(M)
        sdw_values[doc_id] = sdw(M)
        n_chunks[doc_id] = int(np.asarray(M).shape[0])

    projections: dict[str, np.ndarray] = {}
    pooled = [np.asarray(M, dtype=float) for M in chunk_vectors_by_doc.values()]
    if pooled:
        stacked = np.vstack(pooled)
        if stacked.shape[0] >= project_dims and min(stacked.shape[0] - 1, stacked.shape[1]) >= project_dims:
            coords, _ = pca_project(stacked, project_dims)
            offset = 0
            for doc_id, M in chunk_vectors_by_doc.items():
                count = np.asarray(M).shape[0]
                projections[doc_id] = coords[offset : offset + count]
                offset += count
    return ComplexityReport(doc_ids, itv_values, sdw_values, n_chunks, projections)
