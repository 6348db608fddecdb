"""Topic modeling with collapsed Gibbs sampling.

Only noun and adjective tokens enter the model. Each input document is
split into fixed-size blocks of filtered tokens for sampling (a whole
document as one unit gives degenerate topic mixtures); reported
document-topic distributions pool the block counts back per document.
A single final sample parameterizes the model, which keeps runs with a
fixed seed bit-identical.
"""

from __future__ import annotations

import json
import random
import warnings
from dataclasses import dataclass

import numpy as np

from .corpus import Document, Pos
from .errors import ConfigError

TOPIC_POS = (Pos.NOUN, Pos.ADJ)


@dataclass(slots=True)
class TopicModel:
    n_topics: int
    vocabulary: tuple[str, ...]
    phi: np.ndarray
    theta: dict[str, np.ndarray]
    alpha: float
    beta: float
    seed: int
    iterations: int
    doc_chunk_size: int

    def __post_init__(self):
        if not np.all(self.phi >= 0):
            raise ValueError("term distributions must be non-negative")
        if not np.allclose(self.phi.sum(axis=1), 1.0, atol=1e-9):
            raise ValueError("term distributions must sum to 1")
        for doc_id, row in self.theta.items():
            if not np.allclose(row.sum(), 1.0, atol=1e-9):
                raise ValueError(f"topic distribution for {doc_id!r} must sum to 1")

    def to_json(self, terms_per_topic: int = 30) -> dict:
        return {
            "n_topics": self.n_topics,
            "alpha": self.alpha,
            "beta": self.beta,
            "seed": self.seed,
            "iterations": self.iterations,
            "doc_chunk_size": self.doc_chunk_size,
            "topics": [
                {"id": k, "terms": [[t, w] for t, w in topic_terms(self, k, terms_per_topic)]}
                for k in range(self.n_topics)
            ],
            "doc_topics": {doc_id: row.tolist() for doc_id, row in self.theta.items()},
        }

    def save(self, path, terms_per_topic: int = 30) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(terms_per_topic), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _filtered_token_ids(documents: list[Document], chunk_size: int):
    """Noun/adjective token-id blocks per document, plus the vocabulary."""
    streams = {
        d.id: [t.normalized for s in d.sentences for t in s.tokens
               if t.pos in TOPIC_POS]
        for d in documents
    }
    vocabulary = tuple(sorted({w for stream in streams.values() for w in stream}))
    index = {w: i for i, w in enumerate(vocabulary)}
    blocks: list[list[int]] = []
    block_doc: list[str] = []
    for doc in documents:
        ids = [index[w] for w in streams[doc.id]]
        for lo in range(0, len(ids), chunk_size):
            blocks.append(ids[lo : lo + chunk_size])
            block_doc.append(doc.id)
    return vocabulary, blocks, block_doc


def fit_lda(documents: list[Document], n_topics: int = 25,
            alpha: float | None = None, beta: float = 0.01,
            iterations: int = 1000, seed: int = 0,
            doc_chunk_size: int = 200, check_counts: bool = False) -> TopicModel:
    """Collapsed Gibbs sampling over noun/adjective tokens.

    `alpha` defaults to 50/K. `check_counts` re-verifies the count
    bookkeeping after every sweep (slow; for tests).
    """
    if n_topics < 1:
        raise ConfigError(f"topic count must be >= 1, got {n_topics}")
    if iterations < 1:
        raise ConfigError(f"iterations must be >= 1, got {iterations}")
    if alpha is None:
        alpha = 50.0 / n_topics
    vocabulary, blocks, block_doc = _filtered_token_ids(documents, doc_chunk_size)
    if not vocabulary:
        raise ConfigError("no noun/adjective tokens in the corpus")
    if n_topics > len(vocabulary):
        raise ConfigError(
            f"{n_topics} topics exceed the filtered vocabulary of {len(vocabulary)}")

    K = n_topics
    V = len(vocabulary)
    rng = random.Random(seed)

    topic_term = [[0] * V for _ in range(K)]
    topic_total = [0] * K
    block_topic = [[0] * K for _ in blocks]
    assignments = []
    for c, tokens in enumerate(blocks):
        z = []
        for t in tokens:
            k = rng.randrange(K)
            z.append(k)
            topic_term[k][t] += 1
            topic_total[k] += 1
            block_topic[c][k] += 1
        assignments.append(z)

    total_tokens = sum(len(b) for b in blocks)
    beta_v = beta * V
    for _ in range(iterations):
        for c, tokens in enumerate(blocks):
            counts = block_topic[c]
            z = assignments[c]
            for pos, t in enumerate(tokens):
                k = z[pos]
                topic_term[k][t] -= 1
                topic_total[k] -= 1
                counts[k] -= 1
                total = 0.0
                weights = []
                for kk in range(K):
                    w = ((topic_term[kk][t] + beta) / (topic_total[kk] + beta_v)
                         * (counts[kk] + alpha))
                    weights.append(w)
                    total += w
                u = rng.random() * total
                acc = 0.0
                new_k = K - 1
                for kk in range(K):
                    acc += weights[kk]
                    if u < acc:
                        new_k = kk
                        break
                z[pos] = new_k
                topic_term[new_k][t] += 1
                topic_total[new_k] += 1
                counts[new_k] += 1
        if check_counts:
            assert sum(topic_total) == total_tokens
            assert all(sum(row) == tot for row, tot in zip(topic_term, topic_total))
            assert all(sum(block_topic[c]) == len(blocks[c]) for c in range(len(blocks)))

    phi = (np.array(topic_term, dtype=float) + beta)
    phi /= phi.sum(axis=1, keepdims=True)

    theta: dict[str, np.ndarray] = {}
    for doc in documents:
        pooled = np.zeros(K)
        for c, owner in enumerate(block_doc):
            if owner == doc.id:
                pooled += np.array(block_topic[c], dtype=float)
        row = pooled + alpha
        theta[doc.id] = row / row.sum()

    return TopicModel(n_topics=K, vocabulary=vocabulary, phi=phi, theta=theta,
                      alpha=alpha, beta=beta, seed=seed, iterations=iterations,
                      doc_chunk_size=doc_chunk_size)


def top_topics(model: TopicModel, doc_id: str, n: int = 10) -> list[int]:
    """Topic ids for one document, by descending probability (ties by id)."""
    if doc_id not in model.theta:
        raise KeyError(f"unknown document: {doc_id!r}")
    if n > model.n_topics:
        warnings.warn(f"requested {n} topics but the model has {model.n_topics}; clamping")
        n = model.n_topics
    row = model.theta[doc_id]
    return sorted(range(model.n_topics), key=lambda k: (-row[k], k))[:n]


def topic_terms(model: TopicModel, topic: int, n: int) -> list[tuple[str, float]]:
    """Top terms of a topic with weights scaled to max 1 for cloud rendering."""
    if not 0 <= topic < model.n_topics:
        raise KeyError(f"topic {topic} out of range")
    row = model.phi[topic]
    order = sorted(range(len(model.vocabulary)), key=lambda t: (-row[t], model.vocabulary[t]))
    top = order[: min(n, len(order))]
    peak = row[top[0]] if top else 1.0
    return [(model.vocabulary[t], float(row[t] / peak)) for t in top]
