"""External numeric resources: word vectors, norms, labels, embeddings.

All stores are immutable after loading and safe to share across threads;
lookups of absent words are skipped and counted rather than raised, since
realistic vector models cover only part of a corpus vocabulary.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from importlib import resources as _importlib_resources

import numpy as np

from .corpus import Document
from .errors import ParseError


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity of two equal-length vectors."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    # Pre-scale by the largest entry: squaring tiny components underflows
    # into subnormals and can push the ratio past 1. Cosine is scale
    # invariant, so this changes nothing mathematically.
    mu = np.max(np.abs(u))
    mv = np.max(np.abs(v))
    if mu == 0.0 or mv == 0.0:
        raise ValueError("cosine undefined for zero vector")
    u = u / mu
    v = v / mv
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine undefined for zero vector")
    return float(np.dot(u, v) / (nu * nv))


class VectorStore:
    """word -> d-dimensional embedding map with miss counting.

    Keys are lowercased at build time when `normalize_case` is set (the
    default), and lookups are normalized the same way.
    """

    def __init__(self, entries: dict[str, np.ndarray], dimension: int,
                 normalize_case: bool = True):
        self.dimension = dimension
        self.normalize_case = normalize_case
        self._entries = entries
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, word: str) -> bool:
        return self._key(word) in self._entries

    def _key(self, word: str) -> str:
        return word.lower() if self.normalize_case else word

    def get(self, word: str) -> np.ndarray | None:
        vec = self._entries.get(self._key(word))
        if vec is None:
            self.misses += 1
        else:
            self.hits += 1
        return vec

    def words(self):
        return self._entries.keys()


def load_vectors(path, fmt: str = "text-header",
                 normalize_case: bool = True) -> VectorStore:
    """Load a word-vector file.

    `text-header`: first line `<vocab> <dim>`, then `word v1 .. vd`
    space-separated. `tsv`: `word<TAB>v1<TAB>..<TAB>vd`, dimension taken
    from the first row. Duplicate words keep the last row and warn.
    """
    if fmt not in ("text-header", "tsv"):
        raise ValueError(f"unknown vector format: {fmt}")
    entries: dict[str, np.ndarray] = {}
    dimension = None
    duplicates = 0
    with open(path, encoding="utf-8") as fh:
        lines = enumerate(fh, start=1)
        if fmt == "text-header":
            try:
                lineno, header = next(lines)
            except StopIteration:
                raise ParseError("empty vector file", path) from None
            parts = header.split()
            if len(parts) != 2:
                raise ParseError("expected header '<vocab> <dim>'", path, 1)
            try:
                dimension = int(parts[1])
            except ValueError:
                raise ParseError("non-integer dimension in header", path, 1) from None
        for lineno, line in lines:
            if not line.strip():
                continue
            fields = line.split("\t") if fmt == "tsv" else line.split()
            word = fields[0].strip()
            values = fields[1:]
            if dimension is None:
                dimension = len(values)
                if dimension == 0:
                    raise ParseError("row has no vector values", path, lineno)
            if len(values) != dimension:
                raise ParseError(
                    f"expected {dimension} values, found {len(values)}", path, lineno)
            try:
                vec = np.array([float(v) for v in values], dtype=float)
            except ValueError:
                raise ParseError("non-numeric vector value", path, lineno) from None
            key = word.lower() if normalize_case else word
            if key in entries:
                duplicates += 1
            entries[key] = vec
    if dimension is None:
        raise ParseError("no vector rows found", path)
    if duplicates:
        warnings.warn(f"{path}: {duplicates} duplicate word(s), last occurrence kept")
    return VectorStore(entries, dimension, normalize_case=normalize_case)


NORM_FIELDS = ("concreteness", "imageability", "valence", "arousal")


class NormsLexicon:
    """word -> affective/semantic norm scores; fields may be missing per word."""

    def __init__(self, entries: dict[str, dict[str, float]],
                 normalize_case: bool = True):
        self._entries = entries
        self.normalize_case = normalize_case
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, word: str) -> bool:
        key = word.lower() if self.normalize_case else word
        return key in self._entries

    def get(self, word: str, fieldname: str) -> float | None:
        if fieldname not in NORM_FIELDS:
            raise ValueError(f"unknown norms field: {fieldname}")
        key = word.lower() if self.normalize_case else word
        scores = self._entries.get(key)
        value = None if scores is None else scores.get(fieldname)
        if value is None:
            self.misses += 1
        else:
            self.hits += 1
        return value


def load_norms(path, normalize_case: bool = True) -> NormsLexicon:
    """TSV `word<TAB>concreteness<TAB>imageability<TAB>valence<TAB>arousal`;
    empty cells mark missing fields."""
    entries: dict[str, dict[str, float]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 1 + len(NORM_FIELDS):
                raise ParseError(
                    f"expected {1 + len(NORM_FIELDS)} columns, found {len(fields)}",
                    path, lineno)
            word = fields[0].lower() if normalize_case else fields[0]
            scores: dict[str, float] = {}
            for name, cell in zip(NORM_FIELDS, fields[1:]):
                cell = cell.strip()
                if not cell:
                    continue
                try:
                    value = float(cell)
                except ValueError:
                    raise ParseError(f"non-numeric {name} value", path, lineno) from None
                if not np.isfinite(value):
                    raise ParseError(f"non-finite {name} value", path, lineno)
                scores[name] = value
            entries[word] = scores
    return NormsLexicon(entries, normalize_case=normalize_case)


EMOTION_NAMES = ("arousal", "anger", "disgust", "fear", "sadness")


@dataclass(slots=True)
class LabelSet:
    """Positive/negative polarity labels plus named emotion label lists."""

    positive: list[str]
    negative: list[str]
    emotions: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.positive or not self.negative:
            raise ValueError("label set needs at least one positive and one negative label")

    def check_coverage(self, store: VectorStore) -> dict[str, list[str]]:
        """Return labels absent from the store, keyed by list name."""
        missing: dict[str, list[str]] = {}
        groups = {"positive": self.positive, "negative": self.negative}
        groups.update(self.emotions)
        for name, words in groups.items():
            absent = [w for w in words if w not in store]
            if absent:
                missing[name] = absent
        return missing


def read_word_list(path) -> list[str]:
    words = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                words.append(line)
    return words


def load_label_set(positive_path, negative_path,
                   emotion_paths: dict[str, object] | None = None) -> LabelSet:
    """Plain-text label files, one word per line, one file per category."""
    emotions = {}
    for name, p in (emotion_paths or {}).items():
        emotions[name] = read_word_list(p)
    return LabelSet(positive=read_word_list(positive_path),
                    negative=read_word_list(negative_path),
                    emotions=emotions)


def default_label_set() -> LabelSet:
    """Bundled placeholder lists; real analyses should supply their own."""
    data = _importlib_resources.files("corpuscope.data") / "labels"
    with _importlib_resources.as_file(data) as root:
        return load_label_set(
            root / "positive_de.txt",
            root / "negative_de.txt",
            {name: root / f"{name}_de.txt" for name in EMOTION_NAMES},
        )


class SentenceEmbeddingSet:
    """(doc_id, sentence_index) -> fixed-dimension sentence vector."""

    def __init__(self, vectors: dict[tuple[str, int], np.ndarray], dimension: int):
        self._vectors = vectors
        self.dimension = dimension

    def __len__(self) -> int:
        return len(self._vectors)

    def get(self, doc_id: str, sentence_index: int) -> np.ndarray | None:
        return self._vectors.get((doc_id, sentence_index))

    def coverage(self, document: Document) -> float:
        if not document.sentences:
            return 0.0
        found = sum(1 for s in document.sentences
                    if (document.id, s.index) in self._vectors)
        return found / len(document.sentences)


def import_sentence_embeddings(path, known_ids=None) -> SentenceEmbeddingSet:
    """Read JSONL rows {doc_id, sentence_index, vector}.

    Dimensions must be uniform; duplicate keys keep the last row with a
    warning; rows for documents outside `known_ids` (when given) are
    rejected with a warning.
    """
    vectors: dict[tuple[str, int], np.ndarray] = {}
    dimension = None
    duplicates = 0
    rejected = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError:
                raise ParseError("invalid JSON row", path, lineno) from None
            try:
                doc_id = str(row["doc_id"])
                sentence_index = int(row["sentence_index"])
                vector = row["vector"]
            except (KeyError, TypeError, ValueError):
                raise ParseError(
                    "row must carry doc_id, sentence_index, vector", path, lineno) from None
            if not isinstance(vector, list) or not vector:
                raise ParseError("vector must be a non-empty list", path, lineno)
            if dimension is None:
                dimension = len(vector)
            elif len(vector) != dimension:
                raise ParseError(
                    f"expected dimension {dimension}, found {len(vector)}", path, lineno)
            if known_ids is not None and doc_id not in known_ids:
                rejected += 1
                continue
            key = (doc_id, sentence_index)
            if key in vectors:
                duplicates += 1
            vectors[key] = np.array(vector, dtype=float)
    if dimension is None:
        raise ParseError("no embedding rows found", path)
    if duplicates:
        warnings.warn(f"{path}: {duplicates} duplicate (doc, index) row(s), last kept")
    if rejected:
        warnings.warn(f"{path}: {rejected} row(s) for unknown documents rejected")
    return SentenceEmbeddingSet(vectors, dimension)


def sentence_vectors(document: Document, store: VectorStore | None = None,
                     embeddings: SentenceEmbeddingSet | None = None) -> dict[int, np.ndarray]:
    """Sentence vectors by index: imported embeddings when present, else
    content-word centroids from the word-vector store."""
    vectors: dict[int, np.ndarray] = {}
    for sentence in document.sentences:
        vec = None
        if embeddings is not None:
            vec = embeddings.get(document.id, sentence.index)
        elif store is not None:
            hits = [store.get(t.surface) for t in sentence.content_words]
            hits = [h for h in hits if h is not None]
            if hits:
                vec = np.mean(hits, axis=0)
        if vec is not None:
            vectors[sentence.index] = vec
    return vectors


def coverage_report(documents: list[Document], resource) -> dict:
    """Fraction of word tokens found in a store or norms lexicon."""
    per_doc = {}
    total_found = 0
    total_words = 0
    for doc in documents:
        words = doc.word_tokens()
        if isinstance(resource, (VectorStore, NormsLexicon)):
            found = sum(1 for t in words if t.surface in resource)
        else:
            raise TypeError(f"unsupported resource type: {type(resource)!r}")
        per_doc[doc.id] = found / len(words) if words else 0.0
        total_found += found
        total_words += len(words)
    overall = total_found / total_words if total_words else 0.0
    return {"overall": overall, "per_document": per_doc}
