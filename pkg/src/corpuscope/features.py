"""The 23 per-sentence readability and emotion-potential features.

Emotion features score words by cosine similarity against label word
vectors (positive minus negative for the polarity value); readability
features are surface measures of word and sentence complexity. Missing
values (no resource hit for a sentence) propagate as NaN and are left to
the consumer's imputation policy.
"""

from __future__ import annotations

import csv
import re
import warnings
from collections import Counter

import numpy as np

from .corpus import Document, Pos, Sentence
from .errors import ConfigError
from .resources import (
    EMOTION_NAMES,
    LabelSet,
    NormsLexicon,
    SentenceEmbeddingSet,
    VectorStore,
    cosine,
    coverage_report,
    sentence_vectors,
)

FEATURE_NAMES = (
    "aap_all", "aap_nouns", "aap_verbs", "ims_valence", "pnr",
    "arousal", "anger", "disgust", "fear", "sadness",
    "concreteness", "imageability",
    "word_length", "syllables", "odc", "sonority",
    "sentence_length", "n_content_words", "phrase_density", "ssi",
    "content_word_overlap", "sentence_similarity",
    "extra",
)

_STORE_FEATURES = frozenset({"aap_all", "aap_nouns", "aap_verbs", "pnr",
                             "arousal", "anger", "disgust", "fear", "sadness"})
_NORMS_FEATURES = frozenset({"ims_valence", "concreteness", "imageability"})

_NORMS_FIELD_BY_FEATURE = {
    "ims_valence": "valence",
    "concreteness": "concreteness",
    "imageability": "imageability",
}

_POS_CHARS = {Pos.NOUN: "N", Pos.VERB: "V", Pos.ADJ: "A",
              Pos.ADV: "D", Pos.OTHER: "O", Pos.PUNCT: "P"}

# Shallow chunk patterns over coarse tags: noun phrases (ADJ* NOUN+) and
# verb groups (VERB+).
_PHRASE_RE = re.compile(r"A*N+|V+")

# Grapheme sonority values: voiceless plosives 1, voiced plosives 2,
# voiceless fricatives 3, voiced fricatives 4, nasals 5, laterals 6,
# rhotics 7, high vowels 8, mid vowels 9, low vowels 10.
_SONORITY = {
    "p": 1, "t": 1, "k": 1, "q": 1, "c": 1,
    "b": 2, "d": 2, "g": 2,
    "f": 3, "s": 3, "ß": 3, "h": 3, "x": 3, "z": 3, "v": 3,
    "w": 4, "j": 4,
    "m": 5, "n": 5,
    "l": 6,
    "r": 7,
    "i": 8, "u": 8, "ü": 8, "y": 8,
    "e": 9, "o": 9, "ö": 9,
    "a": 10, "ä": 10,
}


class ResolvedLabels:
    """Label words resolved to unit vectors against a concrete store.

    Labels absent from the store are dropped from their list (the mean in
    the polarity value shrinks accordingly); a polarity with no resolvable
    label at all is a configuration error.
    """

    def __init__(self, store: VectorStore, labels: LabelSet):
        self.positive = self._resolve(store, labels.positive, "positive", required=True)
        self.negative = self._resolve(store, labels.negative, "negative", required=True)
        self.emotions = {
            name: self._resolve(store, words, name, required=False)
            for name, words in labels.emotions.items()
        }

    @staticmethod
    def _resolve(store: VectorStore, words: list[str], name: str,
                 required: bool) -> np.ndarray:
        rows = []
        dropped = 0
        for word in words:
            vec = store.get(word)
            if vec is None:
                dropped += 1
                continue
            norm = np.linalg.norm(vec)
            if norm == 0.0:
                dropped += 1
                continue
            rows.append(vec / norm)
        if dropped:
            warnings.warn(f"{dropped} {name} label(s) not resolvable in the vector store")
        if not rows:
            if required:
                raise ConfigError(f"no {name} label is present in the vector store")
            return np.zeros((0, store.dimension))
        return np.vstack(rows)


def _mean_cosine(vec: np.ndarray, unit_labels: np.ndarray) -> float:
    norm = np.linalg.norm(vec)
    if norm == 0.0 or unit_labels.shape[0] == 0:
        return float("nan")
    return float(np.mean(unit_labels @ (vec / norm)))


def _as_resolved(store: VectorStore, labels) -> ResolvedLabels:
    if isinstance(labels, ResolvedLabels):
        return labels
    return ResolvedLabels(store, labels)


def aap(word: str, store: VectorStore, labels) -> float | None:
    """Polarity value of one word: mean cosine to positive labels minus
    mean cosine to negative labels. Absent words yield None."""
    resolved = _as_resolved(store, labels)
    vec = store.get(word)
    if vec is None or np.linalg.norm(vec) == 0.0:
        return None
    return _mean_cosine(vec, resolved.positive) - _mean_cosine(vec, resolved.negative)


def sentence_aap(sentence: Sentence, store: VectorStore, labels,
                 pos_filter: Pos | None = None) -> float | None:
    """Mean word polarity over the sentence's content words.

    `pos_filter` restricts the mean to one content tag (nouns or verbs);
    None averages over all content words. No store hit -> None.
    """
    resolved = _as_resolved(store, labels)
    values = []
    for token in sentence.content_words:
        if pos_filter is not None and token.pos is not pos_filter:
            continue
        value = aap(token.surface, store, resolved)
        if value is not None:
            values.append(value)
    if not values:
        return None
    return float(np.mean(values))


def pnr(sentence: Sentence, store: VectorStore, labels,
        smoothing: bool = True) -> float | None:
    """Ratio of positive- to negative-polarity content words.

    Add-one smoothed by default so sentences without negative words stay
    defined; words with polarity exactly zero count in neither tally.
    """
    resolved = _as_resolved(store, labels)
    positive = negative = 0
    for token in sentence.content_words:
        value = aap(token.surface, store, resolved)
        if value is None:
            continue
        if value > 0:
            positive += 1
        elif value < 0:
            negative += 1
    if smoothing:
        return (positive + 1) / (negative + 1)
    if negative == 0:
        return None
    return positive / negative


def emotion_score(sentence: Sentence, store: VectorStore, labels,
                  emotion: str) -> float | None:
    """Mean over content words of the mean cosine to one emotion's labels."""
    resolved = _as_resolved(store, labels)
    unit_labels = resolved.emotions.get(emotion)
    if unit_labels is None or unit_labels.shape[0] == 0:
        raise ConfigError(f"no resolvable labels for emotion {emotion!r}")
    values = []
    for token in sentence.content_words:
        vec = store.get(token.surface)
        if vec is None or np.linalg.norm(vec) == 0.0:
            continue
        values.append(_mean_cosine(vec, unit_labels))
    if not values:
        return None
    return float(np.mean(values))


def norms_feature(sentence: Sentence, lexicon: NormsLexicon,
                  fieldname: str) -> float | None:
    """Mean norm score over the sentence's words found in the lexicon."""
    values = []
    for token in sentence.word_tokens:
        value = lexicon.get(token.surface, fieldname)
        if value is not None:
            values.append(value)
    if not values:
        return None
    return float(np.mean(values))


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance, two-row dynamic programming."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i] + [0] * len(b)
        for j, cb in enumerate(b, start=1):
            current[j] = min(previous[j] + 1,
                             current[j - 1] + 1,
                             previous[j - 1] + (ca != cb))
        previous = current
    return previous[len(b)]


def build_reference_vocab(documents: list[Document], size: int = 20000) -> list[str]:
    """Top-`size` normalized word types by corpus frequency (ties alphabetical)."""
    counts = Counter(t.normalized for d in documents for t in d.word_tokens())
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [w for w, _ in ranked[:size]]


class OdcScorer:
    """Mean edit distance from a word to a fixed reference vocabulary.

    The reference is packed into a code-point matrix once, and each query
    runs one dynamic-programming sweep vectorized over all reference
    words. Results are identical to per-pair distances; building the
    matrix up front is what makes corpus-scale scoring viable.
    """

    def __init__(self, reference_vocab: list[str]):
        if not reference_vocab:
            raise ConfigError("odc needs a non-empty reference vocabulary")
        self.reference_vocab = list(reference_vocab)
        self._lengths = np.array([len(w) for w in self.reference_vocab], dtype=np.int32)
        width = max(1, int(self._lengths.max()))
        self._codes = np.zeros((len(self.reference_vocab), width), dtype=np.int32)
        for row, w in enumerate(self.reference_vocab):
            self._codes[row, : len(w)] = [ord(c) for c in w]

    def distances(self, word: str) -> np.ndarray:
        """Edit distance from `word` to every reference word, in order."""
        n_refs, width = self._codes.shape
        previous = np.tile(np.arange(width + 1, dtype=np.int32), (n_refs, 1))
        for i, ch in enumerate(word, start=1):
            code = ord(ch)
            current = np.empty_like(previous)
            current[:, 0] = i
            for j in range(1, width + 1):
                substitute = previous[:, j - 1] + (self._codes[:, j - 1] != code)
                current[:, j] = np.minimum(
                    np.minimum(previous[:, j] + 1, current[:, j - 1] + 1),
                    substitute)
            previous = current
        return previous[np.arange(n_refs), self._lengths]

    def score(self, word: str) -> float | None:
        keep = np.array([ref != word for ref in self.reference_vocab])
        if not keep.any():
            return None
        return float(np.mean(self.distances(word)[keep]))


def odc(word: str, reference_vocab: list[str]) -> float | None:
    """Mean edit distance from `word` to every reference word except itself."""
    return OdcScorer(reference_vocab).score(word)


def sonority_score(word: str) -> float:
    """Summed grapheme sonority divided by the square root of letter count.

    `sch` and `ch` are consumed as single fricative graphemes. Unknown
    alphabetic graphemes score 0 and warn; non-alphabetic characters are
    skipped silently.
    """
    letters = sum(1 for c in word if c.isalpha())
    if letters == 0:
        return 0.0
    w = word.lower()
    total = 0.0
    i = 0
    while i < len(w):
        if w[i : i + 3] == "sch":
            total += 3
            i += 3
            continue
        if w[i : i + 2] == "ch":
            total += 3
            i += 2
            continue
        c = w[i]
        value = _SONORITY.get(c)
        if value is not None:
            total += value
        elif c.isalpha():
            warnings.warn(f"no sonority value for grapheme {c!r}, scoring 0")
        i += 1
    return total / np.sqrt(letters)


def phrase_density(sentence: Sentence) -> int:
    """Shallow chunk count from the coarse POS pattern (ADJ* NOUN+ | VERB+)."""
    tag_string = "".join(_POS_CHARS[t.pos] for t in sentence.tokens)
    return len(_PHRASE_RE.findall(tag_string))


def sentence_complexity_features(sentence: Sentence,
                                 next_sentence: Sentence | None = None,
                                 sentence_vector: np.ndarray | None = None,
                                 next_vector: np.ndarray | None = None) -> dict:
    """Length, density, and cohesion measures for one sentence.

    Overlap and similarity relate the sentence to its successor; for the
    last sentence of a document they are missing.
    """
    words = sentence.word_tokens
    n_words = len(words)
    mean_syllables = float(np.mean([t.syllables for t in words])) if words else None
    ssi = n_words * mean_syllables if mean_syllables is not None else None

    overlap = None
    if next_sentence is not None:
        own = {t.normalized for t in sentence.content_words}
        other = {t.normalized for t in next_sentence.content_words}
        overlap = len(own & other)

    similarity = None
    if sentence_vector is not None and next_vector is not None:
        try:
            similarity = cosine(sentence_vector, next_vector)
        except ValueError:
            similarity = None

    return {
        "sentence_length": n_words,
        "n_content_words": len(sentence.content_words),
        "phrase_density": phrase_density(sentence),
        "ssi": ssi,
        "content_word_overlap": overlap,
        "sentence_similarity": similarity,
    }


def sentence_ttr(sentence: Sentence) -> float | None:
    """Type-token ratio over word tokens; the default 23rd feature."""
    words = sentence.word_tokens
    if not words:
        return None
    return len({t.normalized for t in words}) / len(words)


EXTRA_FEATURES = {"ttr": sentence_ttr}


class FeatureMatrix:
    """Per-sentence feature rows plus per-document aggregate means."""

    def __init__(self, rows: list[tuple[str, int]], names: tuple[str, ...],
                 values: np.ndarray, coverage: dict | None = None,
                 metadata: dict | None = None):
        if values.shape != (len(rows), len(names)):
            raise ValueError("matrix shape does not match row/column labels")
        self.rows = rows
        self.names = names
        self.values = values
        self.coverage = coverage or {}
        self.metadata = metadata or {}

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.names.index(name)]

    def document_ids(self) -> list[str]:
        seen: list[str] = []
        for doc_id, _ in self.rows:
            if doc_id not in seen:
                seen.append(doc_id)
        return seen

    def document_aggregates(self) -> dict[str, np.ndarray]:
        """Column means over each document's sentences, ignoring missing."""
        aggregates: dict[str, np.ndarray] = {}
        for doc_id in self.document_ids():
            mask = np.array([r[0] == doc_id for r in self.rows])
            block = self.values[mask]
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                aggregates[doc_id] = np.nanmean(block, axis=0)
        return aggregates

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["doc_id", "sentence_index", *self.names])
            for (doc_id, index), row in zip(self.rows, self.values):
                writer.writerow([doc_id, index, *(_csv_cell(v) for v in row)])

    def aggregates_to_csv(self, path) -> None:
        aggregates = self.document_aggregates()
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["doc_id", *self.names])
            for doc_id in self.document_ids():
                writer.writerow([doc_id, *(_csv_cell(v) for v in aggregates[doc_id])])


def _csv_cell(value: float) -> str:
    return "" if np.isnan(value) else repr(float(value))


def _require(resource, name: str, feature: str):
    if resource is None:
        raise ConfigError(f"feature {feature!r} requires the {name} resource")


def build_feature_matrix(documents: list[Document],
                         store: VectorStore | None = None,
                         norms: NormsLexicon | None = None,
                         labels: LabelSet | None = None,
                         embeddings: SentenceEmbeddingSet | None = None,
                         *,
                         features: tuple[str, ...] = FEATURE_NAMES,
                         odc_reference: list[str] | None = None,
                         odc_reference_size: int = 20000,
                         pnr_smoothing: bool = True,
                         extra_feature: str | None = "ttr") -> FeatureMatrix:
    """Compute every requested feature for every sentence of the corpus.

    Raises ConfigError when a requested feature lacks its resource. The
    unnamed 23rd column is filled by the configured extra feature (default
    type-token ratio) or left missing.
    """
    unknown = [f for f in features if f not in FEATURE_NAMES]
    if unknown:
        raise ConfigError(f"unknown feature(s): {', '.join(unknown)}")
    for feature in features:
        if feature in _STORE_FEATURES:
            _require(store, "word-vector", feature)
        if feature in _NORMS_FEATURES:
            _require(norms, "norms-lexicon", feature)
    if "sentence_similarity" in features and embeddings is None:
        _require(store, "word-vector (centroid fallback)", "sentence_similarity")
    if any(f in _STORE_FEATURES for f in features) and labels is None:
        raise ConfigError("affective features require a label set")

    resolved = ResolvedLabels(store, labels) if store is not None and labels is not None else None

    wants = frozenset(features)
    if resolved is not None:
        for emotion in EMOTION_NAMES:
            if emotion in wants:
                unit_labels = resolved.emotions.get(emotion)
                if unit_labels is None or unit_labels.shape[0] == 0:
                    raise ConfigError(
                        f"feature {emotion!r} has no resolvable emotion labels")
    odc_scorer = None
    if "odc" in wants:
        if odc_reference is None:
            odc_reference = build_reference_vocab(documents, odc_reference_size)
        odc_scorer = OdcScorer(odc_reference)

    extra_fn = None
    if extra_feature is not None:
        extra_fn = EXTRA_FEATURES.get(extra_feature)
        if extra_fn is None:
            raise ConfigError(f"unknown extra feature {extra_feature!r}")

    aap_cache: dict[str, float | None] = {}
    odc_cache: dict[str, float | None] = {}

    def cached_aap(word: str) -> float | None:
        # Cache key must match the store's own normalization.
        key = word.lower() if store.normalize_case else word
        if key not in aap_cache:
            aap_cache[key] = aap(word, store, resolved)
        return aap_cache[key]

    def cached_odc(word: str) -> float | None:
        key = word.lower()
        if key not in odc_cache:
            odc_cache[key] = odc_scorer.score(key)
        return odc_cache[key]

    similarity_source = "imported" if embeddings is not None else "centroid-fallback"

    rows: list[tuple[str, int]] = []
    data: list[list[float]] = []
    for document in documents:
        vectors = (sentence_vectors(document, store, embeddings)
                   if "sentence_similarity" in wants else {})
        for position, sentence in enumerate(document.sentences):
            next_sentence = (document.sentences[position + 1]
                             if position + 1 < len(document.sentences) else None)
            record = dict.fromkeys(FEATURE_NAMES, None)

            if resolved is not None:
                content_values = [v for v in (cached_aap(t.surface)
                                              for t in sentence.content_words)
                                  if v is not None]
                if "aap_all" in wants and content_values:
                    record["aap_all"] = float(np.mean(content_values))
                if "aap_nouns" in wants:
                    record["aap_nouns"] = _filtered_aap(sentence, Pos.NOUN, cached_aap)
                if "aap_verbs" in wants:
                    record["aap_verbs"] = _filtered_aap(sentence, Pos.VERB, cached_aap)
                if "pnr" in wants:
                    positive = sum(1 for v in content_values if v > 0)
                    negative = sum(1 for v in content_values if v < 0)
                    if pnr_smoothing:
                        record["pnr"] = (positive + 1) / (negative + 1)
                    elif negative:
                        record["pnr"] = positive / negative
                for emotion in EMOTION_NAMES:
                    if emotion in wants:
                        record[emotion] = emotion_score(sentence, store, resolved, emotion)

            if norms is not None:
                for feature, fieldname in _NORMS_FIELD_BY_FEATURE.items():
                    if feature in wants:
                        record[feature] = norms_feature(sentence, norms, fieldname)

            words = sentence.word_tokens
            if "word_length" in wants and words:
                record["word_length"] = float(np.mean([t.letters for t in words]))
            if "syllables" in wants and words:
                record["syllables"] = float(np.mean([t.syllables for t in words]))
            if "odc" in wants and words:
                values = [v for v in (cached_odc(t.normalized) for t in words)
                          if v is not None]
                if values:
                    record["odc"] = float(np.mean(values))
            if "sonority" in wants and words:
                record["sonority"] = float(np.mean(
                    [sonority_score(t.surface) for t in words]))

            complexity = sentence_complexity_features(
                sentence, next_sentence,
                vectors.get(sentence.index),
                vectors.get(next_sentence.index) if next_sentence else None)
            for name, value in complexity.items():
                if name in wants:
                    record[name] = value

            if "extra" in wants and extra_fn is not None:
                record["extra"] = extra_fn(sentence)

            rows.append((document.id, sentence.index))
            data.append([float("nan") if record[name] is None else float(record[name])
                         for name in FEATURE_NAMES])

    coverage = {}
    if store is not None:
        coverage["store"] = coverage_report(documents, store)
    if norms is not None:
        coverage["norms"] = coverage_report(documents, norms)
    if embeddings is not None:
        coverage["embeddings"] = {d.id: embeddings.coverage(d) for d in documents}

    metadata = {
        "features": list(features),
        "sentence_similarity_source": similarity_source,
        "pnr_smoothing": pnr_smoothing,
        "odc_reference_size": len(odc_reference) if odc_reference else 0,
        "extra_feature": extra_feature,
    }
    return FeatureMatrix(rows, FEATURE_NAMES, np.array(data, dtype=float),
                         coverage, metadata)


def _filtered_aap(sentence: Sentence, pos: Pos, cached_aap) -> float | None:
    values = [v for v in (cached_aap(t.surface)
                          for t in sentence.content_words if t.pos is pos)
              if v is not None]
    if not values:
        return None
    return float(np.mean(values))
