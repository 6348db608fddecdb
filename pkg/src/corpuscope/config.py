"""Pipeline configuration: corpus paths, resources, knobs, output layout.

Configs are JSON files (TOML works on Python 3.11+). Relative paths are
resolved against the config file's directory so a config can travel with
its data. The configuration hash stamped into every output covers the
resolved settings, not file contents; input checksums live in the run
manifest.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

from .corpus import Document, TagLexicon, default_abbreviations, load_abbreviations, load_document
from .errors import ConfigError
from .features import FEATURE_NAMES
from .resources import (
    LabelSet,
    NormsLexicon,
    SentenceEmbeddingSet,
    VectorStore,
    read_word_list,
    default_label_set,
    import_sentence_embeddings,
    load_label_set,
    load_norms,
    load_vectors,
)
from .similarity import METHODS


@dataclass(slots=True)
class DocumentSpec:
    id: str
    path: str
    pretagged: str | None = None


@dataclass(slots=True)
class PipelineConfig:
    documents: list[DocumentSpec] = field(default_factory=list)
    vectors_path: str | None = None
    vectors_format: str = "text-header"
    norms_path: str | None = None
    positive_labels_path: str | None = None
    negative_labels_path: str | None = None
    emotion_labels_paths: dict[str, str] = field(default_factory=dict)
    embeddings_path: str | None = None
    abbreviations_path: str | None = None
    lexicon_path: str | None = None
    suffix_path: str | None = None
    stopwords_path: str | None = None
    chunk_size: int = 1000
    n_topics: int = 25
    topic_iterations: int = 1000
    topic_chunk_size: int = 200
    topic_alpha: float | None = None
    topic_beta: float = 0.01
    n_factors: int = 5
    seed: int = 0
    wpm: float = 200.0
    out_dir: str = "out"
    threads: int = 1
    similarity_methods: list[str] = field(default_factory=lambda: list(METHODS))
    jaccard_mode: str = "set"
    lsa_dims: int = 2
    features: list[str] = field(default_factory=lambda: list(FEATURE_NAMES))
    extra_feature: str | None = "ttr"
    odc_reference_size: int = 20000
    pnr_smoothing: bool = True
    data_only: bool = False
    case_normalize: bool = True

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        if path.suffix.lower() == ".toml":
            if sys.version_info < (3, 11):
                raise ConfigError("TOML configs need Python 3.11+; use JSON instead")
            import tomllib

            raw = tomllib.loads(path.read_text(encoding="utf-8"))
        else:
            try:
                raw = json.loads(path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(raw, base_dir=path.parent)

    @classmethod
    def from_dict(cls, raw: dict, base_dir: Path | None = None) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        documents = []
        for entry in raw.get("documents", []):
            if "id" not in entry or "path" not in entry:
                raise ConfigError("each document entry needs 'id' and 'path'")
            documents.append(DocumentSpec(id=str(entry["id"]), path=entry["path"],
                                          pretagged=entry.get("pretagged")))
        values = {k: v for k, v in raw.items() if k != "documents"}
        config = cls(documents=documents, **values)
        if base_dir is not None:
            config._resolve_paths(base_dir)
        return config

    def _resolve_paths(self, base_dir: Path) -> None:
        def resolve(p):
            if p is None:
                return None
            if Path(p).is_absolute():
                return str(p)
            return str((base_dir / p).resolve())

        for spec in self.documents:
            spec.path = resolve(spec.path)
            spec.pretagged = resolve(spec.pretagged)
        self.vectors_path = resolve(self.vectors_path)
        self.norms_path = resolve(self.norms_path)
        self.positive_labels_path = resolve(self.positive_labels_path)
        self.negative_labels_path = resolve(self.negative_labels_path)
        self.emotion_labels_paths = {k: resolve(v)
                                     for k, v in self.emotion_labels_paths.items()}
        self.embeddings_path = resolve(self.embeddings_path)
        self.abbreviations_path = resolve(self.abbreviations_path)
        self.lexicon_path = resolve(self.lexicon_path)
        self.suffix_path = resolve(self.suffix_path)
        self.stopwords_path = resolve(self.stopwords_path)

    def validate(self) -> None:
        if not self.documents:
            raise ConfigError("config lists no documents")
        ids = [d.id for d in self.documents]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate document ids in config")
        for spec in self.documents:
            if not Path(spec.path).exists():
                raise ConfigError(f"document file not found: {spec.path}")
            if spec.pretagged and not Path(spec.pretagged).exists():
                raise ConfigError(f"pretagged file not found: {spec.pretagged}")
        if (self.positive_labels_path is None) != (self.negative_labels_path is None):
            raise ConfigError("positive and negative label paths must be given together")
        for label, p in [("vectors", self.vectors_path), ("norms", self.norms_path),
                         ("positive labels", self.positive_labels_path),
                         ("negative labels", self.negative_labels_path),
                         ("embeddings", self.embeddings_path),
                         ("abbreviations", self.abbreviations_path),
                         ("lexicon", self.lexicon_path),
                         ("suffix table", self.suffix_path),
                         ("stopwords", self.stopwords_path)]:
            if p is not None and not Path(p).exists():
                raise ConfigError(f"{label} file not found: {p}")
        for name, p in self.emotion_labels_paths.items():
            if not Path(p).exists():
                raise ConfigError(f"emotion label file for {name!r} not found: {p}")
        for method in self.similarity_methods:
            if method not in METHODS:
                raise ConfigError(f"unknown similarity method: {method}")
        if self.chunk_size < 1:
            raise ConfigError("chunk_size must be >= 1")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "documents":
                value = [{"id": d.id, "path": d.path, "pretagged": d.pretagged}
                         for d in value]
            out[f.name] = value
        return out

    def config_hash(self) -> str:
        """Hash of the analysis settings.

        Runtime knobs that cannot change output content (output directory,
        thread count, figure toggle) are excluded so the hash identifies
        the analysis itself.
        """
        settings = self.to_dict()
        for key in ("out_dir", "threads", "data_only"):
            settings.pop(key, None)
        canonical = json.dumps(settings, sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]

    # Resource loading -----------------------------------------------------

    def load_documents(self) -> list[Document]:
        lexicon = (TagLexicon.load(self.lexicon_path, self.suffix_path)
                   if self.lexicon_path or self.suffix_path else TagLexicon.default())
        abbreviations = (load_abbreviations(self.abbreviations_path)
                         if self.abbreviations_path else default_abbreviations())
        return [
            load_document(spec.path, spec.id, chunk_size=self.chunk_size,
                          lexicon=lexicon, abbreviations=abbreviations,
                          pretagged=spec.pretagged)
            for spec in self.documents
        ]

    def load_store(self) -> VectorStore | None:
        if self.vectors_path is None:
            return None
        return load_vectors(self.vectors_path, self.vectors_format,
                            normalize_case=self.case_normalize)

    def load_norms(self) -> NormsLexicon | None:
        if self.norms_path is None:
            return None
        return load_norms(self.norms_path, normalize_case=self.case_normalize)

    def load_labels(self) -> LabelSet:
        if self.positive_labels_path and self.negative_labels_path:
            return load_label_set(self.positive_labels_path,
                                  self.negative_labels_path,
                                  self.emotion_labels_paths)
        if (self.positive_labels_path is None) != (self.negative_labels_path is None):
            raise ConfigError("positive and negative label paths must be given together")
        base = default_label_set()
        if self.emotion_labels_paths:
            emotions = dict(base.emotions)
            for name, p in self.emotion_labels_paths.items():
                emotions[name] = read_word_list(p)
            return LabelSet(positive=base.positive, negative=base.negative,
                            emotions=emotions)
        return base

    def load_stopwords(self) -> frozenset[str] | None:
        if self.stopwords_path is None:
            return None
        return frozenset(w.lower() for w in read_word_list(self.stopwords_path))

    def load_embeddings(self) -> SentenceEmbeddingSet | None:
        if self.embeddings_path is None:
            return None
        known = {d.id for d in self.documents}
        return import_sentence_embeddings(self.embeddings_path, known_ids=known)
