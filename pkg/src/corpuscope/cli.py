"""Command-line driver: runs pipeline stages and writes report artifacts.

Exit codes: 0 success, 2 configuration error, 3 resource error,
4 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .complexity import complexity_report
from .config import PipelineConfig
from .corpus import global_stats, reading_time
from .errors import ConfigError, CorpuscopeError, NumericError, ResourceError
from .factors import factor_scores, fit_factor_model
from .features import build_feature_matrix
from .report import (
    Stamp,
    stamp_csv,
    svg_grouped_bars,
    svg_heatmap,
    svg_scatter,
    write_csv,
    write_json,
    write_manifest,
)
from .similarity import chunk_embedding_2d, corpus_chunk_vectors, lsa_embed, similarity_matrix
from .topics import fit_lda, top_topics, topic_terms


class RunContext:
    """Lazily loaded corpus and resources shared between stages."""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.out_dir = Path(config.out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.written: list[str] = []
        self.coverage: dict = {}
        self.notes: dict = {}
        self._documents = None
        self._store = None
        self._store_loaded = False
        self._norms = None
        self._norms_loaded = False
        self._labels = None
        self._embeddings = None
        self._embeddings_loaded = False
        self._matrix = None

    @property
    def stamp(self) -> Stamp:
        return Stamp(self.config.config_hash(), self.config.seed)

    def out(self, name: str) -> Path:
        path = self.out_dir / name
        self.written.append(str(path))
        return path

    @property
    def documents(self):
        if self._documents is None:
            self._documents = self.config.load_documents()
        return self._documents

    @property
    def store(self):
        if not self._store_loaded:
            self._store = self.config.load_store()
            self._store_loaded = True
        return self._store

    @property
    def norms(self):
        if not self._norms_loaded:
            self._norms = self.config.load_norms()
            self._norms_loaded = True
        return self._norms

    @property
    def labels(self):
        if self._labels is None:
            self._labels = self.config.load_labels()
        return self._labels

    @property
    def embeddings(self):
        if not self._embeddings_loaded:
            self._embeddings = self.config.load_embeddings()
            self._embeddings_loaded = True
        return self._embeddings

    @property
    def feature_matrix(self):
        if self._matrix is None:
            cfg = self.config
            self._matrix = build_feature_matrix(
                self.documents, store=self.store, norms=self.norms,
                labels=self.labels if self.store is not None else None,
                embeddings=self.embeddings,
                features=tuple(cfg.features),
                odc_reference_size=cfg.odc_reference_size,
                pnr_smoothing=cfg.pnr_smoothing,
                extra_feature=cfg.extra_feature)
        return self._matrix


def stage_stats(ctx: RunContext) -> None:
    cfg = ctx.config
    rows = []
    for doc in ctx.documents:
        stats = global_stats(doc)
        rows.append([
            stats.doc_id, stats.n_sentences, stats.n_words,
            repr(stats.mean_word_syllables), repr(stats.mean_sentence_words),
            repr(reading_time(stats.n_words, cfg.wpm)),
        ])
    write_csv(ctx.out("stats.csv"),
              ["doc_id", "n_sentences", "n_words", "mean_word_syllables",
               "mean_sentence_words", f"reading_hours_at_{int(cfg.wpm)}wpm"],
              rows, ctx.stamp)


def stage_topics(ctx: RunContext) -> None:
    cfg = ctx.config
    model = fit_lda(ctx.documents, n_topics=cfg.n_topics, alpha=cfg.topic_alpha,
                    beta=cfg.topic_beta, iterations=cfg.topic_iterations,
                    seed=cfg.seed, doc_chunk_size=cfg.topic_chunk_size)
    write_json(ctx.out("topics.json"), model.to_json(), ctx.stamp)
    cloud_rows = []
    for k in range(model.n_topics):
        for term, weight in topic_terms(model, k, 30):
            cloud_rows.append([k, term, repr(weight)])
    write_csv(ctx.out("topic_clouds.csv"), ["topic", "term", "weight"],
              cloud_rows, ctx.stamp)
    ranking_rows = []
    for doc in ctx.documents:
        for rank, topic in enumerate(top_topics(model, doc.id, min(10, model.n_topics))):
            ranking_rows.append([doc.id, rank + 1, topic,
                                 repr(float(model.theta[doc.id][topic]))])
    write_csv(ctx.out("doc_top_topics.csv"),
              ["doc_id", "rank", "topic", "probability"], ranking_rows, ctx.stamp)


def stage_similarity(ctx: RunContext) -> None:
    cfg = ctx.config
    stopwords = cfg.load_stopwords()
    for method in cfg.similarity_methods:
        matrix = similarity_matrix(
            ctx.documents, method, store=ctx.store, embeddings=ctx.embeddings,
            seed=cfg.seed, jaccard_mode=cfg.jaccard_mode, threads=cfg.threads,
            lsa_dims=cfg.lsa_dims, stopwords=stopwords)
        csv_path = ctx.out(f"similarity_{method}.csv")
        matrix.to_csv(csv_path)
        stamp_csv(csv_path, ctx.stamp)
        write_json(ctx.out(f"similarity_{method}.json"), matrix.to_json(), ctx.stamp)
        if not cfg.data_only:
            svg_heatmap(ctx.out(f"similarity_{method}.svg"), matrix.doc_ids,
                        matrix.values, f"{method} similarity", ctx.stamp)
    if "lsa" in cfg.similarity_methods:
        coords = lsa_embed(ctx.documents, cfg.lsa_dims, stopwords)
        write_json(ctx.out("lsa_coords.json"),
                   {"coords": {k: v.tolist() for k, v in coords.items()}}, ctx.stamp)
        if not cfg.data_only and cfg.lsa_dims >= 2:
            svg_scatter(ctx.out("lsa_coords.svg"),
                        {k: [tuple(v[:2])] for k, v in coords.items()},
                        "documents in reduced tf-idf space", ctx.stamp)
    if "centroid" in cfg.similarity_methods and ctx.store is not None:
        projected = chunk_embedding_2d(ctx.documents, ctx.store)
        write_json(ctx.out("chunk_coords.json"), {"coords": projected}, ctx.stamp)
        if not cfg.data_only:
            svg_scatter(ctx.out("chunk_coords.svg"),
                        {k: [tuple(p) for p in v["chunks"]] for k, v in projected.items()},
                        "chunk embeddings, shared 2d projection", ctx.stamp,
                        centroids={k: tuple(v["centroid"]) for k, v in projected.items()})


def stage_features(ctx: RunContext) -> None:
    matrix = ctx.feature_matrix
    csv_path = ctx.out("features.csv")
    matrix.to_csv(csv_path)
    stamp_csv(csv_path, ctx.stamp)
    agg_path = ctx.out("features_agg.csv")
    matrix.aggregates_to_csv(agg_path)
    stamp_csv(agg_path, ctx.stamp)
    write_json(ctx.out("features_meta.json"),
               {"coverage": matrix.coverage, "metadata": matrix.metadata}, ctx.stamp)
    ctx.coverage.update(matrix.coverage)


def stage_factors(ctx: RunContext) -> None:
    cfg = ctx.config
    model = fit_factor_model(ctx.feature_matrix, k=cfg.n_factors)
    model.save(ctx.out("factor_model.json"))
    stamp_json = ctx.out("factor_model_meta.json")
    write_json(stamp_json, {"explained_variance": model.explained_variance,
                            "factor_names": list(model.factor_names),
                            "converged": model.converged}, ctx.stamp)
    scores = factor_scores(model, ctx.feature_matrix)
    scores_path = ctx.out("factor_scores.csv")
    scores.to_csv(scores_path)
    stamp_csv(scores_path, ctx.stamp)
    if not cfg.data_only:
        doc_ids = list(scores.per_document)
        readability = [n for n in ("concreteness", "word_complexity",
                                   "sentence_complexity") if n in model.factor_names]
        emotion = [n for n in ("valence", "arousal") if n in model.factor_names]
        if readability:
            series = {name: [float(scores.per_document[d][model.factor_names.index(name)])
                             for d in doc_ids] for name in readability}
            svg_grouped_bars(ctx.out("readability_factors.svg"), doc_ids, series,
                             "readability factor scores", ctx.stamp)
        if emotion:
            series = {name: [float(scores.per_document[d][model.factor_names.index(name)])
                             for d in doc_ids] for name in emotion}
            svg_grouped_bars(ctx.out("emotion_factors.svg"), doc_ids, series,
                             "emotion potential factor scores", ctx.stamp)
    if not model.converged:
        ctx.notes["factor_convergence"] = "best iterate kept; extraction hit the iteration cap"


def stage_complexity(ctx: RunContext) -> None:
    cfg = ctx.config
    if ctx.store is None:
        raise ConfigError("complexity stage requires a word-vector store")
    chunk_vectors = corpus_chunk_vectors(ctx.documents, ctx.store)
    result = complexity_report(chunk_vectors)
    csv_path = ctx.out("complexity.csv")
    result.to_csv(csv_path)
    stamp_csv(csv_path, ctx.stamp)
    write_json(ctx.out("complexity_scatter.json"),
               {"scatter": result.scatter_json()}, ctx.stamp)
    if not cfg.data_only:
        scatter = result.scatter_json()
        svg_scatter(ctx.out("complexity_scatter.svg"),
                    {k: [tuple(p) for p in v["chunks"]] for k, v in scatter.items()},
                    "chunk dispersion (2d projection)", ctx.stamp,
                    centroids={k: tuple(v["centroid"]) for k, v in scatter.items()})
        itv_series = {"itv": [result.itv_values[d] for d in result.doc_ids],
                      "sdw": [result.sdw_values[d] if result.sdw_values[d] is not None
                              else float("nan") for d in result.doc_ids]}
        svg_grouped_bars(ctx.out("complexity_bars.svg"), result.doc_ids,
                         itv_series, "semantic complexity", ctx.stamp)


STAGES = {
    "stats": stage_stats,
    "topics": stage_topics,
    "similarity": stage_similarity,
    "features": stage_features,
    "factors": stage_factors,
    "complexity": stage_complexity,
}


def cmd_report(ctx: RunContext) -> None:
    for name in ("stats", "topics", "similarity", "features", "factors", "complexity"):
        STAGES[name](ctx)
    ctx.notes["fms_naming"] = ("fms similarity is 1 - Fowlkes-Mallows; source "
                               "material labels the same quantity a similarity score")
    write_manifest(ctx.out_dir / "manifest.json", ctx.config, ctx.written,
                   _jsonable(ctx.coverage), ctx.notes)


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corpuscope",
        description="Corpus analytics: statistics, topics, similarity, "
                    "features, factors, semantic complexity.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in [*STAGES, "report"]:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON (or TOML) pipeline config")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--out", default=None, help="override output directory")
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--data-only", action="store_true",
                       help="skip SVG figures, write CSV/JSON only")
        if name == "similarity":
            p.add_argument("--method", default=None,
                           help="comma-separated subset of jaccard,lsa,centroid,fms")
            p.add_argument("--jaccard-mode", choices=("set", "bag"), default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = PipelineConfig.from_file(args.config)
        if args.seed is not None:
            config.seed = args.seed
        if args.out is not None:
            config.out_dir = args.out
        if args.threads is not None:
            config.threads = args.threads
        if args.data_only:
            config.data_only = True
        if getattr(args, "method", None):
            config.similarity_methods = args.method.split(",")
        if getattr(args, "jaccard_mode", None):
            config.jaccard_mode = args.jaccard_mode
        config.validate()
        ctx = RunContext(config)
        if args.command == "report":
            cmd_report(ctx)
        else:
            STAGES[args.command](ctx)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 4
    except CorpuscopeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
