"""Corpus analytics: global statistics, topics, similarity, readability
and emotion-potential features, factor models, and semantic complexity
over plain-text document collections."""

__version__ = "0.1.0"
