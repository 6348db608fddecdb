from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

import corpuscope
from corpuscope.corpus import Pos, Sentence, Document, assign_chunks, make_token
from corpuscope.resources import LabelSet, VectorStore

TOY_DIR = Path(corpuscope.__file__).parent / "data" / "toy"


def build_sentence(index: int, tagged: list[tuple[str, Pos]]) -> Sentence:
    return Sentence(index=index, tokens=[make_token(s, p) for s, p in tagged])


def build_document(doc_id: str, sentences: list[list[tuple[str, Pos]]],
                   chunk_size: int = 1000) -> Document:
    doc = Document(id=doc_id,
                   sentences=[build_sentence(i, s) for i, s in enumerate(sentences)])
    doc.chunks = assign_chunks(len(doc.word_tokens()), chunk_size)
    return doc


def document_from_words(doc_id: str, words: list[str], pos: Pos = Pos.NOUN,
                        per_sentence: int = 10, chunk_size: int = 1000) -> Document:
    sentences = []
    for lo in range(0, len(words), per_sentence):
        sentences.append([(w, pos) for w in words[lo : lo + per_sentence]])
    return build_document(doc_id, sentences, chunk_size)


def store_from_dict(entries: dict[str, list[float]], normalize_case: bool = True) -> VectorStore:
    dim = len(next(iter(entries.values())))
    vectors = {(k.lower() if normalize_case else k): np.array(v, dtype=float)
               for k, v in entries.items()}
    return VectorStore(vectors, dim, normalize_case=normalize_case)


@pytest.fixture
def polar_store() -> VectorStore:
    return store_from_dict({
        "gut": [1.0, 0.0],
        "schlecht": [0.0, 1.0],
        "mittel": [2 ** -0.5, 2 ** -0.5],
        "pos_label": [1.0, 0.0],
        "neg_label": [0.0, 1.0],
    })


@pytest.fixture
def polar_labels() -> LabelSet:
    return LabelSet(positive=["pos_label"], negative=["neg_label"])


@pytest.fixture
def toy_config_path() -> Path:
    return TOY_DIR / "config.json"


@pytest.fixture
def toy_documents():
    from corpuscope.config import PipelineConfig

    config = PipelineConfig.from_file(TOY_DIR / "config.json")
    return config.load_documents()


def write_embeddings_jsonl(path: Path, rows: list[dict]) -> Path:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")
    return path
