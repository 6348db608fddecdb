"""Regenerate the frozen toy resources bundled with the package.

Vectors and norms are derived deterministically from word hashes, so
rerunning this script reproduces the checked-in files byte for byte.
Label lists are copied from the package placeholders. Run from the repo
root after changing the toy corpus:

    python3 tools/make_toy_resources.py
"""

from __future__ import annotations

import hashlib
import shutil
from pathlib import Path

import numpy as np

from corpuscope.corpus import load_document
from corpuscope.resources import EMOTION_NAMES, read_word_list

DATA = Path(__file__).resolve().parent.parent / "src" / "corpuscope" / "data"
TOY = DATA / "toy"
DIMENSION = 12
DOC_IDS = ("party_a", "party_b", "party_c", "party_d", "party_e", "party_f")


def word_rng(word: str, salt: str) -> np.random.Generator:
    digest = hashlib.sha256(f"{salt}|{word}".encode("utf-8")).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "big"))


def base_vector(word: str) -> np.ndarray:
    return word_rng(word, "vec").normal(0.0, 1.0, DIMENSION)


def main() -> None:
    documents = [
        load_document(TOY / "corpus" / f"{doc_id}.txt", doc_id, chunk_size=40)
        for doc_id in DOC_IDS
    ]
    vocabulary = sorted({t.normalized for d in documents for t in d.word_tokens()
                         if t.letters > 0})

    labels_dir = TOY / "labels"
    labels_dir.mkdir(parents=True, exist_ok=True)
    label_words: dict[str, list[str]] = {}
    for name in ("positive", "negative", *EMOTION_NAMES):
        src = DATA / "labels" / f"{name}_de.txt"
        shutil.copyfile(src, labels_dir / f"{name}_de.txt")
        label_words[name] = [w.lower() for w in read_word_list(src)]

    # Vector store: all label words plus ~90% of the corpus vocabulary.
    # Polarity and emotion labels get a structured axis so scores are
    # meaningful, everything else is seeded noise.
    rows: dict[str, np.ndarray] = {}
    for name, words in label_words.items():
        axis = {"positive": 0, "negative": 0, "arousal": 1, "anger": 2,
                "disgust": 3, "fear": 4, "sadness": 5}[name]
        sign = -1.0 if name == "negative" else 1.0
        for word in words:
            vec = rows.get(word, base_vector(word) * 0.4)
            vec = vec.copy()
            vec[axis] += sign * 1.5
            rows[word] = vec
    for word in vocabulary:
        if word in rows:
            continue
        if word_rng(word, "keep").random() < 0.10:
            continue  # leave ~10% of the vocabulary uncovered
        rows[word] = base_vector(word)

    with open(TOY / "vectors.txt", "w", encoding="utf-8") as fh:
        fh.write(f"{len(rows)} {DIMENSION}\n")
        for word in sorted(rows):
            values = " ".join(f"{v:.6f}" for v in rows[word])
            fh.write(f"{word} {values}\n")

    with open(TOY / "norms.tsv", "w", encoding="utf-8") as fh:
        for word in vocabulary:
            rng = word_rng(word, "norms")
            if rng.random() < 0.15:
                continue  # uncovered words
            cells = [f"{1.0 + 6.0 * rng.random():.3f}" for _ in range(4)]
            if rng.random() < 0.10:
                cells[rng.integers(4)] = ""  # sparse missing fields
            fh.write(word + "\t" + "\t".join(cells) + "\n")

    config = f"""{{
  "documents": [
{",".join(chr(10) + f'    {{"id": "{d}", "path": "corpus/{d}.txt"}}' for d in DOC_IDS)}
  ],
  "vectors_path": "vectors.txt",
  "norms_path": "norms.tsv",
  "positive_labels_path": "labels/positive_de.txt",
  "negative_labels_path": "labels/negative_de.txt",
  "emotion_labels_paths": {{
    "arousal": "labels/arousal_de.txt",
    "anger": "labels/anger_de.txt",
    "disgust": "labels/disgust_de.txt",
    "fear": "labels/fear_de.txt",
    "sadness": "labels/sadness_de.txt"
  }},
  "chunk_size": 40,
  "n_topics": 5,
  "topic_iterations": 150,
  "topic_chunk_size": 30,
  "n_factors": 5,
  "seed": 42,
  "odc_reference_size": 800,
  "out_dir": "out"
}}
"""
    (TOY / "config.json").write_text(config, encoding="utf-8")
    print(f"vocabulary: {len(vocabulary)} types, vectors: {len(rows)} entries")


if __name__ == "__main__":
    main()
