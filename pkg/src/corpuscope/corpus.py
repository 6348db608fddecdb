"""Corpus ingestion: tokenization, sentence splitting, POS tagging, chunking.

Plain-text documents are parsed into a Document -> Sentence -> Token
hierarchy. Tagging is rule-based (lexicon + suffix heuristics) with an
import path for externally tagged TSV files; all steps are deterministic
for a fixed lexicon and abbreviation list.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources

from .errors import EmptyDocumentError, ParseError, ResourceError


class Pos(str, Enum):
    NOUN = "NOUN"
    VERB = "VERB"
    ADJ = "ADJ"
    ADV = "ADV"
    OTHER = "OTHER"
    PUNCT = "PUNCT"


CONTENT_POS = frozenset({Pos.NOUN, Pos.VERB, Pos.ADJ, Pos.ADV})

# Words keep hyphenated compounds and apostrophes; any other non-space
# character becomes its own punctuation token.
_TOKEN_RE = re.compile(r"\w+(?:[-'’]\w+)*|[^\w\s]")

_VOWELS = frozenset("aeiouyäöü")
_DIPHTHONGS = frozenset({"ei", "ai", "au", "eu", "äu", "ie"})

_TERMINALS = ".!?:…"
_CLOSERS = "\"'”’«»)]"

# Mapping of common STTS tags (tree-tagger output) onto the coarse tagset.
_STTS_PREFIXES = (
    ("NN", Pos.NOUN),
    ("NE", Pos.NOUN),
    ("ADJA", Pos.ADJ),
    ("ADJD", Pos.ADJ),
    ("ADV", Pos.ADV),
    ("VV", Pos.VERB),
    ("VA", Pos.VERB),
    ("VM", Pos.VERB),
    ("$", Pos.PUNCT),
)


@dataclass(frozen=True, slots=True)
class Token:
    surface: str
    normalized: str
    pos: Pos
    letters: int
    syllables: int

    @property
    def is_word(self) -> bool:
        return self.pos is not Pos.PUNCT


@dataclass(slots=True)
class Sentence:
    index: int
    tokens: list[Token]

    @property
    def word_tokens(self) -> list[Token]:
        return [t for t in self.tokens if t.is_word]

    @property
    def content_words(self) -> list[Token]:
        return [t for t in self.tokens if t.pos in CONTENT_POS]


@dataclass(slots=True)
class Document:
    id: str
    sentences: list[Sentence]
    chunks: list[tuple[int, int]] = field(default_factory=list)

    def word_tokens(self) -> list[Token]:
        return [t for s in self.sentences for t in s.tokens if t.is_word]

    def chunk_tokens(self, chunk: tuple[int, int]) -> list[Token]:
        words = self.word_tokens()
        return words[chunk[0] : chunk[1]]


@dataclass(frozen=True, slots=True)
class CorpusStats:
    doc_id: str
    n_sentences: int
    n_words: int
    mean_word_syllables: float
    mean_sentence_words: float


def tokenize(text: str) -> list[str]:
    """Split text into word and punctuation token strings."""
    return _TOKEN_RE.findall(text)


def count_syllables(word: str) -> int:
    """Count vowel groups, treating German diphthongs as a single group.

    Vowel runs are segmented left to right; a leading diphthong consumes
    two characters as one syllable. Words without vowels count zero.
    """
    w = word.lower()
    count = 0
    i = 0
    n = len(w)
    while i < n:
        if w[i] in _VOWELS:
            count += 1
            if w[i : i + 2] in _DIPHTHONGS:
                i += 2
            else:
                i += 1
        else:
            i += 1
    return count


def load_abbreviations(path) -> frozenset[str]:
    """One abbreviation per line, periods included, case-sensitive."""
    entries = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                entries.add(line)
    return frozenset(entries)


@functools.cache
def default_abbreviations() -> frozenset[str]:
    ref = resources.files("corpuscope.data") / "abbreviations_de.txt"
    with resources.as_file(ref) as path:
        return load_abbreviations(path)


def _preceding_word(text: str, dot: int) -> str:
    j = dot
    while j > 0 and (text[j - 1].isalnum() or text[j - 1] in "-'’"):
        j -= 1
    return text[j:dot]


def split_sentences(text: str, abbreviations: frozenset[str] | None = None) -> list[str]:
    """Split text into sentence strings.

    A boundary is a terminal mark (. ! ? : …) followed by whitespace and
    an uppercase letter, or by end of text. Periods after listed
    abbreviations or bare numbers (ordinals, section numbers) do not split.
    """
    if abbreviations is None:
        abbreviations = default_abbreviations()
    sentences: list[str] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in _TERMINALS:
            j = i + 1
            while j < n and text[j] in _TERMINALS + _CLOSERS:
                j += 1
            k = j
            while k < n and text[k].isspace():
                k += 1
            at_end = k >= n
            follows_rule = at_end or (k > j and text[k].isupper())
            if follows_rule and not (ch == "." and _suppresses(text, i, abbreviations)):
                piece = text[start:j].strip()
                if piece:
                    sentences.append(piece)
                start = k
                i = k
                continue
            i = j
            continue
        i += 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def _suppresses(text: str, dot: int, abbreviations: frozenset[str]) -> bool:
    word = _preceding_word(text, dot)
    if not word:
        return False
    if word.isdigit():
        return True
    return word + "." in abbreviations


class TagLexicon:
    """Word list plus suffix heuristics backing the default tagger.

    Lookup order per token: exact surface, lowercased surface, longest
    matching suffix, capitalization (German nouns), fallback OTHER.
    Suffix entries flagged `lower` only apply to lowercase words, which
    keeps broad verb endings from swallowing capitalized nouns.
    """

    def __init__(self, entries: dict[str, Pos] | None = None,
                 suffixes: list[tuple[str, Pos, bool]] | None = None):
        self._exact: dict[str, Pos] = dict(entries or {})
        self._lower: dict[str, Pos] = {w.lower(): t for w, t in self._exact.items()}
        self._suffixes = sorted(suffixes or [], key=lambda e: len(e[0]), reverse=True)

    @classmethod
    def load(cls, lexicon_path=None, suffix_path=None) -> "TagLexicon":
        entries: dict[str, Pos] = {}
        suffixes: list[tuple[str, Pos, bool]] = []
        if lexicon_path is not None:
            for lineno, fields in _read_tsv(lexicon_path):
                if len(fields) != 2:
                    raise ParseError("expected 'word<TAB>tag'", lexicon_path, lineno)
                entries[fields[0]] = coerce_tag(fields[1])
        if suffix_path is not None:
            for lineno, fields in _read_tsv(suffix_path):
                if len(fields) not in (2, 3):
                    raise ParseError("expected 'suffix<TAB>tag[<TAB>lower]'", suffix_path, lineno)
                lower_only = len(fields) == 3 and fields[2] == "lower"
                suffixes.append((fields[0], coerce_tag(fields[1]), lower_only))
        return cls(entries, suffixes)

    @classmethod
    @functools.cache
    def default(cls) -> "TagLexicon":
        data = resources.files("corpuscope.data")
        with resources.as_file(data / "pos_lexicon_de.tsv") as lex, \
                resources.as_file(data / "suffix_tags_de.tsv") as suf:
            return cls.load(lex, suf)

    def tag(self, surface: str) -> Pos:
        if not any(c.isalnum() for c in surface):
            return Pos.PUNCT
        hit = self._exact.get(surface)
        if hit is not None:
            return hit
        hit = self._lower.get(surface.lower())
        if hit is not None:
            return hit
        lowered = surface.lower()
        is_capitalized = surface[:1].isupper()
        for suffix, tag, lower_only in self._suffixes:
            if lower_only and is_capitalized:
                continue
            if len(lowered) > len(suffix) and lowered.endswith(suffix):
                return tag
        if is_capitalized and any(c.isalpha() for c in surface):
            return Pos.NOUN
        return Pos.OTHER


def _read_tsv(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            yield lineno, line.split("\t")


def coerce_tag(raw: str) -> Pos:
    """Accept coarse tag names or common STTS tags; unknown tags -> OTHER."""
    name = raw.strip()
    try:
        return Pos(name.upper())
    except ValueError:
        pass
    for prefix, tag in _STTS_PREFIXES:
        if name.upper().startswith(prefix) or name.startswith(prefix):
            return tag
    return Pos.OTHER


def pos_tag(tokens: list[str], lexicon: TagLexicon) -> list[Pos]:
    return [lexicon.tag(t) for t in tokens]


def make_token(surface: str, pos: Pos) -> Token:
    letters = sum(1 for c in surface if c.isalpha())
    syllables = 0 if pos is Pos.PUNCT else count_syllables(surface)
    return Token(surface=surface, normalized=surface.lower(), pos=pos,
                 letters=letters, syllables=syllables)


def assign_chunks(word_count: int, chunk_size: int) -> list[tuple[int, int]]:
    """Partition `word_count` positions into spans of at most `chunk_size`."""
    if chunk_size <= 0:
        raise ValueError(f"chunk_size must be positive, got {chunk_size}")
    return [(lo, min(lo + chunk_size, word_count))
            for lo in range(0, word_count, chunk_size)]


def read_pretagged(path) -> list[list[tuple[str, Pos]]]:
    """Parse a `surface<TAB>tag` TSV; blank lines separate sentences."""
    sentences: list[list[tuple[str, Pos]]] = []
    current: list[tuple[str, Pos]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                if current:
                    sentences.append(current)
                    current = []
                continue
            fields = line.split("\t")
            if len(fields) != 2 or not fields[0]:
                raise ParseError("expected 'surface<TAB>tag'", path, lineno)
            current.append((fields[0], coerce_tag(fields[1])))
    if current:
        sentences.append(current)
    return sentences


def load_document(path, doc_id: str, *, chunk_size: int = 1000,
                  lexicon: TagLexicon | None = None,
                  abbreviations: frozenset[str] | None = None,
                  pretagged=None) -> Document:
    """Parse one UTF-8 text file into a Document.

    When `pretagged` points at a TSV produced by an external tagger, its
    token and sentence structure replaces the built-in pipeline.
    """
    if pretagged is not None:
        tagged = read_pretagged(pretagged)
        sentences = [
            Sentence(index=i, tokens=[make_token(s, t) for s, t in sent])
            for i, sent in enumerate(tagged)
        ]
    else:
        try:
            with open(path, "rb") as fh:
                raw = fh.read()
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ResourceError(
                f"{path}: undecodable byte at offset {exc.start}") from exc
        if not text.strip():
            raise EmptyDocumentError(f"{path}: no text content")
        if lexicon is None:
            lexicon = TagLexicon.default()
        sentences = []
        for i, sent_text in enumerate(split_sentences(text, abbreviations)):
            surfaces = tokenize(sent_text)
            tags = pos_tag(surfaces, lexicon)
            sentences.append(Sentence(
                index=i, tokens=[make_token(s, t) for s, t in zip(surfaces, tags)]))
    if not sentences:
        raise EmptyDocumentError(f"{path}: no sentences found")
    doc = Document(id=doc_id, sentences=sentences)
    doc.chunks = assign_chunks(len(doc.word_tokens()), chunk_size)
    return doc


def global_stats(document: Document) -> CorpusStats:
    words = document.word_tokens()
    n_words = len(words)
    n_sentences = len(document.sentences)
    total_syllables = sum(t.syllables for t in words)
    return CorpusStats(
        doc_id=document.id,
        n_sentences=n_sentences,
        n_words=n_words,
        mean_word_syllables=total_syllables / n_words if n_words else 0.0,
        mean_sentence_words=n_words / n_sentences if n_sentences else 0.0,
    )


def reading_time(n_words: int, wpm: float) -> float:
    """Hours needed to read `n_words` at `wpm` words per minute."""
    if wpm <= 0:
        raise ValueError(f"wpm must be positive, got {wpm}")
    if n_words < 0:
        raise ValueError(f"n_words must be non-negative, got {n_words}")
    return (n_words / wpm) / 60.0
