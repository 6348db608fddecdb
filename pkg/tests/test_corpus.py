from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from corpuscope.corpus import (
    CONTENT_POS,
    Pos,
    TagLexicon,
    assign_chunks,
    count_syllables,
    default_abbreviations,
    global_stats,
    load_document,
    pos_tag,
    read_pretagged,
    reading_time,
    split_sentences,
    tokenize,
)
from corpuscope.errors import EmptyDocumentError, ParseError, ResourceError

from conftest import build_document


class TestSplitSentences:
    def test_two_terminal_marks(self):
        assert split_sentences("A b. C d!") == ["A b.", "C d!"]

    def test_abbreviation_suppresses_split(self):
        # "z." is on the shipped list; the split after it must not fire.
        assert "z." in default_abbreviations()
        assert split_sentences("z. B. hier.") == ["z. B. hier."]

    def test_empty_input(self):
        assert split_sentences("") == []

    def test_lowercase_continuation_is_no_boundary(self):
        assert split_sentences("Der Wert... stieg an.") == ["Der Wert... stieg an."]

    def test_ordinal_number_is_no_boundary(self):
        assert split_sentences("Im 19. Jahrhundert war das anders.") == [
            "Im 19. Jahrhundert war das anders."
        ]

    def test_colon_and_question_boundaries(self):
        parts = split_sentences("Was nun? Das Ziel: Wir handeln jetzt.")
        assert parts == ["Was nun?", "Das Ziel:", "Wir handeln jetzt."]

    @given(st.text(alphabet="abDE .!?", max_size=80))
    def test_round_trip_modulo_whitespace(self, text):
        parts = split_sentences(text, abbreviations=frozenset())
        assert " ".join(" ".join(parts).split()) == " ".join(text.split())


class TestTokenize:
    def test_hyphenated_compound_stays_whole(self):
        assert tokenize("Start-ups sind gut.") == ["Start-ups", "sind", "gut", "."]

    def test_punctuation_is_separate(self):
        assert tokenize("Ja, gut!") == ["Ja", ",", "gut", "!"]


class TestSyllables:
    @pytest.mark.parametrize("word,expected", [
        ("Haus", 1),       # "au" is one diphthong group
        ("Partei", 2),     # a | ei
        ("Bundestagswahl", 4),  # u | e | a | a
        ("Frauen", 2),     # au | e
        ("Wiese", 2),      # ie | e
        ("km", 0),
    ])
    def test_examples(self, word, expected):
        assert count_syllables(word) == expected

    @given(st.text(alphabet="bcdfghaeiou", min_size=1, max_size=12))
    def test_at_least_one_if_vowel_present(self, word):
        has_vowel = any(c in "aeiou" for c in word)
        count = count_syllables(word)
        assert (count >= 1) == has_vowel


class TestTagging:
    def test_lexicon_lookup(self):
        lexicon = TagLexicon({"Haus": Pos.NOUN})
        assert lexicon.tag("Haus") is Pos.NOUN

    def test_suffix_heuristic(self):
        lexicon = TagLexicon(suffixes=[("ell", Pos.ADJ, False)])
        assert lexicon.tag("schnell") is Pos.ADJ

    def test_default_lexicon_tags_schnell_adj(self):
        assert TagLexicon.default().tag("schnell") is Pos.ADJ

    def test_punctuation(self):
        assert TagLexicon.default().tag(",") is Pos.PUNCT

    def test_capitalized_fallback_is_noun(self):
        assert TagLexicon().tag("Querkopf") is Pos.NOUN

    def test_tagging_is_total(self):
        lexicon = TagLexicon.default()
        tags = pos_tag(["Haus", "xyzzy", "42", "!"], lexicon)
        assert all(isinstance(t, Pos) for t in tags)

    def test_broad_verb_suffix_skips_capitalized(self):
        lexicon = TagLexicon.default()
        assert lexicon.tag("bauen") is Pos.VERB
        assert lexicon.tag("Grundlagen") is Pos.NOUN


class TestLoadDocument:
    def test_small_file(self, tmp_path):
        path = tmp_path / "doc.txt"
        path.write_text("Das Haus ist groß. Wir bauen.", encoding="utf-8")
        doc = load_document(path, "toy")
        assert len(doc.sentences) == 2
        assert len(doc.word_tokens()) == 6
        assert [s.index for s in doc.sentences] == [0, 1]

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("", encoding="utf-8")
        with pytest.raises(EmptyDocumentError):
            load_document(path, "empty")

    def test_chunk_partition(self, tmp_path):
        path = tmp_path / "long.txt"
        path.write_text(" ".join(f"wort{i}" for i in range(2500)) + ".",
                        encoding="utf-8")
        doc = load_document(path, "long", chunk_size=1000)
        sizes = [hi - lo for lo, hi in doc.chunks]
        assert sizes == [1000, 1000, 500]

    def test_undecodable_bytes_reports_offset(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_bytes(b"Guter Text " + b"\xff\xfe" + b" mehr Text.")
        with pytest.raises(ResourceError, match="offset 11"):
            load_document(path, "bad")

    def test_punct_tokens_have_zero_syllables(self, tmp_path):
        path = tmp_path / "p.txt"
        path.write_text("Ja, gut!", encoding="utf-8")
        doc = load_document(path, "p")
        for token in doc.sentences[0].tokens:
            if token.pos is Pos.PUNCT:
                assert token.syllables == 0
            assert token.letters == sum(1 for c in token.surface if c.isalpha())

    def test_content_words_preserve_order(self, tmp_path):
        path = tmp_path / "c.txt"
        path.write_text("Das neue Haus steht im alten Dorf.", encoding="utf-8")
        doc = load_document(path, "c")
        sentence = doc.sentences[0]
        content = sentence.content_words
        assert all(t.pos in CONTENT_POS for t in content)
        positions = [sentence.tokens.index(t) for t in content]
        assert positions == sorted(positions)


class TestPretagged:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "tagged.tsv"
        path.write_text("Das\tOTHER\nHaus\tNN\n.\t$.\n\nWir\tOTHER\nbauen\tVVFIN\n.\t$.\n",
                        encoding="utf-8")
        doc = load_document(None, "tagged", pretagged=path)
        assert len(doc.sentences) == 2
        assert doc.sentences[0].tokens[1].pos is Pos.NOUN
        assert doc.sentences[1].tokens[1].pos is Pos.VERB

    def test_malformed_line_reports_number(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("Das\tOTHER\nkaputt\n", encoding="utf-8")
        with pytest.raises(ParseError, match=":2:"):
            read_pretagged(path)


class TestChunks:
    @given(st.integers(min_value=0, max_value=5000), st.integers(min_value=1, max_value=999))
    def test_partition_properties(self, count, size):
        chunks = assign_chunks(count, size)
        assert sum(hi - lo for lo, hi in chunks) == count
        assert len(chunks) == math.ceil(count / size)
        assert all(hi - lo == size for lo, hi in chunks[:-1])


class TestStats:
    def test_brute_force_recount(self, tmp_path):
        path = tmp_path / "doc.txt"
        path.write_text("Die Partei liebt Wahlen. Heute regnet es. Haus und Hof.",
                        encoding="utf-8")
        doc = load_document(path, "doc")
        stats = global_stats(doc)
        words = [t for s in doc.sentences for t in s.tokens if t.pos is not Pos.PUNCT]
        assert stats.n_words == len(words)
        assert stats.n_sentences == len(doc.sentences)
        assert stats.mean_word_syllables == pytest.approx(
            sum(count_syllables(t.surface) for t in words) / len(words))
        assert stats.mean_sentence_words == pytest.approx(len(words) / len(doc.sentences))

    def test_stats_on_synthetic_document(self):
        doc = build_document("x", [[("Haus", Pos.NOUN), (".", Pos.PUNCT)],
                                   [("Partei", Pos.NOUN), ("gut", Pos.ADJ)]])
        stats = global_stats(doc)
        assert stats.n_sentences == 2
        assert stats.n_words == 3
        assert stats.mean_word_syllables == pytest.approx((1 + 2 + 1) / 3)


class TestReadingTime:
    def test_linke_scale(self):
        assert reading_time(69000, 200) == pytest.approx(5.75)

    def test_zero_words(self):
        assert reading_time(0, 200) == 0.0

    def test_spd_scale_about_two_hours(self):
        hours = reading_time(23000, 200)
        assert hours == pytest.approx(1.9166, abs=1e-3)
        assert 1.5 < hours < 2.5

    def test_nonpositive_wpm(self):
        with pytest.raises(ValueError):
            reading_time(100, 0)
        with pytest.raises(ValueError):
            reading_time(100, -10)
