from datetime import datetime, timezone

import pytest
from hypothesis import given, strategies as st

from infodemic.textprep import (
    EmptyRecord,
    RawRecord,
    extract_full_text,
    normalize,
    parse_timestamp,
    token_count,
)


def record(text="", extended=None):
    return RawRecord(id="t1", text=text, extended_text=extended)


class TestExtractFullText:
    def test_prefers_extended_text(self):
        rec = record(text="short…", extended="short version now complete")
        assert extract_full_text(rec) == "short version now complete"

    def test_falls_back_to_text(self):
        assert extract_full_text(record(text="hello world")) == "hello world"

    def test_empty_record_rejected(self):
        with pytest.raises(EmptyRecord):
            extract_full_text(record(text="", extended=""))

    def test_whitespace_only_counts_as_empty(self):
        with pytest.raises(EmptyRecord):
            extract_full_text(record(text="   ", extended="\n"))


class TestNormalize:
    def test_hashtag_url_mention(self):
        result = normalize("#COVID19 is a HOAX!! http://t.co/ab @bob")
        assert result.tokens == ["covid19", "is", "a", "hoax", "URL", "USER"]

    def test_punctuation_only_yields_no_tokens(self):
        assert normalize("…!!!").tokens == []

    def test_cyrillic_and_www_url(self):
        result = normalize("Жълта новина? www.site.bg")
        assert result.tokens == ["жълта", "новина", "URL"]

    def test_arabic_text_preserved(self):
        result = normalize("هذا خبرعاجل!")
        assert result.tokens == ["هذا", "خبرعاجل"]

    def test_normalized_joins_tokens(self):
        result = normalize("Some  TEXT here")
        assert result.normalized == " ".join(result.tokens)

    def test_literal_sentinels_survive(self):
        assert normalize("URL USER").tokens == ["URL", "USER"]

    def test_lowercase_url_word_is_not_a_sentinel(self):
        assert normalize("the url and the user").tokens == [
            "the", "url", "and", "the", "user",
        ]


class TestTokenCount:
    @pytest.mark.parametrize(
        "text,expected",
        [("covid19 is a hoax", 4), ("", 0), ("a b c d e", 5)],
    )
    def test_counts(self, text, expected):
        assert token_count(normalize(text)) == expected


@given(st.text(max_size=200))
def test_normalize_is_idempotent(text):
    first = normalize(text)
    second = normalize(first.normalized)
    assert second.tokens == first.tokens


@given(st.text(max_size=200))
def test_no_leftover_twitter_syntax(text):
    for token in normalize(text).tokens:
        if token in ("URL", "USER"):
            continue
        assert "#" not in token
        assert "@" not in token
        assert "://" not in token
        assert not token.startswith("www.")
        assert token
        assert not any(c.isspace() for c in token)


@given(st.text(max_size=200))
def test_no_new_letters_or_digits(text):
    folded = text.casefold()
    budget: dict[str, int] = {}
    for c in folded:
        if c.isalnum():
            budget[c] = budget.get(c, 0) + 1
    for token in normalize(text).tokens:
        if token in ("URL", "USER"):
            continue
        for c in token:
            assert budget.get(c, 0) > 0, f"char {c!r} not in input"
            budget[c] -= 1


def test_parse_timestamp_handles_z_suffix_and_naive():
    ts = parse_timestamp("2020-02-01T10:00:00Z")
    assert ts == datetime(2020, 2, 1, 10, tzinfo=timezone.utc)
    assert parse_timestamp("2020-02-01T10:00:00") == ts


def test_raw_record_from_dict():
    rec = RawRecord.from_dict(
        {"id": 42, "text": "hi", "lang": "en", "created_at": "2021-03-01T00:00:00Z"}
    )
    assert rec.id == "42"
    assert rec.declared_lang == "en"
    assert rec.created_at.tzinfo is not None
