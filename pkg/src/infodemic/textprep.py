"""Tweet text extraction, normalization, and tokenization.

Normalization applies, in order: URL replacement with the sentinel token
``URL``, @-mention replacement with ``USER``, hash-symbol stripping
(keeping the hashtag word), case folding, removal of characters that are
neither letters, digits, nor whitespace, and whitespace tokenization.

Sentinels stay uppercase: they are protected before case folding so they
remain distinguishable from the ordinary words "url" and "user", and so
that normalization is idempotent.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .errors import InfodemicError


class EmptyRecord(InfodemicError):
    """Record carries no usable text."""


@dataclass
class RawRecord:
    """A tweet-shaped input record as read from an ingest source."""

    id: str
    text: str
    extended_text: str | None = None
    declared_lang: str | None = None
    created_at: datetime | None = None

    @classmethod
    def from_dict(cls, obj: dict) -> "RawRecord":
        created = obj.get("created_at")
        if isinstance(created, str):
            created = parse_timestamp(created)
        return cls(
            id=str(obj.get("id", "")),
            text=obj.get("text") or "",
            extended_text=obj.get("extended_text"),
            declared_lang=obj.get("lang"),
            created_at=created,
        )


@dataclass
class NormalizedText:
    normalized: str
    tokens: list[str] = field(default_factory=list)


# Internal sentinel markers use control characters so they survive case
# folding and the non-alphanumeric sweep untouched.
_URL_MARK = "\x00\x01"
_USER_MARK = "\x00\x02"

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_MENTION_RE = re.compile(r"@\w+")
_LITERAL_SENTINEL_RE = re.compile(r"\b(URL|USER)\b")
_MARK_CHARS = frozenset("\x00\x01\x02")


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp; naive values are taken as UTC."""
    ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def extract_full_text(record: RawRecord) -> str:
    """Prefer the untruncated extended text over the default text field."""
    extended = (record.extended_text or "").strip()
    if extended:
        return record.extended_text  # type: ignore[return-value]
    text = (record.text or "").strip()
    if text:
        return record.text
    raise EmptyRecord(f"record {record.id!r} has neither text nor extended_text")


def normalize(text: str) -> NormalizedText:
    """Apply the normalization rules and tokenize on whitespace.

    The result may have zero tokens (e.g. punctuation-only input);
    callers decide how to handle that.
    """
    # Strip any stray marker control characters from raw input.
    s = "".join(c for c in text if c not in _MARK_CHARS)
    s = _URL_RE.sub(f" {_URL_MARK} ", s)
    s = _MENTION_RE.sub(f" {_USER_MARK} ", s)
    # Standalone uppercase URL/USER tokens are already sentinels; protect
    # them so repeated normalization is a no-op.
    s = _LITERAL_SENTINEL_RE.sub(
        lambda m: f" {_URL_MARK} " if m.group(1) == "URL" else f" {_USER_MARK} ", s
    )
    s = s.replace("#", "")
    s = s.casefold()
    s = "".join(c for c in s if c.isalnum() or c.isspace() or c in _MARK_CHARS)
    tokens = [
        "URL" if t == _URL_MARK else "USER" if t == _USER_MARK else t
        for t in s.split()
    ]
    return NormalizedText(normalized=" ".join(tokens), tokens=tokens)


def token_count(text: NormalizedText) -> int:
    return len(text.tokens)
