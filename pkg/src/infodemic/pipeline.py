"""Ingestion pipeline: read tweet-shaped records, filter, classify with
the loaded models, and store.

Per record: extract the full text, normalize, drop when fewer than five
tokens remain, drop when the detected language differs from the target,
classify all seven questions in both task granularities, store. Record
failures are logged and counted but never abort the stream.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Iterable, Iterator

from . import langid, schema, textprep
from .errors import InfodemicError
from .store import RecordStore, ClassifiedRecord
from .svm import QuestionModel

logger = logging.getLogger(__name__)


class SourceUnreadable(InfodemicError):
    pass


@dataclass
class IngestSummary:
    accepted: int = 0
    dropped_short: int = 0
    dropped_language: int = 0
    failed: int = 0

    def as_dict(self) -> dict[str, int]:
        return {
            "accepted": self.accepted,
            "dropped_short": self.dropped_short,
            "dropped_language": self.dropped_language,
            "failed": self.failed,
        }


def read_source(path: str) -> Iterator[textprep.RawRecord | None]:
    """Yield RawRecords from a line-delimited JSON file.

    Yields None for unparseable lines so the caller can count failures;
    raises SourceUnreadable when the file itself cannot be opened.
    """
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise SourceUnreadable(f"cannot open source {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                record = textprep.RawRecord.from_dict(obj)
                if not record.id or record.created_at is None:
                    raise ValueError("record needs id and created_at")
                yield record
            except (ValueError, TypeError, KeyError) as exc:
                logger.warning("%s:%d: bad record: %s", path, lineno, exc)
                yield None


def classify_record(
    text: str, models: dict[tuple[str, str], QuestionModel]
) -> dict[str, dict[str, dict]]:
    """Run all 7 questions x both tasks; returns the prediction map
    stored on ClassifiedRecords."""
    predictions: dict[str, dict[str, dict]] = {}
    for question in schema.QUESTION_IDS:
        predictions[question] = {}
        for task in schema.TASKS:
            pred = models[(question, task)].predict(text)
            predictions[question][task] = {
                "label": pred.label,
                "probability": pred.probability,
            }
    return predictions


def ingest(
    source: Iterable[textprep.RawRecord | None],
    target_language: str,
    models: dict[tuple[str, str], QuestionModel],
    store: RecordStore,
    profiles: list[langid.LanguageProfile] | None = None,
) -> IngestSummary:
    """Filter, classify, and store a stream of raw records."""
    if profiles is None:
        profiles = langid.default_profiles()
    missing = [
        (q, t)
        for q in schema.QUESTION_IDS
        for t in schema.TASKS
        if (q, t) not in models
    ]
    if missing:
        raise InfodemicError(f"models not loaded for {target_language}: missing {missing}")

    summary = IngestSummary()
    for record in source:
        if record is None:
            summary.failed += 1
            continue
        try:
            full_text = textprep.extract_full_text(record)
            normalized = textprep.normalize(full_text)
            if textprep.token_count(normalized) < 5:
                summary.dropped_short += 1
                continue
            detected, _conf = langid.detect(normalized.normalized, profiles)
            if detected != target_language:
                summary.dropped_language += 1
                continue
            store.put(
                ClassifiedRecord(
                    id=record.id,
                    language=target_language,
                    created_at=record.created_at,
                    text=full_text,
                    normalized=normalized.normalized,
                    tokens=normalized.tokens,
                    predictions=classify_record(full_text, models),
                )
            )
            summary.accepted += 1
        except InfodemicError as exc:
            logger.warning("record %s failed: %s", record.id, exc)
            summary.failed += 1
        except Exception:  # pragma: no cover - defensive, keeps the stream alive
            logger.exception("record %s failed unexpectedly", record.id)
            summary.failed += 1
    return summary
