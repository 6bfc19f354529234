"""Embedded record store with token keyword search and day-wise label
aggregation.

Layout inside the store directory:
  records.jsonl   append-only log, one JSON record per line (the source
                  of truth; the latest line per record id wins)
  index.json      token inverted index sidecar
  buckets.json    per-day per-question label count sidecar
  sidecar.stamp   log size the sidecars were built from

Sidecars are loaded only when the stamp matches the current log size;
otherwise everything is rebuilt by replaying the log. A single writer is
assumed; reads are served from in-memory state.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from datetime import date, datetime, timezone

from . import schema
from .errors import InfodemicError
from .langid import SUPPORTED_LANGUAGES
from .textprep import parse_timestamp

MIN_TOKEN_COUNT = 5
STORE_FORMAT_VERSION = 1


class InvalidDateRange(InfodemicError):
    pass


@dataclass
class ClassifiedRecord:
    id: str
    language: str
    created_at: datetime
    text: str
    normalized: str
    tokens: list[str]
    # question id -> task -> {"label": ..., "probability": ...}
    predictions: dict[str, dict[str, dict]]

    def day(self) -> date:
        return self.created_at.astimezone(timezone.utc).date()

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "language": self.language,
            "created_at": self.created_at.astimezone(timezone.utc).isoformat(),
            "text": self.text,
            "normalized": self.normalized,
            "tokens": self.tokens,
            "predictions": self.predictions,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ClassifiedRecord":
        return cls(
            id=obj["id"],
            language=obj["language"],
            created_at=parse_timestamp(obj["created_at"]),
            text=obj["text"],
            normalized=obj["normalized"],
            tokens=list(obj["tokens"]),
            predictions=obj["predictions"],
        )


@dataclass
class DayBucket:
    date: date
    question: str
    task: str
    counts: dict[str, int] = field(default_factory=dict)


def _validate(record: ClassifiedRecord) -> None:
    if len(record.tokens) < MIN_TOKEN_COUNT:
        raise ValueError(f"record {record.id}: fewer than {MIN_TOKEN_COUNT} tokens")
    if record.language not in SUPPORTED_LANGUAGES:
        raise ValueError(f"record {record.id}: unsupported language {record.language!r}")
    for question in schema.QUESTION_IDS:
        for task in schema.TASKS:
            pred = record.predictions.get(question, {}).get(task)
            if not pred or "label" not in pred or "probability" not in pred:
                raise ValueError(
                    f"record {record.id}: missing {question}/{task} prediction"
                )


class RecordStore:
    """File-backed store; open with RecordStore(directory)."""

    def __init__(self, directory: str):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)
        self._check_format()
        self._log_path = os.path.join(directory, "records.jsonl")
        self._records: dict[str, ClassifiedRecord] = {}
        self._index: dict[str, set[str]] = {}
        self._buckets: dict[tuple[str, str, str, str], dict[str, int]] = {}
        self._log = None
        self._load()

    def _check_format(self) -> None:
        path = os.path.join(self.directory, "format.json")
        if os.path.exists(path):
            with open(path, encoding="utf-8") as fh:
                version = json.load(fh).get("store_format_version")
            if version != STORE_FORMAT_VERSION:
                raise InfodemicError(
                    f"{self.directory}: unsupported store format version {version}"
                )
        else:
            with open(path, "w", encoding="utf-8") as fh:
                json.dump({"store_format_version": STORE_FORMAT_VERSION}, fh)

    # -- lifecycle -----------------------------------------------------

    def _load(self) -> None:
        if os.path.exists(self._log_path) and self._try_load_sidecars():
            pass
        elif os.path.exists(self._log_path):
            with open(self._log_path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        self._apply(ClassifiedRecord.from_json(json.loads(line)))
        self._log = open(self._log_path, "a", encoding="utf-8")

    def _try_load_sidecars(self) -> bool:
        stamp_path = os.path.join(self.directory, "sidecar.stamp")
        try:
            with open(stamp_path, encoding="utf-8") as fh:
                stamp = json.load(fh)
            if stamp.get("log_size") != os.path.getsize(self._log_path):
                return False
            with open(os.path.join(self.directory, "index.json"), encoding="utf-8") as fh:
                raw_index = json.load(fh)
            with open(os.path.join(self.directory, "buckets.json"), encoding="utf-8") as fh:
                raw_buckets = json.load(fh)
            with open(self._log_path, encoding="utf-8") as fh:
                records = {}
                for line in fh:
                    line = line.strip()
                    if line:
                        rec = ClassifiedRecord.from_json(json.loads(line))
                        records[rec.id] = rec
        except (OSError, ValueError, KeyError):
            return False
        self._records = records
        self._index = {tok: set(ids) for tok, ids in raw_index.items()}
        self._buckets = {
            tuple(key.split("|", 3)): counts for key, counts in raw_buckets.items()
        }
        return True

    def close(self) -> None:
        if self._log is not None:
            self._log.close()
            self._log = None
        with open(os.path.join(self.directory, "index.json"), "w", encoding="utf-8") as fh:
            json.dump({tok: sorted(ids) for tok, ids in self._index.items()}, fh)
        with open(os.path.join(self.directory, "buckets.json"), "w", encoding="utf-8") as fh:
            json.dump({"|".join(key): counts for key, counts in self._buckets.items()}, fh)
        with open(os.path.join(self.directory, "sidecar.stamp"), "w", encoding="utf-8") as fh:
            json.dump({"log_size": os.path.getsize(self._log_path)}, fh)

    def __enter__(self) -> "RecordStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- writes ----------------------------------------------------------

    def _apply(self, record: ClassifiedRecord) -> None:
        old = self._records.get(record.id)
        if old is not None:
            self._unindex(old)
        self._records[record.id] = record
        for token in set(record.tokens):
            self._index.setdefault(token, set()).add(record.id)
        day = record.day().isoformat()
        for question, tasks in record.predictions.items():
            for task, pred in tasks.items():
                key = (record.language, day, question, task)
                counts = self._buckets.setdefault(key, {})
                counts[pred["label"]] = counts.get(pred["label"], 0) + 1

    def _unindex(self, record: ClassifiedRecord) -> None:
        for token in set(record.tokens):
            ids = self._index.get(token)
            if ids:
                ids.discard(record.id)
                if not ids:
                    del self._index[token]
        day = record.day().isoformat()
        for question, tasks in record.predictions.items():
            for task, pred in tasks.items():
                key = (record.language, day, question, task)
                counts = self._buckets.get(key)
                if counts:
                    counts[pred["label"]] -= 1
                    if counts[pred["label"]] == 0:
                        del counts[pred["label"]]
                    if not counts:
                        del self._buckets[key]

    def put(self, record: ClassifiedRecord) -> None:
        """Insert or replace (by id) a classified record."""
        if self._log is None:
            raise ValueError("store is closed")
        _validate(record)
        self._apply(record)
        self._log.write(json.dumps(record.to_json(), ensure_ascii=False) + "\n")
        self._log.flush()

    # -- reads -----------------------------------------------------------

    def __len__(self) -> int:
        return len(self._records)

    def query(
        self,
        keyword: str | None = None,
        date_from: date | None = None,
        date_to: date | None = None,
        language: str | None = None,
    ) -> list[ClassifiedRecord]:
        """Records whose normalized tokens contain the case-folded
        keyword (absent keyword = all), within the inclusive UTC day
        range, ordered by created_at."""
        if date_from is not None and date_to is not None and date_from > date_to:
            raise InvalidDateRange(f"{date_from} > {date_to}")
        if keyword is not None:
            ids = self._index.get(keyword.strip().casefold(), set())
            candidates = [self._records[i] for i in ids]
        else:
            candidates = list(self._records.values())
        out = []
        for rec in candidates:
            if language is not None and rec.language != language:
                continue
            day = rec.day()
            if date_from is not None and day < date_from:
                continue
            if date_to is not None and day > date_to:
                continue
            out.append(rec)
        out.sort(key=lambda r: (r.created_at, r.id))
        return out

    def aggregate(
        self,
        question: str,
        task: str,
        keyword: str | None = None,
        date_from: date | None = None,
        date_to: date | None = None,
        language: str | None = None,
    ) -> list[DayBucket]:
        """Day-wise label counts over the records matching the filter;
        days with no matches are omitted."""
        if question not in schema.QUESTION_IDS:
            raise schema.UnknownQuestion(f"unknown question id: {question!r}")
        if task not in schema.TASKS:
            raise schema.UnknownTask(f"unknown task: {task!r}")
        if date_from is not None and date_to is not None and date_from > date_to:
            raise InvalidDateRange(f"{date_from} > {date_to}")

        if keyword is None and language is not None:
            # Fast path straight from the day-count sidecar.
            by_day: dict[str, dict[str, int]] = {}
            for (lang, day, q, t), counts in self._buckets.items():
                if lang != language or q != question or t != task:
                    continue
                d = date.fromisoformat(day)
                if date_from is not None and d < date_from:
                    continue
                if date_to is not None and d > date_to:
                    continue
                merged = by_day.setdefault(day, {})
                for label, c in counts.items():
                    merged[label] = merged.get(label, 0) + c
            return [
                DayBucket(date=date.fromisoformat(day), question=question, task=task,
                          counts=dict(sorted(counts.items())))
                for day, counts in sorted(by_day.items())
            ]

        grouped: dict[date, dict[str, int]] = {}
        for rec in self.query(keyword=keyword, date_from=date_from,
                              date_to=date_to, language=language):
            pred = rec.predictions[question][task]
            counts = grouped.setdefault(rec.day(), {})
            counts[pred["label"]] = counts.get(pred["label"], 0) + 1
        return [
            DayBucket(date=day, question=question, task=task,
                      counts=dict(sorted(counts.items())))
            for day, counts in sorted(grouped.items())
        ]
