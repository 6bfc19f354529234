"""Asynchronous classification HTTP service.

POST /api/v1/classify stores a pending job and returns an opaque key
immediately; workers classify the text across all seven questions and a
later GET /api/v1/classify/{key}?language=xx returns the results (or a
202 while pending). The analytics store, when configured, is exposed
under /api/v1/records and /api/v1/aggregates. Jobs expire after a TTL.
"""

from __future__ import annotations

import secrets
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from datetime import date

from fastapi import Body, FastAPI
from fastapi.responses import JSONResponse

from . import schema
from .langid import SUPPORTED_LANGUAGES
from .store import InvalidDateRange, RecordStore
from .svm import QuestionModel

DEFAULT_TTL_SECONDS = 24 * 3600
DEFAULT_WORKERS = 2


@dataclass
class Job:
    key: str
    text: str
    language: str
    task: str
    state: str = "pending"  # pending | done | failed
    result: list[dict] | None = None
    error: str | None = None
    submitted_at: float = field(default_factory=time.time)


class JobStore:
    """Synchronized in-memory job map with TTL expiry."""

    def __init__(self, ttl_seconds: float = DEFAULT_TTL_SECONDS):
        self.ttl_seconds = ttl_seconds
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()

    def create(self, text: str, language: str, task: str) -> Job:
        job = Job(key=secrets.token_hex(16), text=text, language=language, task=task)
        with self._lock:
            self._purge()
            self._jobs[job.key] = job
        return job

    def get(self, key: str) -> Job | None:
        with self._lock:
            self._purge()
            return self._jobs.get(key)

    def finish(self, key: str, result: list[dict]) -> None:
        with self._lock:
            job = self._jobs.get(key)
            if job is not None and job.state == "pending":
                job.result = result
                job.state = "done"

    def fail(self, key: str, error: str) -> None:
        with self._lock:
            job = self._jobs.get(key)
            if job is not None and job.state == "pending":
                job.error = error
                job.state = "failed"

    def _purge(self) -> None:
        cutoff = time.time() - self.ttl_seconds
        expired = [k for k, job in self._jobs.items() if job.submitted_at < cutoff]
        for k in expired:
            del self._jobs[k]


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": code, "message": message})


def available_languages(models: dict[tuple[str, str, str], QuestionModel]) -> list[str]:
    """Languages with a complete 7x2 model set."""
    complete = []
    for lang in SUPPORTED_LANGUAGES:
        if all(
            (lang, q, t) in models
            for q in schema.QUESTION_IDS
            for t in schema.TASKS
        ):
            complete.append(lang)
    return complete


def create_app(
    models: dict[tuple[str, str, str], QuestionModel],
    record_store: RecordStore | None = None,
    workers: int = DEFAULT_WORKERS,
    ttl_seconds: float = DEFAULT_TTL_SECONDS,
) -> FastAPI:
    """Build the service around a loaded model set keyed by
    (language, question, task)."""
    jobs = JobStore(ttl_seconds=ttl_seconds)
    executor = ThreadPoolExecutor(max_workers=workers)

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        yield
        executor.shutdown(wait=False, cancel_futures=True)

    app = FastAPI(title="infodemic classification service", lifespan=lifespan)
    app.state.jobs = jobs
    app.state.executor = executor

    def run_job(key: str) -> None:
        job = jobs.get(key)
        if job is None:
            return
        try:
            results = []
            for question in schema.QUESTION_IDS:
                pred = models[(job.language, question, job.task)].predict(job.text)
                results.append(
                    {
                        "question": question,
                        "label": pred.label,
                        "probability": pred.probability,
                        "labels": pred.label_dictionary,
                    }
                )
            jobs.finish(key, results)
        except Exception as exc:  # noqa: BLE001 - job must record any failure
            jobs.fail(key, str(exc))

    @app.post("/api/v1/classify")
    def submit(payload: dict = Body(...)):
        text = payload.get("text")
        language = payload.get("language")
        task = payload.get("task")
        if language not in SUPPORTED_LANGUAGES:
            return _error(400, "UnsupportedLanguage",
                          f"language must be one of {', '.join(SUPPORTED_LANGUAGES)}")
        if task not in schema.TASKS:
            return _error(400, "UnsupportedTask",
                          f"task must be one of {', '.join(schema.TASKS)}")
        if not isinstance(text, str) or not text.strip():
            return _error(400, "EmptyText", "text must be a non-empty string")
        if any((language, q, task) not in models for q in schema.QUESTION_IDS):
            return _error(503, "ModelsNotLoaded",
                          f"no loaded model set for ({language}, {task})")
        job = jobs.create(text=text, language=language, task=task)
        executor.submit(run_job, job.key)
        return {"key": job.key, "message": "success"}

    @app.get("/api/v1/classify/{key}")
    def fetch(key: str, language: str | None = None):
        job = jobs.get(key)
        if job is None:
            return _error(404, "UnknownKey", "no job with this key (it may have expired)")
        if language is None:
            return _error(400, "MissingLanguage", "language query parameter is required")
        if language != job.language:
            return _error(400, "LanguageMismatch",
                          f"job was submitted with language {job.language}")
        if job.state == "pending":
            return JSONResponse(status_code=202,
                                content={"key": key, "status": "pending"})
        if job.state == "failed":
            return JSONResponse(status_code=500,
                                content={"key": key, "status": "failed",
                                         "error": job.error})
        return {"key": key, "status": "done", "results": job.result}

    @app.get("/api/v1/schema")
    def get_schema():
        return schema.export_schema()

    @app.get("/api/v1/health")
    def health():
        return {"status": "ok", "languages": available_languages(models)}

    def _parse_range(date_from: str | None, date_to: str | None):
        try:
            lo = date.fromisoformat(date_from) if date_from else None
            hi = date.fromisoformat(date_to) if date_to else None
        except ValueError as exc:
            raise InvalidDateRange(str(exc)) from exc
        if lo is not None and hi is not None and lo > hi:
            raise InvalidDateRange(f"{lo} > {hi}")
        return lo, hi

    @app.get("/api/v1/records")
    def records(
        keyword: str | None = None,
        date_from: str | None = None,
        date_to: str | None = None,
        language: str | None = None,
        limit: int = 1000,
    ):
        if record_store is None:
            return _error(503, "StoreNotConfigured", "no record store attached")
        try:
            lo, hi = _parse_range(date_from, date_to)
            matches = record_store.query(keyword=keyword, date_from=lo,
                                         date_to=hi, language=language)
        except InvalidDateRange as exc:
            return _error(400, "InvalidDateRange", str(exc))
        return {
            "count": len(matches),
            "records": [rec.to_json() for rec in matches[:limit]],
        }

    @app.get("/api/v1/aggregates")
    def aggregates(
        question: str,
        task: str,
        keyword: str | None = None,
        date_from: str | None = None,
        date_to: str | None = None,
        language: str | None = None,
    ):
        if record_store is None:
            return _error(503, "StoreNotConfigured", "no record store attached")
        try:
            lo, hi = _parse_range(date_from, date_to)
            buckets = record_store.aggregate(
                question=question, task=task, keyword=keyword,
                date_from=lo, date_to=hi, language=language,
            )
        except InvalidDateRange as exc:
            return _error(400, "InvalidDateRange", str(exc))
        except schema.UnknownQuestion as exc:
            return _error(400, "UnknownQuestion", str(exc))
        except schema.UnknownTask as exc:
            return _error(400, "UnknownTask", str(exc))
        return {
            "question": question,
            "task": task,
            "buckets": [
                {"date": b.date.isoformat(), "counts": b.counts} for b in buckets
            ],
        }

    return app
