"""Shared fixtures: synthetic separable corpora and trained model sets.

Synthetic rows plant per-label signature tokens on top of a small
language-flavored background vocabulary, so every question is linearly
separable and tests can rely on near-perfect dev scores.
"""

from __future__ import annotations

import random

import pytest

from infodemic import schema, svm
from infodemic.evaluation import DatasetRow, LabeledDataset

BACKGROUND = {
    "en": ["the", "virus", "news", "report", "today", "people", "health", "city"],
    "nl": ["de", "het", "vandaag", "nieuws", "mensen", "gezondheid", "stad", "nieuw"],
    "bg": ["новина", "днес", "хора", "здраве", "вирус", "град", "доклад", "нови"],
    "ar": ["خبر", "اليوم", "الناس", "صحة", "فيروس", "مدينة", "تقرير", "جديد"],
}


def signature_tokens(question: str, label_index: int) -> list[str]:
    q = question.lower()
    return [f"{q}sig{label_index}a", f"{q}sig{label_index}b"]


def make_row_text(language: str, labels: dict[str, str], rng: random.Random) -> str:
    words = rng.choices(BACKGROUND[language], k=3)
    for question, label in labels.items():
        idx = schema.labels(question, "multiclass").index(label)
        words.extend(signature_tokens(question, idx))
    rng.shuffle(words)
    return " ".join(words)


def make_dataset(
    language: str = "en",
    n_rows: int = 200,
    seed: int = 0,
    questions: tuple[str, ...] = schema.QUESTION_IDS,
    absent: dict[str, float] | None = None,
) -> LabeledDataset:
    """Separable synthetic dataset; ``absent`` maps question -> fraction
    of rows left unannotated for it."""
    rng = random.Random(seed)
    absent = absent or {}
    rows = []
    for i in range(n_rows):
        labels = {}
        for question in questions:
            if rng.random() < absent.get(question, 0.0):
                continue
            fine = schema.labels(question, "multiclass")
            labels[question] = fine[i % len(fine)]
        rows.append(DatasetRow(text=make_row_text(language, labels, rng), labels=labels))
    return LabeledDataset(language=language, rows=rows)


def question_rows(
    question: str, n: int, language: str = "en", seed: int = 0
) -> list[tuple[str, str]]:
    """(text, fine label) pairs for a single question, labels cycling."""
    rng = random.Random(seed)
    fine = schema.labels(question, "multiclass")
    rows = []
    for i in range(n):
        label = fine[i % len(fine)]
        rows.append((make_row_text(language, {question: label}, rng), label))
    return rows


def train_language_models(
    language: str,
    n_rows: int = 110,
    c_grid: tuple[float, ...] = (1.0,),
    seed: int = 7,
) -> dict[tuple[str, str], svm.QuestionModel]:
    models = {}
    for question in schema.QUESTION_IDS:
        rows = question_rows(question, n_rows, language=language, seed=seed)
        cut = int(0.8 * len(rows))
        for task in schema.TASKS:
            models[(question, task)] = svm.train_question(
                rows[:cut], rows[cut:], question, task,
                c_grid=c_grid, min_df=1, language=language,
            )
    return models


@pytest.fixture(scope="session")
def en_models() -> dict[tuple[str, str], svm.QuestionModel]:
    return train_language_models("en")


@pytest.fixture(scope="session")
def model_registry(en_models) -> dict[tuple[str, str, str], svm.QuestionModel]:
    """All four languages, keyed (language, question, task)."""
    registry = {}
    for (q, t), m in en_models.items():
        registry[("en", q, t)] = m
    for language in ("ar", "bg", "nl"):
        for (q, t), m in train_language_models(language).items():
            registry[(language, q, t)] = m
    return registry
