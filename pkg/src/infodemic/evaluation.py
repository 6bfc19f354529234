"""Dataset loading, stratified splitting, weighted-average metrics, and
the majority baseline used for evaluation reports.

"Weighted average" means per-class precision/recall/F1 weighted by each
class's true support, plus plain accuracy. The splitter is a joint
iterative stratification over all seven question labels with a fixed
default seed, so splits are reproducible.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field

from . import schema
from .errors import InfodemicError

SPLIT_NAMES = ("train", "dev", "test")
SPLIT_PROPORTIONS = (0.7, 0.1, 0.2)
DEFAULT_SPLIT_SEED = 20200401


class ParseError(InfodemicError):
    pass


class LengthMismatch(InfodemicError):
    pass


class MissingModel(InfodemicError):
    pass


class MissingData(InfodemicError):
    pass


@dataclass
class DatasetRow:
    text: str
    labels: dict[str, str]  # question id -> fine label; absent questions omitted


@dataclass
class LabeledDataset:
    language: str
    rows: list[DatasetRow] = field(default_factory=list)

    def question_count(self, question: str) -> int:
        return sum(1 for row in self.rows if question in row.labels)


@dataclass
class SplitAssignment:
    splits: dict[int, str]  # row index -> train|dev|test
    seed: int

    def rows_in(self, split: str) -> list[int]:
        return sorted(i for i, s in self.splits.items() if s == split)


def load_dataset(path: str, language: str) -> LabeledDataset:
    """Parse a tab-separated dataset: text, then one column per question
    Q1..Q7 (empty column = question not annotated for that row).

    Label columns accept either the verbatim label text or its ASCII code.
    """
    rows: list[DatasetRow] = []
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read dataset {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 1 + len(schema.QUESTION_IDS):
                raise ParseError(
                    f"{path}:{lineno}: expected {1 + len(schema.QUESTION_IDS)} "
                    f"tab-separated columns, got {len(fields)}"
                )
            text = fields[0]
            if not text:
                raise ParseError(f"{path}:{lineno}: empty text column")
            labels: dict[str, str] = {}
            for question, value in zip(schema.QUESTION_IDS, fields[1:]):
                if not value:
                    continue
                try:
                    labels[question] = schema.resolve_label(question, value)
                except schema.UnknownLabel as exc:
                    raise schema.UnknownLabel(f"{path}:{lineno}: {exc}") from None
            rows.append(DatasetRow(text=text, labels=labels))
    return LabeledDataset(language=language, rows=rows)


def _integer_targets(n: int) -> list[int]:
    """Split sizes by largest remainder, so each is within 1 of n*p."""
    raw = [n * p for p in SPLIT_PROPORTIONS]
    base = [int(x) for x in raw]
    remainder = n - sum(base)
    order = sorted(range(len(raw)), key=lambda j: raw[j] - base[j], reverse=True)
    for j in order[:remainder]:
        base[j] += 1
    return base


def stratified_split(dataset: LabeledDataset, seed: int = DEFAULT_SPLIT_SEED) -> SplitAssignment:
    """Joint iterative stratification of all question labels into
    70/10/20 train/dev/test.

    Repeatedly takes the (question, label) pair with the fewest remaining
    rows and assigns each of its rows to the split with the greatest
    remaining demand for that pair; ties go to the split with more
    remaining overall capacity, then to a seeded random draw. Rows with
    no labels at all are distributed by remaining capacity at the end.
    """
    rng = random.Random(seed)
    n = len(dataset.rows)
    capacity = _integer_targets(n)

    labelsets: dict[int, frozenset[tuple[str, str]]] = {}
    label_rows: dict[tuple[str, str], set[int]] = {}
    for i, row in enumerate(dataset.rows):
        ls = frozenset(row.labels.items())
        labelsets[i] = ls
        for key in ls:
            label_rows.setdefault(key, set()).add(i)

    desired: dict[tuple[str, str], list[float]] = {
        key: [len(rows) * p for p in SPLIT_PROPORTIONS] for key, rows in label_rows.items()
    }

    assignment: dict[int, str] = {}

    def eligible() -> list[int]:
        return [j for j in range(len(SPLIT_NAMES)) if capacity[j] > 0]

    def assign(i: int, j: int) -> None:
        assignment[i] = SPLIT_NAMES[j]
        capacity[j] -= 1
        for key in labelsets[i]:
            desired[key][j] -= 1
            label_rows[key].discard(i)

    while True:
        remaining = [(len(rows), key) for key, rows in label_rows.items() if rows]
        if not remaining:
            break
        _, key = min(remaining, key=lambda ck: (ck[0], ck[1]))
        for i in sorted(label_rows[key]):
            splits = eligible()
            best_demand = max(desired[key][j] for j in splits)
            splits = [j for j in splits if desired[key][j] == best_demand]
            if len(splits) > 1:
                best_cap = max(capacity[j] for j in splits)
                splits = [j for j in splits if capacity[j] == best_cap]
            assign(i, rng.choice(splits))

    for i in range(n):
        if i not in assignment:
            splits = eligible()
            best_cap = max(capacity[j] for j in splits)
            assign(i, rng.choice([j for j in splits if capacity[j] == best_cap]))

    return SplitAssignment(splits=assignment, seed=seed)


def weighted_metrics(y_true: list[str], y_pred: list[str]) -> dict[str, float]:
    """Support-weighted precision/recall/F1 plus accuracy.

    Classes absent from y_true carry zero weight; divisions by zero
    yield 0 for the affected class metric.
    """
    if len(y_true) != len(y_pred):
        raise LengthMismatch(f"{len(y_true)} true labels vs {len(y_pred)} predictions")
    if not y_true:
        raise LengthMismatch("need at least one labeled item")
    support = Counter(y_true)
    pred_counts = Counter(y_pred)
    tp = Counter(t for t, p in zip(y_true, y_pred) if t == p)
    n = len(y_true)
    w_p = w_r = w_f = 0.0
    for cls, sup in support.items():
        tp_c = tp.get(cls, 0)
        pred_c = pred_counts.get(cls, 0)
        precision = tp_c / pred_c if pred_c else 0.0
        recall = tp_c / sup
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        w_p += sup * precision
        w_r += sup * recall
        w_f += sup * f1
    accuracy = sum(tp.values()) / n
    return {
        "weighted_precision": w_p / n,
        "weighted_recall": w_r / n,
        "weighted_f1": w_f / n,
        "accuracy": accuracy,
    }


def majority_baseline(
    train_labels: list[str],
    eval_true: list[str],
    label_order: list[str] | None = None,
) -> dict[str, float]:
    """Predict the most frequent training label for every eval row.

    Frequency ties are broken by position in ``label_order`` (schema
    order) when given, otherwise lexicographically.
    """
    if not train_labels:
        raise LengthMismatch("majority baseline needs non-empty training labels")
    counts = Counter(train_labels)
    if label_order is None:
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    else:
        pos = {lab: i for i, lab in enumerate(label_order)}
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], pos.get(kv[0], len(pos))))
    majority = ranked[0][0]
    return weighted_metrics(eval_true, [majority] * len(eval_true))


def question_pools(
    dataset: LabeledDataset, assignment: SplitAssignment, question: str
) -> dict[str, list[tuple[str, str]]]:
    """Per-split (text, fine label) rows for one question.

    Rows lacking the question's label are excluded from its pools, which
    is why per-question totals differ.
    """
    pools: dict[str, list[tuple[str, str]]] = {name: [] for name in SPLIT_NAMES}
    for i, row in enumerate(dataset.rows):
        label = row.labels.get(question)
        if label is None:
            continue
        pools[assignment.splits[i]].append((row.text, label))
    return pools


# Report rows follow the published layout: a binary panel with all seven
# questions and a multiclass panel without Q1 (its fine-grained task is
# already binary).
REPORT_ROWS: list[tuple[str, str]] = [(q, "binary") for q in schema.QUESTION_IDS] + [
    (q, "multiclass") for q in schema.QUESTION_IDS if q != "Q1"
]


def report(models: dict, dataset: LabeledDataset, assignment: SplitAssignment) -> dict:
    """Evaluate majority baseline and SVM weighted-F1 per question/task
    on the test split.

    ``models`` maps (question, task) to a trained question model. Rows
    whose test pool is empty carry a MissingData marker instead of
    scores; a missing model raises.
    """
    rows = []
    for question, task in REPORT_ROWS:
        if (question, task) not in models:
            raise MissingModel(f"no model for ({question}, {task})")
        model = models[(question, task)]
        pools = question_pools(dataset, assignment, question)
        if task == "binary":
            convert = lambda lab: schema.to_binary(question, lab)  # noqa: E731
        else:
            convert = lambda lab: lab  # noqa: E731
        train_labels = [convert(lab) for _, lab in pools["train"]]
        test_rows = pools["test"]
        entry = {
            "question": question,
            "task": task,
            "n_classes": len(schema.labels(question, task)),
            "n_test": len(test_rows),
        }
        if not test_rows or not train_labels:
            entry["error"] = "MissingData"
            rows.append(entry)
            continue
        y_true = [convert(lab) for _, lab in test_rows]
        y_pred = [model.predict(text).label for text, _ in test_rows]
        entry["majority_f1"] = majority_baseline(
            train_labels, y_true, label_order=schema.labels(question, task)
        )["weighted_f1"]
        entry["svm_f1"] = weighted_metrics(y_true, y_pred)["weighted_f1"]
        rows.append(entry)
    return {"language": dataset.language, "rows": rows}


def render_report(rep: dict) -> str:
    """Aligned plain-text table with Binary and Multiclass panels."""
    lines = [f"Language: {rep['language']}"]
    header = f"{'Question':<10} {'Cl.':>4} {'Maj':>7} {'SVM':>7}"
    for panel in ("binary", "multiclass"):
        lines.append("")
        lines.append(panel.capitalize())
        lines.append(header)
        for entry in rep["rows"]:
            if entry["task"] != panel:
                continue
            if "error" in entry:
                maj = svm = f"{entry['error']:>7}"
            else:
                maj = f"{100 * entry['majority_f1']:7.1f}"
                svm = f"{100 * entry['svm_f1']:7.1f}"
            lines.append(f"{entry['question']:<10} {entry['n_classes']:>4} {maj} {svm}")
    return "\n".join(lines) + "\n"
