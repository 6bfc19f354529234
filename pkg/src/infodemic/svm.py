"""Linear SVM classifiers with calibrated probabilities.

Binary models are trained by dual coordinate descent on the L1-hinge
objective (1/2)||w||^2 + C * sum hinge(y_i (w.x_i + b)); the bias is
handled through the usual constant-feature augmentation, so it is
regularized along with the weights. Probabilities come from Platt
scaling fitted on a development set. Multiclass questions use one
one-vs-rest binary model per label; the binary task uses a single model
for the positive ("yes") label.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import schema
from .errors import InfodemicError
from .evaluation import weighted_metrics
from .features import SparseVector, TfidfModel, fit as tfidf_fit, transform
from .textprep import normalize

DEFAULT_C_GRID = (0.01, 0.1, 1.0, 10.0, 100.0)
CONVERGENCE_TOL = 1e-4
MAX_EPOCHS = 1000
# Decision score assigned to labels absent from (or covering all of) the
# training split; the calibrated probability collapses to ~0 (or ~1).
SENTINEL_SCORE = 1e6

BUNDLE_FORMAT_VERSION = 1


class SingleClass(InfodemicError):
    pass


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z)) if z < 700 else 1.0
    return math.exp(z) / (1.0 + math.exp(z)) if z > -700 else 0.0


@dataclass
class LinearBinaryModel:
    weights: np.ndarray  # dense over feature indices, excludes the bias slot
    bias: float
    C: float
    platt_a: float = 1.0
    platt_b: float = 0.0
    # Dual variables at convergence, kept for diagnostics/tests only;
    # not persisted in bundles.
    dual_coef: np.ndarray | None = None

    def decision(self, x: SparseVector) -> float:
        w = self.weights
        return sum(w[i] * v for i, v in x.entries.items()) + self.bias

    def probability(self, x: SparseVector) -> float:
        return _sigmoid(self.platt_a * self.decision(x) + self.platt_b)


def _as_rows(X: list[SparseVector], n_features: int):
    rows = []
    for x in X:
        if x.entries:
            idx = np.fromiter(x.entries.keys(), dtype=np.int64, count=len(x.entries))
            val = np.fromiter(x.entries.values(), dtype=np.float64, count=len(x.entries))
        else:
            idx = np.empty(0, dtype=np.int64)
            val = np.empty(0, dtype=np.float64)
        if idx.size and int(idx.max()) >= n_features:
            raise ValueError("feature index out of range for the given dimension")
        rows.append((idx, val))
    return rows


def train_binary(
    X: list[SparseVector],
    y: list[int],
    C: float,
    n_features: int | None = None,
    tol: float = CONVERGENCE_TOL,
    max_epochs: int = MAX_EPOCHS,
    seed: int = 0,
) -> LinearBinaryModel:
    """Train an uncalibrated L1-loss linear SVM by dual coordinate descent.

    Stops when the largest projected-gradient violation in an epoch drops
    below ``tol`` or after ``max_epochs`` passes; the epoch order is a
    seeded random permutation, so training is deterministic.
    """
    if C <= 0:
        raise ValueError("C must be positive")
    if len(X) != len(y) or len(X) < 2:
        raise ValueError("need |X| == |y| >= 2")
    ys = np.asarray(y, dtype=np.float64)
    if np.all(ys == ys[0]):
        raise SingleClass("training labels are constant")
    if not np.all(np.abs(ys) == 1.0):
        raise ValueError("labels must be +1/-1")

    if n_features is None:
        n_features = max((max(x.entries) + 1 for x in X if x.entries), default=0)
    rows = _as_rows(X, n_features)
    n = len(rows)
    # Augmented bias feature: constant 1 appended to every row.
    qii = np.array([float(val @ val) + 1.0 for _, val in rows])
    w = np.zeros(n_features + 1)
    alpha = np.zeros(n)
    rng = np.random.default_rng(seed)

    for _ in range(max_epochs):
        max_violation = 0.0
        for i in rng.permutation(n):
            idx, val = rows[i]
            yi = ys[i]
            g = yi * (float(w[idx] @ val) + w[-1]) - 1.0
            a = alpha[i]
            if a <= 0.0:
                pg = min(g, 0.0)
            elif a >= C:
                pg = max(g, 0.0)
            else:
                pg = g
            if abs(pg) > max_violation:
                max_violation = abs(pg)
            if abs(pg) > 1e-12:
                a_new = min(max(a - g / qii[i], 0.0), C)
                d = (a_new - a) * yi
                if d != 0.0:
                    w[idx] += d * val
                    w[-1] += d
                    alpha[i] = a_new
        if max_violation < tol:
            break

    return LinearBinaryModel(
        weights=w[:-1].copy(), bias=float(w[-1]), C=C, dual_coef=alpha
    )


def primal_objective(model: LinearBinaryModel, X: list[SparseVector], y: list[int]) -> float:
    """(1/2)||w||^2 + C * sum of hinge losses, as stated for training."""
    reg = 0.5 * float(model.weights @ model.weights)
    hinge = sum(max(0.0, 1.0 - yi * model.decision(x)) for x, yi in zip(X, y))
    return reg + model.C * hinge


def calibrate(
    model: LinearBinaryModel,
    X_dev: list[SparseVector],
    y_dev: list[int],
    max_iter: int = 100,
) -> LinearBinaryModel:
    """Fit Platt scaling sigmoid(a*s + b) over dev decision scores.

    Uses Newton iterations on the log-loss with the standard smoothed
    targets (positives -> (N+ + 1)/(N+ + 2), negatives -> 1/(N- + 2)).
    """
    ys = np.asarray(y_dev, dtype=np.float64)
    n_pos = int(np.sum(ys > 0))
    n_neg = len(ys) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("calibration dev set has a single class")

    scores = np.array([model.decision(x) for x in X_dev])
    t_pos = (n_pos + 1.0) / (n_pos + 2.0)
    t_neg = 1.0 / (n_neg + 2.0)
    targets = np.where(ys > 0, t_pos, t_neg)

    a = 0.0
    b = math.log((n_pos + 1.0) / (n_neg + 1.0))

    def loss(av: float, bv: float) -> float:
        z = av * scores + bv
        # log(1 + e^z) - t*z, numerically stable for both signs of z
        return float(np.sum(np.logaddexp(0.0, z) - targets * z))

    current = loss(a, b)
    for _ in range(max_iter):
        z = a * scores + b
        p = 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))
        d = p - targets
        g_a = float(d @ scores)
        g_b = float(np.sum(d))
        if max(abs(g_a), abs(g_b)) < 1e-10:
            break
        h = p * (1.0 - p)
        h_aa = float(h @ (scores * scores)) + 1e-12
        h_ab = float(h @ scores)
        h_bb = float(np.sum(h)) + 1e-12
        det = h_aa * h_bb - h_ab * h_ab
        if det <= 0:
            break
        step_a = (h_bb * g_a - h_ab * g_b) / det
        step_b = (h_aa * g_b - h_ab * g_a) / det
        # Backtracking keeps the iteration inside the convex bowl.
        scale = 1.0
        for _ in range(30):
            cand = loss(a - scale * step_a, b - scale * step_b)
            if cand <= current + 1e-15:
                a -= scale * step_a
                b -= scale * step_b
                current = cand
                break
            scale *= 0.5
        else:
            break

    return replace(model, platt_a=float(a), platt_b=float(b))


@dataclass
class Prediction:
    question: str
    label: str
    probability: float
    label_dictionary: dict[str, float]


@dataclass
class QuestionModel:
    question: str
    task: str
    labels: list[str]
    models: dict[str, LinearBinaryModel]
    tfidf: TfidfModel
    C: float = 1.0
    language: str = ""
    metrics: dict = field(default_factory=dict)

    def predict(self, text: str) -> Prediction:
        return predict(self, text)


def _sentinel_model(n_features: int, positive: bool, C: float) -> LinearBinaryModel:
    bias = SENTINEL_SCORE if positive else -SENTINEL_SCORE
    return LinearBinaryModel(weights=np.zeros(n_features), bias=bias, C=C)


def _raw_argmax(model: QuestionModel, x: SparseVector) -> str:
    if model.task == "binary":
        return "yes" if model.models["yes"].decision(x) > 0 else "no"
    best_label = model.labels[0]
    best_score = -math.inf
    for label in model.labels:
        s = model.models[label].decision(x)
        if s > best_score:
            best_score = s
            best_label = label
    return best_label


def train_question(
    train_rows: list[tuple[str, str]],
    dev_rows: list[tuple[str, str]],
    question: str,
    task: str,
    c_grid: tuple[float, ...] = DEFAULT_C_GRID,
    min_df: int = 2,
    ngram_range: tuple[int, int] = (1, 2),
    seed: int = 0,
    language: str = "",
) -> QuestionModel:
    """Grid-search C on the dev split, then calibrate per-label models.

    Rows are (raw text, fine-grained label) pairs; for the binary task
    the fine labels are collapsed through the schema mapping first.
    Schema labels missing from the training split get a constant
    large-negative score; a label covering every training row gets a
    constant large-positive one.
    """
    labels = schema.labels(question, task)
    if task == "binary":
        train_rows = [(t, schema.to_binary(question, lab)) for t, lab in train_rows]
        dev_rows = [(t, schema.to_binary(question, lab)) for t, lab in dev_rows]
    if len({lab for _, lab in train_rows}) < 2:
        raise SingleClass(f"{question}/{task}: training split has a single label")

    norm_train = [normalize(t) for t, _ in train_rows]
    tfidf = tfidf_fit(norm_train, min_df=min_df, ngram_range=ngram_range)
    n_features = len(tfidf.vocabulary)
    X_train = [transform(tfidf, doc) for doc in norm_train]
    X_dev = [transform(tfidf, normalize(t)) for t, _ in dev_rows]
    y_train = [lab for _, lab in train_rows]
    y_dev = [lab for _, lab in dev_rows]
    model_labels = ["yes"] if task == "binary" else labels

    def fit_ovr(c: float) -> dict[str, LinearBinaryModel]:
        fitted: dict[str, LinearBinaryModel] = {}
        for pos_label in model_labels:
            signs = [1 if lab == pos_label else -1 for lab in y_train]
            n_pos = sum(1 for s in signs if s > 0)
            if n_pos == 0:
                fitted[pos_label] = _sentinel_model(n_features, False, c)
            elif n_pos == len(signs):
                fitted[pos_label] = _sentinel_model(n_features, True, c)
            else:
                fitted[pos_label] = train_binary(
                    X_train, signs, c, n_features=n_features, seed=seed
                )
        return fitted

    best_c = None
    best_f1 = -1.0
    best_models: dict[str, LinearBinaryModel] = {}
    grid_results = {}
    for c in c_grid:
        candidate = QuestionModel(
            question=question, task=task, labels=labels,
            models=fit_ovr(c), tfidf=tfidf, C=c,
        )
        preds = [_raw_argmax(candidate, x) for x in X_dev]
        f1 = weighted_metrics(y_dev, preds)["weighted_f1"]
        grid_results[repr(c)] = f1
        if f1 > best_f1:
            best_f1 = f1
            best_c = c
            best_models = candidate.models

    calibrated: dict[str, LinearBinaryModel] = {}
    for pos_label, bm in best_models.items():
        signs = [1 if lab == pos_label else -1 for lab in y_dev]
        try:
            calibrated[pos_label] = calibrate(bm, X_dev, signs)
        except SingleClass:
            # Dev split lacks one of the two sides: fall back to the raw
            # sigmoid of the decision score.
            calibrated[pos_label] = replace(bm, platt_a=1.0, platt_b=0.0)

    return QuestionModel(
        question=question,
        task=task,
        labels=labels,
        models=calibrated,
        tfidf=tfidf,
        C=float(best_c),
        language=language,
        metrics={"dev_weighted_f1": best_f1, "C": best_c, "grid": grid_results},
    )


def predict(model: QuestionModel, text: str) -> Prediction:
    """Classify raw text: normalize, vectorize, calibrate, renormalize.

    The label dictionary always covers the full schema label list and
    sums to 1; ties are broken by schema label order.
    """
    x = transform(model.tfidf, normalize(text))
    if model.task == "binary":
        p_yes = model.models["yes"].probability(x)
        raw = {"no": 1.0 - p_yes, "yes": p_yes}
    else:
        raw = {label: model.models[label].probability(x) for label in model.labels}
    total = sum(raw.values())
    if total <= 0.0:
        dictionary = {label: 1.0 / len(model.labels) for label in model.labels}
    else:
        dictionary = {label: p / total for label, p in raw.items()}
    best_label = model.labels[0]
    best_p = dictionary[best_label]
    for label in model.labels:
        if dictionary[label] > best_p:
            best_p = dictionary[label]
            best_label = label
    return Prediction(
        question=model.question,
        label=best_label,
        probability=best_p,
        label_dictionary=dictionary,
    )


def save_bundle(model: QuestionModel, bundle_dir: str) -> None:
    """Write a model bundle: manifest, vocabulary, idf, classifiers."""
    os.makedirs(bundle_dir, exist_ok=True)
    manifest = {
        "format_version": BUNDLE_FORMAT_VERSION,
        "schema_version": schema.export_schema()["version"],
        "language": model.language,
        "question": model.question,
        "task": model.task,
        "labels": model.labels,
        "C": model.C,
        "metrics": model.metrics,
        "n_features": len(model.tfidf.vocabulary),
        "n_documents": model.tfidf.n_documents,
        "min_df": model.tfidf.min_df,
        "ngram_range": list(model.tfidf.ngram_range),
    }
    with open(os.path.join(bundle_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")
    by_index = sorted(model.tfidf.vocabulary.items(), key=lambda kv: kv[1])
    with open(os.path.join(bundle_dir, "vocabulary.tsv"), "w", encoding="utf-8") as fh:
        for g, i in by_index:
            fh.write(f"{g}\t{i}\n")
    with open(os.path.join(bundle_dir, "idf.txt"), "w", encoding="utf-8") as fh:
        for v in model.tfidf.idf:
            fh.write(f"{v!r}\n")
    classifiers = []
    for label in model.models:
        bm = model.models[label]
        nz = np.nonzero(bm.weights)[0]
        classifiers.append(
            {
                "label": label,
                "bias": bm.bias,
                "C": bm.C,
                "platt_a": bm.platt_a,
                "platt_b": bm.platt_b,
                "weight_indices": [int(i) for i in nz],
                "weight_values": [float(bm.weights[i]) for i in nz],
            }
        )
    with open(os.path.join(bundle_dir, "classifiers.json"), "w", encoding="utf-8") as fh:
        json.dump(classifiers, fh, ensure_ascii=False, indent=2)
        fh.write("\n")


def load_bundle(bundle_dir: str) -> QuestionModel:
    with open(os.path.join(bundle_dir, "manifest.json"), encoding="utf-8") as fh:
        manifest = json.load(fh)
    if manifest["format_version"] != BUNDLE_FORMAT_VERSION:
        raise InfodemicError(
            f"unsupported bundle format version {manifest['format_version']}"
        )
    vocabulary: dict[str, int] = {}
    with open(os.path.join(bundle_dir, "vocabulary.tsv"), encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            g, i = line.rsplit("\t", 1)
            vocabulary[g] = int(i)
    with open(os.path.join(bundle_dir, "idf.txt"), encoding="utf-8") as fh:
        idf = [float(line) for line in fh if line.strip()]
    tfidf = TfidfModel(
        vocabulary=vocabulary,
        idf=idf,
        n_documents=manifest["n_documents"],
        min_df=manifest["min_df"],
        ngram_range=tuple(manifest["ngram_range"]),
    )
    n_features = manifest["n_features"]
    models: dict[str, LinearBinaryModel] = {}
    with open(os.path.join(bundle_dir, "classifiers.json"), encoding="utf-8") as fh:
        for entry in json.load(fh):
            w = np.zeros(n_features)
            for i, v in zip(entry["weight_indices"], entry["weight_values"]):
                w[i] = v
            models[entry["label"]] = LinearBinaryModel(
                weights=w,
                bias=entry["bias"],
                C=entry["C"],
                platt_a=entry["platt_a"],
                platt_b=entry["platt_b"],
            )
    return QuestionModel(
        question=manifest["question"],
        task=manifest["task"],
        labels=list(manifest["labels"]),
        models=models,
        tfidf=tfidf,
        C=manifest["C"],
        language=manifest["language"],
        metrics=manifest.get("metrics", {}),
    )


def bundle_name(question: str, task: str) -> str:
    return f"{question.lower()}_{task}"


def save_model_set(
    models: dict[tuple[str, str], QuestionModel], model_dir: str, language: str
) -> None:
    for (question, task), model in models.items():
        save_bundle(model, os.path.join(model_dir, language, bundle_name(question, task)))


def load_model_set(model_dir: str) -> dict[tuple[str, str, str], QuestionModel]:
    """Scan a model directory: {language}/{question}_{task}/ bundles."""
    loaded: dict[tuple[str, str, str], QuestionModel] = {}
    if not os.path.isdir(model_dir):
        return loaded
    for language in sorted(os.listdir(model_dir)):
        lang_dir = os.path.join(model_dir, language)
        if not os.path.isdir(lang_dir):
            continue
        for name in sorted(os.listdir(lang_dir)):
            bundle_dir = os.path.join(lang_dir, name)
            if os.path.isfile(os.path.join(bundle_dir, "manifest.json")):
                model = load_bundle(bundle_dir)
                loaded[(language, model.question, model.task)] = model
    return loaded
