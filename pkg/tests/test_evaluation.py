import random
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from infodemic import schema
from infodemic.evaluation import (
    LengthMismatch,
    MissingModel,
    ParseError,
    load_dataset,
    majority_baseline,
    question_pools,
    render_report,
    report,
    stratified_split,
    weighted_metrics,
)
from infodemic.svm import train_question

from conftest import make_dataset, question_rows


def write_dataset(tmp_path, rows):
    path = tmp_path / "data.tsv"
    lines = []
    for text, labels in rows:
        fields = [text] + [labels.get(q, "") for q in schema.QUESTION_IDS]
        lines.append("\t".join(fields))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


class TestLoadDataset:
    def test_well_formed_file(self, tmp_path):
        path = write_dataset(
            tmp_path,
            [
                ("first tweet", {"Q1": "yes"}),
                ("second tweet", {"Q1": "no", "Q2": "Not sure"}),
                ("third tweet", {}),
            ],
        )
        ds = load_dataset(path, "en")
        assert len(ds.rows) == 3
        assert ds.rows[1].labels["Q2"] == "Not sure"

    def test_unknown_label_includes_line_number(self, tmp_path):
        path = write_dataset(
            tmp_path,
            [("ok tweet", {"Q1": "yes"}), ("bad tweet", {"Q2": "maybe"})],
        )
        with pytest.raises(schema.UnknownLabel, match=":2"):
            load_dataset(path, "en")

    def test_absent_labels_change_per_question_counts(self, tmp_path):
        rows = [(f"tweet {i}", {"Q1": "yes"}) for i in range(5)]
        rows[0][1]["Q2"] = "Not sure"
        rows[1][1]["Q2"] = "Not sure"
        rows[2][1]["Q2"] = "Not sure"
        path = write_dataset(tmp_path, rows)
        ds = load_dataset(path, "en")
        assert ds.question_count("Q1") == 5
        assert ds.question_count("Q2") == 3

    def test_wrong_column_count(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("just text with no labels\n", encoding="utf-8")
        with pytest.raises(ParseError, match=":1"):
            load_dataset(str(path), "en")

    def test_accepts_label_codes(self, tmp_path):
        path = write_dataset(tmp_path, [("tweet", {"Q6": "q6_yes_panic"})])
        ds = load_dataset(path, "en")
        assert ds.rows[0].labels["Q6"] == "YES, panic"

    def test_missing_file(self):
        with pytest.raises(ParseError, match="no/such/file"):
            load_dataset("no/such/file.tsv", "en")


class TestStratifiedSplit:
    def test_identical_rows_split_7_1_2(self):
        ds = make_dataset(n_rows=10, seed=1, questions=("Q1",))
        for row in ds.rows:
            row.labels["Q1"] = "yes"
        assignment = stratified_split(ds)
        sizes = Counter(assignment.splits.values())
        assert sizes == {"train": 7, "dev": 1, "test": 2}

    def test_deterministic_for_seed(self):
        ds = make_dataset(n_rows=97, seed=2)
        a = stratified_split(ds, seed=99)
        b = stratified_split(ds, seed=99)
        assert a.splits == b.splits

    def test_partition(self):
        ds = make_dataset(n_rows=143, seed=3)
        assignment = stratified_split(ds)
        assert sorted(assignment.splits) == list(range(143))
        assert set(assignment.splits.values()) <= {"train", "dev", "test"}

    def test_rare_label_proportions_preserved(self):
        # 10% of rows carry the rare Q1 label; each split must stay
        # within 5 percentage points of that.
        rng = random.Random(4)
        ds = make_dataset(n_rows=200, seed=4, questions=("Q1", "Q6"))
        for i, row in enumerate(ds.rows):
            row.labels["Q1"] = "yes" if i < 20 else "no"
        rng.shuffle(ds.rows)
        assignment = stratified_split(ds)
        for split in ("train", "dev", "test"):
            ids = assignment.rows_in(split)
            rare = sum(1 for i in ids if ds.rows[i].labels["Q1"] == "yes")
            proportion = rare / len(ids)
            assert abs(proportion - 0.10) <= 0.05, (split, proportion)

    def test_sizes_within_one_row(self):
        for n in (9, 23, 57, 101):
            ds = make_dataset(n_rows=n, seed=n)
            sizes = Counter(stratified_split(ds).splits.values())
            for name, p in zip(("train", "dev", "test"), (0.7, 0.1, 0.2)):
                assert abs(sizes.get(name, 0) - n * p) <= 1


def brute_force_weighted(y_true, y_pred):
    """Independent oracle: direct per-class loops."""
    classes = sorted(set(y_true))
    n = len(y_true)
    out = {"weighted_precision": 0.0, "weighted_recall": 0.0, "weighted_f1": 0.0}
    for cls in classes:
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == cls and p == cls)
        fp = sum(1 for t, p in zip(y_true, y_pred) if t != cls and p == cls)
        fn = sum(1 for t, p in zip(y_true, y_pred) if t == cls and p != cls)
        support = tp + fn
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / support if support else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        out["weighted_precision"] += support / n * precision
        out["weighted_recall"] += support / n * recall
        out["weighted_f1"] += support / n * f1
    out["accuracy"] = sum(1 for t, p in zip(y_true, y_pred) if t == p) / n
    return out


class TestWeightedMetrics:
    def test_hand_computed_golden(self):
        metrics = weighted_metrics(["a", "a", "a", "b"], ["a", "a", "b", "b"])
        assert metrics["weighted_f1"] == pytest.approx(0.76667, abs=1e-5)

    def test_perfect_prediction(self):
        metrics = weighted_metrics(["a", "b", "c"], ["a", "b", "c"])
        assert all(v == 1.0 for v in metrics.values())

    def test_majority_prediction_golden(self):
        metrics = weighted_metrics(["a", "a", "a", "b"], ["a", "a", "a", "a"])
        assert metrics["weighted_f1"] == pytest.approx(0.64286, abs=1e-5)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            weighted_metrics(["a"], ["a", "b"])
        with pytest.raises(LengthMismatch):
            weighted_metrics([], [])

    @given(
        st.lists(
            st.tuples(st.sampled_from("abc"), st.sampled_from("abc")),
            min_size=1,
            max_size=40,
        )
    )
    def test_matches_brute_force(self, pairs):
        y_true = [t for t, _ in pairs]
        y_pred = [p for _, p in pairs]
        ours = weighted_metrics(y_true, y_pred)
        oracle = brute_force_weighted(y_true, y_pred)
        for key in oracle:
            assert ours[key] == pytest.approx(oracle[key], abs=1e-12)


class TestMajorityBaseline:
    def test_majority_label_predicted(self):
        metrics = majority_baseline(["no"] * 9 + ["yes"], ["no", "no", "yes"])
        assert metrics["accuracy"] == pytest.approx(2 / 3)

    def test_balanced_two_class_golden(self):
        metrics = majority_baseline(["a", "a", "b"], ["a", "b"])
        assert metrics["weighted_f1"] == pytest.approx(1 / 3, abs=1e-9)

    def test_single_row_matching_majority(self):
        metrics = majority_baseline(["no", "no", "yes"], ["no"])
        assert metrics["weighted_f1"] == 1.0

    def test_tie_broken_by_schema_order(self):
        metrics = majority_baseline(
            ["yes", "no"], ["no"], label_order=schema.labels("Q1", "binary")
        )
        # "no" precedes "yes" in the binary label order.
        assert metrics["accuracy"] == 1.0

    def test_empty_train_rejected(self):
        with pytest.raises(LengthMismatch):
            majority_baseline([], ["a"])

    @given(st.lists(st.sampled_from("ab"), min_size=1, max_size=30))
    def test_accuracy_equals_majority_frequency(self, eval_true):
        train = ["a", "a", "b"]
        metrics = majority_baseline(train, eval_true)
        assert metrics["accuracy"] == pytest.approx(
            eval_true.count("a") / len(eval_true)
        )


@pytest.fixture(scope="module")
def small_report_setup():
    ds = make_dataset(n_rows=170, seed=6)
    assignment = stratified_split(ds)
    models = {}
    for question in schema.QUESTION_IDS:
        pools = question_pools(ds, assignment, question)
        for task in schema.TASKS:
            models[(question, task)] = train_question(
                pools["train"], pools["dev"], question, task,
                c_grid=(1.0,), min_df=1,
            )
    return ds, assignment, models


class TestReport:
    def test_layout_and_svm_beats_majority(self, small_report_setup):
        ds, assignment, models = small_report_setup
        rep = report(models, ds, assignment)
        binary_rows = [r for r in rep["rows"] if r["task"] == "binary"]
        multiclass_rows = [r for r in rep["rows"] if r["task"] == "multiclass"]
        assert len(binary_rows) == 7
        assert len(multiclass_rows) == 6
        assert all(r["question"] != "Q1" for r in multiclass_rows)
        for row in rep["rows"]:
            assert row["svm_f1"] >= row["majority_f1"], row

    def test_missing_model_raises(self, small_report_setup):
        ds, assignment, models = small_report_setup
        incomplete = dict(models)
        del incomplete[("Q3", "multiclass")]
        with pytest.raises(MissingModel):
            report(incomplete, ds, assignment)

    def test_empty_test_pool_marks_missing_data(self, small_report_setup):
        _, _, models = small_report_setup
        ds = make_dataset(n_rows=170, seed=6, absent={"Q2": 1.0})
        assignment = stratified_split(ds)
        rep = report(models, ds, assignment)
        q2_rows = [r for r in rep["rows"] if r["question"] == "Q2"]
        assert all(r.get("error") == "MissingData" for r in q2_rows)

    def test_render_contains_panels(self, small_report_setup):
        ds, assignment, models = small_report_setup
        text = render_report(report(models, ds, assignment))
        assert "Binary" in text
        assert "Multiclass" in text
        assert "Q7" in text


def test_question_pools_exclude_unlabeled_rows():
    ds = make_dataset(n_rows=60, seed=8, absent={"Q5": 0.5})
    assignment = stratified_split(ds)
    pools = question_pools(ds, assignment, "Q5")
    total = sum(len(rows) for rows in pools.values())
    assert total == ds.question_count("Q5")
    assert total < 60
