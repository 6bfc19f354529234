"""Annotation schema: the seven questions, their label sets, and the
fine-grained-to-binary collapse.

Label strings are canonical identifiers and are stored verbatim,
including commas and capitalization. Each label also carries a stable
ASCII code (e.g. ``q6_yes_rumor_conspiracy``) for file formats and URLs.

The binary task always uses the label list ``[no, yes]``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InfodemicError

QUESTION_IDS = ("Q1", "Q2", "Q3", "Q4", "Q5", "Q6", "Q7")
TASKS = ("binary", "multiclass")
BINARY_LABELS = ("no", "yes")


class UnknownQuestion(InfodemicError):
    pass


class UnknownTask(InfodemicError):
    pass


class UnknownLabel(InfodemicError):
    pass


@dataclass(frozen=True)
class Label:
    code: str
    text: str
    binary: str  # "yes" or "no"


@dataclass(frozen=True)
class Question:
    id: str
    prompt: str
    fine_labels: tuple[Label, ...]
    binary_applicable: bool = True


def _q(qid: str, prompt: str, rows: list[tuple[str, str, str]]) -> Question:
    return Question(
        id=qid,
        prompt=prompt,
        fine_labels=tuple(Label(code=c, text=t, binary=b) for c, t, b in rows),
    )


QUESTIONS: dict[str, Question] = {
    q.id: q
    for q in [
        _q(
            "Q1",
            "Does the tweet contain a verifiable factual claim?",
            [
                ("q1_yes", "yes", "yes"),
                ("q1_no", "no", "no"),
            ],
        ),
        _q(
            "Q2",
            "To what extent does the tweet appear to contain false information?",
            [
                ("q2_no_definitely_no_false_info", "NO, definitely contains no false information", "no"),
                ("q2_no_probably_no_false_info", "NO, probably contains no false information", "no"),
                ("q2_not_sure", "Not sure", "no"),
                ("q2_yes_probably_false_info", "YES, probably contains false information", "yes"),
                ("q2_yes_definitely_false_info", "YES, definitely contains false information", "yes"),
            ],
        ),
        _q(
            "Q3",
            "Will the tweet's claim have an impact on or be of interest to the general public?",
            [
                ("q3_no_definitely_not_of_interest", "NO, definitely not of interest", "no"),
                ("q3_no_probably_not_of_interest", "NO, probably not of interest", "no"),
                ("q3_not_sure", "Not sure", "no"),
                ("q3_yes_probably_of_interest", "YES, probably of interest", "yes"),
                ("q3_yes_definitely_of_interest", "YES, definitely of interest", "yes"),
            ],
        ),
        _q(
            "Q4",
            "To what extent does the tweet appear to be harmful to society, person(s), "
            "company(s) or product(s)?",
            [
                ("q4_no_definitely_not_harmful", "NO, definitely not harmful", "no"),
                ("q4_no_probably_not_harmful", "NO, probably not harmful", "no"),
                ("q4_not_sure", "Not sure", "no"),
                ("q4_yes_probably_harmful", "YES, probably harmful", "yes"),
                ("q4_yes_definitely_harmful", "YES, definitely harmful", "yes"),
            ],
        ),
        _q(
            "Q5",
            "Do you think that a professional fact-checker should verify the claim in the tweet?",
            [
                # "Not sure" is listed last for this question, unlike Q2-Q4;
                # the order is preserved verbatim.
                ("q5_no_no_need_to_check", "NO, no need to check", "no"),
                ("q5_no_too_trivial_to_check", "NO, too trivial to check", "no"),
                ("q5_yes_not_urgent", "YES, not urgent", "yes"),
                ("q5_yes_very_urgent", "YES, very urgent", "yes"),
                ("q5_not_sure", "Not sure", "no"),
            ],
        ),
        _q(
            "Q6",
            "Is the tweet harmful to society and why?",
            [
                ("q6_no_not_harmful", "NO, not harmful", "no"),
                ("q6_no_joke_sarcasm", "NO, joke or sarcasm", "no"),
                ("q6_not_sure", "Not sure", "no"),
                ("q6_yes_panic", "YES, panic", "yes"),
                ("q6_yes_xenophobic_racist_hate", "YES, xenophobic, racist, prejudices, or hate-speech", "yes"),
                ("q6_yes_bad_cure", "YES, bad cure", "yes"),
                ("q6_yes_rumor_conspiracy", "YES, rumor, or conspiracy", "yes"),
                ("q6_yes_other", "YES, other", "yes"),
            ],
        ),
        _q(
            "Q7",
            "Do you think that this tweet should get the attention of policy makers of "
            "government entities?",
            [
                ("q7_no_not_interesting", "No, not interesting", "no"),
                ("q7_not_sure", "not sure", "no"),
                ("q7_yes_asks_question", "Yes, asks question", "yes"),
                ("q7_yes_blame_authorities", "Yes, blame authorities", "yes"),
                ("q7_yes_calls_for_action", "Yes, calls for action", "yes"),
                ("q7_yes_classified_as_harmful", "Yes, classified as in harmful task", "yes"),
                ("q7_yes_contains_advice", "Yes, contains advice", "yes"),
                ("q7_yes_discusses_action_taken", "Yes, discusses action taken", "yes"),
                ("q7_yes_discusses_cure", "Yes, discusses cure", "yes"),
                ("q7_yes_other", "Yes, other", "yes"),
            ],
        ),
    ]
}


def question(question_id: str) -> Question:
    try:
        return QUESTIONS[question_id]
    except KeyError:
        raise UnknownQuestion(f"unknown question id: {question_id!r}") from None


def labels(question_id: str, task: str) -> list[str]:
    """Canonical ordered label list for (question, task).

    The binary task is always ``[no, yes]``; the multiclass task returns
    the question's fine-grained labels in their canonical order.
    """
    q = question(question_id)
    if task == "binary":
        return list(BINARY_LABELS)
    if task == "multiclass":
        return [lab.text for lab in q.fine_labels]
    raise UnknownTask(f"unknown task: {task!r} (expected binary or multiclass)")


def label_codes(question_id: str, task: str) -> list[str]:
    q = question(question_id)
    if task == "binary":
        return [f"{q.id.lower()}_binary_no", f"{q.id.lower()}_binary_yes"]
    if task == "multiclass":
        return [lab.code for lab in q.fine_labels]
    raise UnknownTask(f"unknown task: {task!r} (expected binary or multiclass)")


def to_binary(question_id: str, fine_label: str) -> str:
    """Collapse a fine-grained label to ``yes``/``no``.

    Labels starting with YES/Yes map to yes, NO/No to no; the "Not sure"
    labels map to no (conservative choice, avoids false alarms).
    """
    q = question(question_id)
    for lab in q.fine_labels:
        if lab.text == fine_label or lab.code == fine_label:
            return lab.binary
    raise UnknownLabel(f"{question_id} has no label {fine_label!r}")


def resolve_label(question_id: str, value: str, task: str = "multiclass") -> str:
    """Map a label text or ASCII code to the canonical label text."""
    if task == "binary":
        if value in BINARY_LABELS:
            return value
        raise UnknownLabel(f"binary task has no label {value!r}")
    q = question(question_id)
    for lab in q.fine_labels:
        if lab.text == value or lab.code == value:
            return lab.text
    raise UnknownLabel(f"{question_id} has no label {value!r}")


def export_schema() -> dict:
    """Machine-readable schema consumed by the UI and API clients."""
    return {
        "version": 1,
        "tasks": list(TASKS),
        "binary_labels": list(BINARY_LABELS),
        "questions": [
            {
                "id": q.id,
                "prompt": q.prompt,
                "labels": [
                    {"code": lab.code, "text": lab.text, "binary": lab.binary}
                    for lab in q.fine_labels
                ],
            }
            for q in QUESTIONS.values()
        ],
    }
