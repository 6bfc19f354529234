"""Character n-gram language identification for Arabic, Bulgarian, Dutch,
and English.

Each language gets a profile of additively smoothed 1..3-gram
log-probabilities trained from small seed corpora shipped with the
package. Detection sums n-gram log-likelihoods per profile and converts
the gap between the best and second-best profile into a confidence via a
two-way softmax; pure Arabic-script and pure Cyrillic inputs short-cut to
``ar``/``bg`` directly.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources

from .errors import InfodemicError

SUPPORTED_LANGUAGES = ("ar", "bg", "nl", "en")

NGRAM_ORDERS = (1, 2, 3)
SMOOTHING_ALPHA = 0.5
DEFAULT_THRESHOLD = 0.6
SCRIPT_SHORTCUT_FRACTION = 0.8

_WS_RE = re.compile(r"\s+")

_ARABIC_RANGES = ((0x0600, 0x06FF), (0x0750, 0x077F), (0x08A0, 0x08FF),
                  (0xFB50, 0xFDFF), (0xFE70, 0xFEFF))
_CYRILLIC_RANGES = ((0x0400, 0x04FF), (0x0500, 0x052F))


class InsufficientCorpus(InfodemicError):
    pass


class NoProfiles(InfodemicError):
    pass


@dataclass
class LanguageProfile:
    language: str
    ngram_logprobs: dict[str, float]
    total_ngrams: int
    # Per-order log-probability assigned to unseen n-grams (the reserved
    # smoothing mass), keyed by n.
    unseen_logprobs: dict[int, float] = field(default_factory=dict)


def _prepare(text: str) -> str:
    return _WS_RE.sub(" ", text.casefold()).strip()


def _ngram_counts(text: str, n: int) -> dict[str, int]:
    counts: dict[str, int] = {}
    for i in range(len(text) - n + 1):
        g = text[i : i + n]
        counts[g] = counts.get(g, 0) + 1
    return counts


def train_profile(language: str, corpus: list[str]) -> LanguageProfile:
    """Build a smoothed n-gram profile from raw text in one language."""
    text = _prepare(" ".join(corpus))
    if len(text) < 100:
        raise InsufficientCorpus(
            f"{language}: need >= 100 characters of seed text, got {len(text)}"
        )
    logprobs: dict[str, float] = {}
    unseen: dict[int, float] = {}
    total = 0
    for n in NGRAM_ORDERS:
        counts = _ngram_counts(text, n)
        t_n = sum(counts.values())
        v_n = len(counts)
        denom = t_n + SMOOTHING_ALPHA * (v_n + 1)
        for g, c in counts.items():
            logprobs[g] = math.log((c + SMOOTHING_ALPHA) / denom)
        unseen[n] = math.log(SMOOTHING_ALPHA / denom)
        total += t_n
    return LanguageProfile(
        language=language,
        ngram_logprobs=logprobs,
        total_ngrams=total,
        unseen_logprobs=unseen,
    )


def _script_fraction(text: str, ranges) -> float:
    letters = [c for c in text if c.isalpha()]
    if not letters:
        return 0.0
    hits = sum(1 for c in letters if any(lo <= ord(c) <= hi for lo, hi in ranges))
    return hits / len(letters)


def _score(text: str, profile: LanguageProfile) -> float:
    score = 0.0
    for n in NGRAM_ORDERS:
        unseen = profile.unseen_logprobs[n]
        for g, c in _ngram_counts(text, n).items():
            score += c * profile.ngram_logprobs.get(g, unseen)
    return score


def detect(
    text: str,
    profiles: list[LanguageProfile],
    threshold: float = DEFAULT_THRESHOLD,
) -> tuple[str | None, float]:
    """Identify the language of ``text`` among the trained profiles.

    Returns ``(language, confidence)``; the language is ``None`` when the
    confidence falls below ``threshold``.
    """
    if not profiles:
        raise NoProfiles("detect() called with no trained profiles")

    available = {p.language for p in profiles}
    if "ar" in available:
        frac = _script_fraction(text, _ARABIC_RANGES)
        if frac >= SCRIPT_SHORTCUT_FRACTION:
            return "ar", frac
    if "bg" in available:
        frac = _script_fraction(text, _CYRILLIC_RANGES)
        if frac >= SCRIPT_SHORTCUT_FRACTION:
            return "bg", frac

    prepared = _prepare(text)
    scored = sorted(
        ((_score(prepared, p), p.language) for p in profiles),
        key=lambda sl: (-sl[0], sl[1]),
    )
    best_score, best_lang = scored[0]
    if len(scored) == 1:
        return best_lang, 1.0
    gap = best_score - scored[1][0]
    # Two-way softmax between the top two summed log-likelihoods.
    confidence = 1.0 / (1.0 + math.exp(-gap)) if gap < 700 else 1.0
    if confidence < threshold:
        return None, confidence
    return best_lang, confidence


def save_profiles(profiles: list[LanguageProfile], path) -> None:
    """Persist profiles as tab-separated lines: language, n, n-gram,
    log-probability. A line with an empty n-gram field carries the
    unseen-mass log-probability for that order."""
    with open(path, "w", encoding="utf-8") as fh:
        for p in profiles:
            for n in NGRAM_ORDERS:
                fh.write(f"{p.language}\t{n}\t\t{p.unseen_logprobs[n]!r}\n")
            for g, lp in sorted(p.ngram_logprobs.items()):
                fh.write(f"{p.language}\t{len(g)}\t{g}\t{lp!r}\n")


def load_profiles(path) -> list[LanguageProfile]:
    by_lang: dict[str, LanguageProfile] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            lang, n_str, gram, lp_str = line.split("\t")
            profile = by_lang.setdefault(
                lang,
                LanguageProfile(language=lang, ngram_logprobs={}, total_ngrams=0),
            )
            if gram == "":
                profile.unseen_logprobs[int(n_str)] = float(lp_str)
            else:
                profile.ngram_logprobs[gram] = float(lp_str)
    return [by_lang[lang] for lang in sorted(by_lang)]


def load_seed_corpus(language: str) -> list[str]:
    """Sentences of the packaged seed corpus for one language."""
    data = resources.files("infodemic").joinpath(f"seeds/{language}.txt").read_text(
        encoding="utf-8"
    )
    return [line.strip() for line in data.splitlines() if line.strip()]


_default_profiles: list[LanguageProfile] | None = None


def default_profiles() -> list[LanguageProfile]:
    """Profiles trained from the packaged seed corpora (cached)."""
    global _default_profiles
    if _default_profiles is None:
        _default_profiles = [
            train_profile(lang, load_seed_corpus(lang)) for lang in SUPPORTED_LANGUAGES
        ]
    return _default_profiles
