"""TF-IDF vectorization of normalized text into L2-normalized sparse
vectors over word unigrams and bigrams.

The idf uses the smoothed form ln((1+N)/(1+df)) + 1, so every value is
at least 1.0 and the output of ``fit`` is bit-stable for a given corpus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InfodemicError
from .textprep import NormalizedText

DEFAULT_MIN_DF = 2
DEFAULT_NGRAM_RANGE = (1, 2)


class EmptyCorpus(InfodemicError):
    pass


@dataclass
class SparseVector:
    """Feature index -> weight map; zero weights are never stored."""

    entries: dict[int, float] = field(default_factory=dict)

    def norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.entries.values()))

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class TfidfModel:
    vocabulary: dict[str, int]
    idf: list[float]
    n_documents: int
    min_df: int
    ngram_range: tuple[int, int] = DEFAULT_NGRAM_RANGE


def extract_ngrams(tokens: list[str], ngram_range: tuple[int, int]) -> list[str]:
    """Token n-grams of the given orders, joined by single spaces."""
    lo, hi = ngram_range
    out: list[str] = []
    for n in range(lo, hi + 1):
        for i in range(len(tokens) - n + 1):
            out.append(" ".join(tokens[i : i + n]))
    return out


def fit(
    corpus: list[NormalizedText],
    min_df: int = DEFAULT_MIN_DF,
    ngram_range: tuple[int, int] = DEFAULT_NGRAM_RANGE,
) -> TfidfModel:
    """Learn the vocabulary and idf weights from a corpus.

    N-grams seen in fewer than ``min_df`` documents are excluded; the
    vocabulary may come out empty, which is not an error.
    """
    if not corpus:
        raise EmptyCorpus("cannot fit a tf-idf model on an empty corpus")
    df: dict[str, int] = {}
    for doc in corpus:
        for g in set(extract_ngrams(doc.tokens, ngram_range)):
            df[g] = df.get(g, 0) + 1
    kept = sorted(g for g, c in df.items() if c >= min_df)
    vocabulary = {g: i for i, g in enumerate(kept)}
    n = len(corpus)
    idf = [math.log((1 + n) / (1 + df[g])) + 1.0 for g in kept]
    return TfidfModel(
        vocabulary=vocabulary,
        idf=idf,
        n_documents=n,
        min_df=min_df,
        ngram_range=ngram_range,
    )


def transform(model: TfidfModel, text: NormalizedText) -> SparseVector:
    """Raw term counts times idf, L2-normalized.

    Out-of-vocabulary n-grams are ignored; text with no known n-grams
    yields the empty vector.
    """
    counts: dict[int, int] = {}
    for g in extract_ngrams(text.tokens, model.ngram_range):
        idx = model.vocabulary.get(g)
        if idx is not None:
            counts[idx] = counts.get(idx, 0) + 1
    if not counts:
        return SparseVector()
    weights = {idx: c * model.idf[idx] for idx, c in counts.items()}
    norm = math.sqrt(sum(w * w for w in weights.values()))
    return SparseVector(entries={idx: w / norm for idx, w in weights.items()})
