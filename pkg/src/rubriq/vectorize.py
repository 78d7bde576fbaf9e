"""Feature backends: TF-IDF over n-grams and precomputed embedding stores.

TF is the within-document ratio count/total n-grams; IDF is ln(D/DF) with
no smoothing (DF >= 1 is guaranteed because the model is fitted on the
corpus itself).  Ubiquitous terms therefore get weight exactly 0 and are
omitted from the sparse vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .textproc import ngrams


@dataclass(frozen=True)
class SparseVector:
    """Column -> weight map with no explicit zero entries."""

    entries: dict[int, float]

    def to_dense(self, dim: int) -> np.ndarray:
        out = np.zeros(dim)
        for col, weight in self.entries.items():
            out[col] = weight
        return out


@dataclass
class TfIdfModel:
    vocabulary: dict[str, int]  # term -> dense column index, lexicographic
    df: dict[str, int]
    n_docs: int
    ngram_range: tuple[int, int]

    @property
    def dim(self) -> int:
        return len(self.vocabulary)

    def idf(self, term: str) -> float:
        return math.log(self.n_docs / self.df[term])


def fit_tfidf(docs: list[list[str]], ngram_range: tuple[int, int] = (1, 1)) -> TfIdfModel:
    """Count document frequencies (documents, not occurrences) over n-grams."""
    if not docs:
        raise ValueError("cannot fit TF-IDF on an empty corpus")
    nmin, nmax = ngram_range
    df: dict[str, int] = {}
    any_terms = False
    for doc in docs:
        terms = set(ngrams(list(doc), nmin, nmax))
        if terms:
            any_terms = True
        for term in terms:
            df[term] = df.get(term, 0) + 1
    if not any_terms:
        raise ValueError("cannot fit TF-IDF: every document is empty")
    vocabulary = {term: i for i, term in enumerate(sorted(df))}
    return TfIdfModel(vocabulary=vocabulary, df=df, n_docs=len(docs), ngram_range=ngram_range)


def transform(model: TfIdfModel, doc: list[str], use_idf: bool = True) -> SparseVector:
    """TF*IDF weights for one document; out-of-vocabulary terms dropped.

    The TF denominator is the document's total n-gram count (including
    out-of-vocabulary grams), so repeating a document leaves its vector
    unchanged.  ``use_idf=False`` gives the plain term-frequency (bag of
    words) vector over the same vocabulary.
    """
    grams = ngrams(list(doc), *model.ngram_range)
    if not grams:
        return SparseVector({})
    counts: dict[str, int] = {}
    for gram in grams:
        counts[gram] = counts.get(gram, 0) + 1
    total = len(grams)
    entries: dict[int, float] = {}
    for term, count in counts.items():
        col = model.vocabulary.get(term)
        if col is None:
            continue
        weight = count / total
        if use_idf:
            weight *= model.idf(term)
        if weight != 0.0:
            entries[col] = weight
    return SparseVector(entries)


def transform_matrix(model: TfIdfModel, docs: list[list[str]], use_idf: bool = True) -> np.ndarray:
    """Dense (n_docs, |V|) matrix; convenient for the classifiers."""
    out = np.zeros((len(docs), model.dim))
    for i, doc in enumerate(docs):
        for col, weight in transform(model, doc, use_idf=use_idf).entries.items():
            out[i, col] = weight
    return out


@dataclass
class EmbeddingStore:
    dim: int
    vectors: dict[str, np.ndarray]

    def __len__(self) -> int:
        return len(self.vectors)

    def matrix(self, ids: list[str]) -> np.ndarray:
        missing = [i for i in ids if i not in self.vectors]
        if missing:
            raise KeyError(f"embedding store is missing ids: {missing}")
        return np.stack([self.vectors[i] for i in ids])


def load_embeddings(path: str) -> EmbeddingStore:
    """Read the TSV embedding format: ``#dim=<d>`` header, then
    ``<id>\\t<float> <float> ...`` rows."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("#dim="):
            raise ValueError(f"{path}: expected '#dim=<int>' header, got {header!r}")
        dim = int(header[len("#dim=") :])
        vectors: dict[str, np.ndarray] = {}
        for line_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            phrase_id, _, payload = line.partition("\t")
            values = np.array([float(v) for v in payload.split()])
            if values.shape[0] != dim:
                raise ValueError(
                    f"{path}: row {phrase_id!r} (line {line_no}) has {values.shape[0]} "
                    f"values, expected {dim}"
                )
            if phrase_id in vectors:
                raise ValueError(f"{path}: duplicate id {phrase_id!r} (line {line_no})")
            vectors[phrase_id] = values
    return EmbeddingStore(dim=dim, vectors=vectors)


def save_embeddings(store: EmbeddingStore, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"#dim={store.dim}\n")
        for phrase_id in sorted(store.vectors):
            payload = " ".join(repr(float(v)) for v in store.vectors[phrase_id])
            fh.write(f"{phrase_id}\t{payload}\n")
