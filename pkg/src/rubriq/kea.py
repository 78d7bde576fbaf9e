"""Supervised keyphrase extraction: a Gaussian Naive Bayes binary
classifier over candidate features.

Two variants share the machinery: the base feature set is {TF-IDF weight
of the candidate's stem n-gram, normalized first-occurrence offset}; the
document-structure variant appends {phrase length in words, in-title flag,
frequency within the candidate's first section}.  The structure features
are constant zero when the dataset carries no section markers, and a
variance floor makes constant features cancel out of the posterior, so the
extended variant then ranks exactly like the base one.

Candidate-level training labels come from fuzzy overlap with the gold
keyphrase sentences of the same document (threshold shared with the
matching module).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import vectorize
from .graphrank import Candidate, rank_top_k
from .match import similarity
from .textproc import Token, stopwords

KEA = "kea"
WINGNUS = "wingnus"
_VARIANTS = (KEA, WINGNUS)
_VARIANCE_FLOOR = 1e-9
_MAX_CANDIDATE_WORDS = 3


@dataclass
class PhraseCandidate:
    stems: tuple[str, ...]
    surface: str
    positions: list[int]
    sentence_indices: list[int]

    @property
    def frequency(self) -> int:
        return len(self.positions)


def generate_candidates(tokens: list[Token]) -> list[PhraseCandidate]:
    """Contiguous 1..3-grams inside one punctuation block that neither
    start nor end with a stopword, deduplicated by stem sequence."""
    stops = stopwords()
    table: dict[tuple[str, ...], PhraseCandidate] = {}
    for n in range(1, _MAX_CANDIDATE_WORDS + 1):
        for i in range(len(tokens) - n + 1):
            window = tokens[i : i + n]
            if window[-1].position - window[0].position != n - 1:
                continue
            if any(t.block_index != window[0].block_index for t in window):
                continue
            if window[0].surface in stops or window[-1].surface in stops:
                continue
            stems = tuple(t.stem for t in window)
            if stems in table:
                table[stems].positions.append(window[0].position)
                table[stems].sentence_indices.append(window[0].sentence_index)
            else:
                table[stems] = PhraseCandidate(
                    stems=stems,
                    surface=" ".join(t.surface for t in window),
                    positions=[window[0].position],
                    sentence_indices=[window[0].sentence_index],
                )
    return list(table.values())


def _features(
    candidates: list[PhraseCandidate],
    tokens: list[Token],
    tfidf: vectorize.TfIdfModel,
    variant: str,
    section_starts: list[int] | None,
) -> np.ndarray:
    doc_vector = vectorize.transform(tfidf, [t.stem for t in tokens])
    n_tokens = max(len(tokens), 1)
    rows = []
    for cand in candidates:
        term = " ".join(cand.stems)
        col = tfidf.vocabulary.get(term)
        weight = doc_vector.entries.get(col, 0.0) if col is not None else 0.0
        first_norm = cand.positions[0] / n_tokens
        row = [weight, first_norm]
        if variant == WINGNUS:
            in_title = 1.0 if 0 in cand.sentence_indices else 0.0
            row.extend([float(len(cand.stems)), in_title, _section_frequency(cand, section_starts)])
        rows.append(row)
    return np.array(rows)


def _section_frequency(cand: PhraseCandidate, section_starts: list[int] | None) -> float:
    if not section_starts:
        return 0.0
    bounds = sorted(section_starts)

    def section_of(position: int) -> int:
        section = -1
        for i, start in enumerate(bounds):
            if position >= start:
                section = i
        return section

    home = section_of(cand.positions[0])
    return float(sum(1 for p in cand.positions if section_of(p) == home))


@dataclass
class NaiveBayesModel:
    variant: str
    classes: tuple[bool, bool]  # (False, True)
    priors: np.ndarray
    means: np.ndarray  # (2, n_features)
    variances: np.ndarray
    tfidf: vectorize.TfIdfModel
    match_threshold: float

    def log_posterior(self, X: np.ndarray) -> np.ndarray:
        """(n, 2) unnormalized log posteriors."""
        out = np.empty((X.shape[0], 2))
        for c in range(2):
            var = self.variances[c]
            out[:, c] = np.log(self.priors[c]) + np.sum(
                -0.5 * np.log(2 * np.pi * var) - (X - self.means[c]) ** 2 / (2 * var),
                axis=1,
            )
        return out

    def positive_probability(self, X: np.ndarray) -> np.ndarray:
        log_post = self.log_posterior(X)
        shifted = log_post - log_post.max(axis=1, keepdims=True)
        probs = np.exp(shifted)
        return probs[:, 1] / probs.sum(axis=1)


def label_candidates(
    candidates: list[PhraseCandidate], gold_texts: list[str], threshold: float
) -> list[bool]:
    return [
        any(similarity(c.surface, text) >= threshold for text in gold_texts)
        for c in candidates
    ]


def train(
    docs: list[list[Token]],
    gold_texts: list[list[str]],
    variant: str = KEA,
    match_threshold: float = 0.6,
    section_starts: list[list[int] | None] | None = None,
) -> NaiveBayesModel:
    """Fit the classifier on candidates from every document; ``gold_texts``
    holds each document's keyphrase-labeled sentences."""
    if variant not in _VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if len(docs) != len(gold_texts):
        raise ValueError("docs and gold_texts lengths differ")
    if section_starts is None:
        section_starts = [None] * len(docs)
    tfidf = vectorize.fit_tfidf(
        [[t.stem for t in doc] for doc in docs], ngram_range=(1, _MAX_CANDIDATE_WORDS)
    )
    feature_rows = []
    labels = []
    for doc, gold, sections in zip(docs, gold_texts, section_starts):
        candidates = generate_candidates(doc)
        if not candidates:
            continue
        feature_rows.append(_features(candidates, doc, tfidf, variant, sections))
        labels.extend(label_candidates(candidates, gold, match_threshold))
    if not feature_rows:
        raise ValueError("no candidates in training corpus")
    X = np.vstack(feature_rows)
    y = np.array(labels)
    if y.all() or not y.any():
        raise ValueError("training candidates must include both classes")
    priors = np.array([(~y).mean(), y.mean()])
    means = np.stack([X[~y].mean(axis=0), X[y].mean(axis=0)])
    variances = np.stack([X[~y].var(axis=0), X[y].var(axis=0)])
    variances = np.maximum(variances, _VARIANCE_FLOOR)
    return NaiveBayesModel(
        variant=variant,
        classes=(False, True),
        priors=priors,
        means=means,
        variances=variances,
        tfidf=tfidf,
        match_threshold=match_threshold,
    )


def predict(
    model: NaiveBayesModel,
    tokens: list[Token],
    k: int = 10,
    section_starts: list[int] | None = None,
) -> list[Candidate]:
    """Candidates of one document ranked by positive-class posterior."""
    candidates = generate_candidates(tokens)
    if not candidates:
        return []
    X = _features(candidates, tokens, model.tfidf, model.variant, section_starts)
    probs = model.positive_probability(X)
    ranked = [
        Candidate(surface=c.surface, positions=list(c.positions), score=float(p))
        for c, p in zip(candidates, probs)
    ]
    return rank_top_k(ranked, k)


def save_model(model: NaiveBayesModel, path: str) -> None:
    lines = [
        "nbkpe v1",
        f"variant {model.variant}",
        f"threshold {float(model.match_threshold)!r}",
        f"priors {float(model.priors[0])!r} {float(model.priors[1])!r}",
        f"nfeatures {model.means.shape[1]}",
    ]
    for c, name in ((0, "neg"), (1, "pos")):
        lines.append(f"mean {name} " + " ".join(repr(float(v)) for v in model.means[c]))
        lines.append(f"var {name} " + " ".join(repr(float(v)) for v in model.variances[c]))
    nmin, nmax = model.tfidf.ngram_range
    lines.append(f"tfidf {nmin} {nmax} {model.tfidf.n_docs}")
    for term in sorted(model.tfidf.df):
        lines.append(f"term {model.tfidf.df[term]} {term}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path: str) -> NaiveBayesModel:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if lines[0] != "nbkpe v1":
        raise ValueError(f"{path}: unsupported model format {lines[0]!r}")
    fields = {}
    df = {}
    tfidf_meta = None
    for line in lines[1:]:
        key, _, rest = line.partition(" ")
        if key == "term":
            count, _, term = rest.partition(" ")
            df[term] = int(count)
        elif key == "tfidf":
            tfidf_meta = rest.split()
        else:
            fields[line.split(" ", 2)[0] if key in ("mean", "var") else key] = rest
    means = {}
    variances = {}
    for line in lines:
        parts = line.split()
        if parts[0] == "mean":
            means[parts[1]] = np.array([float(v) for v in parts[2:]])
        elif parts[0] == "var":
            variances[parts[1]] = np.array([float(v) for v in parts[2:]])
    nmin, nmax, n_docs = (int(v) for v in tfidf_meta)
    vocabulary = {term: i for i, term in enumerate(sorted(df))}
    tfidf = vectorize.TfIdfModel(
        vocabulary=vocabulary, df=df, n_docs=n_docs, ngram_range=(nmin, nmax)
    )
    priors = np.array([float(v) for v in fields["priors"].split()])
    return NaiveBayesModel(
        variant=fields["variant"],
        classes=(False, True),
        priors=priors,
        means=np.stack([means["neg"], means["pos"]]),
        variances=np.stack([variances["neg"], variances["pos"]]),
        tfidf=tfidf,
        match_threshold=float(fields["threshold"]),
    )
