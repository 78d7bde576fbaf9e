"""Latent Dirichlet Allocation via collapsed Gibbs sampling.

Sampling is strictly sequential (documents then tokens in order) so a
chain is reproducible from its seed.  Each token's topic is resampled from

    p(t) ~ (doc_topic[d,t] + alpha) * (topic_word[t,w] + beta)
                                    / (topic_total[t] + V*beta)

and both count matrices stay non-negative with conserved totals after
every sweep (assertable with ``check_invariants=True``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cluster import ClusterAssignment, agglomerative, kmeans, spectral


@dataclass
class LdaModel:
    n_topics: int
    alpha: float
    beta: float
    vocabulary: dict[str, int]
    doc_topic: np.ndarray  # (D, T) counts
    topic_word: np.ndarray  # (T, V) counts
    topic_totals: np.ndarray  # (T,)
    assignments: list[np.ndarray]
    doc_tokens: list[np.ndarray]  # word indices per doc
    seed: int
    sweeps: int

    def check_counts(self) -> None:
        assert (self.doc_topic >= 0).all() and (self.topic_word >= 0).all()
        for d, tokens in enumerate(self.doc_tokens):
            assert self.doc_topic[d].sum() == len(tokens)
        assert self.topic_word.sum() == sum(len(t) for t in self.doc_tokens)
        assert (self.topic_word.sum(axis=1) == self.topic_totals).all()


def _sample(probabilities: np.ndarray, rng: np.random.Generator) -> int:
    cumulative = probabilities.cumsum()
    return int(cumulative.searchsorted(rng.random() * cumulative[-1], side="right"))


def lda_fit(
    docs: list[list[str]],
    n_topics: int,
    alpha: float | None = None,
    beta: float = 0.01,
    sweeps: int = 500,
    seed: int = 0,
    check_invariants: bool = False,
) -> LdaModel:
    if n_topics < 1:
        raise ValueError("need at least one topic")
    if alpha is None:
        alpha = 50.0 / n_topics
    vocabulary = {w: i for i, w in enumerate(sorted({w for doc in docs for w in doc}))}
    if not vocabulary:
        raise ValueError("empty corpus")
    doc_tokens = [np.array([vocabulary[w] for w in doc], dtype=int) for doc in docs]
    D, T, V = len(docs), n_topics, len(vocabulary)

    rng = np.random.default_rng(seed)
    doc_topic = np.zeros((D, T), dtype=int)
    topic_word = np.zeros((T, V), dtype=int)
    topic_totals = np.zeros(T, dtype=int)
    assignments = []
    for d, tokens in enumerate(doc_tokens):
        z = rng.integers(T, size=len(tokens))
        assignments.append(z)
        for w, t in zip(tokens, z):
            doc_topic[d, t] += 1
            topic_word[t, w] += 1
            topic_totals[t] += 1

    model = LdaModel(
        n_topics=T,
        alpha=alpha,
        beta=beta,
        vocabulary=vocabulary,
        doc_topic=doc_topic,
        topic_word=topic_word,
        topic_totals=topic_totals,
        assignments=assignments,
        doc_tokens=doc_tokens,
        seed=seed,
        sweeps=sweeps,
    )
    vb = V * beta
    for _ in range(sweeps):
        for d, tokens in enumerate(doc_tokens):
            z = assignments[d]
            for i, w in enumerate(tokens):
                t = z[i]
                doc_topic[d, t] -= 1
                topic_word[t, w] -= 1
                topic_totals[t] -= 1
                p = (doc_topic[d] + alpha) * (topic_word[:, w] + beta) / (topic_totals + vb)
                t = _sample(p, rng)
                z[i] = t
                doc_topic[d, t] += 1
                topic_word[t, w] += 1
                topic_totals[t] += 1
        if check_invariants:
            model.check_counts()
    return model


def fold_in(
    model: LdaModel, doc: list[str], sweeps: int = 20, seed: int | None = None
) -> np.ndarray:
    """Doc-topic posterior for an unseen document: Gibbs sweeps over its
    tokens with the topic-word counts held fixed.  Out-of-vocabulary
    tokens are skipped."""
    if seed is None:
        seed = model.seed + 1
    rng = np.random.default_rng(seed)
    tokens = np.array([model.vocabulary[w] for w in doc if w in model.vocabulary], dtype=int)
    counts = np.zeros(model.n_topics, dtype=int)
    vb = len(model.vocabulary) * model.beta
    if len(tokens):
        z = rng.integers(model.n_topics, size=len(tokens))
        for t in z:
            counts[t] += 1
        for _ in range(sweeps):
            for i, w in enumerate(tokens):
                counts[z[i]] -= 1
                p = (
                    (counts + model.alpha)
                    * (model.topic_word[:, w] + model.beta)
                    / (model.topic_totals + vb)
                )
                z[i] = _sample(p, rng)
                counts[z[i]] += 1
    smoothed = counts + model.alpha
    return smoothed / smoothed.sum()


def lda_features(model: LdaModel, doc: int | list[str]) -> np.ndarray:
    """Smoothed doc-topic posterior: stored counts for a training doc index,
    fold-in for a token list."""
    if isinstance(doc, int):
        smoothed = model.doc_topic[doc] + model.alpha
        return smoothed / smoothed.sum()
    return fold_in(model, doc)


def _l2_rows(M: np.ndarray) -> np.ndarray:
    norms = np.sqrt((M**2).sum(axis=1, keepdims=True))
    norms[norms == 0.0] = 1.0
    return M / norms


def coupled_features(X_tfidf: np.ndarray, topic_vectors: np.ndarray) -> np.ndarray:
    """[L2(tfidf block) ; L2(topic block)] per row, so the small topic
    block is not drowned by the vocabulary dimensions."""
    return np.hstack([_l2_rows(np.asarray(X_tfidf, dtype=float)), _l2_rows(topic_vectors)])


def lda_coupled_clustering(
    X_tfidf: np.ndarray,
    docs: list[list[str]],
    n_topics: int = 4,
    *,
    lda_sweeps: int = 200,
    alpha: float | None = None,
    beta: float = 0.01,
    seed: int = 0,
    method: str = "kmeans",
    k: int = 4,
    init: str = "kmeanspp",
    affinity: str = "euclidean",
    assign: str = "kmeans",
) -> ClusterAssignment:
    model = lda_fit(docs, n_topics, alpha=alpha, beta=beta, sweeps=lda_sweeps, seed=seed)
    topic_vectors = np.stack([lda_features(model, d) for d in range(len(docs))])
    features = coupled_features(X_tfidf, topic_vectors)
    if method == "kmeans":
        return kmeans(features, k, init=init, seed=seed)
    if method == "agglomerative":
        return agglomerative(features, k, affinity=affinity)
    if method == "spectral":
        return spectral(features, k, assign=assign, seed=seed)
    raise ValueError(f"unknown method {method!r}")


def save_lda(model: LdaModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("lda v1\n")
        fh.write(
            f"{model.n_topics} {model.alpha!r} {model.beta!r} {model.seed} {model.sweeps}\n"
        )
        words = sorted(model.vocabulary, key=model.vocabulary.get)
        fh.write(" ".join(words) + "\n")
        fh.write(f"{len(model.doc_tokens)}\n")
        for row in model.topic_word:
            fh.write(" ".join(str(v) for v in row) + "\n")
        for row in model.doc_topic:
            fh.write(" ".join(str(v) for v in row) + "\n")
        for d, tokens in enumerate(model.doc_tokens):
            fh.write(" ".join(str(v) for v in tokens) + "\n")
            fh.write(" ".join(str(v) for v in model.assignments[d]) + "\n")


def load_lda(path: str) -> LdaModel:
    with open(path, encoding="utf-8") as fh:
        if fh.readline().strip() != "lda v1":
            raise ValueError(f"{path}: unsupported LDA dump format")
        n_topics, alpha, beta, seed, sweeps = fh.readline().split()
        words = fh.readline().split()
        n_docs = int(fh.readline())
        T = int(n_topics)
        topic_word = np.array(
            [[int(v) for v in fh.readline().split()] for _ in range(T)], dtype=int
        )
        doc_topic = np.array(
            [[int(v) for v in fh.readline().split()] for _ in range(n_docs)], dtype=int
        )
        doc_tokens = []
        assignments = []
        for _ in range(n_docs):
            doc_tokens.append(np.array([int(v) for v in fh.readline().split()], dtype=int))
            assignments.append(np.array([int(v) for v in fh.readline().split()], dtype=int))
    return LdaModel(
        n_topics=T,
        alpha=float(alpha),
        beta=float(beta),
        vocabulary={w: i for i, w in enumerate(words)},
        doc_topic=doc_topic,
        topic_word=topic_word,
        topic_totals=topic_word.sum(axis=1),
        assignments=assignments,
        doc_tokens=doc_tokens,
        seed=int(seed),
        sweeps=int(sweeps),
    )
