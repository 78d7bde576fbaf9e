import numpy as np
import pytest

import corpora
from rubriq.cluster import coincidence_matrix, kmeans
from rubriq.metrics import purity
from rubriq.topics import (
    coupled_features,
    fold_in,
    lda_coupled_clustering,
    lda_features,
    lda_fit,
    load_lda,
    save_lda,
)


class TestLdaFit:
    def test_single_topic(self):
        docs = [["a", "b"], ["b", "c", "c"]]
        model = lda_fit(docs, 1, sweeps=5, seed=0)
        for z in model.assignments:
            assert set(z.tolist()) <= {0}
        assert np.allclose(lda_features(model, 0), [1.0])

    def test_count_conservation_under_flag(self):
        rng = np.random.default_rng(0)
        docs, _ = corpora.two_block_topic_corpus(rng, n_docs=10, doc_len=8)
        model = lda_fit(docs, 3, sweeps=10, seed=1, check_invariants=True)
        model.check_counts()

    def test_empty_corpus(self):
        with pytest.raises(ValueError):
            lda_fit([[], []], 2)
        with pytest.raises(ValueError):
            lda_fit([["a"]], 0)

    def test_deterministic(self):
        rng = np.random.default_rng(2)
        docs, _ = corpora.two_block_topic_corpus(rng, n_docs=8, doc_len=6)
        a = lda_fit(docs, 2, sweeps=20, seed=3)
        b = lda_fit(docs, 2, sweeps=20, seed=3)
        assert all(np.array_equal(x, y) for x, y in zip(a.assignments, b.assignments))

    def test_planted_blocks_alignment(self):
        rng = np.random.default_rng(4)
        docs, block_of = corpora.two_block_topic_corpus(rng, n_docs=40, doc_len=20)
        model = lda_fit(docs, 2, sweeps=200, seed=5)
        dominant = [int(np.argmax(lda_features(model, d))) for d in range(len(docs))]
        assert purity(dominant, block_of) >= 0.9


class TestLdaFeatures:
    def fitted(self):
        # small alpha: the fold-in mass examples need the posterior to be
        # data-dominated, which 50/T smoothing would cap below 0.6
        rng = np.random.default_rng(6)
        docs, block_of = corpora.two_block_topic_corpus(rng, n_docs=30, doc_len=15)
        return lda_fit(docs, 2, alpha=0.1, sweeps=150, seed=7), block_of

    def test_probability_vector(self):
        model, _ = self.fitted()
        for d in range(5):
            vec = lda_features(model, d)
            assert vec.sum() == pytest.approx(1.0, abs=1e-9)
            assert (vec >= 0).all()

    def test_fold_in_unseen_block_doc(self):
        model, block_of = self.fitted()
        # which topic owns the "a" block, by training majority
        a_doc_ids = [d for d in range(30) if block_of[d] == 0]
        votes = [int(np.argmax(lda_features(model, d))) for d in a_doc_ids]
        a_topic = max(set(votes), key=votes.count)
        unseen = [f"a{i:02d}" for i in range(12)]
        vec = fold_in(model, unseen, sweeps=20)
        assert vec[a_topic] >= 0.8

    def test_fold_in_oov_only_doc(self):
        model, _ = self.fitted()
        vec = fold_in(model, ["zzz", "qqq"])
        assert vec.sum() == pytest.approx(1.0)
        assert np.allclose(vec, 0.5)

    def test_fold_in_deterministic(self):
        model, _ = self.fitted()
        doc = [f"a{i:02d}" for i in range(8)]
        assert np.array_equal(fold_in(model, doc, seed=9), fold_in(model, doc, seed=9))


class TestCoupledClustering:
    def test_feature_length(self):
        X = np.zeros((4, 7))
        topic_vectors = np.full((4, 3), 1 / 3)
        features = coupled_features(X, topic_vectors)
        assert features.shape == (4, 10)

    def test_blocks_l2_normalized(self):
        rng = np.random.default_rng(8)
        X = rng.normal(size=(5, 6))
        T = np.abs(rng.normal(size=(5, 2)))
        features = coupled_features(X, T)
        assert np.allclose(np.linalg.norm(features[:, :6], axis=1), 1.0)
        assert np.allclose(np.linalg.norm(features[:, 6:], axis=1), 1.0)

    def test_constant_topic_feature_leaves_kmeans_unchanged(self):
        # T=1 appends a constant column; after centering, euclidean K-Means
        # sees identical geometry
        rng = np.random.default_rng(9)
        X = rng.normal(size=(12, 5))
        topic_vectors = np.ones((12, 1))
        coupled = coupled_features(X, topic_vectors)
        base = coupled[:, :5]
        centered_coupled = coupled - coupled.mean(axis=0)
        centered_base = base - base.mean(axis=0)
        a = kmeans(centered_coupled, 3, seed=10)
        b = kmeans(centered_base, 3, seed=10)
        assert np.array_equal(coincidence_matrix(a.labels), coincidence_matrix(b.labels))

    def test_coupled_beats_plain_on_majority_of_seeds(self):
        from rubriq.vectorize import fit_tfidf, transform_matrix

        wins = 0
        for seed in range(20):
            rng = np.random.default_rng(1000 + seed)
            docs, block_of = corpora.two_block_topic_corpus(rng, n_docs=24, doc_len=12)
            tfidf = fit_tfidf(docs)
            X = transform_matrix(tfidf, docs)
            plain = kmeans(X, 2, seed=seed)
            coupled = lda_coupled_clustering(
                X, docs, n_topics=2, lda_sweeps=60, seed=seed, k=2
            )
            if purity(coupled.labels.tolist(), block_of) >= purity(
                plain.labels.tolist(), block_of
            ):
                wins += 1
        assert wins >= 15

    def test_dispatches_methods(self):
        rng = np.random.default_rng(11)
        docs, _ = corpora.two_block_topic_corpus(rng, n_docs=10, doc_len=8)
        X = np.abs(np.random.default_rng(12).normal(size=(10, 6)))
        for method in ("kmeans", "agglomerative", "spectral"):
            out = lda_coupled_clustering(
                X, docs, n_topics=2, lda_sweeps=10, seed=13, method=method, k=2
            )
            assert len(set(out.labels.tolist())) <= 2


class TestSerialization:
    def test_roundtrip_and_fold_in(self, tmp_path):
        rng = np.random.default_rng(14)
        docs, _ = corpora.two_block_topic_corpus(rng, n_docs=12, doc_len=10)
        model = lda_fit(docs, 2, sweeps=30, seed=15)
        path = tmp_path / "lda.txt"
        save_lda(model, str(path))
        loaded = load_lda(str(path))
        assert loaded.n_topics == model.n_topics
        assert loaded.vocabulary == model.vocabulary
        assert np.array_equal(loaded.topic_word, model.topic_word)
        assert np.array_equal(loaded.doc_topic, model.doc_topic)
        doc = [f"a{i:02d}" for i in range(6)]
        assert np.array_equal(
            fold_in(model, doc, seed=16), fold_in(loaded, doc, seed=16)
        )
