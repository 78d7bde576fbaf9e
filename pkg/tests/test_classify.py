import numpy as np
import pytest

import corpora
from rubriq.classify import (
    GridCellResult,
    LinearModel,
    StratifiedBaseline,
    TrainConfig,
    baseline_stratified,
    grid_search,
    hinge_objective,
    load_model,
    model_to_text,
    save_model,
    train_svm,
)
from rubriq.metrics import confusion_matrix, per_class_prf, prf


class TestTrainSvm:
    def test_separable_pair(self):
        X = np.array([[-1.0], [1.0]])
        y = ["A", "B"]
        model = train_svm(X, y, TrainConfig(epochs=100, seed=0))
        assert model.predict(X) == y

    def test_planted_corpus_training_macro_f1_one(self):
        rng = np.random.default_rng(0)
        X, y = corpora.bow_corpus(rng, n_per_class=15)
        model = train_svm(X, y, TrainConfig(seed=1))
        cm = confusion_matrix(y, model.predict(X))
        _, _, macro_f1 = prf(cm, "macro")
        assert macro_f1 == 1.0

    def test_duplicated_samples_same_predictions(self):
        rng = np.random.default_rng(1)
        X, y = corpora.bow_corpus(rng, n_per_class=10)
        base = train_svm(X, y, TrainConfig(epochs=40, seed=2))
        doubled = train_svm(
            np.vstack([X, X]), y + y, TrainConfig(epochs=20, seed=2)
        )
        probe = corpora.bow_corpus(np.random.default_rng(99), n_per_class=8)[0]
        assert base.predict(probe) == doubled.predict(probe)

    def test_single_class_error(self):
        with pytest.raises(ValueError, match="2 classes"):
            train_svm(np.zeros((3, 2)), ["A", "A", "A"])

    def test_non_finite_error(self):
        with pytest.raises(ValueError, match="non-finite"):
            train_svm(np.array([[np.nan], [1.0]]), ["A", "B"])

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(3)
        X, y = corpora.bow_corpus(rng, n_per_class=6)
        a = train_svm(X, y, TrainConfig(seed=11))
        b = train_svm(X, y, TrainConfig(seed=11))
        assert np.array_equal(a.weights, b.weights)
        assert np.array_equal(a.biases, b.biases)

    def test_epoch_objective_nonincreasing_on_separable_corpus(self):
        rng = np.random.default_rng(4)
        X, y = corpora.bow_corpus(rng, n_per_class=10, signal_strength=1.0)
        objectives = []
        for epochs in range(1, 9):
            model = train_svm(X, y, TrainConfig(epochs=epochs, seed=5))
            objectives.append(hinge_objective(model, X, y))
        for before, after in zip(objectives[1:], objectives[2:]):
            assert after <= before + 1e-9

    def test_scale_invariance_lambda_zero(self):
        rng = np.random.default_rng(5)
        X, y = corpora.bow_corpus(rng, n_per_class=10)
        probe = corpora.bow_corpus(np.random.default_rng(77), n_per_class=5)[0]
        cfg = TrainConfig(lam=0.0, epochs=30, seed=6)
        base = train_svm(X, y, cfg).predict(probe)
        for scale in (0.5, 4.0):
            scaled = train_svm(X * scale, y, cfg).predict(probe * scale)
            assert scaled == base

    def test_balanced_weighting_lifts_minority_recall(self):
        rng = np.random.default_rng(6)
        X, y = corpora.bow_corpus(
            rng, n_classes=2, class_sizes=[40, 5], signal_strength=0.55, doc_len=8
        )
        test_X, test_y = corpora.bow_corpus(
            np.random.default_rng(60), n_classes=2, class_sizes=[40, 40],
            signal_strength=0.55, doc_len=8,
        )
        plain = train_svm(X, y, TrainConfig(seed=7, epochs=10))
        balanced = train_svm(
            X, y, TrainConfig(seed=7, epochs=10, class_weighting="balanced")
        )
        def minority_recall(model):
            cm = confusion_matrix(test_y, model.predict(test_X))
            return per_class_prf(cm)["c1"][1]
        assert minority_recall(balanced) >= minority_recall(plain)


class TestPredict:
    def make_model(self, weights, biases, classes=None):
        return LinearModel(
            classes=classes or ["A", "B", "C"],
            weights=np.array(weights, dtype=float),
            biases=np.array(biases, dtype=float),
            config=TrainConfig(),
        )

    def test_zero_vector_ties_to_first_class(self):
        model = self.make_model(np.zeros((3, 2)), np.zeros(3))
        assert model.predict(np.zeros((1, 2))) == ["A"]

    def test_shift_invariance(self):
        model = self.make_model([[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0], ["A", "B"])
        shifted = self.make_model([[1.0, 0.0], [0.0, 1.0]], [5.0, 5.0], ["A", "B"])
        X = np.random.default_rng(8).normal(size=(20, 2))
        assert model.predict(X) == shifted.predict(X)

    def test_dim_mismatch(self):
        model = self.make_model(np.zeros((2, 3)), np.zeros(2), ["A", "B"])
        with pytest.raises(ValueError, match="dim"):
            model.predict(np.zeros((1, 2)))


class TestBaseline:
    def test_single_class(self):
        predictor = baseline_stratified(["X", "X", "X"], seed=0)
        assert predictor.predict(range(10)) == ["X"] * 10

    def test_law_of_large_numbers(self):
        labels = ["a"] * 50 + ["b"] * 30 + ["c"] * 20
        predictor = baseline_stratified(labels, seed=1)
        draws = predictor.predict(range(100_000))
        for cls, want in (("a", 0.5), ("b", 0.3), ("c", 0.2)):
            assert draws.count(cls) / 100_000 == pytest.approx(want, abs=0.01)

    def test_expected_accuracy_sum_of_squares(self):
        # identical train/test distribution: accuracy -> sum p_i^2
        probs = {"a": 0.5, "b": 0.3, "c": 0.2}
        labels = [c for c, p in probs.items() for _ in range(int(p * 100))]
        rng = np.random.default_rng(2)
        test = [rng.choice(list(probs), p=list(probs.values())) for _ in range(20_000)]
        predictor = baseline_stratified(labels, seed=3)
        predictions = predictor.predict(test)
        accuracy = np.mean([t == p for t, p in zip(test, predictions)])
        expected = sum(p * p for p in probs.values())
        assert accuracy == pytest.approx(expected, abs=0.02)

    def test_empty_error(self):
        with pytest.raises(ValueError):
            baseline_stratified([])


class TestGridSearch:
    def small_problem(self, seed=0):
        rng = np.random.default_rng(seed)
        docs, y = corpora.token_corpus(rng, n_per_class=8, n_classes=3)
        folds = [1 + i % 2 for i in range(len(docs))]
        return docs, y, folds

    def test_single_cell(self):
        docs, y, folds = self.small_problem()
        best, report = grid_search(docs, y, folds, {"ngram_range": [(1, 1)]})
        assert best == {"ngram_range": (1, 1)}
        assert len(report) == 2  # one cell x two folds

    def test_report_rows_grid_times_folds(self):
        docs, y, folds = self.small_problem()
        grid = {"ngram_range": [(1, 1), (1, 2)], "lam": [1e-4, 1e-2]}
        _, report = grid_search(docs, y, folds, grid)
        assert len(report) == 4 * 2
        assert all(isinstance(row, GridCellResult) for row in report)

    def test_dominated_config_never_selected(self):
        docs, y, folds = self.small_problem(seed=1)
        grid = {"lam": [1e-4, 1e6]}  # the huge penalty freezes weights at ~0
        best, _ = grid_search(docs, y, folds, grid)
        assert best["lam"] == pytest.approx(1e-4)

    def test_empty_grid(self):
        with pytest.raises(ValueError):
            grid_search([], [], [], {})


class TestSerialization:
    def test_roundtrip(self, tmp_path):
        rng = np.random.default_rng(9)
        X, y = corpora.bow_corpus(rng, n_per_class=5)
        model = train_svm(X, y, TrainConfig(seed=10))
        path = tmp_path / "model.txt"
        save_model(model, str(path))
        loaded = load_model(str(path))
        assert loaded.classes == model.classes
        assert np.array_equal(loaded.weights, model.weights)
        assert np.array_equal(loaded.biases, model.biases)
        assert loaded.predict(X) == model.predict(X)

    def test_versioned_header(self):
        rng = np.random.default_rng(9)
        X, y = corpora.bow_corpus(rng, n_per_class=3, n_classes=2)
        model = train_svm(X, y)
        assert model_to_text(model).startswith("linearmodel v1\n")
