"""Linear classification: one-vs-rest hinge-loss SGD with L2 regularization,
the stratified baseline, and grid search over training/vectorizer knobs.

The learning-rate schedule is eta_t = eta0 / (1 + eta0 * lambda * t) with t
counting samples across epochs.  Training is deterministic for a fixed
seed: each binary subproblem derives its own RNG from (seed, class index)
and shuffles the sample order once per epoch.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import vectorize
from .metrics import confusion_matrix, prf


@dataclass
class TrainConfig:
    eta0: float = 0.1
    lam: float = 1e-4
    epochs: int = 50
    seed: int = 0
    class_weighting: str = "none"  # none | balanced

    def __post_init__(self) -> None:
        if self.eta0 <= 0:
            raise ValueError("eta0 must be > 0")
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.class_weighting not in ("none", "balanced"):
            raise ValueError(f"unknown class_weighting {self.class_weighting!r}")


@dataclass
class LinearModel:
    classes: list
    weights: np.ndarray  # (n_classes, n_features)
    biases: np.ndarray
    config: TrainConfig

    def decision_scores(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.weights.shape[1]:
            raise ValueError(
                f"feature dim {X.shape[1]} does not match model dim {self.weights.shape[1]}"
            )
        return X @ self.weights.T + self.biases

    def predict(self, X: np.ndarray) -> list:
        scores = self.decision_scores(X)
        return [self.classes[i] for i in scores.argmax(axis=1)]


def _sample_weights(y: Sequence, cfg: TrainConfig) -> np.ndarray:
    if cfg.class_weighting == "none":
        return np.ones(len(y))
    counts: dict = {}
    for label in y:
        counts[label] = counts.get(label, 0) + 1
    n, k = len(y), len(counts)
    return np.array([n / (k * counts[label]) for label in y])


def train_svm(X: np.ndarray, y: Sequence, cfg: TrainConfig | None = None) -> LinearModel:
    """Per-class binary hinge SGD.  The binary target for class c is +1 on
    c and -1 elsewhere; the bias is not regularized."""
    cfg = cfg or TrainConfig()
    X = np.asarray(X, dtype=float)
    if not np.isfinite(X).all():
        raise ValueError("non-finite feature values")
    classes = sorted(set(y), key=str)
    if len(classes) < 2:
        raise ValueError("training data must contain at least 2 classes")
    n, dim = X.shape
    sample_weights = _sample_weights(y, cfg)
    weights = np.zeros((len(classes), dim))
    biases = np.zeros(len(classes))
    y = list(y)
    for ci, cls in enumerate(classes):
        target = np.where([label == cls for label in y], 1.0, -1.0)
        rng = np.random.default_rng([cfg.seed, ci])
        w = np.zeros(dim)
        b = 0.0
        t = 0
        for _ in range(cfg.epochs):
            order = rng.permutation(n)
            for i in order:
                eta = cfg.eta0 / (1.0 + cfg.eta0 * cfg.lam * t)
                t += 1
                w *= 1.0 - eta * cfg.lam
                margin = target[i] * (w @ X[i] + b)
                if margin < 1.0:
                    w += eta * sample_weights[i] * target[i] * X[i]
                    b += eta * sample_weights[i] * target[i]
        weights[ci] = w
        biases[ci] = b
    return LinearModel(classes=classes, weights=weights, biases=biases, config=cfg)


def hinge_objective(model: LinearModel, X: np.ndarray, y: Sequence) -> float:
    """Mean OvR hinge loss + L2 penalty; the quantity SGD descends."""
    X = np.asarray(X, dtype=float)
    total = 0.0
    for ci, cls in enumerate(model.classes):
        target = np.where([label == cls for label in y], 1.0, -1.0)
        margins = target * (X @ model.weights[ci] + model.biases[ci])
        total += np.maximum(0.0, 1.0 - margins).mean()
        total += 0.5 * model.config.lam * (model.weights[ci] @ model.weights[ci])
    return float(total)


@dataclass
class StratifiedBaseline:
    """Draws labels i.i.d. from the empirical training distribution."""

    classes: list
    probabilities: np.ndarray = field(repr=False)
    seed: int = 0

    def predict(self, X) -> list:
        n = len(X)
        rng = np.random.default_rng(self.seed)
        draws = rng.choice(len(self.classes), size=n, p=self.probabilities)
        return [self.classes[i] for i in draws]


def baseline_stratified(train_labels: Sequence, seed: int = 0) -> StratifiedBaseline:
    if not len(train_labels):
        raise ValueError("empty training labels")
    classes = sorted(set(train_labels), key=str)
    counts = np.array([sum(1 for l in train_labels if l == c) for c in classes], dtype=float)
    return StratifiedBaseline(classes=classes, probabilities=counts / counts.sum(), seed=seed)


def model_to_text(model: LinearModel) -> str:
    """Versioned flat text dump: class list, then per-class bias + weights."""
    cfg = model.config
    lines = [
        "linearmodel v1",
        " ".join(str(c) for c in model.classes),
        f"config {cfg.eta0!r} {cfg.lam!r} {cfg.epochs} {cfg.seed} {cfg.class_weighting}",
    ]
    for ci in range(len(model.classes)):
        lines.append(f"bias {float(model.biases[ci])!r}")
        lines.append("weights " + " ".join(repr(float(v)) for v in model.weights[ci]))
    return "\n".join(lines) + "\n"


def save_model(model: LinearModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(model_to_text(model))


def load_model(path: str) -> LinearModel:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if lines[0] != "linearmodel v1":
        raise ValueError(f"{path}: unsupported model format {lines[0]!r}")
    classes = lines[1].split()
    _, eta0, lam, epochs, seed, weighting = lines[2].split()
    biases = []
    weights = []
    for line in lines[3:]:
        key, _, rest = line.partition(" ")
        if key == "bias":
            biases.append(float(rest))
        elif key == "weights":
            weights.append(np.array([float(v) for v in rest.split()]))
    return LinearModel(
        classes=classes,
        weights=np.stack(weights),
        biases=np.array(biases),
        config=TrainConfig(
            eta0=float(eta0),
            lam=float(lam),
            epochs=int(epochs),
            seed=int(seed),
            class_weighting=weighting,
        ),
    )


@dataclass
class GridCellResult:
    params: dict
    fold: int
    macro_f1: float
    accuracy: float


def grid_search(
    docs: Sequence[Sequence[str]],
    labels: Sequence,
    folds: Sequence[int],
    grid: dict[str, list],
    base_seed: int = 0,
) -> tuple[dict, list[GridCellResult]]:
    """Exhaustive search over (vectorizer + trainer) parameters, selecting
    by mean macro-F1 across folds.  ``grid`` may hold ``ngram_range`` plus
    any TrainConfig field; every cell of the full report is returned."""
    if not grid:
        raise ValueError("empty parameter grid")
    names = sorted(grid)
    fold_ids = sorted(set(folds))
    report: list[GridCellResult] = []
    best: tuple[float, int, dict] | None = None
    for cell_index, values in enumerate(itertools.product(*(grid[n] for n in names))):
        params = dict(zip(names, values))
        ngram_range = tuple(params.get("ngram_range", (1, 1)))
        cfg_fields = {k: v for k, v in params.items() if k != "ngram_range"}
        scores = []
        for fold in fold_ids:
            train_docs = [d for d, f in zip(docs, folds) if f != fold]
            train_labels = [l for l, f in zip(labels, folds) if f != fold]
            test_docs = [d for d, f in zip(docs, folds) if f == fold]
            test_labels = [l for l, f in zip(labels, folds) if f == fold]
            model_tfidf = vectorize.fit_tfidf(train_docs, ngram_range)
            X_train = vectorize.transform_matrix(model_tfidf, train_docs)
            X_test = vectorize.transform_matrix(model_tfidf, test_docs)
            cfg = TrainConfig(seed=base_seed + cell_index, **cfg_fields)
            model = train_svm(X_train, train_labels, cfg)
            predictions = model.predict(X_test)
            cm = confusion_matrix(test_labels, predictions)
            _, _, macro_f1 = prf(cm, "macro")
            correct = sum(p == t for p, t in zip(predictions, test_labels))
            report.append(
                GridCellResult(
                    params=params, fold=fold, macro_f1=macro_f1, accuracy=correct / len(test_labels)
                )
            )
            scores.append(macro_f1)
        mean_f1 = float(np.mean(scores))
        if best is None or mean_f1 > best[0]:
            best = (mean_f1, cell_index, params)
    assert best is not None
    return best[2], report
