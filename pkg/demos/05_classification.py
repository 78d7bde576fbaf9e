"""
Linear classification: hinge-loss SGD, baseline, grid search
============================================================

The one-vs-rest SGD classifier against the stratified baseline on a
planted corpus, plus the two-fold grid search that picks the n-gram range.
"""

import numpy as np

from rubriq.classify import TrainConfig, baseline_stratified, grid_search, train_svm
from rubriq.metrics import confusion_matrix, prf
from rubriq.vectorize import fit_tfidf, transform_matrix

# ---------------------------------------------------------------------------
# Planted 4-class corpus: each class owns exclusive signal words.

rng = np.random.default_rng(0)
signal = {c: [f"sig{c}{i}" for i in range(5)] for c in range(4)}
noise = [f"noise{i}" for i in range(10)]

def make_docs(n_per_class, seed):
    local = np.random.default_rng(seed)
    docs, labels = [], []
    for c in range(4):
        for _ in range(n_per_class):
            words = [
                (signal[c] if local.random() < 0.8 else noise)[local.integers(5)]
                for _ in range(10)
            ]
            docs.append(words)
            labels.append(f"class{c}")
    return docs, labels

train_docs, y_train = make_docs(20, seed=1)
test_docs, y_test = make_docs(10, seed=2)

tfidf = fit_tfidf(train_docs)
X_train = transform_matrix(tfidf, train_docs)
X_test = transform_matrix(tfidf, test_docs)

model = train_svm(X_train, y_train, TrainConfig(seed=3))
cm = confusion_matrix(y_test, model.predict(X_test))
print("SVM   macro P/R/F1:", tuple(round(v, 3) for v in prf(cm, "macro")))

baseline = baseline_stratified(y_train, seed=3)
cm = confusion_matrix(y_test, baseline.predict(X_test))
print("Strat macro P/R/F1:", tuple(round(v, 3) for v in prf(cm, "macro")))

# ---------------------------------------------------------------------------
# Grid search evaluates every cell on both folds and selects by mean
# macro-F1; the report keeps every cell for inspection.

docs, labels = make_docs(16, seed=4)
folds = [1 + i % 2 for i in range(len(docs))]
grid = {"ngram_range": [(1, 1), (1, 2)], "lam": [1e-4, 1e-2]}
best, rows = grid_search(docs, labels, folds, grid, base_seed=5)
print("selected:", best)
for row in rows[:4]:
    print(f"  {row.params} fold {row.fold}: macro-F1 {row.macro_f1:.3f}")
