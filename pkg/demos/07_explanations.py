"""
Local explanations and the reliability comparison
=================================================

Fits two classifiers over different feature backends, explains the same
prediction with both, and measures how much their top contributing words
overlap.
"""

import numpy as np

from rubriq.classify import TrainConfig, train_svm
from rubriq.explain import explanation_to_tsv, lime_explain, overlap_precision
from rubriq.textproc import prepare
from rubriq.vectorize import fit_tfidf, transform_matrix

rng = np.random.default_rng(0)

# small labeled corpus: "task"-ish vs "finding"-ish phrasing
task_words = ["build", "design", "implement", "pipeline", "system"]
finding_words = ["result", "accuracy", "improve", "score", "drop"]
docs, labels = [], []
for _ in range(30):
    for words, label in ((task_words, "task"), (finding_words, "finding")):
        docs.append([words[rng.integers(5)] for _ in range(6)] + ["agent"])
        labels.append(label)

def make_scorer(use_idf):
    model_tfidf = fit_tfidf(docs)
    X = transform_matrix(model_tfidf, docs, use_idf=use_idf)
    svm = train_svm(X, labels, TrainConfig(seed=1))

    def scorer(texts):
        stems = [[t.stem for t in prepare(text)] for text in texts]
        return svm.decision_scores(transform_matrix(model_tfidf, stems, use_idf=use_idf))

    return svm, scorer

TEXT = "the agent design did improve the accuracy score"

explanations = []
for backend, use_idf in (("tfidf", True), ("bow", False)):
    svm, scorer = make_scorer(use_idf)
    target = int(np.argmax(scorer([TEXT])[0]))
    explanation = lime_explain(scorer, TEXT, target, n_samples=300, seed=4)
    explanations.append(explanation)
    print(f"\n{backend} explains class {svm.classes[target]!r} (R^2 {explanation.r2:.3f})")
    print(explanation_to_tsv(explanation))

# fraction of shared words among each side's top contributors
for n in (3, 5):
    print(f"overlap precision @{n}:",
          round(overlap_precision(explanations[0], explanations[1], n), 3))
