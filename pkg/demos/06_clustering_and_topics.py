"""
Classification via clustering, and LDA coupling
===============================================

Three clusterers share one bridge to classification: majority-vote the
training labels inside each cluster.  The cluster-quality metrics (purity,
Rand index, AMI, silhouette) tell the rest of the story, and LDA topic
posteriors can be concatenated onto the features.
"""

import numpy as np

from rubriq.cluster import agglomerative, fit_cluster_classifier, kmeans, spectral
from rubriq.metrics import ami, purity, rand_index, silhouette
from rubriq.topics import coupled_features, lda_features, lda_fit

rng = np.random.default_rng(0)

# two well-separated blobs with labels
X = np.vstack([rng.normal(size=(15, 2)), rng.normal(size=(15, 2)) + 8.0])
y = ["low"] * 15 + ["high"] * 15

# ---------------------------------------------------------------------------
# The three clusterers:

for name, assignment in [
    ("kmeans++", kmeans(X, 2, init="kmeanspp", seed=1)),
    ("agglomerative-ward", agglomerative(X, 2)),
    ("spectral-discretize", spectral(X, 2, assign="discretize", seed=1)),
]:
    labels = assignment.labels.tolist()
    print(
        f"{name:20s} purity={purity(labels, y):.3f} "
        f"RI={rand_index(labels, y):.3f} AMI={ami(labels, y):.3f} "
        f"SIL={silhouette(X, labels):.3f}"
    )

# The classifier bridge maps each cluster to its majority training label
# and routes new points to the nearest center / training point / embedded
# center depending on the method.
classifier = fit_cluster_classifier(X, y, method="kmeans", k=2, seed=1)
print("probe predictions:", classifier.classify_many(np.array([[0.0, 0.0], [8.0, 8.0]])))

# ---------------------------------------------------------------------------
# LDA over a two-vocabulary corpus, then feature coupling.

docs = []
for d in range(20):
    vocab = [f"a{i}" for i in range(12)] if d % 2 == 0 else [f"b{i}" for i in range(12)]
    docs.append([vocab[rng.integers(12)] for _ in range(15)])

model = lda_fit(docs, 2, alpha=0.5, sweeps=150, seed=2)
print("doc 0 topic posterior:", np.round(lda_features(model, 0), 3))
print("doc 1 topic posterior:", np.round(lda_features(model, 1), 3))

# coupling: L2-normalize each block so topics are not drowned by |V| dims
tfidf_block = rng.normal(size=(20, 30))
topic_block = np.stack([lda_features(model, d) for d in range(20)])
features = coupled_features(tfidf_block, topic_block)
print("coupled feature shape:", features.shape)
coupled = kmeans(features, 2, seed=3)
blocks = [d % 2 for d in range(20)]
print("coupled clustering purity vs vocabulary blocks:",
      round(purity(coupled.labels.tolist(), blocks), 3))
