"""
Feature backends: TF-IDF and embedding stores
=============================================

The two ways phrases become vectors: the n-gram TF-IDF model fitted on a
corpus, and precomputed embeddings loaded from the TSV store format.
"""

import tempfile

import numpy as np

from rubriq.vectorize import (
    EmbeddingStore,
    fit_tfidf,
    load_embeddings,
    save_embeddings,
    transform,
    transform_matrix,
)

# ---------------------------------------------------------------------------
# TF is the within-document ratio, IDF = ln(D / DF) with no smoothing.

docs = [
    ["cat", "sat"],
    ["cat", "ran"],
    ["dog", "ran", "far"],
    ["dog", "sat"],
]
model = fit_tfidf(docs)
for term in sorted(model.vocabulary):
    print(f"idf({term}) = ln({model.n_docs}/{model.df[term]}) = {model.idf(term):.4f}")

# A term present everywhere weighs exactly zero and is omitted from the
# sparse vector; repetition cannot change a document's vector.
vec = transform(model, ["cat", "sat"])
print("entries:", {k: round(v, 4) for k, v in vec.entries.items()})
assert transform(model, ["cat", "sat"] * 3).entries.keys() == vec.entries.keys()

# Bigrams widen the vocabulary; use_idf=False gives the plain BOW ratios.
bigram_model = fit_tfidf(docs, ngram_range=(1, 2))
print("bigram vocabulary size:", bigram_model.dim)
X = transform_matrix(model, docs, use_idf=False)
print("BOW matrix shape:", X.shape, "row sums:", X.sum(axis=1))

# ---------------------------------------------------------------------------
# Embedding stores are TSV files with a '#dim=' header, one phrase per row.
# Any exporter that writes this format plugs into the classifiers directly.

rng = np.random.default_rng(0)
store = EmbeddingStore(dim=4, vectors={f"p{i}": rng.normal(size=4) for i in range(3)})
path = tempfile.mktemp(suffix=".tsv")
save_embeddings(store, path)
print(open(path).readline().strip())

loaded = load_embeddings(path)
print("dim", loaded.dim, "rows", len(loaded))
print("max round-trip error:",
      max(abs(loaded.vectors[k] - store.vectors[k]).max() for k in store.vectors))
