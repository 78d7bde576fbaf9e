"""Shared planted-structure generators for the tests."""

from __future__ import annotations

import numpy as np

N_SIGNAL = 5
N_NOISE = 10


def bow_corpus(rng, n_per_class=20, n_classes=4, doc_len=12, signal_strength=0.8,
               class_sizes=None):
    """Bag-of-words count matrix where each class owns N_SIGNAL exclusive
    signal columns; the rest of the mass falls on shared noise columns."""
    dim = n_classes * N_SIGNAL + N_NOISE
    sizes = class_sizes or [n_per_class] * n_classes
    X = []
    y = []
    for cls in range(n_classes):
        for _ in range(sizes[cls]):
            row = np.zeros(dim)
            for _ in range(doc_len):
                if rng.random() < signal_strength:
                    col = cls * N_SIGNAL + rng.integers(N_SIGNAL)
                else:
                    col = n_classes * N_SIGNAL + rng.integers(N_NOISE)
                row[col] += 1.0
            X.append(row)
            y.append(f"c{cls}")
    return np.array(X), y


def token_corpus(rng, n_per_class=20, n_classes=4, doc_len=10, signal_strength=0.8):
    """Same planted structure as token lists, for vectorizer-coupled tests."""
    noise = [f"noise{i}" for i in range(N_NOISE)]
    docs, y = [], []
    for cls in range(n_classes):
        signal = [f"sig{cls}w{i}" for i in range(N_SIGNAL)]
        for _ in range(n_per_class):
            words = []
            for _ in range(doc_len):
                pool = signal if rng.random() < signal_strength else noise
                words.append(pool[rng.integers(len(pool))])
            docs.append(words)
            y.append(f"c{cls}")
    return docs, y


def two_block_topic_corpus(rng, n_docs=40, doc_len=20):
    """Docs drawn from one of two disjoint 20-word vocabularies."""
    blocks = [[f"a{i:02d}" for i in range(20)], [f"b{i:02d}" for i in range(20)]]
    docs, block_of = [], []
    for d in range(n_docs):
        block = d % 2
        vocab = blocks[block]
        docs.append([vocab[rng.integers(20)] for _ in range(doc_len)])
        block_of.append(block)
    return docs, block_of
