"""
Datasets, folds and text preprocessing
======================================

Generates a small synthetic annotated corpus, loads it back through the
validating reader, and walks through the preprocessing primitives every
extractor builds on.
"""

import tempfile

from rubriq.corpus import load_dataset, map_generic_to_specific, split_fold
from rubriq.runner import synth
from rubriq.textproc import ngrams, prepare, stem, tokenize

# ---------------------------------------------------------------------------
# A dataset is one JSON object per line: id, text, keyphrase flag, generic
# class, specific rubric, fold, optional doc_id / pos tags.  The generator
# plants class-specific vocabulary so downstream methods have signal to find.

path = tempfile.mktemp(suffix=".jsonl")
synth(seed=7, sizes={"Task": 4, "Finding": 4, "Reason": 4, "Intuition": 4, "Other": 8},
      out_path=path)

dataset = load_dataset(path)
print(f"{len(dataset)} phrases; per-fold class counts:")
for fold in (1, 2):
    print(" fold", fold, dataset.counts[fold])

# The generic -> rubric mapping is a fixed table; Other has no rubric.
for generic in ("Task", "Finding", "Reason", "Intuition", "Other"):
    print(f"{generic:10s} -> {map_generic_to_specific(generic)}")

# Folds partition the data exactly; the requested fold is the test side.
train, test = split_fold(dataset, 1)
print(f"fold 1: {len(train)} train / {len(test)} test")

# ---------------------------------------------------------------------------
# Tokenization case-folds, strips punctuation into boundaries, and tracks
# sentence/block indices.  Stems come from the bundled Porter implementation.

tokens = tokenize("The agent solved 2CP's. Visual reasoning helped!")
print([t.surface for t in tokens])
print([(t.surface, t.sentence_index, t.block_index) for t in tokens[:5]])

print(stem("running"), stem("relationships"), stem("visual"))

# The heuristic tagger marks stopwords, then consults a small lexicon and
# suffix rules; datasets can override it per phrase with a pos array.
tagged = prepare("the visual agent solved problems")
print([(t.surface, t.tag) for t in tagged])

# n-grams are grouped by order, each block in document order.
print(ngrams(["a", "b", "c"], 1, 2))
