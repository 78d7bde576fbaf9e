"""
Supervised extraction and fuzzy matching
========================================

Trains the Naive Bayes extractors on gold keyphrase sentences, then shows
how short candidates turn into per-phrase keyphrase predictions through
fuzzy matching.
"""

import tempfile

from rubriq import kea
from rubriq.corpus import load_dataset, split_fold
from rubriq.match import MatchConfig, label_phrases, similarity
from rubriq.runner import split_documents, synth

# ---------------------------------------------------------------------------
# Similarity blends stem containment with a Levenshtein ratio, so a 2-3 word
# candidate embedded in a longer phrase still scores high.

print(similarity("agent reasoning", "the agent reasoning process"))
print(similarity("solar panel", "window curtain"))

# ---------------------------------------------------------------------------
# Train one model per variant on the train fold, predict candidates on the
# test fold, and match them back onto the full phrases.

path = tempfile.mktemp(suffix=".jsonl")
synth(seed=3, sizes={"Task": 6, "Finding": 6, "Reason": 6, "Intuition": 6, "Other": 12},
      out_path=path)
dataset = load_dataset(path)
train, test = split_fold(dataset, 1)
train_docs = split_documents(train)
test_docs = split_documents(test)

for variant in (kea.KEA, kea.WINGNUS):
    model = kea.train(
        [d.tokens for d in train_docs],
        [[p.text for p in d.phrases if p.keyphrase] for d in train_docs],
        variant=variant,
    )
    correct = total = 0
    for doc in test_docs:
        candidates = kea.predict(model, doc.tokens, k=6)
        predictions = label_phrases(candidates, doc.phrases, MatchConfig(threshold=0.6))
        for phrase, predicted in zip(doc.phrases, predictions):
            correct += predicted == phrase.keyphrase
            total += 1
    print(f"{variant}: {correct}/{total} phrases labeled correctly")

# The mask only depends on each phrase's best-matching candidate, so
# candidate order is irrelevant and raising the threshold can only turn
# positives into negatives.
doc = test_docs[0]
candidates = kea.predict(model, doc.tokens, k=6)
for threshold in (0.4, 0.6, 0.8):
    mask = label_phrases(candidates, doc.phrases, MatchConfig(threshold=threshold))
    print(f"threshold {threshold}: {sum(mask)}/{len(mask)} predicted keyphrases")
