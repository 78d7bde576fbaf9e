"""
The seven unsupervised keyphrase extractors
===========================================

Runs the five graph-based rankers and the two statistical extractors over
one document and prints their top candidates side by side.
"""

from rubriq.graphrank import (
    ExtractorConfig,
    build_word_graph,
    extract_multipartiterank,
    extract_positionrank,
    extract_singlerank,
    extract_textrank,
    extract_topicrank,
    pagerank,
)
from rubriq.statrank import extract_kpminer, extract_yake, KpMinerConfig
from rubriq.textproc import prepare

TEXT = (
    "Visual representation drives the agent design. The agent design uses a "
    "production system. Visual representation simplifies rule checks. The "
    "production system solves ratio problems. Ratio problems stress visual "
    "representation. The agent design failed on shading problems."
)

tokens = prepare(TEXT)

# ---------------------------------------------------------------------------
# All graph rankers walk the same substrate: a co-occurrence graph over
# NOUN/ADJ stems.  A quick look at it first.

graph = build_word_graph(tokens, window=3)
print(f"word graph: {len(graph)} nodes")
scores = pagerank(graph).scores
for node in sorted(scores, key=scores.get, reverse=True)[:5]:
    print(f"  {node:15s} {scores[node]:.4f}")

# ---------------------------------------------------------------------------
# Each extractor returns ranked candidates with document offsets.  Scores
# are not comparable across methods, orderings are.

cfg = ExtractorConfig(k=4)
methods = [
    ("TextRank", extract_textrank(tokens, cfg)),
    ("SingleRank", extract_singlerank(tokens, cfg)),
    ("PositionRank", extract_positionrank(tokens, cfg)),
    ("TopicRank", extract_topicrank(tokens, cfg)),
    ("MultipartiteRank", extract_multipartiterank(tokens, cfg)),
    ("YAKE", extract_yake(tokens, k=4)),
    # lasf=1 because a six-sentence document rarely repeats an exact span
    ("KPMiner", extract_kpminer(tokens, KpMinerConfig(lasf=1), k=4)),
]
for name, candidates in methods:
    print(f"\n{name}")
    for rank, cand in enumerate(candidates, start=1):
        print(f"  {rank}. {cand.surface:30s} score={cand.score:.4f} @ {cand.first_position}")
