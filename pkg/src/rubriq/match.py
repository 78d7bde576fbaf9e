"""Fuzzy matching between short extracted candidates and full annotated
phrases, turning ranked candidates into per-phrase keyphrase predictions.

The similarity is a token-set partial ratio: candidates are 2-3 word
snippets embedded in longer phrases, so containment must score high.  Both
sides are stemmed; the score is the mean of

* |shared stems| / |stems of the shorter side|  (containment component),
* the Levenshtein ratio of the sorted-stem strings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .corpus import Phrase
from .graphrank import Candidate
from .textproc import levenshtein_ratio, tokenize


@dataclass
class MatchConfig:
    threshold: float = 0.6
    mode: str = "token_set_partial"  # the one implemented similarity mode

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must be in [0, 1]")
        if self.mode != "token_set_partial":
            raise ValueError(f"unknown match mode {self.mode!r}")


def _stem_set(text: str) -> frozenset[str]:
    return frozenset(t.stem for t in tokenize(text))


def similarity(a: str, b: str) -> float:
    """Symmetric similarity in [0, 1]; 0 when either side has no tokens."""
    stems_a = _stem_set(a)
    stems_b = _stem_set(b)
    if not stems_a or not stems_b:
        return 0.0
    shorter = min(len(stems_a), len(stems_b))
    containment = len(stems_a & stems_b) / shorter
    lev = levenshtein_ratio(" ".join(sorted(stems_a)), " ".join(sorted(stems_b)))
    return (containment + lev) / 2.0


def best_similarity(text: str, candidates: Sequence[Candidate | str]) -> float:
    best = 0.0
    for cand in candidates:
        surface = cand if isinstance(cand, str) else cand.surface
        best = max(best, similarity(surface, text))
    return best


def label_phrases(
    candidates: Sequence[Candidate | str],
    phrases: Sequence[Phrase],
    cfg: MatchConfig | None = None,
) -> list[bool]:
    """Phrase is predicted keyphrase iff some candidate reaches the
    threshold; with no candidates everything is predicted non-keyphrase."""
    cfg = cfg or MatchConfig()
    if not candidates:
        return [False] * len(phrases)
    return [best_similarity(p.text, candidates) >= cfg.threshold for p in phrases]
