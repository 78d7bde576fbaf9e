"""Local surrogate explanations of any text classifier, plus the top-n
overlap comparison used to judge whether two models attend to the same
words.

The perturbation is token deletion: binary masks over the distinct tokens
of the input are sampled uniformly, masked variants are scored by the
classifier, and a weighted ridge regression from masks to the target-class
score yields per-token contributions.  Sample weights decay with the
cosine distance of the mask from the all-ones mask.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .textproc import tokenize

Scorer = Callable[[Sequence[str]], np.ndarray]  # texts -> (n, n_classes) scores


@dataclass
class Explanation:
    tokens: list[str]  # distinct tokens, first-occurrence order
    contributions: np.ndarray
    intercept: float
    r2: float

    def ranked_tokens(self) -> list[str]:
        order = sorted(
            range(len(self.tokens)),
            key=lambda i: (-abs(self.contributions[i]), self.tokens[i]),
        )
        return [self.tokens[i] for i in order]


def lime_explain(
    predict_scores: Scorer,
    text: str,
    target_class: int,
    n_samples: int = 200,
    seed: int = 0,
    kernel_width: float | None = None,
    ridge_lambda: float = 1.0,
) -> Explanation:
    """Explain one prediction of ``predict_scores`` on ``text``.

    ``target_class`` indexes the score column being explained.  Masking a
    token removes every occurrence of it from the reconstructed text.
    """
    if n_samples < 10:
        raise ValueError("n_samples must be >= 10")
    all_tokens = [t.surface for t in tokenize(text)]
    distinct: list[str] = []
    for surface in all_tokens:
        if surface not in distinct:
            distinct.append(surface)
    m = len(distinct)
    if m == 0:
        raise ValueError("cannot explain a text with no tokens")
    if kernel_width is None:
        kernel_width = 0.25 * math.sqrt(m)

    rng = np.random.default_rng(seed)
    masks = rng.integers(0, 2, size=(n_samples, m))
    texts = []
    for mask in masks:
        keep = {tok for tok, bit in zip(distinct, mask) if bit}
        texts.append(" ".join(t for t in all_tokens if t in keep))
    scores = np.asarray(predict_scores(texts), dtype=float)
    y = scores[:, target_class]

    ones = masks.sum(axis=1)
    cos_dist = 1.0 - np.sqrt(ones / m)
    weights = np.exp(-(cos_dist**2) / kernel_width**2)

    # weighted ridge with unpenalized intercept, solved as stacked least
    # squares so the lambda = 0 case degrades to plain weighted LS
    sqrt_w = np.sqrt(weights)
    design = np.hstack([masks.astype(float), np.ones((n_samples, 1))])
    rows = [design * sqrt_w[:, None]]
    targets = [y * sqrt_w]
    if ridge_lambda > 0:
        penalty = np.zeros((m, m + 1))
        penalty[:, :m] = math.sqrt(ridge_lambda) * np.eye(m)
        rows.append(penalty)
        targets.append(np.zeros(m))
    solution, *_ = np.linalg.lstsq(np.vstack(rows), np.concatenate(targets), rcond=None)
    contributions = solution[:m]
    intercept = float(solution[m])

    fitted = design @ solution
    sse = float(np.sum(weights * (y - fitted) ** 2))
    mean = float(np.sum(weights * y) / weights.sum())
    sst = float(np.sum(weights * (y - mean) ** 2))
    r2 = 1.0 - sse / sst if sst > 0 else (1.0 if sse == 0 else 0.0)
    return Explanation(tokens=distinct, contributions=contributions, intercept=intercept, r2=r2)


def overlap_precision(e1: Explanation, e2: Explanation, n: int) -> float:
    """|top-n tokens of e1 (by |contribution|) intersect top-n of e2| / n,
    comparing over the available count when a side has fewer tokens."""
    if n < 1:
        raise ValueError("n must be >= 1")
    effective = min(n, len(e1.tokens), len(e2.tokens))
    top1 = set(e1.ranked_tokens()[:effective])
    top2 = set(e2.ranked_tokens()[:effective])
    return len(top1 & top2) / effective


def explanation_to_tsv(explanation: Explanation) -> str:
    lines = ["feature\tcontribution"]
    order = sorted(
        range(len(explanation.tokens)),
        key=lambda i: (-abs(explanation.contributions[i]), explanation.tokens[i]),
    )
    for i in order:
        lines.append(f"{explanation.tokens[i]}\t{explanation.contributions[i]:+.6f}")
    return "\n".join(lines) + "\n"
