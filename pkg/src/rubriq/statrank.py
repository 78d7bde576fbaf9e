"""Statistical unsupervised extractors: YAKE and KPMiner.

YAKE scores each term from five statistical features and each candidate
n-gram from the product of its member scores; lower is better, so the
exposed candidate score is 1/(1 + yake_score) to keep every extractor
ranking in descending order.

KPMiner keeps maximal stopword-free, punctuation-free spans that pass the
frequency and first-appearance filters, then weighs them by TF-IDF with a
multi-word boost.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass

from . import defaults
from .graphrank import Candidate, rank_top_k
from .textproc import Token, levenshtein_ratio, stopwords


@dataclass
class YakeTermStats:
    term: str
    tf: int
    casing: float
    position: float  # ln(ln(3 + median sentence index))
    frequency: float  # tf / (mean + std) over non-stopword terms
    dispersion_left: float  # distinct left co-terms / left co-occurrences
    dispersion_right: float
    spread: float  # distinct sentences / total sentences
    score: float = 0.0


def yake_term_stats(tokens: list[Token]) -> dict[str, YakeTermStats]:
    """Per-term feature table over the non-stopword surfaces of a document."""
    stops = stopwords()
    words = [t for t in tokens if t.surface not in stops]
    if not words:
        return {}
    n_sentences = tokens[-1].sentence_index + 1

    tf: dict[str, int] = {}
    upper: dict[str, int] = {}
    acronym: dict[str, int] = {}
    sentences: dict[str, set[int]] = {}
    left: dict[str, list[str]] = {}
    right: dict[str, list[str]] = {}
    sentence_indices: dict[str, list[int]] = {}

    sentence_first = {}
    for t in tokens:
        sentence_first.setdefault(t.sentence_index, t.position)

    for i, t in enumerate(words):
        term = t.surface
        tf[term] = tf.get(term, 0) + 1
        sentences.setdefault(term, set()).add(t.sentence_index)
        sentence_indices.setdefault(term, []).append(t.sentence_index)
        if t.raw[:1].isupper() and t.position != sentence_first[t.sentence_index]:
            upper[term] = upper.get(term, 0) + 1
        if len(t.raw) > 1 and t.raw.isupper():
            acronym[term] = acronym.get(term, 0) + 1
        for j in range(max(0, i - defaults.YAKE_WINDOW), i):
            if words[j].sentence_index == t.sentence_index:
                left.setdefault(term, []).append(words[j].surface)
        for j in range(i + 1, min(len(words), i + 1 + defaults.YAKE_WINDOW)):
            if words[j].sentence_index == t.sentence_index:
                right.setdefault(term, []).append(words[j].surface)

    tfs = list(tf.values())
    mean_tf = statistics.fmean(tfs)
    std_tf = statistics.pstdev(tfs)
    max_tf = max(tfs)

    table: dict[str, YakeTermStats] = {}
    for term in tf:
        casing = max(upper.get(term, 0), acronym.get(term, 0)) / (1.0 + math.log(tf[term]))
        position = math.log(math.log(3.0 + statistics.median(sentence_indices[term])))
        frequency = tf[term] / (mean_tf + std_tf)
        lefts = left.get(term, [])
        rights = right.get(term, [])
        dl = len(set(lefts)) / len(lefts) if lefts else 0.0
        dr = len(set(rights)) / len(rights) if rights else 0.0
        relatedness = 1.0 + (dl + dr) * tf[term] / max_tf
        spread = len(sentences[term]) / n_sentences
        score = (relatedness * position) / (
            casing + frequency / relatedness + spread / relatedness
        )
        table[term] = YakeTermStats(
            term=term,
            tf=tf[term],
            casing=casing,
            position=position,
            frequency=frequency,
            dispersion_left=dl,
            dispersion_right=dr,
            spread=spread,
            score=score,
        )
    return table


@dataclass
class _Scored:
    surface: str
    positions: list[int]
    raw_score: float  # YAKE convention: lower = more relevant


def _yake_candidates(tokens: list[Token]) -> dict[tuple[str, ...], list[int]]:
    stops = stopwords()
    spans: dict[tuple[str, ...], list[int]] = {}
    for n in range(1, defaults.YAKE_NGRAM_MAX + 1):
        for i in range(len(tokens) - n + 1):
            window = tokens[i : i + n]
            if any(t.surface in stops for t in window):
                continue
            if window[-1].position - window[0].position != n - 1:
                continue
            if any(t.block_index != window[0].block_index for t in window):
                continue
            key = tuple(t.surface for t in window)
            spans.setdefault(key, []).append(window[0].position)
    return spans


def dedup_candidates(ordered: list[_Scored], threshold: float) -> list[_Scored]:
    """Keep a candidate only while no kept candidate is within the
    Levenshtein-ratio threshold; iterating twice changes nothing."""
    kept: list[_Scored] = []
    for cand in ordered:
        if all(levenshtein_ratio(cand.surface, k.surface) < threshold for k in kept):
            kept.append(cand)
    return kept


def extract_yake(
    tokens: list[Token],
    k: int = 10,
    dedup_threshold: float = defaults.YAKE_DEDUP_THRESHOLD,
) -> list[Candidate]:
    if not tokens:
        return []
    table = yake_term_stats(tokens)
    if not table:
        return []
    scored: list[_Scored] = []
    for key, positions in _yake_candidates(tokens).items():
        member_scores = [table[term].score for term in key]
        product = math.prod(member_scores)
        raw = product / (len(positions) * (1.0 + sum(member_scores)))
        scored.append(_Scored(surface=" ".join(key), positions=positions, raw_score=raw))
    scored.sort(key=lambda c: (c.raw_score, c.positions[0], c.surface))
    kept = dedup_candidates(scored, dedup_threshold)
    out = [
        Candidate(surface=c.surface, positions=c.positions, score=1.0 / (1.0 + c.raw_score))
        for c in kept
    ]
    return rank_top_k(out, k)


@dataclass
class KpMinerConfig:
    lasf: int = defaults.KPMINER_LASF
    cutoff: int = defaults.KPMINER_CUTOFF
    boost_denominator: float = defaults.KPMINER_BOOST_DENOMINATOR
    boost_cap: float = defaults.KPMINER_BOOST_CAP

    def __post_init__(self) -> None:
        if self.lasf < 1:
            raise ValueError("lasf must be >= 1")
        if self.cutoff < 1:
            raise ValueError("cutoff must be >= 1")


def kpminer_spans(tokens: list[Token]) -> dict[tuple[str, ...], list[int]]:
    """Maximal stopword-free spans that do not cross punctuation."""
    stops = stopwords()
    spans: dict[tuple[str, ...], list[int]] = {}
    run: list[Token] = []

    def flush() -> None:
        if run:
            key = tuple(t.surface for t in run)
            spans.setdefault(key, []).append(run[0].position)
            run.clear()

    for t in tokens:
        if t.surface in stops:
            flush()
            continue
        if run and (t.position != run[-1].position + 1 or t.block_index != run[-1].block_index):
            flush()
        run.append(t)
    flush()
    return spans


def _contains_sequence(doc: list[str], seq: tuple[str, ...]) -> bool:
    n = len(seq)
    return any(tuple(doc[i : i + n]) == seq for i in range(len(doc) - n + 1))


def extract_kpminer(
    tokens: list[Token],
    cfg: KpMinerConfig | None = None,
    k: int = 10,
    corpus: list[list[str]] | None = None,
) -> list[Candidate]:
    """``corpus`` (token surface lists, including this document) supplies
    document frequencies; without it an in-document position weight
    ln(1 + N/(1 + first offset)) stands in for IDF."""
    cfg = cfg or KpMinerConfig()
    spans = kpminer_spans(tokens)
    surviving = {
        key: positions
        for key, positions in spans.items()
        if len(positions) >= cfg.lasf and positions[0] + 1 <= cfg.cutoff
    }
    if not surviving:
        return []
    n_multi = sum(1 for key in surviving if len(key) > 1)
    if n_multi:
        boost = min(len(surviving) / (cfg.boost_denominator * n_multi), cfg.boost_cap)
    else:
        boost = cfg.boost_cap
    total_tokens = len(tokens)

    def idf_like(key: tuple[str, ...], first: int) -> float:
        if corpus is not None:
            df = sum(1 for doc in corpus if _contains_sequence(doc, key))
            return math.log(len(corpus) / max(df, 1)) if df < len(corpus) else 0.0
        return math.log(1.0 + total_tokens / (1.0 + first))

    out = []
    for key, positions in surviving.items():
        tf = len(positions) / total_tokens
        weight = tf * idf_like(key, positions[0])
        if len(key) > 1:
            weight *= boost
        out.append(Candidate(surface=" ".join(key), positions=positions, score=weight))
    return rank_top_k(out, k)
