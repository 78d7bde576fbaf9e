"""Graph-based unsupervised keyphrase rankers.

All five rankers share one substrate: a symmetric word co-occurrence graph
over NOUN/ADJ stems, a damped biased random walk over it, and a uniform
candidate chunking grammar (ADJ)*(NOUN)+ so scores stay comparable across
methods.  Ties break (score desc, first position asc, surface asc)
everywhere, which makes every ranker deterministic for a fixed config.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .textproc import ADJ, NOUN, Token

_WORD_WINDOW_DEFAULTS = {"textrank": 2, "singlerank": 10, "positionrank": 10}


@dataclass
class ExtractorConfig:
    k: int = 10
    window: int | None = None  # None -> per-method default
    damping: float = 0.85
    tol: float = 1e-5
    max_iter: int = 100
    topic_threshold: float = 0.25  # Jaccard merge cutoff for topic clustering
    alpha: float = 1.1  # first-occurrence boost in the multipartite graph

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 0 < self.damping < 1:
            raise ValueError("damping must be in (0, 1)")
        if self.tol <= 0:
            raise ValueError("tol must be > 0")


@dataclass
class Candidate:
    surface: str
    positions: list[int]
    score: float

    @property
    def first_position(self) -> int:
        return self.positions[0]


@dataclass
class WordGraph:
    adjacency: dict[str, dict[str, float]] = field(default_factory=dict)
    node_positions: dict[str, list[int]] = field(default_factory=dict)

    @property
    def nodes(self) -> list[str]:
        return sorted(self.node_positions)

    def add_node(self, node: str, position: int) -> None:
        self.adjacency.setdefault(node, {})
        self.node_positions.setdefault(node, []).append(position)

    def add_edge(self, a: str, b: str, weight: float = 1.0) -> None:
        if a == b:
            return
        self.adjacency[a][b] = self.adjacency[a].get(b, 0.0) + weight
        self.adjacency[b][a] = self.adjacency[b].get(a, 0.0) + weight

    def __len__(self) -> int:
        return len(self.node_positions)


def build_word_graph(tokens: list[Token], window: int) -> WordGraph:
    """Co-occurrence graph over NOUN/ADJ stems: two stems are linked once
    per token pair closer than ``window`` positions."""
    if window < 1:
        raise ValueError("window must be >= 1")
    graph = WordGraph()
    words = [t for t in tokens if t.tag in (NOUN, ADJ)]
    for token in words:
        graph.add_node(token.stem, token.position)
    for i, first in enumerate(words):
        for second in words[i + 1 :]:
            if second.position - first.position >= window:
                break
            graph.add_edge(first.stem, second.stem)
    return graph


@dataclass
class PageRankResult:
    scores: dict[str, float]
    converged: bool
    iterations: int


def pagerank(
    graph: WordGraph,
    bias: dict[str, float] | None = None,
    cfg: ExtractorConfig | None = None,
    binary_weights: bool = False,
) -> PageRankResult:
    """Damped random walk with teleport distribution = normalized bias
    (uniform when absent).  Dangling nodes teleport with full mass, so the
    scores always sum to 1."""
    cfg = cfg or ExtractorConfig()
    nodes = graph.nodes
    if not nodes:
        raise ValueError("pagerank over an empty graph")
    n = len(nodes)
    if bias is None:
        teleport = {node: 1.0 / n for node in nodes}
    else:
        if any(bias.get(node, 0.0) < 0 for node in nodes):
            raise ValueError("bias weights must be non-negative")
        total = sum(bias.get(node, 0.0) for node in nodes)
        if total <= 0:
            raise ValueError("bias must not be all zero")
        teleport = {node: bias.get(node, 0.0) / total for node in nodes}

    def weight(a: str, b: str) -> float:
        return 1.0 if binary_weights else graph.adjacency[a][b]

    strength = {
        node: sum(weight(node, nbr) for nbr in graph.adjacency[node]) for node in nodes
    }
    scores = dict(teleport)
    d = cfg.damping
    for iteration in range(1, cfg.max_iter + 1):
        dangling = sum(scores[node] for node in nodes if strength[node] == 0.0)
        new = {}
        for node in nodes:
            incoming = sum(
                scores[nbr] * weight(nbr, node) / strength[nbr]
                for nbr in graph.adjacency[node]
            )
            new[node] = (1 - d) * teleport[node] + d * (incoming + dangling * teleport[node])
        delta = max(abs(new[node] - scores[node]) for node in nodes)
        scores = new
        if delta < cfg.tol:
            return PageRankResult(scores, converged=True, iterations=iteration)
    return PageRankResult(scores, converged=False, iterations=cfg.max_iter)


# ---------------------------------------------------------------------------
# Candidate chunking


def noun_adj_chunks(tokens: list[Token]) -> list[list[Token]]:
    """Maximal (ADJ)*(NOUN)+ runs of position-contiguous tokens that do not
    cross a punctuation block."""
    chunks: list[list[Token]] = []
    run: list[Token] = []
    for token in tokens:
        contiguous = (
            run
            and token.position == run[-1].position + 1
            and token.block_index == run[-1].block_index
        )
        if token.tag in (NOUN, ADJ) and (contiguous or not run):
            run.append(token)
        else:
            chunks.extend(_split_run(run))
            run = [token] if token.tag in (NOUN, ADJ) else []
    chunks.extend(_split_run(run))
    return chunks


def _split_run(run: list[Token]) -> list[list[Token]]:
    out = []
    i = 0
    while i < len(run):
        j = i
        while j < len(run) and run[j].tag == ADJ:
            j += 1
        if j < len(run) and run[j].tag == NOUN:
            k = j
            while k < len(run) and run[k].tag == NOUN:
                k += 1
            out.append(run[i:k])
            i = k
        else:
            break
    return out


@dataclass
class _ChunkCandidate:
    stems: tuple[str, ...]
    surface: str
    positions: list[int]  # first-word offset of each occurrence


def collect_chunk_candidates(tokens: list[Token]) -> list[_ChunkCandidate]:
    """Deduplicate chunks by stem sequence, keeping first-occurrence order."""
    table: dict[tuple[str, ...], _ChunkCandidate] = {}
    for chunk in noun_adj_chunks(tokens):
        stems = tuple(t.stem for t in chunk)
        if stems not in table:
            table[stems] = _ChunkCandidate(
                stems=stems,
                surface=" ".join(t.surface for t in chunk),
                positions=[chunk[0].position],
            )
        else:
            table[stems].positions.append(chunk[0].position)
    return list(table.values())


def rank_top_k(candidates: list[Candidate], k: int) -> list[Candidate]:
    candidates.sort(key=lambda c: (-c.score, c.first_position, c.surface))
    return candidates[:k]


# ---------------------------------------------------------------------------
# Extractors


def extract_textrank(tokens: list[Token], cfg: ExtractorConfig | None = None) -> list[Candidate]:
    """Unweighted walk over the word graph; the top third of the words are
    merged into phrases where they are adjacent in the text."""
    cfg = cfg or ExtractorConfig()
    window = cfg.window or _WORD_WINDOW_DEFAULTS["textrank"]
    graph = build_word_graph(tokens, window)
    if not len(graph):
        return []
    result = pagerank(graph, cfg=cfg, binary_weights=True)
    n_selected = max(1, math.ceil(len(graph) / 3))
    order = sorted(result.scores, key=lambda s: (-result.scores[s], s))
    selected = set(order[:n_selected])

    candidates: dict[tuple[str, ...], Candidate] = {}
    run: list[Token] = []

    def flush(run: list[Token]) -> None:
        if not run:
            return
        stems = tuple(t.stem for t in run)
        score = sum(result.scores[s] for s in stems)
        if stems in candidates:
            candidates[stems].positions.append(run[0].position)
        else:
            candidates[stems] = Candidate(
                surface=" ".join(t.surface for t in run),
                positions=[run[0].position],
                score=score,
            )

    for token in tokens:
        is_member = token.tag in (NOUN, ADJ) and token.stem in selected
        contiguous = (
            run
            and token.position == run[-1].position + 1
            and token.block_index == run[-1].block_index
        )
        if is_member and (contiguous or not run):
            run.append(token)
        else:
            flush(run)
            run = [token] if is_member else []
    flush(run)
    return rank_top_k(list(candidates.values()), cfg.k)


def _chunk_ranker(
    tokens: list[Token], cfg: ExtractorConfig, method: str, positional_bias: bool
) -> list[Candidate]:
    window = cfg.window or _WORD_WINDOW_DEFAULTS[method]
    graph = build_word_graph(tokens, window)
    if not len(graph):
        return []
    bias = None
    if positional_bias:
        bias = {
            node: sum(1.0 / (1 + offset) for offset in offsets)
            for node, offsets in graph.node_positions.items()
        }
    result = pagerank(graph, bias=bias, cfg=cfg)
    candidates = [
        Candidate(
            surface=c.surface,
            positions=c.positions,
            score=sum(result.scores[s] for s in c.stems),
        )
        for c in collect_chunk_candidates(tokens)
    ]
    return rank_top_k(candidates, cfg.k)


def extract_singlerank(tokens: list[Token], cfg: ExtractorConfig | None = None) -> list[Candidate]:
    """Weighted walk; chunk score = sum of member word scores."""
    return _chunk_ranker(tokens, cfg or ExtractorConfig(), "singlerank", positional_bias=False)


def extract_positionrank(tokens: list[Token], cfg: ExtractorConfig | None = None) -> list[Candidate]:
    """SingleRank with teleport mass sum(1/(1+offset)) over occurrences, so
    early words soak up extra score."""
    return _chunk_ranker(tokens, cfg or ExtractorConfig(), "positionrank", positional_bias=True)


def _cluster_topics(candidates: list[_ChunkCandidate], threshold: float) -> list[list[int]]:
    """Average-linkage agglomeration on Jaccard similarity of stem sets;
    merging stops when the best pair falls below the threshold."""
    stem_sets = [set(c.stems) for c in candidates]
    clusters: list[list[int]] = [[i] for i in range(len(candidates))]

    def jaccard(a: set, b: set) -> float:
        union = len(a | b)
        return len(a & b) / union if union else 0.0

    def linkage(ca: list[int], cb: list[int]) -> float:
        sims = [jaccard(stem_sets[i], stem_sets[j]) for i in ca for j in cb]
        return sum(sims) / len(sims)

    while len(clusters) > 1:
        best = None
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                sim = linkage(clusters[i], clusters[j])
                key = (-sim, min(clusters[i]), min(clusters[j]))
                if best is None or key < best[0]:
                    best = (key, i, j, sim)
        if best is None or best[3] < threshold:
            break
        _, i, j, _ = best
        clusters[i] = sorted(clusters[i] + clusters[j])
        del clusters[j]
    clusters.sort(key=min)
    return clusters


def _reciprocal_distance(a: _ChunkCandidate, b: _ChunkCandidate) -> float:
    return sum(
        1.0 / abs(pa - pb) for pa in a.positions for pb in b.positions if pa != pb
    )


def extract_topicrank(tokens: list[Token], cfg: ExtractorConfig | None = None) -> list[Candidate]:
    """Cluster candidates into topics, rank topics by a walk over the
    reciprocal-distance topic graph, emit each topic's earliest candidate."""
    cfg = cfg or ExtractorConfig()
    candidates = collect_chunk_candidates(tokens)
    if not candidates:
        return []
    topics = _cluster_topics(candidates, cfg.topic_threshold)
    graph = WordGraph()
    for t, members in enumerate(topics):
        name = f"t{t}"
        graph.add_node(name, min(candidates[i].positions[0] for i in members))
    for a in range(len(topics)):
        for b in range(a + 1, len(topics)):
            weight = sum(
                _reciprocal_distance(candidates[i], candidates[j])
                for i in topics[a]
                for j in topics[b]
            )
            if weight > 0:
                graph.add_edge(f"t{a}", f"t{b}", weight)
    result = pagerank(graph, cfg=cfg)
    out = []
    for t, members in enumerate(topics):
        representative = min((candidates[i] for i in members), key=lambda c: c.positions[0])
        out.append(
            Candidate(
                surface=representative.surface,
                positions=list(representative.positions),
                score=result.scores[f"t{t}"],
            )
        )
    return rank_top_k(out, cfg.k)


def extract_multipartiterank(
    tokens: list[Token], cfg: ExtractorConfig | None = None
) -> list[Candidate]:
    """Walk over a candidate graph whose edges only cross topic boundaries;
    each topic's first-occurring candidate gets its incident weights scaled
    by alpha before ranking."""
    cfg = cfg or ExtractorConfig()
    candidates = collect_chunk_candidates(tokens)
    if not candidates:
        return []
    topics = _cluster_topics(candidates, cfg.topic_threshold)
    topic_of = {}
    for t, members in enumerate(topics):
        for i in members:
            topic_of[i] = t
    graph = WordGraph()
    for i, c in enumerate(candidates):
        graph.add_node(f"c{i}", c.positions[0])
    for i in range(len(candidates)):
        for j in range(i + 1, len(candidates)):
            if topic_of[i] == topic_of[j]:
                continue
            weight = _reciprocal_distance(candidates[i], candidates[j])
            if weight > 0:
                graph.add_edge(f"c{i}", f"c{j}", weight)
    for members in topics:
        if len(members) < 2:
            continue
        first = min(members, key=lambda i: candidates[i].positions[0])
        node = f"c{first}"
        for nbr in list(graph.adjacency[node]):
            boosted = graph.adjacency[node][nbr] * cfg.alpha
            graph.adjacency[node][nbr] = boosted
            graph.adjacency[nbr][node] = boosted
    result = pagerank(graph, cfg=cfg)
    out = [
        Candidate(
            surface=c.surface,
            positions=list(c.positions),
            score=result.scores[f"c{i}"],
        )
        for i, c in enumerate(candidates)
    ]
    return rank_top_k(out, cfg.k)


def candidates_to_tsv(candidates: list[Candidate]) -> str:
    lines = ["rank\tsurface\tscore\tfirst_offset"]
    for rank, c in enumerate(candidates, start=1):
        lines.append(f"{rank}\t{c.surface}\t{c.score:.8f}\t{c.first_position}")
    return "\n".join(lines) + "\n"
