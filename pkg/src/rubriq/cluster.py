"""Clustering backends and the classification-via-clustering bridge.

* K-Means (Lloyd) with kmeans++ (pure D^2 sampling, no greedy restarts),
  uniform random, and principal-component seeding.  An emptied cluster is
  reseeded at the point farthest from its assigned center, which never
  increases the inertia.
* Agglomerative merging applies the Ward (Lance-Williams) update to the
  squared pairwise distances of the chosen affinity; only the euclidean
  affinity corresponds to true variance minimization, the other two are
  the same recurrence on a different matrix.
* Spectral clustering embeds points with the bottom eigenvectors of the
  symmetric normalized Laplacian of an RBF similarity graph (rows
  renormalized), then assigns by seeded K-Means or iterative rotation
  discretization.

All comparisons between clusterings should use pair-coincidence matrices,
never raw label values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh


@dataclass
class ClusterAssignment:
    labels: np.ndarray
    centers: np.ndarray | None = None  # K-Means only
    inertia: float | None = None  # K-Means only
    inertia_history: list[float] = field(default_factory=list)
    merges: list[tuple[int, int]] | None = None  # agglomerative dendrogram
    embedding: np.ndarray | None = None  # spectral rows
    converged: bool = True
    iterations: int = 0


def _squared_distances(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    diff = A[:, None, :] - B[None, :, :]
    return (diff**2).sum(axis=2)


def _init_kmeanspp(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    chosen = [int(rng.integers(n))]
    while len(chosen) < k:
        d2 = _squared_distances(X, X[chosen]).min(axis=1)
        total = d2.sum()
        if total == 0.0:
            # all remaining mass sits on the centers; take the lowest free index
            free = [i for i in range(n) if i not in chosen]
            chosen.append(free[0])
            continue
        chosen.append(int(rng.choice(n, p=d2 / total)))
    return X[chosen].copy()


def _init_random(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    return X[rng.choice(X.shape[0], size=k, replace=False)].copy()


def _init_pca(X: np.ndarray, k: int) -> np.ndarray:
    """Center j sits on the data point with the largest |projection| on
    principal component j mod #components; clashes fall through to the
    next-largest projection."""
    centered = X - X.mean(axis=0)
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    keep = singular > 1e-12 * max(singular[0], 1.0)
    components = vt[keep] if keep.any() else vt[:1]
    chosen: list[int] = []
    for j in range(k):
        projections = np.abs(centered @ components[j % components.shape[0]])
        order = sorted(range(X.shape[0]), key=lambda i: (-projections[i], i))
        for i in order:
            if i not in chosen:
                chosen.append(i)
                break
    return X[chosen].copy()


def kmeans(
    X: np.ndarray,
    k: int,
    init: str = "kmeanspp",
    seed: int = 0,
    max_iter: int = 300,
    tol: float = 1e-8,
) -> ClusterAssignment:
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)
    if init == "kmeanspp":
        centers = _init_kmeanspp(X, k, rng)
    elif init == "random":
        centers = _init_random(X, k, rng)
    elif init == "pca":
        centers = _init_pca(X, k)
    else:
        raise ValueError(f"unknown init {init!r}")

    def assign(centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Nearest-center labels; an emptied cluster is reseeded at the
        point farthest from its center (drawn from a donor cluster that can
        spare a member and claimed explicitly, which keeps the fix monotone
        and the cluster non-empty)."""
        d2 = _squared_distances(X, centers)
        labels = d2.argmin(axis=1)
        for cluster in range(k):
            if (labels == cluster).any():
                continue
            counts = np.bincount(labels, minlength=k)
            assigned = d2[np.arange(n), labels].copy()
            assigned[counts[labels] < 2] = -1.0
            farthest = int(assigned.argmax())
            centers[cluster] = X[farthest]
            d2 = _squared_distances(X, centers)
            labels = d2.argmin(axis=1)
            labels[farthest] = cluster
        return labels, d2

    history: list[float] = []
    labels = np.zeros(n, dtype=int)
    converged = False
    iteration = 0
    for iteration in range(1, max_iter + 1):
        labels, d2 = assign(centers)
        history.append(float(d2[np.arange(n), labels].sum()))
        new_centers = np.stack([X[labels == c].mean(axis=0) for c in range(k)])
        shift = np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max()
        centers = new_centers
        if shift < tol:
            converged = True
            break
    labels, d2 = assign(centers)
    inertia = float(d2[np.arange(n), labels].sum())
    history.append(inertia)
    return ClusterAssignment(
        labels=labels,
        centers=centers,
        inertia=inertia,
        inertia_history=history,
        converged=converged,
        iterations=iteration,
    )


# ---------------------------------------------------------------------------
# Agglomerative (Ward via Lance-Williams)


def pairwise_distances(X: np.ndarray, affinity: str) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if affinity == "euclidean":
        return np.sqrt(_squared_distances(X, X))
    if affinity == "cityblock":
        return np.abs(X[:, None, :] - X[None, :, :]).sum(axis=2)
    if affinity == "cosine":
        norms = np.sqrt((X**2).sum(axis=1))
        out = np.empty((X.shape[0], X.shape[0]))
        for i in range(X.shape[0]):
            for j in range(X.shape[0]):
                if norms[i] == 0.0 and norms[j] == 0.0:
                    out[i, j] = 0.0
                elif norms[i] == 0.0 or norms[j] == 0.0:
                    out[i, j] = 1.0
                else:
                    out[i, j] = 1.0 - (X[i] @ X[j]) / (norms[i] * norms[j])
        return out
    raise ValueError(f"unknown affinity {affinity!r}")


def agglomerative(X: np.ndarray, k: int, affinity: str = "euclidean") -> ClusterAssignment:
    """Bottom-up Ward merging on the squared affinity distances; merge ties
    break toward the pair with the lowest original point indices."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    d2 = pairwise_distances(X, affinity) ** 2
    clusters: dict[int, list[int]] = {i: [i] for i in range(n)}
    dist: dict[tuple[int, int], float] = {
        (i, j): d2[i, j] for i in range(n) for j in range(i + 1, n)
    }
    merges: list[tuple[int, int]] = []
    while len(clusters) > k:
        reps = sorted(clusters)
        best = min(
            ((dist[(a, b)], a, b) for ai, a in enumerate(reps) for b in reps[ai + 1 :]),
            key=lambda t: (t[0], t[1], t[2]),
        )
        _, a, b = best
        merges.append((a, b))
        na, nb = len(clusters[a]), len(clusters[b])
        dab = dist.pop((a, b))
        for c in reps:
            if c in (a, b):
                continue
            nc = len(clusters[c])
            dac = dist[(min(a, c), max(a, c))]
            dbc = dist[(min(b, c), max(b, c))]
            updated = ((na + nc) * dac + (nb + nc) * dbc - nc * dab) / (na + nb + nc)
            dist[(min(a, c), max(a, c))] = updated
            del dist[(min(b, c), max(b, c))]
        clusters[a] = sorted(clusters[a] + clusters[b])
        del clusters[b]
    labels = np.zeros(n, dtype=int)
    for label, rep in enumerate(sorted(clusters)):
        labels[clusters[rep]] = label
    return ClusterAssignment(labels=labels, merges=merges)


# ---------------------------------------------------------------------------
# Spectral


def rbf_similarity(X: np.ndarray, gamma: float | None = None) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if gamma is None:
        variance = X.var()
        if variance == 0.0:
            raise ValueError("degenerate input: all points identical, RBF scale undefined")
        gamma = 1.0 / (X.shape[1] * variance)
    return np.exp(-gamma * _squared_distances(X, X))


def spectral_embedding(X: np.ndarray, k: int, gamma: float | None = None) -> np.ndarray:
    """Rows of the top-k eigenvectors of D^-1/2 S D^-1/2, renormalized."""
    S = rbf_similarity(X, gamma)
    degree = S.sum(axis=1)
    inv_sqrt = 1.0 / np.sqrt(degree)
    M = S * inv_sqrt[:, None] * inv_sqrt[None, :]
    M = (M + M.T) / 2.0
    n = M.shape[0]
    _, vectors = eigh(M, subset_by_index=(n - k, n - 1))
    norms = np.sqrt((vectors**2).sum(axis=1))
    if (norms == 0.0).any():
        raise ValueError("degenerate spectral embedding: zero row encountered")
    return vectors / norms[:, None]


def _discretize(embedding: np.ndarray, seed: int, n_iter_max: int = 40) -> np.ndarray:
    """Iterative rotation discretization: alternate snapping the rotated
    embedding to one-hot rows and refitting the rotation by SVD."""
    n, k = embedding.shape
    rng = np.random.default_rng(seed)
    vectors = embedding * np.sqrt(n) / np.sqrt((embedding**2).sum())
    # farthest-row seeding of the rotation columns
    rotation = np.zeros((k, k))
    first = int(rng.integers(n))
    rotation[:, 0] = vectors[first]
    cost = np.zeros(n)
    for j in range(1, k):
        cost += np.abs(vectors @ rotation[:, j - 1])
        rotation[:, j] = vectors[int(cost.argmin())]
    last_objective = 0.0
    labels = np.zeros(n, dtype=int)
    for _ in range(n_iter_max):
        rotated = vectors @ rotation
        labels = rotated.argmax(axis=1)
        indicator = np.zeros((n, k))
        indicator[np.arange(n), labels] = 1.0
        u, s, vt = np.linalg.svd(indicator.T @ vectors)
        objective = s.sum()
        rotation = (u @ vt).T
        if abs(objective - last_objective) < 1e-12:
            break
        last_objective = objective
    return labels


def spectral(
    X: np.ndarray,
    k: int,
    assign: str = "kmeans",
    seed: int = 0,
    gamma: float | None = None,
) -> ClusterAssignment:
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    embedding = spectral_embedding(X, k, gamma)
    if assign == "kmeans":
        inner = kmeans(embedding, k, init="kmeanspp", seed=seed)
        labels = inner.labels
    elif assign == "discretize":
        labels = _discretize(embedding, seed)
    else:
        raise ValueError(f"unknown assignment strategy {assign!r}")
    return ClusterAssignment(labels=labels, embedding=embedding)


# ---------------------------------------------------------------------------
# Classification via clustering


@dataclass
class ClusterClassifier:
    method: str
    assignment: ClusterAssignment
    cluster_to_class: dict[int, object]
    classes: list
    train_X: np.ndarray
    affinity: str = "euclidean"
    gamma: float | None = None
    embedded_centers: np.ndarray | None = None

    def classify(self, x: np.ndarray) -> object:
        return self.classify_many(np.atleast_2d(np.asarray(x, dtype=float)))[0]

    def classify_many(self, X: np.ndarray) -> list:
        X = np.asarray(X, dtype=float)
        if self.method == "kmeans":
            d2 = _squared_distances(X, self.assignment.centers)
            clusters = d2.argmin(axis=1)
        elif self.method == "agglomerative":
            full = np.vstack([self.train_X, X])
            dist = pairwise_distances(full, self.affinity)[len(self.train_X) :, : len(self.train_X)]
            clusters = self.assignment.labels[dist.argmin(axis=1)]
        elif self.method == "spectral":
            clusters = self._spectral_clusters(X)
        else:
            raise ValueError(f"unknown method {self.method!r}")
        return [self.cluster_to_class[int(c)] for c in clusters]

    def _spectral_clusters(self, X: np.ndarray) -> np.ndarray:
        # Embed out-of-sample points as the similarity-weighted average of
        # training embeddings, then snap to the nearest embedded center.
        gamma = self.gamma
        if gamma is None:
            variance = self.train_X.var()
            gamma = 1.0 / (self.train_X.shape[1] * variance)
        sim = np.exp(-gamma * _squared_distances(X, self.train_X))
        clusters = np.zeros(X.shape[0], dtype=int)
        for i in range(X.shape[0]):
            total = sim[i].sum()
            if total == 0.0:
                nearest = int(_squared_distances(X[i : i + 1], self.train_X)[0].argmin())
                embedded = self.assignment.embedding[nearest]
            else:
                embedded = sim[i] @ self.assignment.embedding / total
            d2 = ((self.embedded_centers - embedded) ** 2).sum(axis=1)
            clusters[i] = int(d2.argmin())
        return clusters


def majority_map(labels: np.ndarray, y: list, k: int, classes: list) -> dict[int, object]:
    """Cluster -> most frequent training label; ties fall back to the most
    frequent global class and then to class order."""
    global_counts = {c: sum(1 for v in y if v == c) for c in classes}
    global_order = sorted(classes, key=lambda c: (-global_counts[c], classes.index(c)))
    out: dict[int, object] = {}
    for cluster in range(k):
        members = [y[i] for i in range(len(y)) if labels[i] == cluster]
        if not members:
            out[cluster] = global_order[0]
            continue
        counts = {c: members.count(c) for c in set(members)}
        top = max(counts.values())
        tied = [c for c, v in counts.items() if v == top]
        if len(tied) == 1:
            out[cluster] = tied[0]
        else:
            out[cluster] = min(tied, key=lambda c: (-global_counts[c], classes.index(c)))
    return out


def fit_cluster_classifier(
    X: np.ndarray,
    y: list,
    method: str = "kmeans",
    k: int | None = None,
    seed: int = 0,
    init: str = "kmeanspp",
    affinity: str = "euclidean",
    assign: str = "kmeans",
    gamma: float | None = None,
) -> ClusterClassifier:
    X = np.asarray(X, dtype=float)
    classes = sorted(set(y), key=str)
    if k is None:
        k = len(classes)
    if method == "kmeans":
        assignment = kmeans(X, k, init=init, seed=seed)
    elif method == "agglomerative":
        assignment = agglomerative(X, k, affinity=affinity)
    elif method == "spectral":
        assignment = spectral(X, k, assign=assign, seed=seed, gamma=gamma)
    else:
        raise ValueError(f"unknown method {method!r}")
    mapping = majority_map(assignment.labels, list(y), k, classes)
    classifier = ClusterClassifier(
        method=method,
        assignment=assignment,
        cluster_to_class=mapping,
        classes=classes,
        train_X=X,
        affinity=affinity,
        gamma=gamma,
    )
    if method == "spectral":
        centers = np.stack(
            [
                assignment.embedding[assignment.labels == c].mean(axis=0)
                if (assignment.labels == c).any()
                else np.zeros(assignment.embedding.shape[1])
                for c in range(k)
            ]
        )
        classifier.embedded_centers = centers
    return classifier


def coincidence_matrix(labels) -> np.ndarray:
    """Boolean same-cluster matrix; the label-permutation-proof way to
    compare two clusterings."""
    labels = np.asarray(labels)
    return labels[:, None] == labels[None, :]


def assignment_to_tsv(ids: list[str], assignment: ClusterAssignment, mapping: dict[int, object]) -> str:
    lines = ["point_id\tcluster\tmapped_class"]
    for point_id, cluster in zip(ids, assignment.labels):
        lines.append(f"{point_id}\t{int(cluster)}\t{mapping[int(cluster)]}")
    return "\n".join(lines) + "\n"
