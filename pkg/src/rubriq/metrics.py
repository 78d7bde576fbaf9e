"""Evaluation metrics: accuracy, P/R/F1, purity, Rand index, AMI,
silhouette and Cohen's kappa.

Edge conventions (all of them live here, nowhere else):

* per-class P/R/F1 define 0/0 as 0,
* macro averages run over evaluated labels only (classes that occur in
  neither truth nor prediction are excluded); weighted averages are
  support-weighted, so support-0 classes contribute nothing,
* a silhouette of a singleton-cluster point is 0,
* AMI of the single-cluster-vs-single-class degenerate case is 1,
* kappa with both raters constant and equal (p_e = 1) is 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln


@dataclass
class ConfusionMatrix:
    classes: list
    counts: np.ndarray  # rows = true, cols = predicted

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def confusion_matrix(y_true: Sequence, y_pred: Sequence, classes: Sequence | None = None) -> ConfusionMatrix:
    if len(y_true) != len(y_pred):
        raise ValueError("y_true and y_pred lengths differ")
    if classes is None:
        classes = sorted(set(y_true) | set(y_pred), key=str)
    classes = list(classes)
    index = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=int)
    for t, p in zip(y_true, y_pred):
        counts[index[t], index[p]] += 1
    return ConfusionMatrix(classes=classes, counts=counts)


def accuracy(cm: ConfusionMatrix) -> float:
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    return float(np.trace(cm.counts)) / cm.total


def per_class_prf(cm: ConfusionMatrix) -> dict:
    """{class: (precision, recall, f1, support)} with 0/0 -> 0."""
    out = {}
    for i, cls in enumerate(cm.classes):
        tp = cm.counts[i, i]
        pred = cm.counts[:, i].sum()
        support = cm.counts[i, :].sum()
        p = tp / pred if pred else 0.0
        r = tp / support if support else 0.0
        f = 2 * p * r / (p + r) if (p + r) else 0.0
        out[cls] = (float(p), float(r), float(f), int(support))
    return out


def prf(cm: ConfusionMatrix, averaging: str = "macro") -> tuple[float, float, float]:
    """Averaged (P, R, F1).  F1 is averaged per class, never recomputed
    from the averaged P and R."""
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    rows = per_class_prf(cm)
    if averaging == "macro":
        evaluated = [
            (p, r, f)
            for i, (cls, (p, r, f, support)) in enumerate(rows.items())
            if support > 0 or cm.counts[:, i].sum() > 0
        ]
        n = len(evaluated)
        return tuple(float(sum(v[j] for v in evaluated) / n) for j in range(3))  # type: ignore[return-value]
    if averaging == "weighted":
        total = cm.total
        sums = [0.0, 0.0, 0.0]
        for p, r, f, support in rows.values():
            for j, v in enumerate((p, r, f)):
                sums[j] += v * support
        return tuple(s / total for s in sums)  # type: ignore[return-value]
    raise ValueError(f"unknown averaging {averaging!r}")


def purity(clusters: Sequence, classes: Sequence) -> float:
    """Majority-class mass: (1/N) * sum over clusters of the most frequent
    co-occurring class count.  Some result tables report this same quantity
    under the name homogeneity."""
    if len(clusters) != len(classes):
        raise ValueError("clusters and classes lengths differ")
    n = len(clusters)
    if n == 0:
        raise ValueError("empty labeling")
    table: dict = {}
    for k, c in zip(clusters, classes):
        cell = table.setdefault(k, {})
        cell[c] = cell.get(c, 0) + 1
    return sum(max(cell.values()) for cell in table.values()) / n


@dataclass(frozen=True)
class PairConfusion:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def pair_confusion(clusters: Sequence, classes: Sequence) -> PairConfusion:
    """Pairwise decisions over the N(N-1)/2 point pairs; "similar" means
    same class, a positive decision means same cluster."""
    if len(clusters) != len(classes):
        raise ValueError("clusters and classes lengths differ")
    n = len(clusters)
    if n < 2:
        raise ValueError("need at least 2 points for pair decisions")

    def pairs2(counts):
        return sum(v * (v - 1) // 2 for v in counts)

    table: dict = {}
    cluster_sizes: dict = {}
    class_sizes: dict = {}
    for k, c in zip(clusters, classes):
        table[(k, c)] = table.get((k, c), 0) + 1
        cluster_sizes[k] = cluster_sizes.get(k, 0) + 1
        class_sizes[c] = class_sizes.get(c, 0) + 1
    tp = pairs2(table.values())
    fp = pairs2(cluster_sizes.values()) - tp
    fn = pairs2(class_sizes.values()) - tp
    tn = n * (n - 1) // 2 - tp - fp - fn
    return PairConfusion(tp=tp, tn=tn, fp=fp, fn=fn)


def rand_index(clusters: Sequence, classes: Sequence) -> float:
    pc = pair_confusion(clusters, classes)
    return (pc.tp + pc.tn) / pc.total


def _contingency(clusters: Sequence, classes: Sequence) -> np.ndarray:
    ks = sorted(set(clusters), key=str)
    cs = sorted(set(classes), key=str)
    ki = {k: i for i, k in enumerate(ks)}
    ci = {c: i for i, c in enumerate(cs)}
    table = np.zeros((len(ks), len(cs)), dtype=np.int64)
    for k, c in zip(clusters, classes):
        table[ki[k], ci[c]] += 1
    return table


def _entropy(sizes: np.ndarray, n: int) -> float:
    probs = sizes[sizes > 0] / n
    return float(-np.sum(probs * np.log(probs)))


def mutual_information(clusters: Sequence, classes: Sequence) -> float:
    table = _contingency(clusters, classes)
    n = table.sum()
    a = table.sum(axis=1)
    b = table.sum(axis=0)
    mi = 0.0
    for i in range(table.shape[0]):
        for j in range(table.shape[1]):
            nij = table[i, j]
            if nij:
                mi += (nij / n) * math.log(n * nij / (a[i] * b[j]))
    return mi


def expected_mutual_information(table: np.ndarray) -> float:
    """E[MI] under the permutation (hypergeometric) model for fixed margins."""
    n = int(table.sum())
    a = table.sum(axis=1)
    b = table.sum(axis=0)
    emi = 0.0
    for ai in a:
        for bj in b:
            lo = max(1, ai + bj - n)
            hi = min(ai, bj)
            for nij in range(lo, hi + 1):
                term = (nij / n) * math.log(n * nij / (ai * bj))
                log_prob = (
                    gammaln(ai + 1)
                    + gammaln(bj + 1)
                    + gammaln(n - ai + 1)
                    + gammaln(n - bj + 1)
                    - gammaln(n + 1)
                    - gammaln(nij + 1)
                    - gammaln(ai - nij + 1)
                    - gammaln(bj - nij + 1)
                    - gammaln(n - ai - bj + nij + 1)
                )
                emi += term * math.exp(log_prob)
    return emi


def ami(clusters: Sequence, classes: Sequence) -> float:
    """Adjusted mutual information, (MI - E[MI]) / (mean(H) - E[MI])."""
    if len(clusters) != len(classes):
        raise ValueError("clusters and classes lengths differ")
    if len(clusters) < 2:
        raise ValueError("need at least 2 points")
    table = _contingency(clusters, classes)
    n = table.sum()
    h_clusters = _entropy(table.sum(axis=1), n)
    h_classes = _entropy(table.sum(axis=0), n)
    if h_clusters == 0.0 and h_classes == 0.0:
        return 1.0
    mi = mutual_information(clusters, classes)
    emi = expected_mutual_information(table)
    denominator = (h_clusters + h_classes) / 2 - emi
    if denominator == 0.0:
        return 0.0
    return (mi - emi) / denominator


def silhouette(X: np.ndarray, labels: Sequence) -> float:
    """Mean (b - a)/max(a, b) with euclidean distances; singleton-cluster
    points contribute 0."""
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels)
    unique = np.unique(labels)
    if unique.shape[0] < 2:
        raise ValueError("silhouette undefined for a single cluster")
    if X.shape[0] != labels.shape[0]:
        raise ValueError("X and labels lengths differ")
    diffs = X[:, None, :] - X[None, :, :]
    dist = np.sqrt((diffs**2).sum(axis=2))
    scores = np.zeros(X.shape[0])
    for i in range(X.shape[0]):
        own = labels == labels[i]
        own_size = own.sum()
        if own_size == 1:
            continue
        a = dist[i, own].sum() / (own_size - 1)
        b = min(dist[i, labels == other].mean() for other in unique if other != labels[i])
        denom = max(a, b)
        scores[i] = (b - a) / denom if denom > 0 else 0.0
    return float(scores.mean())


def cohens_kappa(r1: Sequence, r2: Sequence) -> float:
    if len(r1) != len(r2):
        raise ValueError("rating lengths differ")
    n = len(r1)
    if n == 0:
        raise ValueError("empty ratings")
    p_o = sum(a == b for a, b in zip(r1, r2)) / n
    values = set(r1) | set(r2)
    p_e = sum((list(r1).count(v) / n) * (list(r2).count(v) / n) for v in values)
    if p_e == 1.0:
        return 1.0
    return (p_o - p_e) / (1 - p_e)


REPORT_COLUMNS = (
    "accuracy",
    "macro_p",
    "macro_r",
    "macro_f1",
    "weighted_p",
    "weighted_r",
    "weighted_f1",
    "cp",
    "ri",
    "ami",
    "sil",
)


@dataclass
class EvaluationReport:
    """Metric block for one experiment cell; cluster columns stay empty
    for plain classification runs."""

    accuracy: float
    macro_p: float
    macro_r: float
    macro_f1: float
    weighted_p: float
    weighted_r: float
    weighted_f1: float
    cp: float | None = None
    ri: float | None = None
    ami: float | None = None
    sil: float | None = None

    @classmethod
    def from_predictions(
        cls,
        y_true: Sequence,
        y_pred: Sequence,
        classes: Sequence | None = None,
        cluster_labels: Sequence | None = None,
        cluster_X: np.ndarray | None = None,
    ) -> "EvaluationReport":
        cm = confusion_matrix(y_true, y_pred, classes)
        macro = prf(cm, "macro")
        weighted = prf(cm, "weighted")
        report = cls(accuracy(cm), *macro, *weighted)
        if cluster_labels is not None:
            report.cp = purity(cluster_labels, y_true)
            report.ri = rand_index(cluster_labels, y_true)
            report.ami = ami(cluster_labels, y_true)
            if cluster_X is not None and len(set(cluster_labels)) > 1:
                report.sil = silhouette(cluster_X, cluster_labels)
        return report

    def as_row(self) -> dict[str, str]:
        row = {}
        for col in REPORT_COLUMNS:
            value = getattr(self, col)
            row[col] = "" if value is None else f"{value:.6f}"
        return row
