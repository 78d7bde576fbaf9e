"""Experiment orchestration: keyphrase-extraction benchmarks, specific and
generic classification runs, top-K sweeps, synthetic-corpus generation and
report emission.

Every run is deterministic: each (seed, fold, method) cell derives its own
RNG seed, reports carry a hash of the full spec, and no output embeds a
timestamp, so reruns are byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field, asdict

import numpy as np

from . import classify, cluster, defaults, graphrank, kea, statrank, topics, vectorize
from .corpus import (
    Dataset,
    Phrase,
    group_documents,
    load_dataset,
    map_generic_to_specific,
    save_dataset,
    split_fold,
)
from .graphrank import Candidate, ExtractorConfig
from .match import MatchConfig, label_phrases
from .metrics import (
    EvaluationReport,
    REPORT_COLUMNS,
    ami,
    confusion_matrix,
    per_class_prf,
    prf,
    purity,
    rand_index,
    silhouette,
)
from .textproc import Token, prepare

KPE_METHODS = (
    "textrank",
    "singlerank",
    "positionrank",
    "topicrank",
    "multipartiterank",
    "yake",
    "kpminer",
    "kea",
    "wingnus",
)
CLUSTER_METHODS = ("kmeans", "agglomerative", "spectral")
CLASSIFY_METHODS = ("svm", "baseline")
SPECIFIC_METHODS = CLASSIFY_METHODS + CLUSTER_METHODS + tuple(
    f"lda-{m}" for m in CLUSTER_METHODS
)

SECTION_MARKER = "## "


@dataclass
class ExperimentSpec:
    task: str  # kpe | specific | generic
    method: str
    dataset: str
    feature: str = "tfidf"  # tfidf | bow | embeddings
    embeddings: str | None = None
    folds: tuple[int, ...] = (1, 2)
    seed: int = 0
    out_dir: str = "runs"
    k: int = 10
    threshold: float = 0.6
    ngram_range: tuple[int, int] = (1, 1)
    params: dict = field(default_factory=dict)

    def validate(self) -> None:
        valid = {
            "kpe": KPE_METHODS,
            "specific": SPECIFIC_METHODS,
            "generic": CLASSIFY_METHODS,
        }
        if self.task not in valid:
            raise ValueError(f"unknown task {self.task!r}")
        if self.method not in valid[self.task]:
            raise ValueError(f"method {self.method!r} is not valid for task {self.task!r}")
        if self.feature not in ("tfidf", "bow", "embeddings"):
            raise ValueError(f"unknown feature backend {self.feature!r}")
        if self.feature == "embeddings" and not self.embeddings:
            raise ValueError("feature backend 'embeddings' requires an embeddings path")
        if not os.path.exists(self.dataset):
            raise ValueError(f"dataset file not found: {self.dataset}")
        if self.embeddings and not os.path.exists(self.embeddings):
            raise ValueError(f"embeddings file not found: {self.embeddings}")
        for fold in self.folds:
            if fold not in (1, 2):
                raise ValueError(f"fold must be 1 or 2, got {fold}")

    def spec_hash(self) -> str:
        # hash the experiment identity: input files by content (their paths
        # are just locations) and everything else verbatim; out_dir is where
        # the results land and is excluded
        payload = asdict(self)
        payload.pop("out_dir")
        payload["dataset"] = _file_digest(self.dataset)
        if self.embeddings:
            payload["embeddings"] = _file_digest(self.embeddings)
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


def _file_digest(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        digest.update(fh.read())
    return digest.hexdigest()


def derive_seed(base: int, fold: int, method: str) -> int:
    digest = hashlib.sha256(f"{base}:{fold}:{method}".encode()).digest()
    return int.from_bytes(digest[:4], "big")


# ---------------------------------------------------------------------------
# Documents


@dataclass
class Document:
    doc_id: str
    phrases: list[Phrase]
    tokens: list[Token]
    section_starts: list[int] | None


def build_document(phrases: list[Phrase]) -> Document:
    """Concatenate a doc_id group into one token stream; every phrase opens
    a new sentence and block.  Phrases whose text starts with the section
    marker also open a section for the structure-aware features."""
    tokens: list[Token] = []
    section_starts: list[int] = []
    position = sentence = block = 0
    for phrase in phrases:
        if phrase.text.startswith(SECTION_MARKER):
            section_starts.append(position)
        for t in prepare(phrase.text, pos=list(phrase.pos) if phrase.pos else None):
            tokens.append(
                Token(
                    surface=t.surface,
                    position=position + t.position,
                    sentence_index=sentence + t.sentence_index,
                    block_index=block + t.block_index,
                    raw=t.raw,
                    stem=t.stem,
                    tag=t.tag,
                )
            )
        if tokens:
            position = tokens[-1].position + 1
            sentence = tokens[-1].sentence_index + 1
            block = tokens[-1].block_index + 1
    doc_id = phrases[0].doc_id if phrases[0].doc_id is not None else "corpus"
    return Document(
        doc_id=doc_id,
        phrases=phrases,
        tokens=tokens,
        section_starts=section_starts or None,
    )


def split_documents(phrases: list[Phrase]) -> list[Document]:
    return [build_document(group) for group in group_documents(phrases)]


# ---------------------------------------------------------------------------
# Keyphrase extraction cells


def _extract_candidates(
    spec: ExperimentSpec,
    documents: list[Document],
    train_documents: list[Document],
    k: int,
) -> dict[str, list[Candidate]]:
    """Top-k candidates per document for any configured method."""
    method = spec.method
    cfg = ExtractorConfig(k=k, **{kk: v for kk, v in spec.params.items() if kk in
                                  ("window", "damping", "tol", "max_iter",
                                   "topic_threshold", "alpha")})
    out: dict[str, list[Candidate]] = {}
    if method in ("kea", "wingnus"):
        gold = [
            [p.text for p in doc.phrases if p.keyphrase] for doc in train_documents
        ]
        model = kea.train(
            [doc.tokens for doc in train_documents],
            gold,
            variant=method,
            match_threshold=spec.threshold,
            section_starts=[doc.section_starts for doc in train_documents],
        )
        for doc in documents:
            out[doc.doc_id] = kea.predict(model, doc.tokens, k, doc.section_starts)
        return out
    corpus_surfaces = [[t.surface for t in doc.tokens] for doc in documents]
    for doc in documents:
        if method == "textrank":
            out[doc.doc_id] = graphrank.extract_textrank(doc.tokens, cfg)
        elif method == "singlerank":
            out[doc.doc_id] = graphrank.extract_singlerank(doc.tokens, cfg)
        elif method == "positionrank":
            out[doc.doc_id] = graphrank.extract_positionrank(doc.tokens, cfg)
        elif method == "topicrank":
            out[doc.doc_id] = graphrank.extract_topicrank(doc.tokens, cfg)
        elif method == "multipartiterank":
            out[doc.doc_id] = graphrank.extract_multipartiterank(doc.tokens, cfg)
        elif method == "yake":
            out[doc.doc_id] = statrank.extract_yake(
                doc.tokens,
                k=k,
                dedup_threshold=spec.params.get("dedup_threshold", defaults.YAKE_DEDUP_THRESHOLD),
            )
        elif method == "kpminer":
            kp_cfg = statrank.KpMinerConfig(
                lasf=spec.params.get("lasf", statrank.KpMinerConfig().lasf),
                cutoff=spec.params.get("cutoff", statrank.KpMinerConfig().cutoff),
            )
            out[doc.doc_id] = statrank.extract_kpminer(
                doc.tokens, kp_cfg, k=k, corpus=corpus_surfaces
            )
        else:
            raise ValueError(f"unknown extractor {method!r}")
    return out


def _kpe_fold(spec: ExperimentSpec, dataset: Dataset, fold: int, k: int | None = None):
    """Predictions for one fold: (gold labels, predicted labels, candidate
    map), both label lists in document order."""
    train, test = split_fold(dataset, fold)
    test_docs = split_documents(test)
    train_docs = split_documents(train)
    candidates = _extract_candidates(spec, test_docs, train_docs, k or spec.k)
    cfg = MatchConfig(threshold=spec.threshold)
    y_true: list[str] = []
    y_pred: list[str] = []
    for doc in test_docs:
        predictions = label_phrases(candidates[doc.doc_id], doc.phrases, cfg)
        for phrase, predicted in zip(doc.phrases, predictions):
            y_true.append("keyphrase" if phrase.keyphrase else "non-keyphrase")
            y_pred.append("keyphrase" if predicted else "non-keyphrase")
    return y_true, y_pred, candidates


# ---------------------------------------------------------------------------
# Classification cells


def _phrase_features(
    spec: ExperimentSpec, train: list[Phrase], test: list[Phrase]
) -> tuple[np.ndarray, np.ndarray, list[list[str]], list[list[str]]]:
    train_docs = [[t.stem for t in prepare(p.text, list(p.pos) if p.pos else None)] for p in train]
    test_docs = [[t.stem for t in prepare(p.text, list(p.pos) if p.pos else None)] for p in test]
    if spec.feature in ("tfidf", "bow"):
        model = vectorize.fit_tfidf(train_docs, spec.ngram_range)
        use_idf = spec.feature == "tfidf"
        X_train = vectorize.transform_matrix(model, train_docs, use_idf=use_idf)
        X_test = vectorize.transform_matrix(model, test_docs, use_idf=use_idf)
    else:
        store = vectorize.load_embeddings(spec.embeddings)
        missing = [p.id for p in train + test if p.id not in store.vectors]
        if missing:
            raise ValueError(f"embedding store is missing phrase ids: {missing}")
        X_train = store.matrix([p.id for p in train])
        X_test = store.matrix([p.id for p in test])
    return X_train, X_test, train_docs, test_docs


def _classification_fold(
    spec: ExperimentSpec, dataset: Dataset, fold: int
) -> tuple[EvaluationReport, dict[str, str]]:
    include_other = bool(spec.params.get("include_other", False))
    target = "generic" if spec.task == "generic" else "specific"

    def label_of(p: Phrase):
        return p.generic if target == "generic" else p.specific

    def keep(p: Phrase) -> bool:
        return p.keyphrase or (include_other and target == "generic")

    train_all, test_all = split_fold(dataset, fold)
    train = [p for p in train_all if keep(p)]
    test = [p for p in test_all if keep(p)]
    if not train or not test:
        raise ValueError(f"fold {fold} has no usable phrases for task {spec.task!r}")
    y_train = [label_of(p) for p in train]
    y_test = [label_of(p) for p in test]
    cell_seed = derive_seed(spec.seed, fold, spec.method)

    if spec.method == "baseline":
        predictor = classify.baseline_stratified(y_train, seed=cell_seed)
        y_pred = predictor.predict(test)
        report = EvaluationReport.from_predictions(
            y_test, y_pred, sorted(set(y_train + y_test), key=str)
        )
        return report, {}

    X_train, X_test, train_docs, test_docs = _phrase_features(spec, train, test)

    if spec.method == "svm":
        cfg = classify.TrainConfig(
            seed=cell_seed,
            eta0=spec.params.get("eta0", 0.1),
            lam=spec.params.get("lam", 1e-4),
            epochs=spec.params.get("epochs", 50),
            class_weighting=spec.params.get("class_weighting", "none"),
        )
        model = classify.train_svm(X_train, y_train, cfg)
        y_pred = model.predict(X_test)
        report = EvaluationReport.from_predictions(
            y_test, y_pred, sorted(set(y_train + y_test), key=str)
        )
        return report, {f"model_fold{fold}.txt": classify.model_to_text(model)}

    # clustering-as-classification (optionally LDA-coupled)
    method = spec.method
    if method.startswith("lda-"):
        method = method[len("lda-") :]
        n_topics = int(spec.params.get("topics", 4))
        lda = topics.lda_fit(
            train_docs,
            n_topics,
            sweeps=int(spec.params.get("lda_sweeps", 200)),
            seed=cell_seed,
        )
        train_topics = np.stack([topics.lda_features(lda, d) for d in range(len(train_docs))])
        X_train = topics.coupled_features(X_train, train_topics)
        test_topics = np.stack([topics.lda_features(lda, d) for d in test_docs])
        X_test = topics.coupled_features(X_test, test_topics)
    k = int(spec.params.get("k_clusters", len(set(y_train))))
    classifier = cluster.fit_cluster_classifier(
        X_train,
        y_train,
        method=method,
        k=k,
        seed=cell_seed,
        init=spec.params.get("init", "kmeanspp"),
        affinity=spec.params.get("affinity", "euclidean"),
        assign=spec.params.get("assign", "kmeans"),
    )
    y_pred = classifier.classify_many(X_test)
    report = EvaluationReport.from_predictions(
        y_test, y_pred, sorted(set(y_train + y_test), key=str)
    )
    labels = classifier.assignment.labels
    report.cp = purity(labels, y_train)
    report.ri = rand_index(labels, y_train)
    report.ami = ami(labels, y_train)
    if len(set(labels.tolist())) > 1:
        report.sil = silhouette(X_train, labels)
    assignments = cluster.assignment_to_tsv(
        [p.id for p in train], classifier.assignment, classifier.cluster_to_class
    )
    return report, {f"assignments_fold{fold}.tsv": assignments}


# ---------------------------------------------------------------------------
# Public entry points


def run(spec: ExperimentSpec) -> list[dict[str, str]]:
    """Execute one experiment per fold and write the benchmark-table report
    (CSV + Markdown) plus per-document candidate TSVs for extraction runs."""
    spec.validate()
    dataset = load_dataset(spec.dataset)
    os.makedirs(spec.out_dir, exist_ok=True)
    rows: list[dict[str, str]] = []
    for fold in spec.folds:
        if spec.task == "kpe":
            y_true, y_pred, candidates = _kpe_fold(spec, dataset, fold)
            report = EvaluationReport.from_predictions(
                y_true, y_pred, ["keyphrase", "non-keyphrase"]
            )
            artifacts = {
                f"candidates_fold{fold}_{doc_id}.tsv": graphrank.candidates_to_tsv(cands)
                for doc_id, cands in sorted(candidates.items())
            }
        else:
            report, artifacts = _classification_fold(spec, dataset, fold)
        for name, content in artifacts.items():
            with open(os.path.join(spec.out_dir, name), "w", encoding="utf-8") as fh:
                fh.write(content)
        row = {
            "spec_hash": spec.spec_hash(),
            "task": spec.task,
            "method": spec.method,
            "feature": spec.feature,
            "fold": str(fold),
        }
        row.update(report.as_row())
        rows.append(row)
    write_report(rows, spec.out_dir)
    return rows


REPORT_HEADER = ("spec_hash", "task", "method", "feature", "fold") + REPORT_COLUMNS


def write_report(rows: list[dict[str, str]], out_dir: str) -> None:
    csv_path = os.path.join(out_dir, "report.csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(",".join(REPORT_HEADER) + "\n")
        for row in rows:
            fh.write(",".join(row.get(col, "") for col in REPORT_HEADER) + "\n")
    with open(os.path.join(out_dir, "report.md"), "w", encoding="utf-8") as fh:
        fh.write(render_markdown(rows))


_MD_COLUMNS = (
    ("method", "Method"),
    ("feature", "Feature"),
    ("fold", "Fold"),
    ("accuracy", "Accuracy"),
    ("macro_p", "Macro P"),
    ("macro_r", "Macro R"),
    ("macro_f1", "Macro F"),
    ("weighted_p", "Weighted P"),
    ("weighted_r", "Weighted R"),
    ("weighted_f1", "Weighted F"),
    ("cp", "CP"),
    ("ri", "RI"),
    ("ami", "AMI"),
    ("sil", "SIL"),
)


def render_markdown(rows: list[dict[str, str]]) -> str:
    def fmt(value: str) -> str:
        if value == "":
            return "-"
        try:
            return f"{float(value):.4f}"
        except ValueError:
            return value

    table = [[fmt(row.get(key, "")) for key, _ in _MD_COLUMNS] for row in rows]
    headers = [title for _, title in _MD_COLUMNS]
    widths = [
        max(len(headers[i]), *(len(r[i]) for r in table)) if table else len(headers[i])
        for i in range(len(headers))
    ]
    lines = [
        "| " + " | ".join(h.ljust(w) for h, w in zip(headers, widths)) + " |",
        "|" + "|".join("-" * (w + 2) for w in widths) + "|",
    ]
    for r in table:
        lines.append("| " + " | ".join(v.ljust(w) for v, w in zip(r, widths)) + " |")
    return "\n".join(lines) + "\n"


def sweep_k(spec: ExperimentSpec, k_values: list[int]) -> list[dict[str, str]]:
    """One extraction run per fold at max(k_values); smaller cutoffs reuse
    the same ranking, so candidate sets are nested by construction.

    The CSV carries the keyphrase-class precision/recall/F1 (recall is the
    monotone curve) plus the macro F1.
    """
    spec.validate()
    if spec.task != "kpe":
        raise ValueError("sweep_k requires a kpe spec")
    if not k_values or any(k < 1 for k in k_values):
        raise ValueError("k_values must be positive")
    dataset = load_dataset(spec.dataset)
    os.makedirs(spec.out_dir, exist_ok=True)
    k_values = sorted(set(k_values))
    rows: list[dict[str, str]] = []
    for fold in spec.folds:
        train, test = split_fold(dataset, fold)
        test_docs = split_documents(test)
        train_docs = split_documents(train)
        full = _extract_candidates(spec, test_docs, train_docs, max(k_values))
        cfg = MatchConfig(threshold=spec.threshold)
        for k in k_values:
            y_true: list[str] = []
            y_pred: list[str] = []
            for doc in test_docs:
                predictions = label_phrases(full[doc.doc_id][:k], doc.phrases, cfg)
                for phrase, predicted in zip(doc.phrases, predictions):
                    y_true.append("keyphrase" if phrase.keyphrase else "non-keyphrase")
                    y_pred.append("keyphrase" if predicted else "non-keyphrase")
            cm = confusion_matrix(y_true, y_pred, ["keyphrase", "non-keyphrase"])
            p, r, f1, _ = per_class_prf(cm)["keyphrase"]
            _, _, macro_f1 = prf(cm, "macro")
            rows.append(
                {
                    "k": str(k),
                    "fold": str(fold),
                    "precision": f"{p:.6f}",
                    "recall": f"{r:.6f}",
                    "f1": f"{f1:.6f}",
                    "macro_f1": f"{macro_f1:.6f}",
                }
            )
    header = ("k", "fold", "precision", "recall", "f1", "macro_f1")
    with open(os.path.join(spec.out_dir, "sweep.csv"), "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row[col] for col in header) + "\n")
    return rows


# ---------------------------------------------------------------------------
# Synthetic dataset generation

_SIGNAL_ROOTS = ("drok", "grel", "vek", "mbor", "ndel", "rvik", "slom", "vrek", "xpod", "zkin", "bron", "drim")
_CLASS_PREFIX = {"Task": "ta", "Finding": "fi", "Reason": "re", "Intuition": "in"}
_SHARED_NOISE = ("system", "result", "model", "value", "input", "output", "number", "figure")
_FILLERS = ("the", "of", "in", "and", "with", "for")


def class_vocabulary(generic: str) -> list[str]:
    prefix = _CLASS_PREFIX[generic]
    return [f"{prefix}{root}" for root in _SIGNAL_ROOTS]


def synth(
    seed: int,
    sizes: dict[str, int],
    out_path: str | None = None,
    signal_strength: float = 1.0,
    phrases_per_doc: int = 8,
) -> Dataset:
    """Planted-structure corpus: each generic class owns a private
    vocabulary block, Other phrases carry one-off junk words, and every
    phrase ships a pos array so results do not hinge on the heuristic
    tagger.  Fixed seed -> byte-identical file."""
    for cls, size in sizes.items():
        if size < 1:
            raise ValueError(f"size for {cls!r} must be >= 1")
    rng = np.random.default_rng(seed)
    order: list[str] = []
    remaining = dict(sizes)
    while any(v > 0 for v in remaining.values()):
        for cls in ("Task", "Finding", "Reason", "Intuition", "Other"):
            if remaining.get(cls, 0) > 0:
                order.append(cls)
                remaining[cls] -= 1

    total = len(order)
    n_docs = max(1, total // phrases_per_doc)
    per_class_counter: dict[str, int] = {}
    phrases: list[Phrase] = []
    junk_counter = 0

    for index, cls in enumerate(order):
        words: list[str] = []
        n_words = int(rng.integers(6, 11))
        if cls == "Other":
            for _ in range(n_words):
                junk_counter += 1
                words.append(f"junk{junk_counter:03d}")
        else:
            block = class_vocabulary(cls)
            for _ in range(n_words):
                if rng.random() < signal_strength:
                    words.append(block[int(rng.integers(len(block)))])
                else:
                    words.append(_SHARED_NOISE[int(rng.integers(len(_SHARED_NOISE)))])
        tokens: list[str] = []
        for w in words:
            tokens.append(w)
            if rng.random() < 0.3:
                tokens.append(_FILLERS[int(rng.integers(len(_FILLERS)))])
        text = " ".join(tokens) + "."
        pos = tuple("STOP" if t in _FILLERS else "NOUN" for t in tokens)
        seq = per_class_counter.get(cls, 0)
        per_class_counter[cls] = seq + 1
        phrases.append(
            Phrase(
                id=f"p{index:04d}",
                text=text,
                keyphrase=cls != "Other",
                generic=cls,
                specific=map_generic_to_specific(cls),
                fold=1 + (seq % 2),
                doc_id=f"d{index % n_docs:02d}",
                pos=pos,
            )
        )
    dataset = Dataset(phrases)
    if out_path is not None:
        save_dataset(dataset, out_path)
    return dataset
