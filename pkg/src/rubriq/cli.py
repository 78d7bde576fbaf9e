"""Command-line interface.

Subcommands: synth, extract, sweep-k, classify, cluster, explain, report.
``--config FILE`` supplies key=value defaults for any long option (explicit
flags win).  Exit codes: 0 success, 2 validation error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import classify, explain, vectorize
from .corpus import DatasetError, load_dataset, split_fold
from .match import MatchConfig
from .runner import (
    CLASSIFY_METHODS,
    CLUSTER_METHODS,
    ExperimentSpec,
    KPE_METHODS,
    render_markdown,
    run,
    sweep_k,
    synth,
)
from .textproc import prepare

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


def _parse_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}: line {line_no}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _parse_sizes(text: str) -> dict[str, int]:
    sizes: dict[str, int] = {}
    for part in text.split(","):
        cls, _, count = part.partition("=")
        if not count:
            raise ValueError(f"bad --sizes entry {part!r}, expected Class=count")
        sizes[cls.strip()] = int(count)
    return sizes


def _parse_int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _parse_ngram(text: str) -> tuple[int, int]:
    parts = [int(v) for v in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"bad ngram range {text!r}, expected 'min,max'")
    return parts[0], parts[1]


def _folds(arg: str) -> tuple[int, ...]:
    if arg == "all":
        return (1, 2)
    return (int(arg),)


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="rubriq")
    sub = parser.add_subparsers(dest="command", required=True)
    registry: dict[str, argparse.ArgumentParser] = {}

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="key=value defaults file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default="runs", help="output directory")

    p_synth = sub.add_parser("synth", help="generate a planted synthetic dataset")
    common(p_synth)
    p_synth.add_argument("--sizes", default="Task=8,Finding=8,Reason=8,Intuition=8,Other=16")
    p_synth.add_argument("--signal-strength", type=float, default=1.0)
    p_synth.add_argument("--phrases-per-doc", type=int, default=8)
    p_synth.add_argument("--file", default="synthetic.jsonl", help="file name inside --out")

    p_extract = sub.add_parser("extract", help="run one keyphrase extractor")
    common(p_extract)
    p_extract.add_argument("--dataset", required=True)
    p_extract.add_argument("--method", required=True, choices=KPE_METHODS)
    p_extract.add_argument("--k", type=int, default=10)
    p_extract.add_argument("--fold", default="all", choices=["1", "2", "all"])
    p_extract.add_argument("--threshold", type=float, default=MatchConfig().threshold)

    p_sweep = sub.add_parser("sweep-k", help="top-K sweep for one extractor")
    common(p_sweep)
    p_sweep.add_argument("--dataset", required=True)
    p_sweep.add_argument("--method", required=True, choices=KPE_METHODS)
    p_sweep.add_argument("--k-values", required=True, help="comma-separated cutoffs")
    p_sweep.add_argument("--fold", default="all", choices=["1", "2", "all"])
    p_sweep.add_argument("--threshold", type=float, default=MatchConfig().threshold)

    p_classify = sub.add_parser("classify", help="supervised classification run")
    common(p_classify)
    p_classify.add_argument("--dataset", required=True)
    p_classify.add_argument("--task", default="generic", choices=["generic", "specific"])
    p_classify.add_argument("--method", default="svm", choices=CLASSIFY_METHODS)
    p_classify.add_argument("--features", default="tfidf", choices=["tfidf", "bow", "embeddings"])
    p_classify.add_argument("--embeddings", help="embedding TSV for --features embeddings")
    p_classify.add_argument("--ngram", default="1,1", help="tfidf/bow n-gram range 'min,max'")
    p_classify.add_argument("--fold", default="all", choices=["1", "2", "all"])
    p_classify.add_argument("--include-other", action="store_true")
    p_classify.add_argument("--class-weighting", default="none", choices=["none", "balanced"])

    p_cluster = sub.add_parser("cluster", help="classification-via-clustering run")
    common(p_cluster)
    p_cluster.add_argument("--dataset", required=True)
    p_cluster.add_argument("--task", default="specific", choices=["specific"])
    p_cluster.add_argument("--method", default="kmeans", choices=CLUSTER_METHODS)
    p_cluster.add_argument("--features", default="tfidf", choices=["tfidf", "bow", "embeddings"])
    p_cluster.add_argument("--embeddings")
    p_cluster.add_argument("--ngram", default="1,1")
    p_cluster.add_argument("--fold", default="all", choices=["1", "2", "all"])
    p_cluster.add_argument("--init", default="kmeanspp", choices=["kmeanspp", "random", "pca"])
    p_cluster.add_argument("--affinity", default="euclidean", choices=["euclidean", "cosine", "cityblock"])
    p_cluster.add_argument("--assign", default="kmeans", choices=["kmeans", "discretize"])
    p_cluster.add_argument("--k-clusters", type=int)
    p_cluster.add_argument("--with-lda", type=int, metavar="TOPICS", help="couple LDA features")

    p_explain = sub.add_parser("explain", help="LIME explanation of one phrase")
    common(p_explain)
    p_explain.add_argument("--dataset", required=True)
    p_explain.add_argument("--phrase-id", required=True)
    p_explain.add_argument("--fold", default="1", choices=["1", "2"],
                           help="fold whose train split fits the classifier")
    p_explain.add_argument("--task", default="generic", choices=["generic", "specific"])
    p_explain.add_argument("--features", default="tfidf", choices=["tfidf", "bow"])
    p_explain.add_argument("--compare-features", choices=["tfidf", "bow"],
                           help="second backend for the reliability comparison")
    p_explain.add_argument("--target", help="class to explain (default: predicted class)")
    p_explain.add_argument("--samples", type=int, default=200)
    p_explain.add_argument("--top-n", type=int,
                           help="overlap size; required with --compare-features")
    p_explain.add_argument("--ngram", default="1,1")

    p_report = sub.add_parser("report", help="merge report CSVs into one Markdown table")
    common(p_report)
    p_report.add_argument("--inputs", nargs="+", required=True)
    p_report.add_argument("--file", default="report.md", help="file name inside --out")

    registry.update(
        {
            "synth": p_synth,
            "extract": p_extract,
            "sweep-k": p_sweep,
            "classify": p_classify,
            "cluster": p_cluster,
            "explain": p_explain,
            "report": p_report,
        }
    )
    return parser, registry


def _apply_config(
    parser: argparse.ArgumentParser,
    registry: dict[str, argparse.ArgumentParser],
    argv: list[str],
) -> argparse.Namespace:
    probe, _ = parser.parse_known_args(argv)
    if getattr(probe, "config", None):
        defaults = _parse_config_file(probe.config)
        subparser = registry[probe.command]
        known = {action.dest for action in subparser._actions}
        unknown = set(defaults) - known
        if unknown:
            raise ValueError(f"config keys not recognized by {probe.command!r}: {sorted(unknown)}")
        subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def _build_spec(args: argparse.Namespace, task: str, method: str, params: dict) -> ExperimentSpec:
    return ExperimentSpec(
        task=task,
        method=method,
        dataset=args.dataset,
        feature=getattr(args, "features", "tfidf"),
        embeddings=getattr(args, "embeddings", None),
        folds=_folds(args.fold),
        seed=int(args.seed),
        out_dir=args.out,
        k=int(getattr(args, "k", 10)),
        threshold=float(getattr(args, "threshold", MatchConfig().threshold)),
        ngram_range=_parse_ngram(getattr(args, "ngram", "1,1")),
        params=params,
    )


def _cmd_synth(args: argparse.Namespace) -> int:
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, args.file)
    dataset = synth(
        seed=int(args.seed),
        sizes=_parse_sizes(args.sizes),
        out_path=path,
        signal_strength=float(args.signal_strength),
        phrases_per_doc=int(args.phrases_per_doc),
    )
    print(f"wrote {len(dataset)} phrases to {path}")
    return EXIT_OK


def _cmd_extract(args: argparse.Namespace) -> int:
    spec = _build_spec(args, "kpe", args.method, {})
    rows = run(spec)
    for row in rows:
        print(f"fold {row['fold']}: macro-F1 {row['macro_f1']}")
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    spec = _build_spec(args, "kpe", args.method, {})
    rows = sweep_k(spec, _parse_int_list(args.k_values))
    print(f"wrote {len(rows)} sweep rows to {os.path.join(args.out, 'sweep.csv')}")
    return EXIT_OK


def _cmd_classify(args: argparse.Namespace) -> int:
    params = {
        "include_other": bool(args.include_other),
        "class_weighting": args.class_weighting,
    }
    spec = _build_spec(args, args.task, args.method, params)
    rows = run(spec)
    for row in rows:
        print(f"fold {row['fold']}: accuracy {row['accuracy']} macro-F1 {row['macro_f1']}")
    return EXIT_OK


def _cmd_cluster(args: argparse.Namespace) -> int:
    method = args.method if args.with_lda is None else f"lda-{args.method}"
    params = {
        "init": args.init,
        "affinity": args.affinity,
        "assign": args.assign,
    }
    if args.k_clusters:
        params["k_clusters"] = int(args.k_clusters)
    if args.with_lda is not None:
        params["topics"] = int(args.with_lda)
    spec = _build_spec(args, args.task, method, params)
    rows = run(spec)
    for row in rows:
        print(
            f"fold {row['fold']}: macro-F1 {row['macro_f1']} CP {row['cp']} RI {row['ri']}"
        )
    return EXIT_OK


def _make_scorer(backend: str, train_phrases, labels, ngram_range, seed):
    docs = [[t.stem for t in prepare(p.text, list(p.pos) if p.pos else None)] for p in train_phrases]
    model_tfidf = vectorize.fit_tfidf(docs, ngram_range)
    use_idf = backend == "tfidf"
    X = vectorize.transform_matrix(model_tfidf, docs, use_idf=use_idf)
    svm = classify.train_svm(X, labels, classify.TrainConfig(seed=seed))

    def scorer(texts):
        stems = [[t.stem for t in prepare(text)] for text in texts]
        return svm.decision_scores(vectorize.transform_matrix(model_tfidf, stems, use_idf=use_idf))

    return svm, scorer


def _cmd_explain(args: argparse.Namespace) -> int:
    if args.compare_features and args.top_n is None:
        raise ValueError("--top-n is required when comparing two backends")
    dataset = load_dataset(args.dataset)
    phrase = dataset.by_id(args.phrase_id)
    fold = int(args.fold)
    train, _ = split_fold(dataset, fold)
    train = [p for p in train if p.keyphrase]
    labels = [p.generic if args.task == "generic" else p.specific for p in train]
    ngram_range = _parse_ngram(args.ngram)
    os.makedirs(args.out, exist_ok=True)

    backends = [args.features] + ([args.compare_features] if args.compare_features else [])
    explanations = []
    for backend in backends:
        svm, scorer = _make_scorer(backend, train, labels, ngram_range, int(args.seed))
        if args.target is not None:
            if args.target not in svm.classes:
                raise ValueError(f"unknown target class {args.target!r}; have {svm.classes}")
            target = svm.classes.index(args.target)
        else:
            target = int(np.argmax(scorer([phrase.text])[0]))
        explanation = explain.lime_explain(
            scorer, phrase.text, target, n_samples=int(args.samples), seed=int(args.seed)
        )
        out_path = os.path.join(args.out, f"explain_{backend}.tsv")
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(explain.explanation_to_tsv(explanation))
        print(f"{backend}: explained class {svm.classes[target]!r} -> {out_path}")
        explanations.append(explanation)
    if len(explanations) == 2:
        overlap = explain.overlap_precision(explanations[0], explanations[1], int(args.top_n))
        overlap_path = os.path.join(args.out, "overlap.txt")
        with open(overlap_path, "w", encoding="utf-8") as fh:
            fh.write(f"overlap_precision@{int(args.top_n)}\t{overlap:.6f}\n")
        print(f"overlap precision @{int(args.top_n)}: {overlap:.6f}")
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    rows = []
    for path in args.inputs:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
            for line in fh:
                rows.append(dict(zip(header, line.rstrip("\n").split(","))))
    os.makedirs(args.out, exist_ok=True)
    out_path = os.path.join(args.out, args.file)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(render_markdown(rows))
    print(f"wrote {out_path}")
    return EXIT_OK


_COMMANDS = {
    "synth": _cmd_synth,
    "extract": _cmd_extract,
    "sweep-k": _cmd_sweep,
    "classify": _cmd_classify,
    "cluster": _cmd_cluster,
    "explain": _cmd_explain,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser, registry = build_parser()
    try:
        args = _apply_config(parser, registry, list(argv) if argv is not None else sys.argv[1:])
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return _COMMANDS[args.command](args)
    except (DatasetError, ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # pragma: no cover - defensive
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
