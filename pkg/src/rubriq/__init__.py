"""rubriq: keyphrase extraction and keyphrase-rubric classification for
complex-assignment text, with the full evaluation and interpretability
machinery to benchmark every method on any conforming dataset."""

from .corpus import (
    Dataset,
    DatasetError,
    Phrase,
    load_dataset,
    map_generic_to_specific,
    save_dataset,
    split_fold,
)
from .graphrank import (
    Candidate,
    ExtractorConfig,
    build_word_graph,
    extract_multipartiterank,
    extract_positionrank,
    extract_singlerank,
    extract_textrank,
    extract_topicrank,
    pagerank,
)
from .match import MatchConfig, label_phrases, similarity
from .metrics import (
    EvaluationReport,
    ami,
    cohens_kappa,
    confusion_matrix,
    prf,
    purity,
    rand_index,
    silhouette,
)
from .runner import ExperimentSpec, run, sweep_k, synth
from .statrank import KpMinerConfig, extract_kpminer, extract_yake
from .vectorize import EmbeddingStore, TfIdfModel, fit_tfidf, load_embeddings, transform

__version__ = "0.1.0"

__all__ = [
    "Candidate",
    "Dataset",
    "DatasetError",
    "EmbeddingStore",
    "EvaluationReport",
    "ExperimentSpec",
    "ExtractorConfig",
    "KpMinerConfig",
    "MatchConfig",
    "Phrase",
    "TfIdfModel",
    "ami",
    "build_word_graph",
    "cohens_kappa",
    "confusion_matrix",
    "extract_kpminer",
    "extract_multipartiterank",
    "extract_positionrank",
    "extract_singlerank",
    "extract_textrank",
    "extract_topicrank",
    "extract_yake",
    "fit_tfidf",
    "label_phrases",
    "load_dataset",
    "load_embeddings",
    "map_generic_to_specific",
    "pagerank",
    "prf",
    "purity",
    "rand_index",
    "run",
    "save_dataset",
    "silhouette",
    "similarity",
    "split_fold",
    "sweep_k",
    "synth",
    "transform",
]
