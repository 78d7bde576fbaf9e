"""Produce an embedding store TSV for every phrase in a dataset.

Input: the phrase dataset format (UTF-8 JSON lines with at least ``id``
and ``text``).  Output: the embedding TSV contract (``#dim=<d>`` header,
then ``<id>\\t<float> <float> ...`` rows, sorted by id).

Two backends:

* real model: mean- or first-token-pooled hidden states of a configurable
  encoder layer of a pretrained transformer,
* stub: a seeded random projection of token hashes, byte-deterministic and
  dependency-free, so pipelines and CI can run without a model download.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)

POOLING_MODES = ("mean", "first")


@dataclass
class ExportConfig:
    dataset: str
    out: str
    model: str = "bert-base-uncased"
    layer: int = 2  # hidden_states index; 2 = output of the second encoder
    pooling: str = "mean"
    stub: bool = False
    seed: int = 0
    dim: int = 16  # stub mode only; real mode takes the model's width

    def __post_init__(self) -> None:
        if self.pooling not in POOLING_MODES:
            raise ValueError(f"pooling must be one of {POOLING_MODES}")
        if self.layer < 0:
            raise ValueError("layer must be >= 0")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")


def read_phrases(path: str) -> list[tuple[str, str]]:
    """(id, text) pairs from a dataset file; only those two keys matter
    here, the rest of the record is the classifier pipeline's business."""
    phrases: list[tuple[str, str]] = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: line {line_no}: invalid JSON ({exc.msg})") from exc
            if "id" not in record or "text" not in record:
                raise ValueError(f"{path}: line {line_no}: record needs 'id' and 'text'")
            phrase_id = str(record["id"])
            if phrase_id in seen:
                raise ValueError(f"{path}: line {line_no}: duplicate id {phrase_id!r}")
            seen.add(phrase_id)
            phrases.append((phrase_id, str(record["text"])))
    if not phrases:
        raise ValueError(f"{path}: no phrases found")
    return phrases


def _tokens(text: str) -> list[str]:
    out = []
    buf = []
    for ch in text.lower():
        if ch.isalnum():
            buf.append(ch)
        elif buf:
            out.append("".join(buf))
            buf = []
    if buf:
        out.append("".join(buf))
    return out


def stub_vector(text: str, seed: int, dim: int) -> np.ndarray:
    """Mean of per-token pseudo-random vectors keyed by (seed, token hash);
    identical text always maps to the identical vector."""
    tokens = _tokens(text)
    if not tokens:
        return np.zeros(dim)
    acc = np.zeros(dim)
    for token in tokens:
        digest = hashlib.sha256(f"{seed}:{token}".encode()).digest()
        rng = np.random.default_rng(int.from_bytes(digest[:8], "big"))
        acc += rng.standard_normal(dim)
    return acc / len(tokens)


def _model_vectors(phrases: list[tuple[str, str]], cfg: ExportConfig) -> tuple[dict[str, np.ndarray], int]:
    import torch
    from transformers import AutoModel, AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(cfg.model)
    model = AutoModel.from_pretrained(cfg.model, output_hidden_states=True)
    model.eval()
    max_length = tokenizer.model_max_length

    truncated = []
    vectors: dict[str, np.ndarray] = {}
    with torch.no_grad():
        for start in range(0, len(phrases), 16):
            batch = phrases[start : start + 16]
            texts = [text for _, text in batch]
            lengths = [len(tokenizer(t, truncation=False)["input_ids"]) for t in texts]
            encoded = tokenizer(
                texts, return_tensors="pt", padding=True, truncation=True, max_length=max_length
            )
            hidden = model(**encoded).hidden_states
            if cfg.layer >= len(hidden):
                raise ValueError(
                    f"layer {cfg.layer} out of range; model has {len(hidden)} hidden states"
                )
            states = hidden[cfg.layer]
            mask = encoded["attention_mask"].unsqueeze(-1)
            if cfg.pooling == "mean":
                pooled = (states * mask).sum(dim=1) / mask.sum(dim=1)
            else:
                pooled = states[:, 0, :]
            for (phrase_id, _), length, row in zip(batch, lengths, pooled):
                vectors[phrase_id] = row.numpy().astype(float)
                if length > max_length:
                    truncated.append(phrase_id)
    if truncated:
        log.warning("truncated %d phrase(s) to %d tokens: %s", len(truncated),
                    max_length, truncated)
    return vectors, next(iter(vectors.values())).shape[0]


def export(cfg: ExportConfig) -> int:
    """Write one row per phrase; returns the row count."""
    phrases = read_phrases(cfg.dataset)
    if cfg.stub:
        vectors = {pid: stub_vector(text, cfg.seed, cfg.dim) for pid, text in phrases}
        dim = cfg.dim
    else:
        vectors, dim = _model_vectors(phrases, cfg)
    with open(cfg.out, "w", encoding="utf-8") as fh:
        fh.write(f"#dim={dim}\n")
        for phrase_id in sorted(vectors):
            payload = " ".join(repr(float(v)) for v in vectors[phrase_id])
            fh.write(f"{phrase_id}\t{payload}\n")
    return len(vectors)
