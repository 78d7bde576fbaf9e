"""Annotated-phrase data model, dataset IO and fold handling.

Dataset files are UTF-8 JSON lines, one phrase per line, with keys ``id``,
``text``, ``keyphrase``, ``generic``, ``specific``, ``fold`` and optional
``doc_id`` / ``pos``.  The canonical writer sorts keys alphabetically and
records by id so a load/save round trip is byte-stable.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from .textproc import TAGS

log = logging.getLogger(__name__)

GENERIC_CLASSES = ("Task", "Finding", "Reason", "Intuition", "Other")
SPECIFIC_CLASSES = (
    "ProjectOverview",
    "CognitiveConnection",
    "RelationshipToKBAI",
    "AgentReasoning",
)

_GENERIC_TO_SPECIFIC = {
    "Task": "ProjectOverview",
    "Finding": "CognitiveConnection",
    "Reason": "RelationshipToKBAI",
    "Intuition": "AgentReasoning",
    "Other": None,
}

FOLDS = (1, 2)


class DatasetError(ValueError):
    """Malformed dataset file or phrase-invariant violation."""


def map_generic_to_specific(generic: str) -> str | None:
    """Fixed generic-class -> scoring-rubric table; Other has no rubric."""
    try:
        return _GENERIC_TO_SPECIFIC[generic]
    except KeyError:
        raise DatasetError(f"unknown generic class {generic!r}") from None


@dataclass(frozen=True)
class Phrase:
    id: str
    text: str
    keyphrase: bool
    generic: str
    specific: str | None
    fold: int
    doc_id: str | None = None
    pos: tuple[str, ...] | None = None

    def validate(self) -> None:
        if self.generic not in GENERIC_CLASSES:
            raise DatasetError(f"{self.id}: unknown generic class {self.generic!r}")
        if self.specific is not None and self.specific not in SPECIFIC_CLASSES:
            raise DatasetError(f"{self.id}: unknown specific class {self.specific!r}")
        if not self.text.strip():
            raise DatasetError(f"{self.id}: empty text")
        if self.fold not in FOLDS:
            raise DatasetError(f"{self.id}: fold must be one of {FOLDS}, got {self.fold}")
        # keyphrase = false <=> generic = Other <=> specific absent
        if self.keyphrase == (self.generic == "Other"):
            raise DatasetError(
                f"{self.id}: keyphrase={self.keyphrase} inconsistent with generic={self.generic}"
            )
        expected = map_generic_to_specific(self.generic)
        if self.specific != expected:
            raise DatasetError(
                f"{self.id}: specific={self.specific!r} does not match mapping "
                f"of generic={self.generic!r} (expected {expected!r})"
            )
        if self.pos is not None:
            unknown = [t for t in self.pos if t not in TAGS]
            if unknown:
                raise DatasetError(f"{self.id}: unknown pos tags {unknown}")


@dataclass
class Dataset:
    phrases: list[Phrase]
    counts: dict[int, dict[str, int]] = field(init=False)

    def __post_init__(self) -> None:
        counts: dict[int, dict[str, int]] = {f: {c: 0 for c in GENERIC_CLASSES} for f in FOLDS}
        for p in self.phrases:
            counts[p.fold][p.generic] += 1
        self.counts = counts

    def __len__(self) -> int:
        return len(self.phrases)

    def by_id(self, phrase_id: str) -> Phrase:
        for p in self.phrases:
            if p.id == phrase_id:
                return p
        raise KeyError(phrase_id)


def _phrase_from_record(record: dict, line_no: int) -> Phrase:
    required = {"id", "text", "keyphrase", "generic", "specific", "fold"}
    missing = required - record.keys()
    if missing:
        raise DatasetError(f"line {line_no}: missing keys {sorted(missing)}")
    pos = record.get("pos")
    return Phrase(
        id=str(record["id"]),
        text=str(record["text"]),
        keyphrase=bool(record["keyphrase"]),
        generic=record["generic"],
        specific=record["specific"],
        fold=record["fold"],
        doc_id=record.get("doc_id"),
        pos=tuple(pos) if pos is not None else None,
    )


def load_dataset(path: str) -> Dataset:
    """Parse and validate a JSONL dataset file.

    Malformed lines raise with their line number; phrases violating the
    label invariants raise with every offending id listed.
    """
    phrases: list[Phrase] = []
    violations: list[str] = []
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path}: line {line_no}: invalid JSON ({exc.msg})") from exc
            phrase = _phrase_from_record(record, line_no)
            if phrase.id in seen_ids:
                violations.append(f"{phrase.id}: duplicate id (line {line_no})")
                continue
            seen_ids.add(phrase.id)
            try:
                phrase.validate()
            except DatasetError as exc:
                violations.append(str(exc))
                continue
            phrases.append(phrase)
    if violations:
        raise DatasetError(
            f"{path}: {len(violations)} invalid record(s):\n  " + "\n  ".join(violations)
        )
    dataset = Dataset(phrases)
    for fold in FOLDS:
        for cls in GENERIC_CLASSES:
            if dataset.counts[fold][cls] == 0:
                log.warning("fold %d has no %r phrases", fold, cls)
    return dataset


def phrase_to_record(phrase: Phrase) -> dict:
    record = {
        "id": phrase.id,
        "text": phrase.text,
        "keyphrase": phrase.keyphrase,
        "generic": phrase.generic,
        "specific": phrase.specific,
        "fold": phrase.fold,
    }
    if phrase.doc_id is not None:
        record["doc_id"] = phrase.doc_id
    if phrase.pos is not None:
        record["pos"] = list(phrase.pos)
    return record


def save_dataset(dataset: Dataset, path: str) -> None:
    """Canonical writer: records sorted by id, keys sorted alphabetically."""
    with open(path, "w", encoding="utf-8") as fh:
        for phrase in sorted(dataset.phrases, key=lambda p: p.id):
            fh.write(json.dumps(phrase_to_record(phrase), sort_keys=True) + "\n")


def split_fold(dataset: Dataset, fold: int) -> tuple[list[Phrase], list[Phrase]]:
    """(train, test) where the requested fold is the test split."""
    if fold not in FOLDS:
        raise ValueError(f"fold must be one of {FOLDS}, got {fold}")
    train = [p for p in dataset.phrases if p.fold != fold]
    test = [p for p in dataset.phrases if p.fold == fold]
    return train, test


def group_documents(phrases: list[Phrase]) -> list[list[Phrase]]:
    """Group phrases into documents by doc_id (file order preserved).

    Phrases without a doc_id form a single document, so extraction always
    has a corpus-level fallback.
    """
    groups: dict[str, list[Phrase]] = {}
    untagged: list[Phrase] = []
    for p in phrases:
        if p.doc_id is None:
            untagged.append(p)
        else:
            groups.setdefault(p.doc_id, []).append(p)
    documents = [groups[k] for k in groups]
    if untagged:
        documents.append(untagged)
    return documents
