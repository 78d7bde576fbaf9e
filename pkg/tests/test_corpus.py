import json
import logging

import pytest

from rubriq.corpus import (
    Dataset,
    DatasetError,
    Phrase,
    group_documents,
    load_dataset,
    map_generic_to_specific,
    save_dataset,
    split_fold,
)


def make_phrase(idx, generic="Task", fold=1, doc_id=None, text="the agent plan"):
    return Phrase(
        id=f"p{idx:03d}",
        text=text,
        keyphrase=generic != "Other",
        generic=generic,
        specific=map_generic_to_specific(generic),
        fold=fold,
        doc_id=doc_id,
    )


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")


def record(idx, generic="Task", fold=1, **overrides):
    base = {
        "id": f"p{idx:03d}",
        "text": f"text number {idx}",
        "keyphrase": generic != "Other",
        "generic": generic,
        "specific": map_generic_to_specific(generic),
        "fold": fold,
    }
    base.update(overrides)
    return base


class TestMapping:
    @pytest.mark.parametrize(
        "generic,specific",
        [
            ("Task", "ProjectOverview"),
            ("Finding", "CognitiveConnection"),
            ("Reason", "RelationshipToKBAI"),
            ("Intuition", "AgentReasoning"),
            ("Other", None),
        ],
    )
    def test_table(self, generic, specific):
        assert map_generic_to_specific(generic) == specific

    def test_unknown(self):
        with pytest.raises(DatasetError):
            map_generic_to_specific("Banter")


class TestLoader:
    def test_consistent_non_keyphrase_accepted(self, tmp_path):
        path = tmp_path / "d.jsonl"
        write_jsonl(path, [record(0, "Other")])
        dataset = load_dataset(str(path))
        assert len(dataset) == 1 and not dataset.phrases[0].keyphrase

    def test_keyphrase_other_contradiction_rejected(self, tmp_path):
        path = tmp_path / "d.jsonl"
        write_jsonl(path, [record(0, "Task", keyphrase=False)])
        with pytest.raises(DatasetError, match="p000"):
            load_dataset(str(path))

    def test_wrong_specific_rejected(self, tmp_path):
        path = tmp_path / "d.jsonl"
        write_jsonl(path, [record(0, "Task", specific="AgentReasoning")])
        with pytest.raises(DatasetError, match="p000"):
            load_dataset(str(path))

    def test_malformed_line_number(self, tmp_path):
        path = tmp_path / "d.jsonl"
        path.write_text(json.dumps(record(0)) + "\n{oops\n")
        with pytest.raises(DatasetError, match="line 2"):
            load_dataset(str(path))

    def test_duplicate_id(self, tmp_path):
        path = tmp_path / "d.jsonl"
        write_jsonl(path, [record(0), record(0)])
        with pytest.raises(DatasetError, match="duplicate id"):
            load_dataset(str(path))

    def test_counts_two_per_class(self, tmp_path):
        # fixture counted by hand: 2 records per keyphrase class, 8 total
        records = []
        idx = 0
        for generic in ("Task", "Finding", "Reason", "Intuition"):
            for fold in (1, 2):
                records.append(record(idx, generic, fold))
                idx += 1
        path = tmp_path / "d.jsonl"
        write_jsonl(path, records)
        dataset = load_dataset(str(path))
        for fold in (1, 2):
            for generic in ("Task", "Finding", "Reason", "Intuition"):
                assert dataset.counts[fold][generic] == 1
        totals = {
            g: dataset.counts[1][g] + dataset.counts[2][g]
            for g in ("Task", "Finding", "Reason", "Intuition")
        }
        assert totals == {"Task": 2, "Finding": 2, "Reason": 2, "Intuition": 2}

    def test_missing_class_warns(self, tmp_path, caplog):
        path = tmp_path / "d.jsonl"
        write_jsonl(path, [record(0, "Task", 1)])
        with caplog.at_level(logging.WARNING, logger="rubriq.corpus"):
            load_dataset(str(path))
        assert any("has no" in message for message in caplog.messages)

    def test_empty_text_rejected(self, tmp_path):
        path = tmp_path / "d.jsonl"
        write_jsonl(path, [record(0, text="   ")])
        with pytest.raises(DatasetError, match="empty text"):
            load_dataset(str(path))

    def test_pos_roundtrip(self, tmp_path):
        path = tmp_path / "d.jsonl"
        write_jsonl(path, [record(0, text="alpha beta", pos=["NOUN", "NOUN"])])
        dataset = load_dataset(str(path))
        assert dataset.phrases[0].pos == ("NOUN", "NOUN")


class TestCanonicalWriter:
    def test_roundtrip_byte_identical(self, tmp_path):
        phrases = [make_phrase(i, g, f) for i, (g, f) in enumerate(
            [("Task", 1), ("Other", 2), ("Finding", 1), ("Reason", 2), ("Intuition", 1)]
        )]
        first = tmp_path / "a.jsonl"
        second = tmp_path / "b.jsonl"
        save_dataset(Dataset(phrases), str(first))
        save_dataset(load_dataset(str(first)), str(second))
        assert first.read_bytes() == second.read_bytes()

    def test_records_sorted_by_id(self, tmp_path):
        phrases = [make_phrase(2), make_phrase(0), make_phrase(1)]
        path = tmp_path / "d.jsonl"
        save_dataset(Dataset(phrases), str(path))
        ids = [json.loads(line)["id"] for line in path.read_text().splitlines()]
        assert ids == sorted(ids)


class TestSplitFold:
    def test_partition_sizes(self):
        phrases = [make_phrase(i, fold=1 if i < 6 else 2) for i in range(10)]
        dataset = Dataset(phrases)
        train, test = split_fold(dataset, 1)
        assert (len(train), len(test)) == (4, 6)
        assert all(p.fold == 1 for p in test)

    def test_complement_property(self):
        phrases = [make_phrase(i, fold=1 + i % 2) for i in range(9)]
        dataset = Dataset(phrases)
        train1, test1 = split_fold(dataset, 1)
        train2, test2 = split_fold(dataset, 2)
        assert {p.id for p in train1} == {p.id for p in test2}
        assert {p.id for p in test1} == {p.id for p in train2}
        assert len(train1) + len(test1) == len(dataset)

    def test_paper_shaped_counts(self, tmp_path):
        # fold-1 test block shaped like the published dataset table
        sizes = {"Task": 58, "Finding": 90, "Reason": 12, "Intuition": 24}
        records = []
        idx = 0
        for generic, count in sizes.items():
            for _ in range(count):
                records.append(record(idx, generic, fold=1))
                idx += 1
        records.append(record(idx, "Task", fold=2))
        path = tmp_path / "d.jsonl"
        write_jsonl(path, records)
        dataset = load_dataset(str(path))
        _, test = split_fold(dataset, 1)
        got = {g: sum(1 for p in test if p.generic == g) for g in sizes}
        assert got == sizes

    def test_invalid_fold(self):
        dataset = Dataset([make_phrase(0)])
        with pytest.raises(ValueError):
            split_fold(dataset, 3)


class TestGroupDocuments:
    def test_groups_by_doc_id(self):
        phrases = [
            make_phrase(0, doc_id="a"),
            make_phrase(1, doc_id="b"),
            make_phrase(2, doc_id="a"),
        ]
        groups = group_documents(phrases)
        assert sorted(len(g) for g in groups) == [1, 2]

    def test_untagged_form_single_document(self):
        phrases = [make_phrase(0), make_phrase(1)]
        groups = group_documents(phrases)
        assert len(groups) == 1 and len(groups[0]) == 2
