import pytest

from rubriq.cli import main
from rubriq.corpus import load_dataset


@pytest.fixture(scope="module")
def dataset_path(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli")
    code = main(
        [
            "synth",
            "--out", str(out),
            "--file", "data.jsonl",
            "--seed", "13",
            "--sizes", "Task=6,Finding=6,Reason=6,Intuition=6,Other=12",
        ]
    )
    assert code == 0
    return str(out / "data.jsonl")


class TestSynthCommand:
    def test_rerun_byte_identical(self, tmp_path):
        args = ["synth", "--seed", "5", "--sizes", "Task=2,Finding=2,Reason=2,Intuition=2,Other=2"]
        assert main(args + ["--out", str(tmp_path / "a")]) == 0
        assert main(args + ["--out", str(tmp_path / "b")]) == 0
        a = (tmp_path / "a" / "synthetic.jsonl").read_bytes()
        b = (tmp_path / "b" / "synthetic.jsonl").read_bytes()
        assert a == b

    def test_output_validates(self, dataset_path):
        dataset = load_dataset(dataset_path)
        assert len(dataset) == 36

    def test_bad_sizes_exit_2(self, tmp_path, capsys):
        code = main(["synth", "--out", str(tmp_path), "--sizes", "Task-3"])
        assert code == 2
        assert "error" in capsys.readouterr().err


class TestExtractCommand:
    def test_writes_reports_and_candidates(self, dataset_path, tmp_path):
        out = tmp_path / "x"
        code = main(
            ["extract", "--dataset", dataset_path, "--method", "yake",
             "--k", "5", "--out", str(out)]
        )
        assert code == 0
        assert (out / "report.csv").exists()
        assert (out / "report.md").exists()
        assert list(out.glob("candidates_fold*_*.tsv"))

    def test_candidate_tsv_schema(self, dataset_path, tmp_path):
        out = tmp_path / "x2"
        main(["extract", "--dataset", dataset_path, "--method", "textrank", "--out", str(out)])
        tsv = next(iter(sorted(out.glob("candidates_fold1_*.tsv")))).read_text()
        assert tsv.splitlines()[0] == "rank\tsurface\tscore\tfirst_offset"

    def test_single_fold(self, dataset_path, tmp_path):
        out = tmp_path / "x3"
        code = main(
            ["extract", "--dataset", dataset_path, "--method", "topicrank",
             "--fold", "2", "--out", str(out)]
        )
        assert code == 0
        lines = (out / "report.csv").read_text().splitlines()
        assert len(lines) == 2  # header + the single fold row

    def test_missing_dataset_exit_2(self, tmp_path, capsys):
        code = main(["extract", "--dataset", "nope.jsonl", "--method", "yake",
                     "--out", str(tmp_path)])
        assert code == 2


class TestSweepCommand:
    def test_writes_sweep_csv(self, dataset_path, tmp_path):
        out = tmp_path / "s"
        code = main(
            ["sweep-k", "--dataset", dataset_path, "--method", "positionrank",
             "--k-values", "1,3,5", "--out", str(out)]
        )
        assert code == 0
        lines = (out / "sweep.csv").read_text().splitlines()
        assert lines[0] == "k,fold,precision,recall,f1,macro_f1"
        assert len(lines) == 1 + 3 * 2


class TestClassifyCommand:
    def test_svm_generic(self, dataset_path, tmp_path):
        out = tmp_path / "c"
        code = main(
            ["classify", "--dataset", dataset_path, "--task", "generic",
             "--method", "svm", "--out", str(out), "--seed", "4"]
        )
        assert code == 0
        assert (out / "report.csv").exists()
        assert (out / "model_fold1.txt").read_text().startswith("linearmodel v1")

    def test_baseline(self, dataset_path, tmp_path):
        out = tmp_path / "cb"
        code = main(
            ["classify", "--dataset", dataset_path, "--method", "baseline",
             "--out", str(out)]
        )
        assert code == 0

    def test_embeddings_without_store_exit_2(self, dataset_path, tmp_path, capsys):
        code = main(
            ["classify", "--dataset", dataset_path, "--features", "embeddings",
             "--out", str(tmp_path)]
        )
        assert code == 2


class TestClusterCommand:
    def test_kmeans_specific(self, dataset_path, tmp_path):
        out = tmp_path / "k"
        code = main(
            ["cluster", "--dataset", dataset_path, "--method", "kmeans",
             "--out", str(out), "--seed", "2"]
        )
        assert code == 0
        assert (out / "assignments_fold1.tsv").read_text().startswith("point_id\tcluster\tmapped_class")

    def test_with_lda(self, dataset_path, tmp_path):
        out = tmp_path / "kl"
        code = main(
            ["cluster", "--dataset", dataset_path, "--method", "kmeans",
             "--with-lda", "2", "--out", str(out)]
        )
        assert code == 0
        rows = (out / "report.csv").read_text().splitlines()
        assert "lda-kmeans" in rows[1]


class TestExplainCommand:
    def test_single_backend(self, dataset_path, tmp_path):
        dataset = load_dataset(dataset_path)
        phrase = next(p for p in dataset.phrases if p.keyphrase and p.fold == 1)
        out = tmp_path / "e"
        code = main(
            ["explain", "--dataset", dataset_path, "--phrase-id", phrase.id,
             "--fold", "1", "--samples", "64", "--out", str(out)]
        )
        assert code == 0
        tsv = (out / "explain_tfidf.tsv").read_text()
        assert tsv.startswith("feature\tcontribution")

    def test_compare_requires_top_n(self, dataset_path, tmp_path, capsys):
        dataset = load_dataset(dataset_path)
        phrase = next(p for p in dataset.phrases if p.keyphrase)
        code = main(
            ["explain", "--dataset", dataset_path, "--phrase-id", phrase.id,
             "--compare-features", "bow", "--out", str(tmp_path)]
        )
        assert code == 2
        assert "top-n" in capsys.readouterr().err

    def test_compare_writes_overlap(self, dataset_path, tmp_path):
        dataset = load_dataset(dataset_path)
        phrase = next(p for p in dataset.phrases if p.keyphrase and p.fold == 1)
        out = tmp_path / "e2"
        code = main(
            ["explain", "--dataset", dataset_path, "--phrase-id", phrase.id,
             "--compare-features", "bow", "--top-n", "3", "--samples", "64",
             "--out", str(out)]
        )
        assert code == 0
        assert (out / "explain_tfidf.tsv").exists()
        assert (out / "explain_bow.tsv").exists()
        overlap = (out / "overlap.txt").read_text()
        assert overlap.startswith("overlap_precision@3\t")

    def test_unknown_phrase_exit_2(self, dataset_path, tmp_path):
        code = main(
            ["explain", "--dataset", dataset_path, "--phrase-id", "ghost",
             "--out", str(tmp_path)]
        )
        assert code == 2


class TestReportCommand:
    def test_merges_csvs(self, dataset_path, tmp_path):
        out_a = tmp_path / "ra"
        out_b = tmp_path / "rb"
        main(["extract", "--dataset", dataset_path, "--method", "yake", "--out", str(out_a)])
        main(["extract", "--dataset", dataset_path, "--method", "textrank", "--out", str(out_b)])
        merged = tmp_path / "merged"
        code = main(
            ["report", "--inputs", str(out_a / "report.csv"), str(out_b / "report.csv"),
             "--out", str(merged), "--file", "all.md"]
        )
        assert code == 0
        text = (merged / "all.md").read_text()
        assert "yake" in text and "textrank" in text


class TestConfigFile:
    def test_config_supplies_defaults(self, dataset_path, tmp_path):
        config = tmp_path / "cfg.txt"
        config.write_text("k=3\nmethod=yake\n")
        out = tmp_path / "cf"
        code = main(
            ["extract", "--dataset", dataset_path, "--method", "yake",
             "--config", str(config), "--out", str(out)]
        )
        assert code == 0
        tsv = next(iter(sorted(out.glob("candidates_fold1_*.tsv")))).read_text()
        assert len(tsv.splitlines()) <= 4  # header + at most k=3 rows

    def test_unknown_config_key_exit_2(self, dataset_path, tmp_path, capsys):
        config = tmp_path / "cfg.txt"
        config.write_text("warp_drive=on\n")
        code = main(
            ["extract", "--dataset", dataset_path, "--method", "yake",
             "--config", str(config), "--out", str(tmp_path / "cu")]
        )
        assert code == 2
        assert "warp_drive" in capsys.readouterr().err

    def test_malformed_config_exit_2(self, dataset_path, tmp_path):
        config = tmp_path / "cfg.txt"
        config.write_text("just some words\n")
        code = main(
            ["extract", "--dataset", dataset_path, "--method", "yake",
             "--config", str(config), "--out", str(tmp_path / "cm")]
        )
        assert code == 2
