import numpy as np
import pytest

from gfkanalogy.cli import _parse_dims, main
from gfkanalogy.embeddings import load_text_embeddings


@pytest.fixture
def toy_corpus(tmp_path):
    rng = np.random.default_rng(0)
    tokens = rng.choice(list("abcdefgh"), size=600).tolist()
    path = tmp_path / "corpus.txt"
    path.write_text(" ".join(tokens) + "\n", encoding="utf-8")
    return str(path)


@pytest.fixture
def synth_files(tmp_path):
    emb = str(tmp_path / "emb.txt")
    data = str(tmp_path / "questions.txt")
    rc = main([
        "synth", "--out-embeddings", emb, "--out-dataset", data,
        "--n-relations", "2", "--pairs-per-relation", "8",
        "--dim", "16", "--noise", "0.05", "--seed", "11",
    ])
    assert rc == 0
    return emb, data


class TestBuildPpmi:
    def test_writes_loadable_embeddings(self, toy_corpus, tmp_path, capsys):
        out = str(tmp_path / "emb.txt")
        rc = main([
            "build-ppmi", "--corpus", toy_corpus, "--out", out,
            "--window", "2", "--positional", "false", "--min-count", "0", "--dim", "5",
        ])
        assert rc == 0
        stats = capsys.readouterr().out
        assert "vocab=8" in stats and "dim=5" in stats
        table = load_text_embeddings(out)
        assert table.dim == 5 and len(table) == 8

    def test_positional_flag(self, toy_corpus, tmp_path):
        out = str(tmp_path / "emb.txt")
        rc = main([
            "build-ppmi", "--corpus", toy_corpus, "--out", out,
            "--window", "5", "--positional", "true", "--dim", "4",
        ])
        assert rc == 0
        assert load_text_embeddings(out).dim == 4

    def test_missing_corpus_exits_2(self, tmp_path, capsys):
        rc = main([
            "build-ppmi", "--corpus", str(tmp_path / "nope.txt"),
            "--out", str(tmp_path / "emb.txt"),
        ])
        assert rc == 2
        assert "error" in capsys.readouterr().err


class TestSynth:
    def test_same_seed_byte_identical(self, tmp_path):
        args = lambda suffix: [
            "synth",
            "--out-embeddings", str(tmp_path / f"e{suffix}.txt"),
            "--out-dataset", str(tmp_path / f"d{suffix}.txt"),
            "--n-relations", "1", "--pairs-per-relation", "5",
            "--dim", "10", "--seed", "7",
        ]
        assert main(args("1")) == 0
        assert main(args("2")) == 0
        assert (tmp_path / "e1.txt").read_bytes() == (tmp_path / "e2.txt").read_bytes()
        assert (tmp_path / "d1.txt").read_bytes() == (tmp_path / "d2.txt").read_bytes()

    def test_invalid_flags_exit_2(self, tmp_path, capsys):
        rc = main([
            "synth", "--out-embeddings", str(tmp_path / "e.txt"),
            "--out-dataset", str(tmp_path / "d.txt"), "--noise", "-1",
        ])
        assert rc == 2
        assert "noise" in capsys.readouterr().err


class TestEval:
    def test_all_measures_report(self, synth_files, tmp_path, capsys):
        emb, data = synth_files
        out = str(tmp_path / "report.csv")
        rc = main([
            "eval", "--embeddings", emb, "--dataset", data,
            "--measure", "all", "--subspace-dim", "4", "--epsilon", "0.001",
            "--holdout", "answer", "--out", out,
        ])
        assert rc == 0
        summary = capsys.readouterr().out
        for m in ("CosADD", "CosMUL", "GFKCosADD", "GFKCosMUL"):
            assert f"{m}: micro_accuracy=" in summary
        lines = open(out).read().splitlines()
        assert lines[0].startswith("# measure=all")
        assert lines[1] == "relation,n,measure,accuracy,avg_rank"
        micro = [l for l in lines if l.startswith("micro,")]
        assert len(micro) == 4

    def test_single_measure_to_stdout(self, synth_files, capsys):
        emb, data = synth_files
        rc = main([
            "eval", "--embeddings", emb, "--dataset", data,
            "--measure", "gfkcosmul", "--subspace-dim", "4", "--holdout", "none",
        ])
        assert rc == 0
        captured = capsys.readouterr()
        assert "relation,n,measure,accuracy,avg_rank" in captured.out
        assert captured.out.count("micro,") == 1
        assert "GFKCosMUL: micro_accuracy=" in captured.err

    def test_subspace_dim_too_large_exits_2(self, synth_files, capsys):
        emb, data = synth_files
        rc = main([
            "eval", "--embeddings", emb, "--dataset", data,
            "--measure", "gfkcosadd", "--subspace-dim", "12",
        ])
        assert rc == 2
        assert "2*d" in capsys.readouterr().err

    def test_holdout_flag_switches_protocol(self, synth_files, tmp_path):
        emb, data = synth_files
        outputs = []
        for holdout in ("none", "answer"):
            out = str(tmp_path / f"r_{holdout}.csv")
            rc = main([
                "eval", "--embeddings", emb, "--dataset", data,
                "--measure", "gfkcosadd", "--subspace-dim", "4",
                "--holdout", holdout, "--out", out,
            ])
            assert rc == 0
            outputs.append(open(out).read())
        assert f"holdout=none" in outputs[0] and f"holdout=answer" in outputs[1]


class TestAngles:
    def test_angle_csv_in_range(self, synth_files, tmp_path):
        emb, data = synth_files
        out = str(tmp_path / "angles.csv")
        rc = main([
            "angles", "--embeddings", emb, "--dataset", data,
            "--relation", "rotation-0", "--pairs", "AX,AB", "--dims", "1:4",
            "--out", out,
        ])
        assert rc == 0
        lines = open(out).read().splitlines()
        assert lines[1] == "pair,subspace_dim,angle_index,theta_degrees"
        rows = [l.split(",") for l in lines[2:]]
        assert {r[0] for r in rows} == {"AX", "AB"}
        for r in rows:
            assert 0.0 <= float(r[3]) <= 90.0
        # d angles per (pair, d)
        for pair in ("AX", "AB"):
            for d in range(1, 5):
                count = sum(1 for r in rows if r[0] == pair and int(r[1]) == d)
                assert count == d

    def test_unknown_relation_lists_names(self, synth_files, capsys):
        emb, data = synth_files
        rc = main([
            "angles", "--embeddings", emb, "--dataset", data,
            "--relation", "nope", "--dims", "1:2",
        ])
        assert rc == 2
        err = capsys.readouterr().err
        assert "rotation-0" in err and "rotation-1" in err


class TestSweep:
    def test_sweep_csv(self, synth_files, tmp_path):
        emb, data = synth_files
        out = str(tmp_path / "sweep.csv")
        rc = main([
            "sweep", "--embeddings", emb, "--dataset", data,
            "--measure", "all", "--dims", "3:5:2", "--holdout", "none", "--out", out,
        ])
        assert rc == 0
        lines = open(out).read().splitlines()
        assert lines[1] == "d,measure,accuracy"
        rows = [l.split(",") for l in lines[2:]]
        assert len(rows) == 2 * 4
        baseline = {r[2] for r in rows if r[1] == "CosADD"}
        assert len(baseline) == 1  # flat across d


class TestDimsParsing:
    def test_ranges(self):
        assert _parse_dims("20:200:20") == list(range(20, 201, 20))
        assert _parse_dims("1:4") == [1, 2, 3, 4]
        assert _parse_dims("2,4,8") == [2, 4, 8]

    def test_bad_specs(self):
        import argparse

        for bad in ("x", "5:1", "0:4", "1:10:0", ""):
            with pytest.raises(argparse.ArgumentTypeError):
                _parse_dims(bad)
