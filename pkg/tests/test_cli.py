import csv
import io
import json

import numpy as np
import pytest

from cspr.cli import TSV_COLUMNS, main, summary_rows
from cspr.sequence_io import Sequence, write_fasta

from conftest import random_sequence


def write(path, seqs):
    path.write_text(write_fasta(seqs))
    return str(path)


def read_tsv(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines)), delimiter="\t"))


@pytest.fixture
def genomes(tmp_path):
    a = write(tmp_path / "a.fa", [random_sequence(50_000, seed=1, id="g1"), random_sequence(30_000, seed=2, id="g2")])
    b = write(tmp_path / "b.fa", [random_sequence(40_000, seed=3, id="g3")])
    return a, b


class TestTestCommand:
    def test_rows_and_summary(self, genomes, capsys):
        assert main(["test", *genomes]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0].split("\t") == list(TSV_COLUMNS)
        rows = read_tsv(out)
        assert [r["id"] for r in rows] == ["g1", "g2", "g3"]
        assert all(r["status"] == "ok" for r in rows)
        summary = out.splitlines()[-1]
        assert summary.startswith("# tested=3") and "correction=holm-bonferroni" in summary

    def test_partial_failure(self, genomes, tmp_path, capsys):
        assert main(["test", genomes[0], str(tmp_path / "missing.fa"), genomes[1]]) == 0
        rows = read_tsv(capsys.readouterr().out)
        assert len(rows) == 4
        assert rows[2]["status"].startswith("error")
        assert sum(r["status"] == "ok" for r in rows) == 3

    def test_empty_file(self, tmp_path, capsys):
        empty = tmp_path / "empty.fa"
        empty.write_text("")
        assert main(["test", str(empty)]) == 1
        (row,) = read_tsv(capsys.readouterr().out)
        assert row["status"] == "error: no records"

    def test_all_fail_nonzero(self, tmp_path, capsys):
        assert main(["test", str(tmp_path / "x.fa"), str(tmp_path / "y.fa")]) != 0

    def test_short_record_row(self, tmp_path, capsys):
        path = write(tmp_path / "s.fa", [Sequence("tiny", "ACGTACGT")])
        main(["test", path])
        (row,) = read_tsv(capsys.readouterr().out)
        assert row["status"].startswith("error: too short")
        assert row["n"] == "8"

    def test_format_parity(self, genomes, capsys):
        main(["test", *genomes, "--alpha", "0.05"])
        tsv = read_tsv(capsys.readouterr().out)
        main(["test", *genomes, "--alpha", "0.05", "--format", "json"])
        doc = json.loads(capsys.readouterr().out)
        assert doc["summary"]["tested"] == 3
        for t, j in zip(tsv, doc["reports"]):
            assert t["id"] == j["id"]
            assert int(t["n"]) == j["n"] and int(t["m_used"]) == j["m_used"]
            assert float(t["p_value"]) == j["p_value"]
            assert float(t["eta"]) == j["eta"]
            assert float(t["gc"]) == j["gc"]
            assert (t["reject_holm"] == "true") == j["reject_holm"]

    def test_p_value_digits(self, genomes, capsys):
        main(["test", genomes[1]])
        (row,) = read_tsv(capsys.readouterr().out)
        mantissa = row["p_value"].split("e")[0].replace(".", "").replace("-", "").lstrip("0")
        assert len(mantissa) == 17

    def test_byte_identical_and_worker_independent(self, genomes, tmp_path):
        outs = []
        for workers in ("1", "1", "2"):
            out = tmp_path / f"r{len(outs)}.tsv"
            main(["test", *genomes, "--workers", workers, "--out", str(out)])
            outs.append(out.read_bytes())
        assert outs[0] == outs[1] == outs[2]

    def test_env_override(self, genomes, capsys, monkeypatch):
        monkeypatch.setenv("CSPR_ALPHA", "0.5")
        monkeypatch.setenv("CSPR_FORMAT", "json")
        main(["test", genomes[1]])
        doc = json.loads(capsys.readouterr().out)
        assert doc["summary"]["alpha"] == 0.5
        main(["test", genomes[1], "--alpha", "0.01"])
        assert json.loads(capsys.readouterr().out)["summary"]["alpha"] == 0.01

    def test_ambiguity_error(self, tmp_path, capsys):
        path = tmp_path / "n.fa"
        path.write_text(">x\n" + "ACGT" * 50 + "N\n")
        main(["test", str(path), "--ambiguity", "error"])
        (row,) = read_tsv(capsys.readouterr().out)
        assert "position 200" in row["status"]
        main(["test", str(path)])
        (row,) = read_tsv(capsys.readouterr().out)
        assert row["skipped"] == "1"

    def test_linear_warns(self, genomes, caplog):
        main(["test", genomes[1], "--linear"])
        assert "--linear" in caplog.text

    def test_singular_reported(self, tmp_path, capsys):
        path = write(tmp_path / "c.fa", [Sequence("const", "A" * 1000)])
        main(["test", path])
        (row,) = read_tsv(capsys.readouterr().out)
        assert row["status"] == "singular-covariance"
        assert row["eta"] == "NA" and row["p_value"] == "NA"


class TestSummary:
    def test_singleton(self):
        (length, gc) = summary_rows([Sequence("x", "ACGT")])
        assert [length[c] for c in ("first_quartile", "median", "third_quartile", "mean")] == [4.0] * 4
        assert length["std_dev"] == 0.0
        assert gc["median"] == 0.5 and gc["std_dev"] == 0.0

    def test_two_points(self):
        (length, _) = summary_rows([Sequence("a", "A" * 100), Sequence("b", "A" * 300)])
        assert length["mean"] == 200 and length["median"] == 200

    def test_hand_quartiles(self):
        seqs = [Sequence(str(i), "G" * g + "A" * (L - g)) for i, (L, g) in enumerate([(100, 10), (200, 100), (300, 60), (400, 400)])]
        (length, gc) = summary_rows(seqs)
        # linear interpolation between order statistics: positions 0.75, 1.5, 2.25 of 0..3
        assert (length["first_quartile"], length["median"], length["third_quartile"]) == (175.0, 250.0, 325.0)
        assert length["std_dev"] == pytest.approx(np.sqrt(12500))
        assert (gc["first_quartile"], gc["median"], gc["third_quartile"]) == pytest.approx((0.175, 0.35, 0.625))
        assert gc["mean"] == pytest.approx((0.1 + 0.5 + 0.2 + 1.0) / 4)

    def test_cli(self, tmp_path, capsys):
        path = write(tmp_path / "s.fa", [Sequence("x", "ACGT")])
        assert main(["summary", path, "--format", "json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["records"] == 1
        assert doc["rows"][1]["property"] == "gc_content"


class TestSimulateAndPower:
    def test_simulate(self, tmp_path):
        spec = tmp_path / "u.cfg"
        spec.write_text("model = markov\nn = 1000\nreplicates = 2\nseed = 4\n")
        out1, out2 = tmp_path / "a.fa", tmp_path / "b.fa"
        assert main(["simulate", str(spec), "--out", str(out1)]) == 0
        main(["simulate", str(spec), "--out", str(out2)])
        text = out1.read_text()
        assert text == out2.read_text()
        records = text.split(">")[1:]
        assert len(records) == 2
        assert all(len("".join(r.splitlines()[1:])) == 1000 for r in records)

    def test_seed_override(self, tmp_path):
        spec = tmp_path / "u.cfg"
        spec.write_text("model = mrf\nk = 2\nn = 300\nsweeps = 3\n")
        a, b = tmp_path / "a.fa", tmp_path / "b.fa"
        main(["simulate", str(spec), "--out", str(a), "--seed", "1"])
        main(["simulate", str(spec), "--out", str(b), "--seed", "2"])
        assert a.read_text() != b.read_text()
        assert ">mrf_k2_pert0_seed1_rep0" in a.read_text()

    def test_invalid_key(self, tmp_path, caplog):
        spec = tmp_path / "bad.cfg"
        spec.write_text("model = markov\nlenght = 10\n")
        assert main(["simulate", str(spec), "--out", str(tmp_path / "x.fa")]) == 2
        assert "lenght" in caplog.text

    def test_power(self, tmp_path, capsys):
        spec = tmp_path / "p.cfg"
        spec.write_text("model = markov\nn = 200000\nreplicates = 3\ngrid = 0, 0.3\n")
        assert main(["power", str(spec), "--alpha", "0.05"]) == 0
        rows = read_tsv(capsys.readouterr().out)
        assert [float(r["effect"]) for r in rows] == [0.0, 0.3]
        assert rows[1]["rate"] == "1.0" and rows[1]["alpha"] == "0.05"

    def test_power_empty(self, tmp_path, capsys, caplog):
        spec = tmp_path / "p.cfg"
        spec.write_text("replicates = 0\n")
        assert main(["power", str(spec)]) == 0
        out = capsys.readouterr()
        assert out.out.strip().splitlines() == ["effect\tn\treplicates\talpha\trejections\tsingular\trate\tstd_error"]
        assert "replicates = 0" in caplog.text

    def test_simulate_then_test(self, tmp_path, capsys):
        spec = tmp_path / "p.cfg"
        spec.write_text("model = markov\nn = 300000\nreplicates = 2\nepsilon = 0.1\n")
        fa = tmp_path / "p.fa"
        main(["simulate", str(spec), "--out", str(fa)])
        main(["test", str(fa), "--alpha", "0.05"])
        rows = read_tsv(capsys.readouterr().out)
        assert all(r["reject_holm"] == "true" for r in rows)
