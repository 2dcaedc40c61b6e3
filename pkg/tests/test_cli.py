import functools
import json

import jsonschema
import pytest

from predictability import cli
from predictability.core import encode_labels
from predictability.entropy import MatchLengths, match_lengths
from predictability.ingest import format_event_log
from predictability.pipeline import (
    INDIVIDUAL_COLUMNS,
    REPORT_SCHEMA,
    RunConfig,
    histogram,
)
from predictability.synth import gen_event_log, stay_matrix


@pytest.fixture
def small_log(tmp_path):
    log = gen_event_log(3, stay_matrix(0.8), span=3 * 2016 * 300, seed=2, location_P=stay_matrix(0.7, 3))
    path = tmp_path / "events.csv"
    path.write_text(format_event_log(log))
    return path


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_json_validates(small_log, capsys):
    code, out, _ = run(["analyze", small_log], capsys)
    assert code == 0
    report = json.loads(out)
    jsonschema.validate(report, REPORT_SCHEMA)
    assert [r["ego"] for r in report["individuals"]] == ["e0000", "e0001", "e0002"]
    row = report["individuals"][0]
    assert set(row) == {"ego", "partner", "location", "gap"}
    assert set(row["partner"]["h_cond"]) == {"location", "gap"}
    assert report["config"]["bin_width"] == 300
    for name, bins in report["histograms"].items():
        assert sum(b["count"] for b in bins) == report["summary"][name]["count"]
    assert sum(b["count"] for b in report["histograms"]["partner.h_lz"]) == 3


def test_analyze_is_byte_identical(small_log, tmp_path, capsys):
    run(["analyze", small_log, "--out", tmp_path / "a"], capsys)
    run(["analyze", small_log, "--out", tmp_path / "b", "--workers", "2"], capsys)
    assert (tmp_path / "a/analyze.json").read_bytes() == (tmp_path / "b/analyze.json").read_bytes()


def test_analyze_csv(small_log, tmp_path, capsys):
    code, _, _ = run(["analyze", small_log, "--format", "csv", "--out", tmp_path], capsys)
    assert code == 0
    lines = (tmp_path / "analyze.csv").read_text().splitlines()
    assert lines[0] == ",".join(INDIVIDUAL_COLUMNS)
    assert len(lines) == 4
    assert (tmp_path / "analyze_histograms.csv").read_text().startswith("rate,start,end,count")
    assert (tmp_path / "analyze_excluded.csv").read_text() == "ego,reason\n"


def test_analyze_without_locations(tmp_path, capsys):
    log = gen_event_log(1, stay_matrix(0.8), span=500 * 300, seed=2)
    path = tmp_path / "events.csv"
    path.write_text(format_event_log(log))
    code, out, _ = run(["analyze", path], capsys)
    assert code == 0
    row = json.loads(out)["individuals"][0]
    assert "location" not in row
    assert row["partner"]["h_cond"]["location"] is None


def test_analyze_excludes_short_sequences(tmp_path, capsys):
    path = tmp_path / "events.csv"
    path.write_text("time,ego,alter,location\n0,A,B,\n300,A,C,\n")
    code, out, err = run(["analyze", path], capsys)
    assert code == cli.EXIT_EMPTY
    report = json.loads(out)
    assert report["individuals"] == []
    assert report["excluded"][0]["ego"] == "A"
    assert "below minimum" in report["excluded"][0]["reason"]
    assert "length filter" in err


def test_analyze_malformed_input(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("time,ego,alter,location\nx,A,A,L1\n")
    code, _, err = run(["analyze", path], capsys)
    assert code == 1
    assert "line 2" in err


def test_analyze_missing_file(tmp_path, capsys):
    code, _, err = run(["analyze", tmp_path / "nope.csv"], capsys)
    assert code == 1 and "cannot read" in err


def test_predict(small_log, tmp_path, capsys):
    code, out, _ = run(["predict", small_log], capsys)
    assert code == 0
    report = json.loads(out)
    jsonschema.validate(report, REPORT_SCHEMA)
    assert report["meta"]["prediction_unit"] == "interaction event"
    for row in report["individuals"]:
        acc = row["accuracy"]
        assert 0 <= acc["top1"] <= acc["top5"] <= 1
        assert len(row["windows"]) == 2


def test_predict_csv_and_model_dump(small_log, tmp_path, capsys):
    code, _, _ = run(["predict", small_log, "--format", "csv", "--out", tmp_path, "--dump-models"], capsys)
    assert code == 0
    assert (tmp_path / "predict.csv").read_text().splitlines()[0] == "ego,events_evaluated,windows,top1,top5"
    assert (tmp_path / "predict_windows.csv").exists()
    dump = (tmp_path / "models/e0000.csv").read_text().splitlines()
    assert dump[0] == "source,target,probability"
    assert len(dump) == 5


def test_predict_empty_log(tmp_path, capsys):
    path = tmp_path / "empty.csv"
    path.write_text("time,ego,alter,location\n")
    code, out, _ = run(["predict", path], capsys)
    assert code == 0
    assert json.loads(out)["individuals"] == []


def test_predict_excludes_short_span(tmp_path, capsys):
    path = tmp_path / "events.csv"
    path.write_text("time,ego,alter,location\n0,A,B,\n300,A,C,\n")
    code, out, _ = run(["predict", path], capsys)
    assert code == 0
    assert json.loads(out)["excluded"][0]["ego"] == "A"


def test_simulate_deterministic(tmp_path, capsys):
    args = ["simulate", "--stay", "0.9", "--population", "1", "--bins", "100000", "--seed", "7"]
    run(args + ["--out", tmp_path / "a.csv"], capsys)
    run(args + ["--out", tmp_path / "b.csv"], capsys)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_simulate_population(capsys):
    code, out, _ = run(["simulate", "--population", "10", "--bins", "20"], capsys)
    assert code == 0
    egos = {line.split(",")[1] for line in out.splitlines()[1:]}
    assert len(egos) == 10


def test_simulate_matrix(tmp_path, capsys):
    code, out, _ = run(["simulate", "--matrix", "[[0.5, 0.5], [0.2, 0.8]]", "--bins", "5"], capsys)
    assert code == 0 and len(out.splitlines()) == 6
    code, _, err = run(["simulate", "--matrix", "[[0.5, 0.4], [0.2, 0.8]]"], capsys)
    assert code == 1 and "invalid transition matrix" in err
    code, _, err = run(["simulate", "--matrix", "not json"], capsys)
    assert code == 1


def test_oracle(tmp_path, capsys):
    path = tmp_path / "seq.txt"
    path.write_text("a a b")
    code, out, _ = run(["oracle", path], capsys)
    assert code == 0
    assert out.splitlines() == ["i,fast,naive,status", "1,1,1,ok", "2,2,2,ok", "3,1,1,ok"]


def test_oracle_constant(tmp_path, capsys):
    path = tmp_path / "seq.txt"
    path.write_text("\n".join("x" * 8))
    _, out, _ = run(["oracle", path], capsys)
    assert [int(line.split(",")[1]) for line in out.splitlines()[1:]] == [1, 8, 7, 6, 5, 4, 3, 2]


def test_oracle_empty(tmp_path, capsys):
    path = tmp_path / "seq.txt"
    path.write_text("\n")
    code, _, err = run(["oracle", path], capsys)
    assert code == 1 and "no symbols" in err


def test_oracle_reports_mismatch(tmp_path, capsys, monkeypatch):
    def faulty(seq):
        lam = match_lengths(seq).tolist()
        lam[-1] += 1
        return MatchLengths(lam)

    monkeypatch.setattr(cli, "oracle_table", functools.partial(_real_table, fast=faulty))
    path = tmp_path / "seq.txt"
    path.write_text("a b a b")
    code, out, err = run(["oracle", path], capsys)
    assert code == 1
    assert out.splitlines()[-1].endswith("MISMATCH")
    assert "disagree" in err


_real_table = cli.oracle_table


def test_oracle_table_direct():
    rows = cli.oracle_table(encode_labels("abab")[1])
    assert [r[3] for r in rows] == ["ok"] * 4


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["analyze"])
    assert info.value.code == 2


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(bin_width=0)
    assert RunConfig(ks=(5, 1, 5)).ks == (1, 5)


def test_histogram_bins():
    bins = histogram([0.05, 0.15, 0.16, 0.31, -0.04])
    assert [b["start"] for b in bins] == [-0.1, 0.0, 0.1, 0.2, 0.3]
    assert [b["count"] for b in bins] == [1, 1, 2, 0, 1]
    assert histogram([]) == []
