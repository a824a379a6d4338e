import csv

import pytest

from esn_readouts import harness as H
from esn_readouts.cli import main


def test_gen(tmp_path, capsys):
    out = tmp_path / "ss.csv"
    assert main(["gen", "--period", "4", "--segments", "5", "-o", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["segment_id", "t", "value", "class"]
    assert len(rows) == 1 + 20


def test_run_one_cell_plan_and_report(tmp_path, capsys):
    plan = tmp_path / "plan.txt"
    results = tmp_path / "res.csv"
    plan.write_text(
        "dataset = sine_square\nsizes = 10\nsigmas = 0.1\nmethods = C\nsimulations = 2\n"
        "train_segments = 40\ntest_segments = 20\n"
        f"output = {results}\n"
    )
    assert main(["run", str(plan)]) == 0
    lines = results.read_text().splitlines()
    assert lines[0] == H.CSV_HEADER and len(lines) == 2
    assert lines[1].startswith("sine_square,10,0.1,C,")

    report = tmp_path / "rep.csv"
    assert main(["report", str(results), "-o", str(report)]) == 0
    rep = list(csv.reader(report.open()))
    assert rep[0][-1] == "best" and rep[1][-1] == "1"


def test_report_marks_group_maximum(tmp_path, capsys):
    rows = [
        H.ResultRow("sine_square", 50, 0.0, "A1_1e-4", 98.0, 1.0, 10),
        H.ResultRow("sine_square", 50, 0.0, "A2", 100.0, 0.0, 10),
        H.ResultRow("sine_square", 50, 0.3, "A2", 50.0, 1.0, 10),
        H.ResultRow("sine_square", 50, 0.3, "C", 66.0, 1.0, 10),
    ]
    path = tmp_path / "r.csv"
    H.ResultTable(rows).write_csv(path)
    assert main(["report", str(path)]) == 0
    out = capsys.readouterr().out.splitlines()
    marks = {tuple(l.split(",")[2:4]): l.split(",")[-1] for l in out[1:]}
    assert marks == {("0", "A1_1e-4"): "0", ("0", "A2"): "1", ("0.3", "A2"): "0", ("0.3", "C"): "1"}


def test_run_overrides_without_plan(tmp_path, capsys):
    out = tmp_path / "o.csv"
    code = main(["run", "--sizes", "8", "--sigmas", "0", "--methods", "A2,A3", "--simulations", "1",
                 "-o", str(out)])
    assert code == 0
    assert len(out.read_text().splitlines()) == 3


def test_missing_jv_error(tmp_path, capsys):
    code = main(["run", "--dataset", "japanese_vowels", "--jv-dir", str(tmp_path), "--sizes", "5",
                 "--sigmas", "0", "--simulations", "1", "-o", str(tmp_path / "x.csv")])
    assert code == 2
    err = capsys.readouterr().err
    assert "error:" in err and "fetch-jv" in err


def test_bad_plan_key(tmp_path, capsys):
    plan = tmp_path / "p.txt"
    plan.write_text("colour = blue\n")
    assert main(["run", str(plan)]) == 2
    assert "unknown plan key" in capsys.readouterr().err


def test_unknown_flag_usage(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run", "--frobnicate"])
    assert exc.value.code != 0
    assert "usage" in capsys.readouterr().err


def test_fetch_jv_from_ts_checksum_mismatch(tmp_path, capsys):
    src = tmp_path / "ts"
    src.mkdir()
    for name in ("TRAIN", "TEST"):
        lines = ["@data"] + [":".join(["0.5,0.25"] * 12) + f":{k}" for k in range(1, 10) for _ in range(30)]
        (src / f"JapaneseVowels_{name}.ts").write_text("\n".join(lines) + "\n")
    code = main(["fetch-jv", "--from-ts", str(src), "--dest", str(tmp_path / "dest")])
    assert code == 2
    assert "checksum mismatch" in capsys.readouterr().err
    assert not (tmp_path / "dest").exists()


@pytest.mark.datagated
def test_fetch_jv_verify_only(jv_paths, capsys):
    assert main(["fetch-jv", "--verify-only", "--dest", str(jv_paths[0].parent)]) == 0
    assert "270 train / 370 test" in capsys.readouterr().out


@pytest.mark.datagated
def test_run_japanese_vowels_end_to_end(jv_paths, tmp_path, capsys):
    out = tmp_path / "jv.csv"
    code = main(["run", "--dataset", "japanese_vowels", "--jv-dir", str(jv_paths[0].parent),
                 "--sizes", "20", "--sigmas", "0", "--methods", "A2,C", "--simulations", "1",
                 "-o", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 3 and lines[1].startswith("japanese_vowels,20,0,A2,")


def test_bench_reports_matching_kernels(capsys):
    from esn_readouts.benchmark import run

    for name, t_jit, t_np, err in run(repeat=1):
        assert t_np > 0
        assert err < 1e-10, name
    assert main(["bench", "--repeat", "1"]) == 0
    assert "residual_scores" in capsys.readouterr().out
