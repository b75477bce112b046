"""Command-line behavior: outputs, exit statuses, environment knobs."""

import json
from pathlib import Path

import pytest

from conftest import TOY_CROPS, crops_as_json, write_manifest
from eigenexpr import EXPRESSIONS, Expression
from eigenexpr.cli import main

REPLAY_DIR = str(Path(__file__).parent / "data" / "replay_example")


@pytest.fixture
def crops_file(tmp_path):
    path = tmp_path / "crops.json"
    path.write_text(json.dumps(crops_as_json(TOY_CROPS)), encoding="utf-8")
    return path


def test_votes_replays_stored_grids(capsys):
    assert main(["votes", "--replay", REPLAY_DIR]) == 0
    out = capsys.readouterr().out
    assert "Decided expression: Sad" in out
    assert "Total votes" in out
    totals_line = next(l for l in out.splitlines() if l.startswith("Total votes"))
    assert totals_line.split()[2:] == ["3", "0", "4", "3", "11", "4"]


def test_votes_missing_directory_is_a_data_error(tmp_path, capsys):
    assert main(["votes", "--replay", str(tmp_path / "nowhere")]) == 2
    assert "error" in capsys.readouterr().err


def test_usage_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as err:
        main([])
    assert err.value.code == 1
    with pytest.raises(SystemExit) as err:
        main(["votes"])  # --replay is required
    assert err.value.code == 1
    with pytest.raises(SystemExit) as err:
        main(["votes", "--replay", REPLAY_DIR, "--bogus"])
    assert err.value.code == 1
    with pytest.raises(SystemExit) as err:
        main(["unknown-command"])
    assert err.value.code == 1


def test_help_exits_zero():
    with pytest.raises(SystemExit) as err:
        main(["--help"])
    assert err.value.code == 0


def test_train_then_classify_round_trip(toy, tmp_path, crops_file, capsys):
    model_path = tmp_path / "model.json"
    assert main(["train", "--manifest", str(toy.manifest_path), "--out", str(model_path)]) == 0
    out = capsys.readouterr().out
    assert model_path.is_file()
    assert "Model written to" in out
    for expr in EXPRESSIONS:
        assert f"{expr.value}/left_eye:" in out

    image = toy.entries[0].image_path  # a training image classifies as itself
    code = main([
        "classify",
        "--model", str(model_path),
        "--image", str(image),
        "--crops", str(crops_file),
    ])
    out = capsys.readouterr().out
    assert code == 0
    assert f"Decided expression: {toy.entries[0].expression.value}" in out
    assert "ED1" in out and "Total votes" in out


def test_train_model_matches_library_output(toy, tmp_path, capsys):
    model_path = tmp_path / "model.json"
    assert main(["train", "--manifest", str(toy.manifest_path), "--out", str(model_path)]) == 0
    capsys.readouterr()
    assert model_path.read_bytes() == toy.model_path.read_bytes()


def test_classify_rejects_malformed_crops(toy, tmp_path, capsys):
    bad = tmp_path / "crops.json"
    bad.write_text(json.dumps({"left_eye": {"x": 0, "y": 0, "w": 4, "h": 4}}))
    code = main([
        "classify",
        "--model", str(toy.model_path),
        "--image", str(toy.entries[0].image_path),
        "--crops", str(bad),
    ])
    assert code == 2
    assert "crops" in capsys.readouterr().err


def test_classify_missing_model_is_a_data_error(toy, crops_file, tmp_path, capsys):
    code = main([
        "classify",
        "--model", str(tmp_path / "no-model.json"),
        "--image", str(toy.entries[0].image_path),
        "--crops", str(crops_file),
    ])
    assert code == 2
    assert capsys.readouterr().err


def test_eval_writes_report(toy, tmp_path, capsys):
    report_path = tmp_path / "report.json"
    code = main([
        "eval",
        "--model", str(toy.model_path),
        "--manifest", str(toy.manifest_path),
        "--report", str(report_path),
    ])
    out = capsys.readouterr().out
    assert code == 0
    assert "Report written to" in out
    assert "Overall" in out
    doc = json.loads(report_path.read_text(encoding="utf-8"))
    assert doc["overall_rate"] == 1.0
    assert doc["overlap"] == "overlapping"
    assert doc["per_expression"]["Sad"]["tested"] == 1


def test_eval_report_into_missing_directory_leaves_nothing(toy, tmp_path, capsys):
    report_path = tmp_path / "missing" / "report.json"
    code = main([
        "eval",
        "--model", str(toy.model_path),
        "--manifest", str(toy.manifest_path),
        "--report", str(report_path),
    ])
    assert code == 2
    assert not report_path.exists()
    assert capsys.readouterr().err


def test_threads_env_is_validated(toy, tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("EIGENEXPR_THREADS", "lots")
    assert main(["votes", "--replay", REPLAY_DIR]) == 1
    assert "EIGENEXPR_THREADS" in capsys.readouterr().err

    monkeypatch.setenv("EIGENEXPR_THREADS", "-2")
    assert main(["votes", "--replay", REPLAY_DIR]) == 1
    capsys.readouterr()

    monkeypatch.setenv("EIGENEXPR_THREADS", "3")
    model_path = tmp_path / "model.json"
    code = main(["train", "--manifest", str(toy.manifest_path), "--out", str(model_path)])
    capsys.readouterr()
    assert code == 0
    assert model_path.read_bytes() == toy.model_path.read_bytes()


def test_eval_handles_entry_errors_without_aborting(toy, tmp_path, capsys):
    rows = [
        (entry.image_path.name, entry.expression, TOY_CROPS) for entry in toy.entries
    ]
    rows.append(("missing.txt", Expression.SAD, TOY_CROPS))
    manifest_path = toy.dir / "with_missing.json"
    write_manifest(manifest_path, rows)
    report_path = tmp_path / "report.json"
    code = main([
        "eval",
        "--model", str(toy.model_path),
        "--manifest", str(manifest_path),
        "--report", str(report_path),
    ])
    out = capsys.readouterr().out
    assert code == 0
    assert "Entries skipped with errors: 1" in out
    doc = json.loads(report_path.read_text(encoding="utf-8"))
    assert len(doc["errors"]) == 1
