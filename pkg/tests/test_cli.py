import csv
import json

import pytest

from susy_chain.cli.interface import (
    EXIT_ALL_SINGULAR,
    EXIT_CONFIG,
    EXIT_FAILED,
    EXIT_OK,
    main,
)

WELL = {
    "seeds": [{"family": "R", "kappa": 1.0, "shift": 0.0}],
    "grid": {"x_min": -10.0, "x_max": 10.0, "samples": 2001},
    "output": {"format": "csv", "path": "well.csv"},
}

SINGULAR = {
    "seeds": [
        {"family": "S", "kappa": 0.04, "shift": -100.0},
        {"family": "R", "kappa": 1.0, "shift": 0.0},
    ],
    "grid": {"x_min": -15.0, "x_max": 15.0, "samples": 2001},
    "verify": {"scattering": True, "poles": True},
}

TWO_WELLS = {
    "seeds": [
        {"family": "S", "kappa": 1.0, "shift": -5.0},
        {"family": "R", "kappa": 0.5, "shift": -5.0},
    ],
    "grid": {"x_min": -15.0, "x_max": 15.0, "samples": 2001},
}


@pytest.fixture
def write_config(tmp_path):
    def _write(data: dict, name: str = "config.json") -> str:
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)

    return _write


def _read_rows(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


def test_generate_writes_grid_and_sidecar(tmp_path, write_config):
    out = tmp_path / "grid.csv"
    assert main(["generate", "--config", write_config(WELL), "--out", str(out)]) == 0

    rows = _read_rows(out)
    assert len(rows) == 2001
    center = min(rows, key=lambda r: abs(float(r["x"])))
    assert float(center["V_n"]) == pytest.approx(-1.0, abs=1e-12)
    assert {r["is_singular"] for r in rows} == {"false"}

    sidecar = json.loads((tmp_path / "grid.json").read_text(encoding="utf-8"))
    assert sidecar["energies"] == [-0.5]
    assert sidecar["poles"] == []
    assert len(sidecar["wells"]) == 1


def test_generate_defaults_to_output_dir(isolated_dirs, write_config):
    assert main(["generate", "--config", write_config(WELL)]) == EXIT_OK
    assert (isolated_dirs / "output" / "well.csv").exists()
    assert (isolated_dirs / "output" / "well.json").exists()


def test_generate_json_to_stdout(isolated_dirs, write_config, capsys):
    code = main(
        ["generate", "--config", write_config(WELL), "--format", "json", "--stdout"]
    )
    assert code == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert len(document["grid"]["x"]) == 2001
    assert document["energies"] == [-0.5]
    assert not (isolated_dirs / "output").exists()


def test_generate_reports_pole_of_inverted_pair(tmp_path, write_config):
    out = tmp_path / "singular.csv"
    args = ["generate", "--config", write_config(SINGULAR), "--out", str(out)]
    assert main(args) == EXIT_OK
    sidecar = json.loads((tmp_path / "singular.json").read_text(encoding="utf-8"))
    assert len(sidecar["poles"]) == 1
    assert abs(sidecar["poles"][0]["location"]) < 0.05
    assert sidecar["poles"][0]["kind"] == "denominator_zero"
    rows = _read_rows(out)
    assert len(rows) == 2001
    flagged = [r for r in rows if r["is_singular"] == "true"]
    assert len(flagged) == 1
    assert flagged[0]["pole_kind"] == "denominator_zero"
    assert flagged[0]["V_n"] == "nan"


def test_verify_default_config(capsys):
    assert main(["verify", "--stdout"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["passed"]
    assert len(report["checks"]) == 5


def test_verify_singular_config_fails(tmp_path, write_config):
    out = tmp_path / "report.json"
    code = main(["verify", "--config", write_config(SINGULAR), "--out", str(out)])
    assert code == EXIT_FAILED
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["failed"] == ["scattering"]


def test_census_lists_two_wells(write_config, capsys):
    assert main(["census", "--config", write_config(TWO_WELLS), "--stdout"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["order"] == 2
    assert [s["family"] for s in data["seeds"]] == ["S", "R"]
    assert data["seeds"][0]["description"].startswith("singular:")
    assert len(data["wells"]) == 2
    assert data["poles"] == []


def test_census_csv(write_config, capsys):
    code = main(
        ["census", "--config", write_config(TWO_WELLS), "--format", "csv", "--stdout"]
    )
    assert code == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "kind,location,depth"
    assert sum(line.startswith("well,") for line in lines) == 2


@pytest.mark.parametrize(
    "data",
    [
        {"seeds": []},
        {"seeds": [{"family": "Q", "kappa": 1.0}]},
        {"seeds": [{"family": "R", "kappa": 1.0}], "grid": {"samples": 1}},
    ],
)
def test_bad_config_exits_with_config_code(write_config, data):
    assert main(["generate", "--config", write_config(data)]) == EXIT_CONFIG


def test_missing_config_and_bad_arguments(tmp_path):
    missing = str(tmp_path / "nope.json")
    assert main(["verify", "--config", missing]) == EXIT_CONFIG
    assert main([]) == EXIT_CONFIG
    assert main(["plot"]) == EXIT_CONFIG
    assert main(["generate", "--format", "xml"]) == EXIT_CONFIG


def test_all_singular_grid(write_config):
    data = {
        "seeds": [{"family": "N", "shift": 0.0}],
        "grid": {"x_min": -1e-9, "x_max": 1e-9, "samples": 2},
    }
    assert main(["generate", "--config", write_config(data)]) == EXIT_ALL_SINGULAR


def test_unwritable_output_exits_with_config_code(tmp_path, write_config, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("", encoding="utf-8")
    out = blocker / "grid.csv"
    args = ["generate", "--config", write_config(WELL), "--out", str(out)]
    assert main(args) == EXIT_CONFIG
    assert "Ошибка ввода-вывода" in capsys.readouterr().err
