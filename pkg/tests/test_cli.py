import csv
import shutil
from pathlib import Path

import pytest

from camsel.cli import SIMULATE_HEADER, SWEEP_HEADER, main
from camsel.config import default_config_path, load_run_config, load_scenario
from camsel.errors import ConfigError

DATA = Path(__file__).parent / "data"
SHIPPED = default_config_path()


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def write_config(tmp_path, text, name="cfg.toml"):
    p = tmp_path / name
    p.write_text(text)
    return p


def shipped_text():
    return SHIPPED.read_text()


def test_load_shipped_scenario():
    sc = load_scenario(SHIPPED)
    assert sc.n == 7 and sc.theta == 1036800 and sc.psi == 4 and sc.trials == 20
    assert [c.beta_a for c in sc.cameras] == [6, 6, 6, 2, 2.5, 3.5, 5]
    assert [c.beta_b for c in sc.cameras] == [3, 3, 3, 3, 3.5, 2.5, 2]
    assert [c.resolution for c in sc.cameras] == [2073600] * 3 + [921600] * 4
    assert sc.theta == 1920 * 1080 / 2


def test_dimension_mismatch(tmp_path):
    text = shipped_text()
    last = text.rindex("[[cameras]]")
    end = text.index("[correlation]")
    p = write_config(tmp_path, text[:last] + text[end:])
    with pytest.raises(ConfigError, match="dimension mismatch"):
        load_scenario(p)


def test_invalid_beta_names_camera(tmp_path):
    text = shipped_text().replace("beta_a = 2.0\nbeta_b = 3.0", "beta_a = 2.0\nbeta_b = 0")
    with pytest.raises(ConfigError, match="camera 3: beta_b"):
        load_scenario(write_config(tmp_path, text))


def test_missing_field_and_parse_error(tmp_path):
    with pytest.raises(ConfigError, match="scenario.theta"):
        load_scenario(write_config(tmp_path, shipped_text().replace("theta = 1036800\n", "")))
    with pytest.raises(ConfigError, match="parse error"):
        load_scenario(write_config(tmp_path, "[scenario\n"))
    with pytest.raises(ConfigError, match="not found"):
        load_scenario(tmp_path / "nope.toml")


def test_overrides_take_precedence():
    cfg = load_run_config(SHIPPED, {"seed": 5, "trials": 7, "psi": 5, "strategies": ["all"], "threads": 3})
    assert cfg.seed == 5 and cfg.trials == 7 and cfg.scenario.psi == 5
    assert cfg.strategies == ["all"] and cfg.threads == 3
    cfg = load_run_config(SHIPPED, {"seed": None})
    assert cfg.seed == 20240917


def test_ga_and_quality_validation(tmp_path):
    bad_ga = shipped_text().replace("elitism_count = 2", "elitism_count = 60")
    with pytest.raises(ConfigError, match="elitism_count"):
        load_run_config(write_config(tmp_path, bad_ga))
    table_no_thr = shipped_text().replace('model = "resolution_sum"', 'model = "table"\ntable = "x.txt"')
    with pytest.raises(ConfigError, match="not found"):
        load_run_config(write_config(tmp_path, table_no_thr))


def test_solve_prints_table(tmp_path, capsys):
    assert main(["solve", "--psi", "6", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "psi=6" in out and "MATCH" in out
    rows = read_csv(tmp_path / "solve.csv")
    assert rows[0][:3] == ["psi", "method", "selected"]
    assert [r[1] for r in rows[1:]] == ["ga", "exact"]
    assert rows[1][2] == rows[2][2] == "2 3 4 5 6 7"


def test_solve_full_budget(tmp_path):
    assert main(["solve", "--psi", "7", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "solve.csv")
    assert rows[1][2] == rows[2][2] == "1 2 3 4 5 6 7"


def test_solve_rejects_zero_budget(tmp_path, capsys):
    assert main(["solve", "--psi", "0", "--out", str(tmp_path)]) == 2
    assert "psi" in capsys.readouterr().err


def test_simulate_cardinality(tmp_path):
    assert main(["simulate", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "simulate.csv")
    assert rows[0] == SIMULATE_HEADER
    assert len(rows) == 3
    trials = read_csv(tmp_path / "simulate_trials.csv")
    assert len(trials) == 41


def test_simulate_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--out", str(a), "--seed", "3"]) == 0
    assert main(["simulate", "--out", str(b), "--seed", "3", "--threads", "4"]) == 0
    for name in ("simulate.csv", "simulate_trials.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_simulate_golden(tmp_path):
    assert main(["simulate", "--out", str(tmp_path), "--seed", "1", "--trials", "5"]) == 0
    assert (tmp_path / "simulate.csv").read_text() == (DATA / "golden_simulate.csv").read_text()


def test_sweep_rows(tmp_path):
    assert main(["sweep", "--axis", "psi", "--values", "5,6", "--trials", "4", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "sweep.csv")
    assert rows[0] == SWEEP_HEADER and len(rows) == 5
    assert main(["sweep", "--axis", "rho", "--values", "0.2,0.4,0.6,0.8", "--trials", "4",
                 "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "sweep.csv")
    assert len(rows) == 9
    assert [float(r[1]) for r in rows[1::2]] == [0.2, 0.4, 0.6, 0.8]


def test_sweep_empty_values_is_an_error(tmp_path, capsys):
    assert main(["sweep", "--axis", "psi", "--values", "", "--out", str(tmp_path)]) == 2
    cfg = write_config(tmp_path, shipped_text().replace("values = [4, 5, 6]", "values = []"))
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "non-empty" in capsys.readouterr().err


def test_validate_shipped(capsys):
    assert main(["validate"]) == 0
    out = capsys.readouterr().out
    assert "theta attainable: true" in out
    assert "expected quality 1382400 >= theta 1036800" in out


def test_validate_unattainable(tmp_path, capsys):
    cfg = write_config(tmp_path, shipped_text().replace("theta = 1036800", "theta = 1e10"))
    assert main(["validate", "--config", str(cfg)]) != 0
    assert "theta attainable: false" in capsys.readouterr().out


def test_validate_non_psd_warns(tmp_path, capsys):
    text = shipped_text()
    start = text.index("matrix = [")
    end = text.index("\n]\n", start) + 2
    bad = """matrix = [
  [1.0, 0.9, 0.1, 0.1, 0.1, 0.1, 0.1],
  [0.9, 1.0, 0.9, 0.1, 0.1, 0.1, 0.1],
  [0.1, 0.9, 1.0, 0.1, 0.1, 0.1, 0.1],
  [0.1, 0.1, 0.1, 1.0, 0.1, 0.1, 0.1],
  [0.1, 0.1, 0.1, 0.1, 1.0, 0.1, 0.1],
  [0.1, 0.1, 0.1, 0.1, 0.1, 1.0, 0.1],
  [0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 1.0],
]"""
    cfg = write_config(tmp_path, text[:start] + bad + text[end:])
    assert main(["validate", "--config", str(cfg)]) == 0
    assert "WARNING correlation matrix not PSD" in capsys.readouterr().out


def test_vertex_config_runs(tmp_path):
    cfg = SHIPPED.parent / "dance1-vertices.toml"
    assert main(["simulate", "--config", str(cfg), "--trials", "5", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "simulate.csv")
    assert [r[0] for r in rows[1:]] == ["portfolio", "traditional", "all"]


def test_config_relative_table_path(tmp_path):
    shutil.copy(SHIPPED.parent / "dance1_vertices.txt", tmp_path / "t.txt")
    text = (SHIPPED.parent / "dance1-vertices.toml").read_text().replace("dance1_vertices.txt", "t.txt")
    cfg = load_run_config(write_config(tmp_path, text))
    assert cfg.quality.variant == "table" and cfg.threshold == 60000
