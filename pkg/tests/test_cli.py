import csv
import json
import os
import subprocess
import sys
from math import pi

import pytest
from hypothesis import given, settings, strategies as st

from froblab.cli import main
from froblab.config import ConfigError, ExperimentConfig, merge, parse_angle
from froblab.report import SUMMARY_COLUMNS, format_value


def _read(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.reader(fh))


# -- config ----------------------------------------------------------------

def test_parse_angle():
    assert parse_angle("pi/3") == pytest.approx(pi / 3)
    assert parse_angle("2*pi/3") == pytest.approx(2 * pi / 3)
    assert parse_angle("pi") == pi
    assert parse_angle(0.5) == 0.5
    assert parse_angle("-0") == 0.0
    for bad in ("sin(1)", "pi**2", "x", "__import__('os')", ""):
        with pytest.raises(ConfigError):
            parse_angle(bad)


def test_config_roundtrip_is_byte_identical():
    cfg = ExperimentConfig.from_dict({"command": "st-avg", "f": "1,0,1", "g": "T^3 + T + 1",
                                      "A": 10, "B": 20, "x": 100, "alpha": "pi/3",
                                      "beta": 2.0, "constants": {"st_poly": 5}})
    text = cfg.to_json()
    again = ExperimentConfig.from_json(text)
    assert again == cfg
    assert again.to_json() == text
    assert cfg.f == "T^2+1" and cfg.beta == "2.0"
    assert cfg.constants["st_poly"] == 5 and cfg.constants["katz"] == 4.0


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["lt-avg", "st-avg", "onepar-st"]), st.integers(1, 50),
       st.integers(1, 50), st.integers(0, 500), st.integers(-5, 5),
       st.floats(0, 1.5), st.floats(1.6, 3.1), st.sampled_from(["T", "1,1", "T^3+2"]))
def test_config_roundtrip_property(command, A, B, x, t, alpha, beta, g):
    data = {"command": command, "f": "T", "g": g, "A": A, "x": x, "t": t,
            "alpha": alpha, "beta": beta}
    if command != "onepar-st":
        data["B"] = B
    cfg = ExperimentConfig.from_dict(data)
    text = cfg.to_json()
    assert ExperimentConfig.from_json(text).to_json() == text
    assert ExperimentConfig.from_json(text) == cfg


@pytest.mark.parametrize("data,message", [
    ({"command": "st-avg", "f": "T", "g": "T", "A": 1, "B": 1, "x": 10, "alpha": 2, "beta": 1},
     "interval: require alpha < beta"),
    ({"command": "st-avg", "f": "T", "g": "T", "A": 1, "B": 1, "x": 10, "alpha": 0, "beta": 4},
     "interval: require 0 <= alpha < beta <= pi"),
    ({"command": "lt-avg", "f": "T^2", "g": "T", "A": 1, "B": 1, "x": 10},
     "inadmissible family"),
    ({"command": "lt-avg", "f": "T", "g": "y", "A": 1, "B": 1, "x": 10}, "polynomial g"),
    ({"command": "lt-avg", "f": "T", "g": "T", "A": -1, "B": 1, "x": 10}, "A: must be nonnegative"),
    ({"command": "lt-avg", "f": "T", "g": "T", "A": 1, "x": 10}, "missing required field 'B'"),
    ({"command": "onepar-st", "f": "-3*T^2", "g": "2*T^3", "A": 1, "x": 10, "alpha": 0,
      "beta": 1}, "4f^3 + 27g^2 vanishes identically"),
    ({"command": "michel", "f": "T", "g": "T", "A": 60, "primes": [101]}, "A < p/2"),
    ({"command": "vertical-st", "primes": [9], "alpha": 0, "beta": 1}, "primes:"),
    ({"command": "bogus"}, "command: must be one of"),
    ({"command": "verify", "level": "deep"}, "level: must be one of"),
    ({"command": "verify", "constants": {"nope": 1}}, "constants: unknown key"),
    ({"command": "verify", "constants": {"katz": -1}}, "katz must be a positive number"),
    ({"command": "verify", "colour": 1}, "unknown field"),
])
def test_validation_messages_name_the_rule(data, message):
    with pytest.raises(ConfigError, match=message.replace("(", r"\(").replace("^", r"\^")
                       .replace("+", r"\+").replace("*", r"\*")):
        ExperimentConfig.from_dict(data)


def test_flags_override_file():
    file_data = {"command": "lt-avg", "f": "T", "g": "T", "A": 5, "B": 5, "x": 50,
                 "constants": {"katz": 2.0, "michel": 3.0}}
    cfg = merge(file_data, {"command": "lt-avg", "A": 7, "x": None,
                            "constants": {"katz": 9.0}})
    assert cfg.A == 7 and cfg.x == 50
    assert cfg.constants["katz"] == 9.0 and cfg.constants["michel"] == 3.0


# -- reports ---------------------------------------------------------------

def test_format_value():
    assert format_value(1 / 3) == "0.333333333333"
    assert format_value(None) == ""
    assert format_value(True) == "true"
    assert format_value(12) == "12"
    assert format_value(123456789.123456789) == "123456789.123"


def test_lt_avg_smoke(tmp_path):
    out = tmp_path / "run.csv"
    code = main(["lt-avg", "--f", "T", "--g", "T", "--A", "100", "--B", "100", "--x", "1000",
                 "--t", "0", "-o", str(out)])
    assert code == 0
    rows = _read(out)
    assert tuple(rows[0]) == SUMMARY_COLUMNS and len(rows) == 2
    detail = _read(tmp_path / "run.primes.csv")
    assert detail[0] == ["p", "count", "class_count", "max_trace", "elapsed_us"]
    assert len(detail) - 1 == 166  # primes 5 <= p <= 1000
    meta = json.loads((tmp_path / "run.json").read_text(encoding="utf-8"))
    assert meta["config"]["command"] == "lt-avg"
    assert set(meta["versions"]) >= {"froblab", "numpy", "scipy", "python"}
    assert "ok" in meta["threshold_flags"] and meta["constants"]["lt_upper"] == 8.0


def test_ratio_empty_for_nonzero_t(tmp_path):
    out = tmp_path / "run.csv"
    assert main(["lt-avg", "--f", "T", "--g", "T", "--A", "5", "--B", "5", "--x", "100",
                 "--t", "-1", "-o", str(out)]) == 0
    row = dict(zip(*_read(out)))
    assert row["main_term"] == "" and row["ratio"] == "" and row["target"] == "-1"


def test_header_only_detail_when_no_primes(tmp_path):
    out = tmp_path / "tiny.csv"
    assert main(["lt-avg", "--f", "T", "--g", "T", "--A", "5", "--B", "5", "--x", "4",
                 "-o", str(out)]) == 0
    assert (tmp_path / "tiny.primes.csv").read_text() == "p,count,class_count,max_trace,elapsed_us\n"


def test_st_avg_bad_interval_exit_2(capsys):
    code = main(["st-avg", "--f", "T", "--g", "T", "--A", "5", "--B", "5", "--x", "50",
                 "--alpha", "2", "--beta", "1"])
    assert code == 2
    assert "interval: require alpha < beta" in capsys.readouterr().err


def test_unwritable_path_exit_2(tmp_path, capsys):
    code = main(["vertical-lt", "--x", "20", "-o", str(tmp_path / "missing" / "x.csv")])
    assert code == 2
    assert "output: cannot write" in capsys.readouterr().err


def test_config_file_and_flags(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "st-avg", "f": "T^2+1", "g": "T^3+T+1", "A": 10,
                               "B": 10, "x": 60, "alpha": "pi/3", "beta": "2*pi/3"}))
    out = tmp_path / "r.csv"
    assert main(["st-avg", "--config", str(cfg), "--A", "12", "-o", str(out)]) == 0
    row = dict(zip(*_read(out)))
    assert row["A"] == "12" and row["B"] == "10" and row["target"] == "[pi/3,2*pi/3]"
    assert main(["lt-avg", "--config", str(cfg)]) == 2


@pytest.mark.parametrize("argv", [
    ["lt-avg", "--f", "T^2+1", "--g", "T^3+T+1", "--A", "40", "--B", "30", "--x", "300"],
    ["st-avg", "--f", "T", "--g", "T", "--A", "40", "--B", "30", "--x", "300",
     "--alpha", "0.3", "--beta", "2"],
    ["onepar-st", "--f", "T", "--g", "T^2", "--A", "60", "--x", "300", "--alpha", "0",
     "--beta", "pi/2"],
    ["vertical-lt", "--x", "400"],
    ["vertical-st", "--primes", "31,101", "--alpha", "0", "--beta", "1"],
    ["michel", "--f", "T", "--g", "T", "--x", "120", "--n", "4"],
])
def test_output_independent_of_workers(tmp_path, argv):
    blobs = []
    for w in (1, 4, os.cpu_count() or 1):
        out = tmp_path / f"w{w}.csv"
        assert main(argv + ["--workers", str(w), "--no-timing", "-o", str(out)]) == 0
        blobs.append((out.read_bytes(), (tmp_path / f"w{w}.primes.csv").read_bytes()))
    assert all(b == blobs[0] for b in blobs)


def test_all_commands_run(tmp_path):
    runs = {
        "vertical-st": ["--primes", "101", "--alpha", "0", "--beta", "pi/3"],
        "charsum-audit": ["--f", "T^3+T+1", "--g", "T^2", "--x", "30"],
        "michel": ["--f", "T", "--g", "T^2", "--primes", "101", "--A", "40"],
        "vertical-lt": ["--x", "100", "--t", "2"],
    }
    for command, args in runs.items():
        out = tmp_path / f"{command}.csv"
        assert main([command, *args, "-o", str(out)]) == 0, command
        row = dict(zip(*_read(out)))
        assert row["command"] == command and row["threshold_ok"] == "true"


def test_json_format(tmp_path):
    out = tmp_path / "r.json"
    assert main(["vertical-lt", "--x", "50", "--format", "json", "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["detail"]["columns"][0] == "p" and len(doc["detail"]["rows"]) == 13


def test_stdout_when_no_output(capsys):
    assert main(["vertical-lt", "--x", "30"]) == 0
    text = capsys.readouterr().out
    assert text.startswith(",".join(SUMMARY_COLUMNS))
    assert "\np,count,class_count,max_trace,elapsed_us,envelope\n" in text


def test_verify_quick_exit_zero(tmp_path):
    out = tmp_path / "v.csv"
    assert main(["verify", "--level", "quick", "-o", str(out)]) == 0
    rows = _read(tmp_path / "v.primes.csv")
    statuses = {r[1] for r in rows[1:]}
    assert statuses <= {"PASS", "FINDING"}


def test_verify_exit_three_on_failure(tmp_path, monkeypatch):
    from froblab import verify

    def broken(level):
        return False, "forced", "never"
    monkeypatch.setattr(verify, "_REGISTRY", verify._REGISTRY + [("forced failure", broken)])
    assert main(["verify", "--level", "quick", "-o", str(tmp_path / "v.csv")]) == 3


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "froblab", "st-avg", "--f", "T", "--g", "T",
                           "--A", "3", "--B", "3", "--x", "20", "--alpha", "1", "--beta", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert "interval: require alpha < beta" in proc.stderr
