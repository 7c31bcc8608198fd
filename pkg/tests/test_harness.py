import csv
import io
import json
import math
import subprocess
import sys

import pytest

from gramshift import RSConfig
from gramshift.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, main, parse_number
from gramshift.harness import (
    CSV_COLUMNS,
    ConfigError,
    RunConfig,
    cells,
    emit,
    read_json,
    run,
    run_cell,
    to_csv,
    to_json,
)
from gramshift.theorems import VerificationReport

SMALL = dict(T_ladder=[1e5, 2e5], h_rule="fixed", H=12.0, tau_grid=[0.0, 1.0], offset_grid=[0.8])


def small(**kw) -> RunConfig:
    return RunConfig.from_dict({**SMALL, **kw})


# -- RunConfig -------------------------------------------------------------------


@pytest.mark.parametrize(
    "bad",
    [
        {"claims": ["T9"]},
        {"T_ladder": [500.0]},
        {"T_ladder": [1e6, 1e5]},
        {"h_rule": "cubic"},
        {"h_rule": "fixed", "H": None},
        {"delta": 0.3},
        {"epsilon": 0.0},
        {"tau_grid": [4.0]},
        {"offset_grid": [0.0]},
        {"threads": 0},
        {"output": "xml"},
        {"colour": "blue"},
        {"rs": {"correction_order": 7}},
    ],
)
def test_config_rejects(bad):
    with pytest.raises(ConfigError):
        RunConfig.from_dict({**SMALL, **bad})


def test_window_length_rules():
    T = 1e6
    assert RunConfig(h_rule="delta_ln").window_length(T) == pytest.approx(T ** (1 / 6) * math.log(T))
    assert RunConfig(h_rule="sixth_eps", epsilon=0.05).window_length(T) == pytest.approx(T ** (1 / 6 + 0.05))
    assert small().window_length(T) == 12.0


def test_lindelof_normalizer():
    assert RunConfig(lindelof=True, epsilon=0.1).normalizer_delta == pytest.approx(0.05)
    assert RunConfig().normalizer_delta == pytest.approx(1 / 6)


def test_config_json_round_trip(tmp_path):
    cfg = small(rs={"correction_order": 2}, threads=2)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    again = RunConfig.from_json(path)
    assert again == cfg and again.rs == RSConfig(correction_order=2)


def test_cell_layout():
    got = cells(small(claims=["NL73", "ALT31", "T3_odd", "T1"]))
    assert [c[0] for c in got] == ["T1"] * 4 + ["T3_odd"] * 2 + ["ALT31"] * 2 + ["NL73"] * 2
    assert {c[2] for c in got if c[0] == "NL73"} == {1.0}
    assert {c[2] for c in got if c[0] == "ALT31"} == {0.0}


# -- running ----------------------------------------------------------------------


def test_run_produces_one_report_per_cell():
    cfg = small()
    reports = run(cfg)
    assert [(r.claim_id, r.T, r.parameter) for r in reports] == cells(cfg)
    assert all(r.error is None for r in reports)


def test_threads_do_not_change_results():
    one = to_csv(run(small(threads=1)))
    four = to_csv(run(small(threads=4)))
    strip = lambda text: [row[:-1] for row in csv.reader(io.StringIO(text))]
    assert strip(one) == strip(four)


def test_failed_cell_becomes_error_row(monkeypatch):
    import gramshift.harness as h

    def boom(*a, **k):
        raise RuntimeError("no convergence")

    monkeypatch.setattr(h, "verify_theorem1", boom)
    r = run_cell("T1", 1e5, 0.5, small())
    assert r.error == "RuntimeError: no convergence"
    assert math.isnan(r.lhs) and r.node_count == 0


# -- serialisation -----------------------------------------------------------------


def _report(**kw):
    base = dict(claim_id="T1", T=1e6, H=10.0, parameter=0.1, lhs=0.1, main_term=0.0, residual=0.1, normalizer=3.0, node_count=7)
    return VerificationReport(**{**base, **kw})


def test_csv_header_and_precision():
    text = to_csv([_report(lhs=1 / 3, residual=1 / 3)])
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert rows[1][4] == format(1 / 3, ".17g") and float(rows[1][4]) == 1 / 3


def test_csv_non_finite_values():
    rows = list(csv.reader(io.StringIO(to_csv([VerificationReport.failed("T1", 1e6, 1.0, 0.0, "x")]))))
    assert rows[1][4] == "NaN"


def test_json_round_trip(tmp_path):
    reports = [_report(lhs=0.1 + 0.2, in_w_nu=True), VerificationReport.failed("T2_odd", 1e7, 2.0, 1.0, "bad")]
    path = emit(reports, "json", tmp_path / "r.json")
    back = read_json(path)
    assert back[0] == reports[0]
    assert back[1].error == "bad" and math.isnan(back[1].lhs)
    assert json.loads(to_json([]) ) == []


def test_emit_unwritable_path(tmp_path):
    with pytest.raises(OSError):
        emit([_report()], "csv", tmp_path / "missing" / "r.csv")


# -- CLI -------------------------------------------------------------------------------


@pytest.mark.parametrize("text,value", [("0.5", 0.5), ("pi", math.pi), ("-pi", -math.pi), ("3pi/4", 3 * math.pi / 4), ("pi/2", math.pi / 2)])
def test_parse_number(text, value):
    assert parse_number(text) == pytest.approx(value)


def test_cli_verify_csv(tmp_path):
    out = tmp_path / "r.csv"
    code = main(["verify", "--T", "1e5", "--H", "10", "--tau", "0,pi/4", "--claims", "T1,ALT32", "--out", str(out)])
    assert code == EXIT_OK
    rows = list(csv.DictReader(out.open()))
    assert [r["claim_id"] for r in rows] == ["T1", "T1", "ALT32", "ALT32"]
    assert float(rows[0]["lhs"]) == 0.0


def test_cli_config_file_with_override(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({**SMALL, "claims": ["T1"], "output": "json"}))
    out = tmp_path / "r.json"
    assert main(["verify", "--config", str(cfg), "--tau", "0.5", "--out", str(out)]) == EXIT_OK
    data = json.loads(out.read_text())
    assert {d["parameter"] for d in data} == {0.5} and len(data) == 2


def test_cli_config_error_exit(capsys):
    assert main(["verify", "--T", "10", "--H", "1"]) == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_cli_bad_json_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text("{not json")
    assert main(["verify", "--config", str(cfg)]) == EXIT_CONFIG


def test_cli_io_error_exit(tmp_path):
    assert main(["verify", "--config", str(tmp_path / "absent.json")]) == EXIT_IO
    bad = tmp_path / "no" / "dir.csv"
    assert main(["verify", "--T", "1e5", "--H", "5", "--claims", "T1", "--tau", "0", "--out", str(bad)]) == EXIT_IO


def test_cli_gram(tmp_path):
    out = tmp_path / "g.csv"
    assert main(["gram", "--T", "1e5", "--H", "5", "--tau", "pi/2", "--parity", "even", "--out", str(out)]) == EXIT_OK
    rows = list(csv.DictReader(out.open()))
    assert rows and all(int(r["nu"]) % 2 == 0 for r in rows)
    assert all(1e5 - 1 <= float(r["t"]) <= 1e5 + 6 for r in rows)


def test_cli_trigsum(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert main(["trigsum", "--t", "1e5", "--out", str(out)]) == EXIT_OK
    assert "max delta_hat" in capsys.readouterr().err
    assert main(["trigsum", "--t", "1e5", "--a", "5"]) == EXIT_CONFIG
    assert main(["trigsum", "--t", "1e5", "--a", "5", "--b", "40"]) == EXIT_CONFIG


def test_cli_scan_ladder(tmp_path):
    out = tmp_path / "s.csv"
    code = main(["scan", "--from", "1e4", "--to", "1e5", "--per-decade", "2", "--H", "5", "--claims", "ALT31", "--out", str(out)])
    assert code == EXIT_OK
    Ts = [float(r["T"]) for r in csv.DictReader(out.open())]
    assert Ts == pytest.approx([1e4, 1e4 * 10**0.5, 1e5])


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gramshift.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for sub in ("verify", "gram", "trigsum", "scan"):
        assert sub in proc.stdout
