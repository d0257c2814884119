import json
import math
import os

import numpy as np
import pytest

from qguess.cli import RunConfig, _figure_path, _state_seed, _worker_count, main

RELATION_ORDER = ("DUALITY", "EQ13", "EQ3", "LEMMA1", "THM1", "THM2A", "THM2B", "THM3A", "THM3B")


def run_cli(argv):
    return main(argv)


def test_runconfig_validation():
    ok = RunConfig(command="verify")
    assert ok.d == 2 and ok.count == 20
    with pytest.raises(ValueError):
        RunConfig(command="bogus")
    with pytest.raises(ValueError):
        RunConfig(command="verify", d=1)
    with pytest.raises(ValueError):
        RunConfig(command="verify", dim_b=0)
    with pytest.raises(ValueError):
        RunConfig(command="verify", count=0)
    with pytest.raises(ValueError):
        RunConfig(command="verify", seed=-1)
    with pytest.raises(ValueError):
        RunConfig(command="verify", tol=0.0)
    with pytest.raises(ValueError):
        RunConfig(command="verify", solver_tol=-1e-9)
    with pytest.raises(ValueError):
        RunConfig(command="verify", format="xml")
    with pytest.raises(ValueError):
        RunConfig(command="region", grid=1)
    with pytest.raises(ValueError):
        RunConfig(command="demo", state="bell")


def test_state_seed_streams_are_disjoint():
    seen = {_state_seed(s, i) for s in range(3) for i in range(50)}
    assert len(seen) == 150
    assert _state_seed(7, 3) == 7 * 1_000_003 + 3


def test_figure_path_swaps_extension():
    assert _figure_path("out/report.jsonl") == "out/report.png"
    assert _figure_path("data.csv") == "data.png"


def test_worker_count_env_cap(monkeypatch):
    monkeypatch.setenv("QGUESS_THREADS", "1")
    assert _worker_count(8) == 1
    monkeypatch.setenv("QGUESS_THREADS", "0")
    with pytest.raises(ValueError):
        _worker_count(8)
    monkeypatch.setenv("QGUESS_THREADS", "many")
    with pytest.raises(ValueError):
        _worker_count(8)
    monkeypatch.delenv("QGUESS_THREADS")
    assert _worker_count(1) == 1


def test_verify_writes_sorted_reports(tmp_path, capsys):
    out = tmp_path / "v.jsonl"
    code = run_cli(["verify", "--count", "2", "--seed", "5", "--output", str(out)])
    assert code == 0
    text = out.read_text()
    lines = text.splitlines()
    # circle report plus 9 relations for each of the 2 states
    assert len(lines) == 1 + 2 * 9
    rows = [json.loads(line) for line in lines]
    for row in rows:
        assert tuple(row.keys()) == (
            "relation_id", "lhs_lo", "lhs_hi", "rhs_lo", "rhs_hi", "slack", "pass", "seed"
        )
        assert isinstance(row["pass"], bool)
    assert rows[0]["relation_id"] == "QUBIT_CIRCLE"
    assert rows[0]["seed"] == 5
    per_state = [r["relation_id"] for r in rows[1:10]]
    assert per_state == sorted(per_state)
    assert tuple(per_state) == RELATION_ORDER
    # per-state seeds recorded in the report lines
    assert rows[1]["seed"] == _state_seed(5, 0)
    assert rows[10]["seed"] == _state_seed(5, 1)
    summary = capsys.readouterr().out
    assert "[verify] states=2 reports=19" in summary
    assert "fail=0" in summary
    assert (tmp_path / "v.png").exists()


def test_verify_byte_identical_reruns(tmp_path):
    first = tmp_path / "a.jsonl"
    second = tmp_path / "b.jsonl"
    assert run_cli(["verify", "--count", "3", "--seed", "9", "--output", str(first)]) == 0
    assert run_cli(["verify", "--count", "3", "--seed", "9", "--output", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()


def test_verify_thread_schedule_independence(tmp_path, monkeypatch):
    serial = tmp_path / "serial.jsonl"
    threaded = tmp_path / "threaded.jsonl"
    monkeypatch.setenv("QGUESS_THREADS", "1")
    assert run_cli(["verify", "--count", "4", "--seed", "3", "--output", str(serial)]) == 0
    monkeypatch.setenv("QGUESS_THREADS", "4")
    assert run_cli(["verify", "--count", "4", "--seed", "3", "--output", str(threaded)]) == 0
    assert serial.read_bytes() == threaded.read_bytes()


def test_verify_seed_changes_output(tmp_path):
    a = tmp_path / "s0.jsonl"
    b = tmp_path / "s1.jsonl"
    run_cli(["verify", "--count", "2", "--seed", "0", "--output", str(a)])
    run_cli(["verify", "--count", "2", "--seed", "1", "--output", str(b)])
    assert a.read_bytes() != b.read_bytes()


def test_verify_higher_dimension_skips_circle(tmp_path):
    out = tmp_path / "d3.jsonl"
    assert run_cli(["verify", "--d", "3", "--count", "1", "--output", str(out)]) == 0
    rows = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(rows) == 9
    assert all(r["relation_id"] != "QUBIT_CIRCLE" for r in rows)


def test_verify_long_sweep_survives_degenerate_states(tmp_path):
    # state indices 89 and 191 of this sweep are near-degenerate binary
    # discrimination instances that used to abort the run
    out = tmp_path / "long.jsonl"
    code = run_cli(["verify", "--d", "2", "--dim-b", "2", "--count", "200",
                    "--seed", "7", "--output", str(out)])
    assert code == 0
    rows = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(rows) == 200 * len(RELATION_ORDER) + 1
    assert all(r["pass"] for r in rows)


def test_region_csv_schema_and_values(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code = run_cli(["region", "--d", "2", "--grid", "33", "--output", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "theta,p_z,p_x,thm3_pz_cap,thm3_px_cap"
    assert len(lines) == 34
    rows = [[float(x) for x in line.split(",")] for line in lines[1:]]
    first, last = rows[0], rows[-1]
    assert first[0] == 0.0
    assert first[1] == pytest.approx(1.0, abs=1e-12)
    assert first[2] == pytest.approx(0.5, abs=1e-12)
    # 12 significant digits in the file: ~5e-12 absolute at this magnitude
    assert last[0] == pytest.approx(math.pi / 2.0, abs=1e-11)
    assert last[1] == pytest.approx(0.5, abs=1e-12)
    assert last[2] == pytest.approx(1.0, abs=1e-12)
    for theta, p_z, p_x, cap_z, cap_x in rows:
        assert cap_z == pytest.approx(1.0 - (p_x - 0.5) ** 2, abs=1e-11)
        assert cap_x == pytest.approx(1.0 - (p_z - 0.5) ** 2, abs=1e-11)
        assert p_z <= cap_z + 1e-11
        assert p_x <= cap_x + 1e-11
        # d=2 curve sits on the unit circle
        s = (2.0 * p_z - 1.0) ** 2 + (2.0 * p_x - 1.0) ** 2
        assert abs(s - 1.0) < 1e-9
    assert (tmp_path / "r.png").exists()
    assert "[region] d=2 rows=33" in capsys.readouterr().out


def test_region_is_deterministic(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    run_cli(["region", "--d", "5", "--grid", "65", "--output", str(a)])
    run_cli(["region", "--d", "5", "--grid", "65", "--output", str(b)])
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()


def test_demo_entangled_pair_is_all_ones(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run_cli(["demo", "--state", "phi", "--d", "2"]) == 0
    out = capsys.readouterr().out
    assert "state=phi d=2 partners=B" in out
    assert "primal=1.000000 dual=1.000000" in out
    assert "coherent value-measurement factor fidelity  1.000000" in out
    assert "coherent phase-measurement factor fidelity  1.000000" in out
    assert "circuit fidelity 1.000000 vs constructive bound 1.000000" in out
    assert "best recovery fidelity enclosure [1.000000, 1.000000]" in out
    assert "Q(Z^A|purifier) 1.000000  Q(X^A|Ap,purifier) 1.000000" in out


def test_demo_theta_zero_bound(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run_cli(["demo", "--state", "theta", "--theta", "0", "--d", "2"]) == 0
    out = capsys.readouterr().out
    assert "vs constructive bound 0.500000" in out


def test_demo_ghz_prints_duality_point(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run_cli(["demo", "--state", "ghz", "--d", "2"]) == 0
    out = capsys.readouterr().out
    assert "duality point distinguishability=1.000000 fourier_visibility=0.000000" in out


def test_demo_random_state_runs(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run_cli(["demo", "--state", "random", "--seed", "4", "--dim-b", "3"]) == 0
    out = capsys.readouterr().out
    assert "state=random" in out


def test_usage_errors_exit_2(tmp_path):
    with pytest.raises(SystemExit) as info:
        run_cli(["verify", "--d", "1", "--output", str(tmp_path / "x.jsonl")])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        run_cli(["demo", "--state", "bell"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        run_cli(["verify", "--format", "csv", "--output", str(tmp_path / "x.jsonl")])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        run_cli(["region", "--format", "json", "--output", str(tmp_path / "x.csv")])
    assert info.value.code == 2
    with pytest.raises(SystemExit):
        run_cli([])


def test_malformed_thread_env_exits_2(tmp_path, monkeypatch):
    monkeypatch.setenv("QGUESS_THREADS", "lots")
    with pytest.raises(SystemExit) as info:
        run_cli(["verify", "--count", "1", "--output", str(tmp_path / "x.jsonl")])
    assert info.value.code == 2


def test_io_error_exits_2(tmp_path, capsys):
    target = tmp_path / "missing_dir" / "out.csv"
    code = run_cli(["region", "--grid", "5", "--output", str(target)])
    assert code == 2
    assert "qguess:" in capsys.readouterr().err


def test_console_entry_point_is_wired():
    from importlib.metadata import entry_points

    import qguess.cli

    names = {ep.name: ep.value for ep in entry_points(group="console_scripts")}
    assert names.get("qguess") == "qguess.cli:main"
    assert callable(qguess.cli.main)


def test_default_output_paths(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run_cli(["region", "--grid", "5"]) == 0
    assert (tmp_path / "qguess-region.csv").exists()
    assert (tmp_path / "qguess-region.png").exists()
