import json
import socket
import threading
import time

import pytest

from botcorr.cli import main
from botcorr.reporting import parse_report


def run_cli(*argv):
    return main(list(argv))


def simulate(tmp_path, scenario="e4.2", seed=3, name="t.jsonl"):
    out = tmp_path / name
    rc = run_cli("simulate", "--scenario", scenario, "--seed", str(seed), "--out", str(out))
    assert rc == 0
    return out


class TestSimulate:
    def test_writes_trace_and_reports_count(self, tmp_path, capsys):
        out = simulate(tmp_path)
        stdout = capsys.readouterr().out
        assert str(out) in stdout and "events" in stdout
        assert out.read_bytes().startswith(b'{"duration_ms":900000')

    def test_byte_identical_reruns(self, tmp_path):
        first = simulate(tmp_path, name="a.jsonl").read_bytes()
        second = simulate(tmp_path, name="b.jsonl").read_bytes()
        assert first == second

    def test_unknown_scenario_exits_2_listing_choices(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli("simulate", "--scenario", "e9", "--seed", "1",
                    "--out", str(tmp_path / "x"))
        assert exc.value.code == 2
        assert "e4.2" in capsys.readouterr().err

    def test_unwritable_path_exits_1(self, tmp_path, capsys):
        rc = run_cli("simulate", "--scenario", "e1", "--seed", "1",
                     "--out", str(tmp_path / "missing" / "x.jsonl"))
        assert rc == 1
        assert "error:" in capsys.readouterr().err


class TestAnalyze:
    def test_benign_trace_exits_0_with_na(self, tmp_path, capsys):
        trace = simulate(tmp_path, "e1", 3)
        rc = run_cli("analyze", "--trace", str(trace))
        assert rc == 0
        stdout = capsys.readouterr().out
        assert "N/A" in stdout and "No" in stdout

    def test_detection_exits_3(self, tmp_path, capsys):
        trace = simulate(tmp_path, "e4.2", 3)
        rc = run_cli("analyze", "--trace", str(trace))
        assert rc == 3
        assert "Strong" in capsys.readouterr().out

    def test_report_file_round_trips(self, tmp_path):
        trace = simulate(tmp_path)
        report = tmp_path / "r.jsonl"
        run_cli("analyze", "--trace", str(trace), "--report", str(report))
        records = parse_report(report.read_text())
        assert len(records) == 1
        assert records[0]["confidence"] == "Strong"

    def test_reports_reproducible(self, tmp_path):
        trace = simulate(tmp_path)
        r1, r2 = tmp_path / "r1.jsonl", tmp_path / "r2.jsonl"
        run_cli("analyze", "--trace", str(trace), "--report", str(r1))
        run_cli("analyze", "--trace", str(trace), "--report", str(r2))
        assert r1.read_bytes() == r2.read_bytes()

    def test_missing_trace_exits_1(self, tmp_path, capsys):
        rc = run_cli("analyze", "--trace", str(tmp_path / "nope.jsonl"))
        assert rc == 1
        assert "cannot read" in capsys.readouterr().err

    def test_corrupt_trace_exits_1_naming_line(self, tmp_path, capsys):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"duration_ms": 1000}\n{broken\n')
        rc = run_cli("analyze", "--trace", str(bad))
        assert rc == 1
        assert "line 2" in capsys.readouterr().err

    def test_window_flag_echoed_in_report(self, tmp_path):
        trace = simulate(tmp_path)
        report = tmp_path / "r.jsonl"
        run_cli("analyze", "--trace", str(trace), "--window", "60000",
                "--report", str(report))
        records = parse_report(report.read_text())
        assert records[0]["config"]["window_ms"] == 60_000
        assert records[0]["n_with"] == 15

    def test_method_and_set_flags(self, tmp_path):
        trace = simulate(tmp_path, "e1", 3)
        report = tmp_path / "r.jsonl"
        run_cli("analyze", "--trace", str(trace), "--method", "classic-d2",
                "--set", "s1", "--idle-policy", "either-zero",
                "--threshold", "0.7", "--report", str(report))
        config = parse_report(report.read_text())[0]["config"]
        assert config["method"] == "classic-d2"
        assert config["set"] == "s1"
        assert config["idle_policy"] == "either-zero"
        assert config["threshold"] == 0.7

    def test_dump_series_requires_report(self, tmp_path, capsys):
        trace = simulate(tmp_path)
        with pytest.raises(SystemExit) as exc:
            run_cli("analyze", "--trace", str(trace), "--dump-series")
        assert exc.value.code == 2

    def test_dump_series_embeds_values(self, tmp_path):
        trace = simulate(tmp_path)
        report = tmp_path / "r.jsonl"
        run_cli("analyze", "--trace", str(trace), "--dump-series",
                "--report", str(report))
        record = parse_report(report.read_text())[0]
        assert len(record["series"]["GetAsyncKeyState"]["values"]) == 90

    def test_rerun_with_echoed_config_reproduces_report(self, tmp_path):
        trace = simulate(tmp_path)
        report = tmp_path / "r.jsonl"
        run_cli("analyze", "--trace", str(trace), "--window", "20000",
                "--threshold", "0.4", "--report", str(report))
        config = parse_report(report.read_text())[0]["config"]
        again = tmp_path / "again.jsonl"
        run_cli("analyze", "--trace", str(trace),
                "--window", str(config["window_ms"]),
                "--threshold", str(config["threshold"]),
                "--idle-policy", config["idle_policy"],
                "--method", config["method"],
                "--set", config["set"],
                "--report", str(again))
        assert report.read_bytes() == again.read_bytes()


class TestReport:
    def test_merges_all_seven_scenario_reports(self, tmp_path, capsys):
        scenarios = ("e1", "e2", "e3.1", "e3.2", "e4.1", "e4.2", "e5")
        reports = []
        for scenario in scenarios:
            trace = simulate(tmp_path, scenario, 3, name=f"{scenario}.trace")
            report = tmp_path / f"{scenario}.report"
            run_cli("analyze", "--trace", str(trace), "--report", str(report))
            reports.append(str(report))
        capsys.readouterr()
        merged = tmp_path / "merged.jsonl"
        rc = run_cli("report", *reports, "--out", str(merged))
        assert rc == 0
        stdout = capsys.readouterr().out
        table_rows = stdout.splitlines()[2:]
        assert len(table_rows) == 7
        assert "comm s1" in stdout and "file s2" in stdout
        rows = [json.loads(line) for line in merged.read_text().splitlines()]
        assert [row["run"] for row in rows] == [f"{s}/3" for s in scenarios]
        confidences = [row["confidence"] for row in rows]
        assert confidences == ["NoDetection", "NoDetection", "Weak", "Normal",
                               "Weak", "Strong", "NoDetection"]

    def test_single_report_passthrough(self, tmp_path, capsys):
        trace = simulate(tmp_path)
        report = tmp_path / "r.jsonl"
        run_cli("analyze", "--trace", str(trace), "--report", str(report))
        capsys.readouterr()
        assert run_cli("report", str(report)) == 0
        assert "Strong" in capsys.readouterr().out

    def test_no_reports_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            run_cli("report")
        assert exc.value.code == 2

    def test_mixed_configs_warn_on_stderr(self, tmp_path, capsys):
        trace = simulate(tmp_path)
        r1, r2 = tmp_path / "r1.jsonl", tmp_path / "r2.jsonl"
        run_cli("analyze", "--trace", str(trace), "--report", str(r1))
        run_cli("analyze", "--trace", str(trace), "--threshold", "0.9",
                "--report", str(r2))
        capsys.readouterr()
        rc = run_cli("report", str(r1), str(r2))
        assert rc == 0
        assert "differ" in capsys.readouterr().err

    def test_unreadable_report_exits_1(self, tmp_path):
        assert run_cli("report", str(tmp_path / "ghost.jsonl")) == 1


@pytest.fixture(scope="module")
def live_server():
    import uvicorn

    from botcorr.service import app

    probe = socket.socket()
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]
    probe.close()

    config = uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 15
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("service did not start")
        time.sleep(0.02)
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)


class TestRemoteMode:
    def test_simulate_matches_in_process(self, tmp_path, live_server):
        local = simulate(tmp_path, name="local.jsonl")
        remote = tmp_path / "remote.jsonl"
        rc = run_cli("simulate", "--scenario", "e4.2", "--seed", "3",
                     "--out", str(remote), "--server", live_server)
        assert rc == 0
        assert local.read_bytes() == remote.read_bytes()

    def test_analyze_over_http(self, tmp_path, live_server, capsys):
        trace = simulate(tmp_path)
        rc = run_cli("analyze", "--trace", str(trace), "--server", live_server)
        assert rc == 3
        assert "Strong" in capsys.readouterr().out

    def test_server_error_surfaces_as_exit_1(self, tmp_path, live_server, capsys):
        bad = tmp_path / "bad.jsonl"
        bad.write_text("{broken\n")
        rc = run_cli("analyze", "--trace", str(bad), "--server", live_server)
        assert rc == 1
        assert "400" in capsys.readouterr().err

    def test_unreachable_server_exits_1(self, tmp_path, capsys):
        trace = simulate(tmp_path, "e1", 1, name="u.jsonl")
        rc = run_cli("analyze", "--trace", str(trace),
                     "--server", "http://127.0.0.1:1")
        assert rc == 1
        assert "cannot reach" in capsys.readouterr().err
