"""End-to-end checks of the command line front end."""
from __future__ import annotations

import csv
import io
import json
import sys

import pytest
import yaml

from intersearch import cli

BASE_DOC = {
    "grid": {"side_cells": 20, "cell_pitch": 1.0},
    "sensor": {"a": 2.0, "lambda": 0.05, "sigma_range": 0.5,
               "sigma_azimuth": 0.05, "radius_factor": 3.0, "tau0": 1.0},
    "strategy": {"V0": 20.0, "v0": 1.0, "p_star": 0.05, "zeta": 0.7,
                 "epsilon": 0.001, "action_count": 8, "timeout": 500.0},
}


def write_config(path, *, grid=None, sensor=None, strategy=None, experiment=None,
                 raw=None):
    doc = raw if raw is not None else {
        "grid": dict(BASE_DOC["grid"]),
        "sensor": dict(BASE_DOC["sensor"]),
        "strategy": dict(BASE_DOC["strategy"]),
    }
    if raw is None:
        for name, override in (("grid", grid), ("sensor", sensor),
                               ("strategy", strategy)):
            if override:
                doc[name].update(override)
        if experiment is not None:
            doc["experiment"] = experiment
    path.write_text(yaml.safe_dump(doc), encoding="utf-8")
    return str(path)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


class TestLoadConfig:
    def test_round_trip(self, tmp_path):
        cfg = write_config(tmp_path / "c.yaml",
                           experiment={"runs": 12, "base_seed": 7, "workers": 2,
                                       "seed": 3, "target_cell": 84,
                                       "target_present": False})
        grid, sensor, strategy, experiment = cli.load_config(cfg)
        assert grid.side_cells == 20 and grid.cell_pitch == 1.0
        assert sensor.range_scale == 2.0
        assert sensor.false_alarm_rate == 0.05
        assert sensor.scan_time == 1.0
        assert sensor.radius_factor == 3.0
        assert strategy.ballistic_speed == 20.0
        assert strategy.surface_speed == 1.0
        assert strategy.residual_prob == 0.05
        assert strategy.hold_threshold == 0.7
        assert strategy.declare_margin == 0.001
        assert strategy.action_count == 8
        assert strategy.timeout == 500.0
        assert strategy.strategy_kind == "intermittent"
        assert experiment == {"runs": 12, "base_seed": 7, "workers": 2, "seed": 3,
                              "target_cell": 84, "target_present": False}

    def test_unknown_key_is_named(self, tmp_path):
        cfg = write_config(tmp_path / "c.yaml", sensor={"foo": 1.0})
        with pytest.raises(cli.ConfigError, match="foo"):
            cli.load_config(cfg)

    def test_unknown_section_is_named(self, tmp_path):
        doc = {**{k: dict(v) for k, v in BASE_DOC.items()}, "extra": {}}
        cfg = write_config(tmp_path / "c.yaml", raw=doc)
        with pytest.raises(cli.ConfigError, match="extra"):
            cli.load_config(cfg)

    def test_missing_section(self, tmp_path):
        doc = {k: dict(v) for k, v in BASE_DOC.items() if k != "sensor"}
        cfg = write_config(tmp_path / "c.yaml", raw=doc)
        with pytest.raises(cli.ConfigError, match="sensor"):
            cli.load_config(cfg)

    def test_wrong_type_is_named(self, tmp_path):
        cfg = write_config(tmp_path / "c.yaml", grid={"side_cells": 12.5})
        with pytest.raises(cli.ConfigError, match="side_cells"):
            cli.load_config(cfg)

    def test_bool_is_not_an_integer(self, tmp_path):
        cfg = write_config(tmp_path / "c.yaml", grid={"side_cells": True})
        with pytest.raises(cli.ConfigError, match="side_cells"):
            cli.load_config(cfg)

    def test_invalid_parameter_value(self, tmp_path):
        cfg = write_config(tmp_path / "c.yaml", strategy={"zeta": 1.5})
        with pytest.raises(cli.ConfigError, match="hold_threshold"):
            cli.load_config(cfg)

    def test_missing_file(self, tmp_path):
        with pytest.raises(cli.ConfigError, match="cannot read"):
            cli.load_config(str(tmp_path / "absent.yaml"))

    def test_invalid_yaml(self, tmp_path):
        p = tmp_path / "c.yaml"
        p.write_text("grid: [unclosed", encoding="utf-8")
        with pytest.raises(cli.ConfigError, match="YAML"):
            cli.load_config(str(p))


class TestDemo:
    def test_success_writes_trace_and_map(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "c.yaml", sensor={"lambda": 0.0},
                           experiment={"seed": 5, "target_cell": 84,
                                       "start_cell": 84})
        out = str(tmp_path / "run")
        rc = cli.main(["demo", "--config", cfg, "--out", out])
        assert rc == 0
        assert "outcome=found_correct" in capsys.readouterr().out

        lines = (tmp_path / "run.trace.jsonl").read_text().splitlines()
        first = json.loads(lines[0])
        assert first["clock"] == 0.0
        assert first["entropy"] == 1.0
        assert first["phase"] == "diffusion"
        clocks = [json.loads(l)["clock"] for l in lines]
        assert clocks == sorted(clocks)

        released = json.loads((tmp_path / "run.map.json").read_text())
        assert len(released) == 400
        assert all(0.0 <= v <= 1.0 for v in released)
        assert not list(tmp_path.glob("*.tmp*"))

    def test_timeout_exit_code(self, tmp_path):
        cfg = write_config(tmp_path / "c.yaml", sensor={"lambda": 0.0},
                           strategy={"timeout": 60.0},
                           experiment={"seed": 5, "target_present": False})
        rc = cli.main(["demo", "--config", cfg, "--out", str(tmp_path / "r")])
        assert rc == 2

    def test_wrong_declaration_exit_code(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "c.yaml",
                           sensor={"lambda": 0.2},
                           strategy={"epsilon": 0.3},
                           experiment={"seed": 0, "target_present": False})
        rc = cli.main(["demo", "--config", cfg, "--out", str(tmp_path / "r")])
        assert rc == 3
        assert "declared=243" in capsys.readouterr().out

    def test_seed_flag_beats_config(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "c.yaml",
                           sensor={"lambda": 0.2},
                           strategy={"epsilon": 0.3},
                           experiment={"seed": 5, "target_present": False})
        rc = cli.main(["demo", "--config", cfg, "--seed", "0",
                       "--out", str(tmp_path / "r")])
        assert rc == 3
        assert "declared=243" in capsys.readouterr().out

    def test_default_output_prefix(self, tmp_path, monkeypatch):
        cfg = write_config(tmp_path / "c.yaml", sensor={"lambda": 0.0},
                           experiment={"seed": 5, "target_cell": 84,
                                       "start_cell": 84})
        monkeypatch.chdir(tmp_path)
        assert cli.main(["demo", "--config", cfg]) == 0
        assert (tmp_path / "demo_run.trace.jsonl").exists()
        assert (tmp_path / "demo_run.map.json").exists()

    def test_strategy_override(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "c.yaml", sensor={"lambda": 0.0},
                           strategy={"timeout": 100.0},
                           experiment={"seed": 3, "target_cell": 211,
                                       "start_cell": 210})
        rc = cli.main(["demo", "--config", cfg, "--strategy", "pure_infotaxis",
                       "--out", str(tmp_path / "r")])
        assert rc == 0
        assert "jumps=0" in capsys.readouterr().out

    def test_unknown_strategy_rejected(self, tmp_path):
        cfg = write_config(tmp_path / "c.yaml")
        with pytest.raises(SystemExit):
            cli.main(["demo", "--config", cfg, "--strategy", "bogus"])

    def test_bad_config_exit_code(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "c.yaml", sensor={"foo": 1.0})
        rc = cli.main(["demo", "--config", cfg, "--out", str(tmp_path / "r")])
        assert rc == 1
        err = capsys.readouterr().err
        assert "config error" in err and "foo" in err


class TestMonteCarlo:
    def test_outputs(self, tmp_path):
        cfg = write_config(tmp_path / "c.yaml",
                           experiment={"runs": 10, "base_seed": 0})
        out = str(tmp_path / "mc")
        rc = cli.main(["mc", "--config", cfg, "--out", out])
        assert rc == 0

        stats = json.loads((tmp_path / "mc.stats.json").read_text())
        assert stats["runs"] == 10
        total = stats["success_rate"] + stats["wrong_rate"] + stats["timeout_rate"]
        assert abs(total - 1.0) < 1e-12
        assert stats["timeout"] == 500.0

        rows = read_csv(tmp_path / "mc.hist.csv")
        assert rows[0] == ["bin_low", "bin_high", "count", "density"]
        counts = [int(r[2]) for r in rows[1:]]
        assert sum(counts) == round(stats["success_rate"] * 10)
        widths = [float(r[1]) - float(r[0]) for r in rows[1:]]
        mass = sum(w * float(r[3]) for w, r in zip(widths, rows[1:]))
        assert abs(mass - 1.0) < 1e-9

    def test_runs_flag_beats_config(self, tmp_path):
        cfg = write_config(tmp_path / "c.yaml", experiment={"runs": 10})
        rc = cli.main(["mc", "--config", cfg, "--runs", "4",
                       "--out", str(tmp_path / "mc")])
        assert rc == 0
        assert json.loads((tmp_path / "mc.stats.json").read_text())["runs"] == 4

    def test_worker_count_does_not_change_outputs(self, tmp_path):
        cfg = write_config(tmp_path / "c.yaml",
                           experiment={"runs": 8, "base_seed": 11})
        rc1 = cli.main(["mc", "--config", cfg, "--workers", "1",
                        "--out", str(tmp_path / "w1")])
        rc2 = cli.main(["mc", "--config", cfg, "--workers", "2",
                        "--out", str(tmp_path / "w2")])
        assert rc1 == 0 and rc2 == 0
        assert (tmp_path / "w1.stats.json").read_bytes() == \
            (tmp_path / "w2.stats.json").read_bytes()
        assert (tmp_path / "w1.hist.csv").read_bytes() == \
            (tmp_path / "w2.hist.csv").read_bytes()


class TestSweep:
    def test_mixed_values(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "c.yaml", experiment={"runs": 5})
        out = str(tmp_path / "sweep.csv")
        rc = cli.main(["sweep", "--config", cfg, "--values", "15,2",
                       "--out", out])
        assert rc == 0
        rows = read_csv(tmp_path / "sweep.csv")
        assert rows[0] == ["a", "mean_time", "success_rate", "runs"]
        assert rows[1][0] == "15" and rows[1][1].startswith("error:")
        assert rows[1][3] == "0"
        assert rows[2][0] == "2" and rows[2][3] == "5"
        float(rows[2][2])
        printed = capsys.readouterr().out
        assert "a=15 error:" in printed and "a=2 " in printed

    def test_all_invalid_values_fail(self, tmp_path):
        cfg = write_config(tmp_path / "c.yaml", experiment={"runs": 5})
        rc = cli.main(["sweep", "--config", cfg, "--values", "15",
                       "--out", str(tmp_path / "s.csv")])
        assert rc == 1

    def test_empty_values_rejected(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "c.yaml")
        rc = cli.main(["sweep", "--config", cfg, "--values", ",",
                       "--out", str(tmp_path / "s.csv")])
        assert rc == 1
        assert "config error" in capsys.readouterr().err

    def test_matches_plain_batch(self, tmp_path):
        cfg = write_config(tmp_path / "c.yaml",
                           experiment={"runs": 10, "base_seed": 0})
        rc = cli.main(["sweep", "--config", cfg, "--values", "2",
                       "--out", str(tmp_path / "s.csv")])
        assert rc == 0
        rc = cli.main(["mc", "--config", cfg, "--out", str(tmp_path / "mc")])
        assert rc == 0
        sweep_rows = read_csv(tmp_path / "s.csv")
        stats = json.loads((tmp_path / "mc.stats.json").read_text())
        assert float(sweep_rows[1][1]) == stats["mean_time"]
        assert float(sweep_rows[1][2]) == stats["success_rate"]


def test_app_raises_system_exit(tmp_path, monkeypatch):
    cfg = write_config(tmp_path / "c.yaml", sensor={"foo": 1.0})
    monkeypatch.setattr(sys, "argv",
                        ["intersearch", "demo", "--config", cfg])
    with pytest.raises(SystemExit) as exc:
        cli.app()
    assert exc.value.code == 1


def test_histogram_csv_empty_batch_is_header_only():
    from intersearch.montecarlo import BatchStats

    stats = BatchStats(runs=3, success_rate=0.0, wrong_rate=0.0, timeout_rate=1.0,
                       mean_time=None, median_time=None, histogram=(),
                       timeout=100.0, success_times=())
    text = cli.histogram_csv(stats, 50.0)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows == [["bin_low", "bin_high", "count", "density"]]
