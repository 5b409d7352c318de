import json

import numpy as np
import pytest

from stickslip.cli import main


def write_config(path, **overrides):
    cfg = {"v_ref": 1.0}
    cfg.update(overrides)
    path.write_text(json.dumps(cfg), encoding="utf-8")
    return str(path)


def read_kv(path):
    rows = path.read_text().strip().splitlines()
    assert rows[0] == "name,value"
    return dict(line.split(",", 1) for line in rows[1:])


class TestRoots:
    def test_benchmark_values(self, tmp_path):
        cfg = write_config(tmp_path / "c.json")
        assert main(["roots", "--config", cfg, "--out", str(tmp_path)]) == 0
        kv = read_kv(tmp_path / "roots.csv")
        assert float(kv["v_ref1"]) == pytest.approx(0.11, abs=0.005)
        assert float(kv["v_ref2"]) == pytest.approx(1.25, abs=0.005)

    def test_none_rows_under_high_viscosity(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", k_v=10.0)
        assert main(["roots", "--config", cfg, "--out", str(tmp_path)]) == 0
        kv = read_kv(tmp_path / "roots.csv")
        assert kv["v_ref1"] == kv["v_ref2"] == "none"

    def test_malformed_config(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"not_a_key": 3}', encoding="utf-8")
        assert main(["roots", "--config", str(bad), "--out", str(tmp_path)]) == 2

    def test_invalid_number(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"m": -1.0}', encoding="utf-8")
        assert main(["roots", "--config", str(bad), "--out", str(tmp_path)]) == 2

    def test_default_config_optional(self, tmp_path):
        assert main(["roots", "--out", str(tmp_path)]) == 0


class TestSimulate:
    def test_cycle_run(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", v_ref=1.0, v0=6.0, z0=0.0, T=40.0)
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == 0
        kv = read_kv(tmp_path / "cycle_report.csv")
        assert kv["detected"] == "1"
        assert float(kv["period"]) == pytest.approx(5.0, abs=0.5)

    def test_trajectory_format(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", T=0.01, dt=1e-3)
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == 0
        lines = (tmp_path / "trajectory.csv").read_text().strip().splitlines()
        assert lines[0] == "t,v,z,mode"
        assert len(lines) == 12  # header + 11 samples
        t, v, z, mode = lines[1].split(",")
        assert mode in ("0", "1")

    def test_single_step_horizon(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", T=0.01, dt=1e-3)
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == 0

    def test_determinism(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", T=5.0, seed=7)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["simulate", "--config", cfg, "--out", str(out1)]) == 0
        assert main(["simulate", "--config", cfg, "--out", str(out2)]) == 0
        assert (out1 / "trajectory.csv").read_bytes() == (out2 / "trajectory.csv").read_bytes()
        assert (out1 / "cycle_report.csv").read_bytes() == (out2 / "cycle_report.csv").read_bytes()


class TestCertify:
    def test_exit_codes_precondition(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", v_ref=1.0)
        assert main(["certify", "--which", "basin", "--config", cfg, "--out", str(tmp_path)]) == 4

    def test_exit_code_failure_to_certify(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", v_ref=3.0)
        assert main(["certify", "--which", "gas", "--config", cfg, "--out", str(tmp_path)]) == 3

    def test_basin_roundtrip(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", v_ref=1.45)
        assert main(["certify", "--which", "basin", "--config", cfg, "--out", str(tmp_path)]) == 0
        kv = read_kv(tmp_path / "certificate_basin.csv")
        P = np.array(
            [[float(kv["p11"]), float(kv["p12"])], [float(kv["p12"]), float(kv["p22"])]]
        )
        pts = np.loadtxt(tmp_path / "ellipse_basin.csv", delimiter=",", skiprows=1)
        assert pts.shape == (256, 2)
        vals = np.einsum("ij,jk,ik->i", pts, P, pts)
        assert np.max(np.abs(vals - 1.0)) <= 1e-9

    def test_gas_certificate_content(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", v_ref=10.0)
        assert main(["certify", "--which", "gas", "--config", cfg, "--out", str(tmp_path)]) == 0
        kv = read_kv(tmp_path / "certificate_gas.csv")
        assert float(kv["inclusion_margin"]) >= -1e-10
        rows = (tmp_path / "ellipse_gas.csv").read_text().strip().splitlines()
        assert rows[0] == "set,eps1,eps2"
        sets = {r.split(",")[0] for r in rows[1:]}
        assert sets == {"attractor", "basin"}

    def test_attractor_determinism(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", v_ref=1.0, seed=3)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["certify", "--which", "attractor", "--config", cfg, "--out", str(out1)]) == 0
        assert main(["certify", "--which", "attractor", "--config", cfg, "--out", str(out2)]) == 0
        for name in ("certificate_attractor.csv", "ellipse_attractor.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


class TestSweep:
    def test_small_grid(self, tmp_path):
        # grid below the unstable band avoids the expensive threshold search
        cfg = write_config(tmp_path / "c.json", v_ref="0.05:0.09:2")
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 0
        lines = (tmp_path / "sweep.csv").read_text().strip().splitlines()
        assert lines[0] == "v_ref,regime,basin_eta,attractor_eta,gas"
        assert len(lines) == 3
        for line in lines[1:]:
            assert line.split(",")[1] == "basin-only"

    def test_empty_grid_rejected(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", v_ref="2.0:1.0:0")
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 2

    def test_sweep_requires_range(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", v_ref=1.0)
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 2
