"""End-to-end CLI tests on purposely small grids."""

import json
import math

import numpy as np
import pytest

from opamodes.cli import EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_INVARIANT, main

SMALL = {
    "n_points": 64,
    "span_rad_fs": 1.6,
    "L_nl_mm": [50.0, 0.5],
    "fig8_L_nl_mm": 0.5,
    "n_steps": 60,
    "n_modes_report": 8,
    "tau_lo_fs": [10.0, 18.0, 30.0],
    "fig8_tau_lo_fs": [15.0, 30.0],
    "figures": False,
}


def write_config(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


@pytest.fixture(scope="module")
def run_all(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("cli")
    cfg = write_config(tmp, SMALL)
    out = tmp / "out"
    assert main(["all", "--config", cfg, "--out", str(out)]) == 0
    return out


def read_csv(path):
    return np.loadtxt(path, delimiter=",", comments=None,
                      skiprows=_header_lines(path), dtype=str)


def _header_lines(path):
    count = 0
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                count += 1
            else:
                return count + 1
    return count


class TestConfig:
    def test_missing_file(self, tmp_path):
        assert main(["dispersion", "--config", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["dispersion", "--config", str(path),
                     "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_unknown_key(self, tmp_path):
        cfg = write_config(tmp_path, {"tau_pump": 3})
        assert main(["dispersion", "--config", cfg,
                     "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_bad_values(self, tmp_path):
        cfg = write_config(tmp_path, {"n_points": 100})
        assert main(["dispersion", "--config", cfg,
                     "--out", str(tmp_path)]) == EXIT_CONFIG
        cfg = write_config(tmp_path, {"L_nl_mm": []}, "c2.json")
        assert main(["dispersion", "--config", cfg,
                     "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_exit_code_mapping(self, tmp_path, monkeypatch):
        """Invariant and convergence failures map to their exit codes."""
        import opamodes.cli as cli
        from opamodes.errors import InstabilityError, SymplecticError

        cfg = write_config(tmp_path, SMALL)

        def boom(ws, out):
            raise SymplecticError("boom")

        monkeypatch.setitem(cli._COMMANDS, "greens", boom)
        assert main(["greens", "--config", cfg,
                     "--out", str(tmp_path)]) == EXIT_INVARIANT

        def stall(ws, out):
            raise InstabilityError("stall")

        monkeypatch.setitem(cli._COMMANDS, "greens", stall)
        assert main(["greens", "--config", cfg,
                     "--out", str(tmp_path)]) == EXIT_CONVERGENCE


class TestDispersionCommand:
    def test_phase_matching_report(self, run_all):
        report = json.loads((run_all / "phase_matching.json").read_text())
        assert report["theta_deg"] == pytest.approx(29.2, abs=0.3)
        assert abs(report["delta_k_degenerate_rad_mm"]) < 1e-6

    def test_vacuum_model_betas(self, tmp_path):
        cfg = dict(SMALL)
        cfg["sellmeier_o"] = [1.0, 0.0, 0.01, 0.0]
        cfg["sellmeier_e"] = [1.0, 0.0, 0.01, 0.0]
        cfg["theta_deg"] = 0.0
        path = write_config(tmp_path, cfg)
        out = tmp_path / "out"
        assert main(["dispersion", "--config", path, "--out", str(out)]) == 0
        rows = np.genfromtxt(out / "betas.csv", delimiter=",", skip_header=3,
                             dtype=None, encoding=None)
        values = {(r[0], r[1]): r[2] for r in rows}
        assert abs(values[("signal", 2)]) < 1e-4


class TestGreensCommand:
    def test_residual_report(self, run_all):
        with open(run_all / "greens_report.csv") as fh:
            lines = [l for l in fh if not l.startswith("#")]
        header = lines[0].strip().split(",")
        assert header[:4] == ["label", "L_nl_mm", "scheme", "n_steps"]
        for line in lines[1:]:
            fields = line.strip().split(",")
            assert float(fields[4]) < 1e-8
            assert float(fields[5]) < 1e-8

    def test_free_propagation_s_zero(self, tmp_path):
        cfg = dict(SMALL)
        cfg["L_nl_mm"] = [1e9]
        cfg["fig8_L_nl_mm"] = 1e9
        path = write_config(tmp_path, cfg)
        out = tmp_path / "out"
        assert main(["greens", "--config", path, "--out", str(out)]) == 0
        raw = np.loadtxt(out / "green_1e09" / "S.csv", delimiter=",", skiprows=3)
        s = raw[:, 1::2] + 1j * raw[:, 2::2]
        assert np.abs(s).max() < 1e-9

    def test_rk4_check_report(self, tmp_path):
        cfg = dict(SMALL)
        cfg.update({"L_nl_mm": [1.0], "fig8_L_nl_mm": 1.0, "rk4_check": True,
                    "n_steps": 1600, "rk4_steps": 1000})
        path = write_config(tmp_path, cfg)
        out = tmp_path / "out"
        assert main(["greens", "--config", path, "--out", str(out)]) == 0
        with open(out / "greens_report.csv") as fh:
            lines = [l for l in fh if not l.startswith("#")]
        header = lines[0].strip().split(",")
        row = lines[1].strip().split(",")
        assert header[-2:] == ["rk4_rel_diff_C", "rk4_rel_diff_S"]
        assert float(row[-1]) < 1e-4
        assert float(row[-2]) < 1e-4


class TestModesCommand:
    def test_conjugacy_report(self, run_all):
        with open(run_all / "conjugacy.csv") as fh:
            lines = [l for l in fh if not l.startswith("#")]
        for line in lines[1:]:
            fields = line.strip().split(",")
            for value in fields[2:7]:
                assert float(value) > 0.999

    def test_fig3_scaling_flat(self, run_all):
        data = np.loadtxt(run_all / "fig3.csv", delimiter=",", skiprows=3)
        strong, weak = data[:, 2], data[:, 1]
        assert np.abs(strong - weak).max() / weak[0] < 0.02

    def test_fig6_monotone_widths_and_phase(self, run_all):
        data = np.loadtxt(run_all / "fig6.csv", delimiter=",", skiprows=3)
        assert data[0, 0] < data[1, 0]  # sorted by pumping strength
        assert data[1, 1] < data[0, 1]  # tau_s falls
        assert data[1, 4] < data[0, 4]  # quadratic phase flattens

    def test_mode_files_written(self, run_all):
        for l_nl in ("50", "0p5"):
            base = run_all / f"modes_{l_nl}"
            for name in ("zetas.csv", "phi.csv", "psi.csv", "meta.json"):
                assert (base / name).exists()


class TestGaussianCommand:
    def test_width_report(self, run_all):
        payload = json.loads((run_all / "gaussian.json").read_text())
        assert 40.0 < payload["inv_delta_fs"] < 80.0
        assert 2.0 < payload["inv_Delta_fs"] < 5.0
        assert 14.0 < payload["tau_s_fs"] < 22.0

    def test_zeta_compare_ratio_logged(self, run_all):
        data = np.loadtxt(run_all / "zeta_compare.csv", delimiter=",",
                          skiprows=3)
        assert data.shape[1] == 4
        assert 0.5 < data[0, 3] < 1.5  # leading-mode ratio is O(1)


class TestHomodyneCommand:
    def test_sweep_schema(self, run_all):
        with open(run_all / "sweep.csv") as fh:
            lines = [l for l in fh if not l.startswith("#")]
        assert lines[0].strip() == ("L_nl_mm,tau_LO_fs,q2_min,q2_max,eta,"
                                    "theta_opt_rad,leakage")
        data = np.loadtxt(run_all / "sweep.csv", delimiter=",", skiprows=3)
        assert data.shape == (6, 7)
        assert np.all(data[:, 2] < 0.25)

    def test_fig_files(self, run_all):
        assert (run_all / "fig7.csv").exists()
        assert (run_all / "fig8.csv").exists()
        assert (run_all / "fig9.csv").exists()
        report = json.loads((run_all / "homodyne_report.json").read_text())
        assert report["oracle_max_abs_diff"] < 1e-10

    def test_vacuum_configuration_degenerate(self, tmp_path):
        cfg = dict(SMALL)
        cfg.update({"L_nl_mm": [1e9], "fig8_L_nl_mm": 1e9,
                    "tau_lo_fs": [15.0]})
        path = write_config(tmp_path, cfg)
        out = tmp_path / "out"
        assert main(["homodyne", "--config", path, "--out", str(out)]) == 0
        data = np.loadtxt(out / "sweep.csv", delimiter=",", skiprows=3)
        assert math.isnan(float(np.atleast_2d(data)[0, 4]))


class TestDeterminism:
    def test_byte_identical_reruns(self, tmp_path):
        cfg = write_config(tmp_path, SMALL)
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        assert main(["all", "--config", cfg, "--out", str(out1)]) == 0
        assert main(["all", "--config", cfg, "--out", str(out2)]) == 0
        names = sorted(p.name for p in out1.iterdir() if p.suffix == ".csv")
        assert names
        for name in names:
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name

    def test_figure_rendering(self, tmp_path):
        cfg_payload = dict(SMALL)
        cfg_payload["figures"] = True
        cfg = write_config(tmp_path, cfg_payload)
        out = tmp_path / "out"
        assert main(["all", "--config", cfg, "--out", str(out)]) == 0
        for name in ("fig3.png", "fig4.png", "fig5.png", "fig6.png",
                     "fig7.png", "fig8.png", "fig9.png"):
            assert (out / name).stat().st_size > 1000
