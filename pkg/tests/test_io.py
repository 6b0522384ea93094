"""Serialisation round-trips and deterministic formatting."""

import numpy as np
import pytest

from opamodes.io import load_green, save_green, save_modes, write_csv


def test_green_round_trip(tmp_path, green_strong):
    save_green(green_strong, tmp_path / "g", {"config_hash": "abc"})
    back = load_green(tmp_path / "g")
    assert np.abs(back.C - green_strong.C).max() < 1e-15
    assert np.abs(back.S - green_strong.S).max() < 1e-15
    assert back.frame == green_strong.frame
    assert back.grid == green_strong.grid
    assert back.spec == green_strong.spec
    assert back.model == green_strong.model
    assert back.residuals == pytest.approx(green_strong.residuals)


def test_csv_header_and_determinism(tmp_path):
    rows = [[0, 0.1, 1.0 / 3.0], [1, float("nan"), 2.0]]
    for name in ("a.csv", "b.csv"):
        write_csv(tmp_path / name, ["n", "x", "y"], rows,
                  {"config_hash": "deadbeef", "version": "0.1.0"})
    a = (tmp_path / "a.csv").read_bytes()
    assert a == (tmp_path / "b.csv").read_bytes()
    text = a.decode()
    assert text.startswith("# config_hash=deadbeef\n# version=0.1.0\n")
    assert "0.3333333333333333" in text  # shortest round-trip repr
    assert "nan" in text


def test_modes_serialisation(tmp_path, modes_strong):
    save_modes(modes_strong, tmp_path / "m", {"config_hash": "x"})
    zetas = np.loadtxt(tmp_path / "m" / "zetas.csv", delimiter=",", skiprows=2)
    assert zetas.shape == (modes_strong.n_modes, 2)
    np.testing.assert_allclose(zetas[:, 1], modes_strong.zetas, rtol=0, atol=0)
    psi = np.loadtxt(tmp_path / "m" / "psi.csv", delimiter=",", skiprows=2)
    recovered = psi[:, 1::2] + 1j * psi[:, 2::2]
    assert np.abs(recovered - modes_strong.psi).max() == 0.0
