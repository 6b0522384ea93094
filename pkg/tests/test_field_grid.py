"""Grid, pump-spectrum and transform tests."""

import math

import numpy as np
import pytest

from opamodes.errors import GridError
from opamodes.field_grid import (FrequencyGrid, PumpSpec, check_time_window,
                                 make_grid, pump_profile, transform)


class TestMakeGrid:
    def test_spacing_arithmetic(self):
        grid = make_grid(512, 2.3562, 2.0)
        assert grid.spacing == pytest.approx(3.90625e-3)
        assert grid.time_window == pytest.approx(2 * math.pi / 3.90625e-3)
        assert grid.time_window == pytest.approx(1608.5, abs=0.1)

    def test_pump_axis_covers_all_sums(self):
        grid = make_grid(64, 2.0, 1.0)
        lo, hi = grid.omegas[0], grid.omegas[-1]
        assert grid.pump_omegas[0] <= 2 * lo
        assert grid.pump_omegas[-1] >= 2 * hi
        assert grid.pump_omegas[1] - grid.pump_omegas[0] == pytest.approx(grid.spacing)

    def test_rejects_bad_sizes(self):
        with pytest.raises(GridError):
            make_grid(100, 2.0, 1.0)
        with pytest.raises(GridError):
            make_grid(128, 2.0, -1.0)

    def test_default_production_grid_fits_pump(self):
        grid = make_grid(512, 2.3546, 2.0)
        check_time_window(grid, 24.0, 50.0)  # no exception

    def test_wraparound_guard(self):
        grid = make_grid(64, 2.0, 2.0)
        with pytest.raises(GridError, match="wraparound"):
            check_time_window(grid, 100.0)


class TestPumpSpec:
    def test_validation(self):
        with pytest.raises(GridError):
            PumpSpec(tau_p=-1.0, omega_p=4.7, L_nl=1.0)
        with pytest.raises(GridError):
            PumpSpec(tau_p=24.0, omega_p=4.7, L_nl=0.0)
        with pytest.raises(GridError):
            PumpSpec(tau_p=24.0, omega_p=4.7, L_nl=1.0, L=-2.0)

    def test_infinite_l_nl_allowed(self):
        spec = PumpSpec(tau_p=24.0, omega_p=4.7, L_nl=math.inf)
        assert spec.L_nl == math.inf


class TestPumpProfile:
    def test_peak_and_normalisation(self, bbo, grid128):
        spec = PumpSpec(tau_p=24.0, omega_p=bbo.omega_pump, L_nl=1.0)
        p = pump_profile(spec, grid128)
        peak = grid128.pump_omegas[np.argmax(p)]
        assert peak == pytest.approx(bbo.omega_pump, abs=grid128.spacing)
        assert np.sum(p) * grid128.spacing == pytest.approx(1.0, abs=1e-14)

    def test_time_intensity_fwhm_40fs(self, bbo, grid128):
        """tau_p = 24 fs corresponds to a 40 fs intensity FWHM."""
        spec = PumpSpec(tau_p=24.0, omega_p=bbo.omega_pump, L_nl=1.0)
        p = pump_profile(spec, grid128)
        pump_grid = FrequencyGrid(n_points=2 * grid128.n_points,
                                  center=2 * grid128.center,
                                  spacing=grid128.spacing)
        envelope = np.abs(transform(p.astype(complex), "to_time", pump_grid)) ** 2
        envelope = np.fft.fftshift(envelope)
        t = pump_grid.times - pump_grid.time_window / 2
        # Gaussian shape: FWHM from the integration-based rms avoids the
        # sample-quantisation of threshold crossings
        rms = math.sqrt(float(np.sum(t**2 * envelope) / np.sum(envelope)))
        fwhm = 2 * math.sqrt(2 * math.log(2)) * rms
        assert fwhm == pytest.approx(2 * math.sqrt(math.log(2)) * 24.0, rel=1e-3)

    def test_fourier_scaling(self, bbo, grid128):
        """Doubling tau_p halves the spectral RMS width."""
        def rms(tau):
            spec = PumpSpec(tau_p=tau, omega_p=bbo.omega_pump, L_nl=1.0)
            p = pump_profile(spec, grid128)
            mu = grid128.pump_omegas - bbo.omega_pump
            return math.sqrt(np.sum(mu**2 * p) * grid128.spacing)

        assert rms(12.0) == pytest.approx(2 * rms(24.0), rel=1e-6)

    def test_mass_cut_guard(self, bbo):
        grid = make_grid(64, bbo.omega_pump / 2, 0.05)
        spec = PumpSpec(tau_p=24.0, omega_p=bbo.omega_pump, L_nl=1.0)
        with pytest.raises(GridError, match="mass"):
            pump_profile(spec, grid)

    def test_monochromatic_limit(self, bbo, grid128):
        spec = PumpSpec(tau_p=math.inf, omega_p=bbo.omega_pump, L_nl=1.0)
        p = pump_profile(spec, grid128)
        assert np.count_nonzero(p) == 1
        assert np.sum(p) * grid128.spacing == pytest.approx(1.0)

    def test_chirp_hook_gives_complex_profile(self, bbo, grid128):
        spec = PumpSpec(tau_p=24.0, omega_p=bbo.omega_pump, L_nl=1.0, chirp=300.0)
        p = pump_profile(spec, grid128)
        assert np.iscomplexobj(p)
        assert np.sum(np.abs(p)) * grid128.spacing == pytest.approx(1.0, abs=1e-12)


class TestTransform:
    def test_round_trip(self, grid128):
        rng = np.random.default_rng(11)
        f = rng.normal(size=128) + 1j * rng.normal(size=128)
        back = transform(transform(f, "to_time", grid128), "to_frequency", grid128)
        assert np.max(np.abs(back - f)) / np.max(np.abs(f)) < 1e-12

    def test_parseval(self, grid128):
        rng = np.random.default_rng(12)
        f = rng.normal(size=128) + 1j * rng.normal(size=128)
        ft = transform(f, "to_time", grid128)
        dt = grid128.time_window / grid128.n_points
        lhs = np.sum(np.abs(f) ** 2) * grid128.spacing
        rhs = np.sum(np.abs(ft) ** 2) * dt
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_gaussian_width_maps_to_inverse(self, grid128):
        """A Gaussian of spectral RMS sigma has temporal RMS 1/sigma."""
        sigma = 0.05
        f = np.exp(-grid128.offsets**2 / (2 * sigma**2)).astype(complex)
        ft = np.fft.fftshift(transform(f, "to_time", grid128))
        t = grid128.times - grid128.time_window / 2
        w = np.abs(ft) ** 2
        rms_t = math.sqrt(float(np.sum(t**2 * w) / np.sum(w)))
        w_om = np.abs(f) ** 2
        rms_om = math.sqrt(float(np.sum(grid128.offsets**2 * w_om) / np.sum(w_om)))
        # Gaussian pair: amplitude widths sigma and 1/sigma, so the
        # intensity rms product is exactly 1/2
        assert rms_t * rms_om == pytest.approx(0.5, rel=1e-6)
        assert rms_t == pytest.approx(1.0 / (sigma * math.sqrt(2)), rel=1e-6)

    def test_length_mismatch(self, grid128):
        with pytest.raises(GridError):
            transform(np.zeros(64, dtype=complex), "to_time", grid128)
