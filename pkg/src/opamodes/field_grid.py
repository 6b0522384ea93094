"""Discrete signal-frequency grid, pump spectrum, and Fourier transforms.

The signal field lives on a uniform grid of ``n_points`` angular
frequencies centred on the degenerate frequency.  Sums of two signal
frequencies index a twice-as-long pump axis with the same spacing, so the
coupling kernel can look up the pump amplitude without interpolation.

``transform`` implements the unitary-with-measure pair

    f~(t) = (1/sqrt(2 pi)) sum f(w) exp(-i w t) dw
    f(w)  = (1/sqrt(2 pi)) sum f~(t) exp(+i w t) dt

with frequencies measured from the grid centre (envelope convention), so
Parseval's identity holds with the dw and dt weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridError

TO_TIME = "to_time"
TO_FREQUENCY = "to_frequency"


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform signal-frequency grid.

    Attributes
    ----------
    n_points : int
        Grid size, a power of two.
    center : float
        Central angular frequency, rad/fs.
    spacing : float
        Bin width d omega, rad/fs.
    """

    n_points: int
    center: float
    spacing: float

    @property
    def span(self) -> float:
        return self.n_points * self.spacing

    @property
    def omegas(self) -> np.ndarray:
        """Absolute angular frequencies, ascending."""
        return self.center + self.offsets

    @property
    def offsets(self) -> np.ndarray:
        """Frequencies relative to the centre, ascending."""
        n = self.n_points
        return (np.arange(n) - n // 2) * self.spacing

    @property
    def time_window(self) -> float:
        """Total time-domain window 2 pi / d omega, fs."""
        return 2.0 * np.pi / self.spacing

    @property
    def times(self) -> np.ndarray:
        """Time samples of ``transform(..., "to_time")``, fs (wraps at the window)."""
        return np.arange(self.n_points) * (self.time_window / self.n_points)

    @property
    def pump_offsets(self) -> np.ndarray:
        """Offsets of the pump axis relative to 2*center; length 2*n_points."""
        n = self.n_points
        return (np.arange(2 * n) - n) * self.spacing

    @property
    def pump_omegas(self) -> np.ndarray:
        """Absolute pump-axis frequencies covering all sums of two grid points."""
        return 2.0 * self.center + self.pump_offsets


def make_grid(n_points: int, center: float, span: float) -> FrequencyGrid:
    """Create a grid of ``n_points`` bins covering ``span`` rad/fs around ``center``."""
    if n_points < 2 or (n_points & (n_points - 1)) != 0:
        raise GridError(f"n_points must be a power of two >= 2, got {n_points}")
    if span <= 0:
        raise GridError(f"span must be positive, got {span}")
    return FrequencyGrid(n_points=n_points, center=center, spacing=span / n_points)


def check_time_window(grid: FrequencyGrid, *durations: float) -> None:
    """Require the time window to exceed four times every pulse duration given.

    Non-finite durations (monochromatic limit) are exempt.
    """
    finite = [d for d in durations if math.isfinite(d)]
    if not finite:
        return
    need = 4.0 * max(finite)
    if grid.time_window <= need:
        raise GridError(
            f"time window {grid.time_window:.1f} fs must exceed {need:.1f} fs "
            "to avoid wraparound"
        )


@dataclass(frozen=True)
class PumpSpec:
    """Gaussian pump pulse and interaction-strength parameters.

    Attributes
    ----------
    tau_p : float
        Gaussian amplitude duration, fs (intensity FWHM = 2 sqrt(ln 2) tau_p).
        ``inf`` selects a monochromatic pump, the single-frequency
        calibration limit.
    omega_p : float
        Pump central frequency, rad/fs.
    L_nl : float
        Nonlinear length, mm; 1/L_nl is the pumping strength.  May be inf.
    L : float
        Crystal length, mm.
    chirp : float
        Quadratic spectral-phase coefficient, fs^2.  Test hook only: a
        nonzero value breaks the real-pump assumption the mode pairing
        relies on.
    """

    tau_p: float
    omega_p: float
    L_nl: float
    L: float = 1.0
    chirp: float = 0.0

    def __post_init__(self):
        if not self.tau_p > 0:
            raise GridError(f"tau_p must be positive, got {self.tau_p}")
        if not self.L_nl > 0:
            raise GridError(f"L_nl must be positive, got {self.L_nl}")
        if not self.L > 0:
            raise GridError(f"L must be positive, got {self.L}")


def pump_profile(spec: PumpSpec, grid: FrequencyGrid) -> np.ndarray:
    """Normalised pump spectrum p(Omega) on the length-2n pump axis.

    The profile is exp(-tau_p^2 (Omega - omega_p)^2 / 2), normalised so that
    sum p dOmega = 1 on the discrete axis (sum |p| dOmega = 1 when the chirp
    hook is active).  Raises :class:`GridError` when the axis clips more
    than 1e-8 of the analytic mass.  A monochromatic pump (tau_p = inf)
    occupies the single bin nearest omega_p with height 1/dOmega.
    """
    mu = grid.pump_omegas - spec.omega_p
    if math.isinf(spec.tau_p):
        p = np.zeros(mu.shape)
        p[int(np.argmin(np.abs(mu)))] = 1.0 / grid.spacing
        return p
    check_time_window(grid, spec.tau_p)
    p = np.exp(-0.5 * spec.tau_p**2 * mu**2)
    discrete_mass = float(np.sum(p)) * grid.spacing
    analytic_mass = math.sqrt(2.0 * math.pi) / spec.tau_p
    cut = 1.0 - discrete_mass / analytic_mass
    if cut > 1e-8:
        raise GridError(
            f"pump axis clips {cut:.2e} of the spectral mass; widen the span"
        )
    p /= discrete_mass
    if spec.chirp:
        p = p * np.exp(0.5j * spec.chirp * mu**2)
    return p


def transform(field: np.ndarray, direction: str, grid: FrequencyGrid) -> np.ndarray:
    """Unitary discrete Fourier transform between frequency and time envelopes."""
    field = np.asarray(field)
    if field.shape[-1] != grid.n_points:
        raise GridError(
            f"field length {field.shape[-1]} does not match grid size {grid.n_points}"
        )
    if direction == TO_TIME:
        spec = np.fft.ifftshift(field, axes=-1)
        return np.fft.fft(spec, axis=-1) * (grid.spacing / math.sqrt(2.0 * math.pi))
    if direction == TO_FREQUENCY:
        spec = np.fft.ifft(field, axis=-1) * (
            grid.n_points * (grid.time_window / grid.n_points) / math.sqrt(2.0 * math.pi)
        )
        return np.fft.fftshift(spec, axes=-1)
    raise ValueError(f"unknown direction {direction!r}")
