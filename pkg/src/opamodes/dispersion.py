"""Refractive index and dispersion of type-I BBO.

The crystal is negative uniaxial: the pump propagates as an extraordinary
wave at an angle ``theta`` to the optic axis, the signal as an ordinary
wave.  Indices come from the standard published Sellmeier fits

    n_o^2 = 2.7359 + 0.01878 / (lam^2 - 0.01822) - 0.01354 lam^2
    n_e^2 = 2.3753 + 0.01224 / (lam^2 - 0.01667) - 0.01516 lam^2

with ``lam`` in micrometres, valid over roughly 300-1200 nm.

Units used throughout the package: time in fs, length in mm, angular
frequency in rad/fs, wavevector in rad/mm, with c = 2.99792458e-4 mm/fs.
This keeps every matrix entry of the downstream propagation O(1)-O(1e3).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, PhaseMatchingError

#: speed of light in mm/fs
C_MM_FS = 2.99792458e-4
#: speed of light in nm/fs, for wavelength <-> angular frequency conversion
C_NM_FS = C_MM_FS * 1e6

#: published BBO Sellmeier coefficients (A, B, C, D), wavelength in um
BBO_SELLMEIER_O = (2.7359, 0.01878, 0.01822, 0.01354)
BBO_SELLMEIER_E = (2.3753, 0.01224, 0.01667, 0.01516)

#: supported wavelength window, nm
WINDOW_NM = (300.0, 1200.0)

ORDINARY = "ordinary"
EXTRAORDINARY = "extraordinary-at-theta"
SIGNAL = "signal"
PUMP = "pump"

#: default step for finite-difference dispersion coefficients, rad/fs
FD_STEP = 1e-3


@dataclass(frozen=True)
class DispersionModel:
    """Sellmeier coefficients plus the crystal-cut geometry.

    Attributes
    ----------
    sellmeier_o, sellmeier_e : tuple of float
        (A, B, C, D) of n^2 = A + B/(lam^2 - C) - D lam^2, lam in um.
    theta : float
        Angle between propagation axis and optic axis, radians.
    lambda_pump, lambda_signal : float
        Central wavelengths in nm.  The signal is taken at the degenerate
        point, so ``lambda_signal = 2 * lambda_pump`` in normal use.
    """

    sellmeier_o: tuple = BBO_SELLMEIER_O
    sellmeier_e: tuple = BBO_SELLMEIER_E
    theta: float = 0.0
    lambda_pump: float = 400.0
    lambda_signal: float = 800.0

    @property
    def omega_pump(self) -> float:
        """Pump central frequency, rad/fs."""
        return 2.0 * np.pi * C_NM_FS / self.lambda_pump

    @property
    def omega_signal(self) -> float:
        """Signal central frequency, rad/fs."""
        return 2.0 * np.pi * C_NM_FS / self.lambda_signal


def bbo_model(lambda_pump: float = 400.0, lambda_signal: float = 800.0) -> DispersionModel:
    """Build the default BBO model with theta solved for perfect phase matching."""
    base = DispersionModel(lambda_pump=lambda_pump, lambda_signal=lambda_signal)
    return replace(base, theta=find_phase_matching_angle(base))


def vacuum_model() -> DispersionModel:
    """Dispersionless n = 1 model; useful for calibration tests."""
    flat = (1.0, 0.0, 0.01, 0.0)
    return DispersionModel(sellmeier_o=flat, sellmeier_e=flat, theta=0.0)


def wavelength_nm(omega) -> np.ndarray:
    """Vacuum wavelength in nm for angular frequency in rad/fs."""
    return 2.0 * np.pi * C_NM_FS / np.asarray(omega, dtype=float)


def _sellmeier_n2(coeffs, lam_um):
    a, b, c, d = coeffs
    return a + b / (lam_um**2 - c) - d * lam_um**2


def _check_window(omega):
    lam = wavelength_nm(omega)
    lo, hi = WINDOW_NM
    bad = (lam < lo) | (lam > hi)
    if np.any(bad):
        offending = float(np.atleast_1d(lam)[np.atleast_1d(bad)][0])
        raise DomainError(
            f"wavelength {offending:.1f} nm outside supported window "
            f"{lo:.0f}-{hi:.0f} nm"
        )
    return lam


def refractive_index(model: DispersionModel, omega, polarization: str = ORDINARY,
                     check_window: bool = True):
    """Refractive index at angular frequency ``omega`` (rad/fs).

    ``polarization`` is either ``"ordinary"`` or ``"extraordinary-at-theta"``;
    the latter evaluates 1/n^2 = cos^2(theta)/n_o^2 + sin^2(theta)/n_e^2.
    ``check_window=False`` skips the wavelength-window guard; grid-based
    callers use it for far tail bins whose field content is negligible.
    """
    if check_window:
        lam_um = _check_window(omega) * 1e-3
    else:
        lam_um = wavelength_nm(omega) * 1e-3
    n_o2 = _sellmeier_n2(model.sellmeier_o, lam_um)
    if polarization == ORDINARY:
        return np.sqrt(n_o2)
    if polarization == EXTRAORDINARY:
        n_e2 = _sellmeier_n2(model.sellmeier_e, lam_um)
        cos2, sin2 = np.cos(model.theta) ** 2, np.sin(model.theta) ** 2
        return 1.0 / np.sqrt(cos2 / n_o2 + sin2 / n_e2)
    raise ValueError(f"unknown polarization {polarization!r}")


def wavevector(model: DispersionModel, omega, field: str = SIGNAL,
               check_window: bool = True):
    """Wavevector k = n(omega) * omega / c in rad/mm.

    The signal field uses the ordinary index, the pump the extraordinary
    index at the model angle.
    """
    if field == SIGNAL:
        n = refractive_index(model, omega, ORDINARY, check_window=check_window)
    elif field == PUMP:
        n = refractive_index(model, omega, EXTRAORDINARY, check_window=check_window)
    else:
        raise ValueError(f"unknown field {field!r}")
    return n * np.asarray(omega, dtype=float) / C_MM_FS


def beta(model: DispersionModel, field: str, order: int, h: float = FD_STEP) -> float:
    """Dispersion coefficient beta_n = d^n k / d omega^n in fs^n/mm.

    Evaluated at the signal central frequency for ``field="signal"`` and at
    the pump central frequency for ``field="pump"``, by central finite
    differences of step ``h`` with Richardson extrapolation for the second
    and third orders.
    """
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    omega0 = model.omega_signal if field == SIGNAL else model.omega_pump

    def k(w):
        return wavevector(model, w, field)

    def d1(hh):
        return (k(omega0 + hh) - k(omega0 - hh)) / (2 * hh)

    def d2(hh):
        return (k(omega0 + hh) - 2 * k(omega0) + k(omega0 - hh)) / hh**2

    def d3(hh):
        return (
            k(omega0 + 2 * hh) - 2 * k(omega0 + hh) + 2 * k(omega0 - hh) - k(omega0 - 2 * hh)
        ) / (2 * hh**3)

    stencil = {1: d1, 2: d2, 3: d3}[order]
    if order == 1:
        return float(stencil(h))
    # Richardson: both stencils have O(h^2) error
    return float((4 * stencil(h / 2) - stencil(h)) / 3)


@lru_cache(maxsize=32)
def _cached_betas(model: DispersionModel):
    """(beta1, beta1_pump, beta2, beta2_pump) for the quadratic expansion."""
    return (
        beta(model, SIGNAL, 1),
        beta(model, PUMP, 1),
        beta(model, SIGNAL, 2),
        beta(model, PUMP, 2),
    )


def phase_mismatch(model: DispersionModel, omega, omega_prime):
    """Exact phase mismatch k_p(w + w') - k(w) - k(w') in rad/mm."""
    omega = np.asarray(omega, dtype=float)
    omega_prime = np.asarray(omega_prime, dtype=float)
    return (
        wavevector(model, omega + omega_prime, PUMP)
        - wavevector(model, omega, SIGNAL)
        - wavevector(model, omega_prime, SIGNAL)
    )


def phase_mismatch_quadratic(model: DispersionModel, omega, omega_prime):
    """Second-order expansion of the phase mismatch about the central frequencies.

    Uses the group-velocity mismatch and the two group-velocity-dispersion
    coefficients; no higher orders enter.
    """
    b1, b1p, b2, b2p = _cached_betas(model)
    w0 = model.omega_pump / 2.0
    u = np.asarray(omega, dtype=float) + np.asarray(omega_prime, dtype=float) - model.omega_pump
    return (
        (b1p - b1) * u
        - 0.5 * b2 * ((np.asarray(omega) - w0) ** 2 + (np.asarray(omega_prime) - w0) ** 2)
        + 0.5 * b2p * u**2
    )


def find_phase_matching_angle(model: DispersionModel) -> float:
    """Angle theta that matches n(theta, lambda_pump) to n_o(lambda_signal).

    Solved by bracketed root finding to well below 1e-9 rad.  Raises
    :class:`PhaseMatchingError` when the extraordinary index range cannot
    reach the required value.
    """
    target = float(refractive_index(model, model.omega_signal, ORDINARY))

    def gap(theta):
        probe = replace(model, theta=theta)
        return float(refractive_index(probe, model.omega_pump, EXTRAORDINARY)) - target

    lo, hi = 0.0, np.pi / 2
    g_lo, g_hi = gap(lo), gap(hi)
    if g_lo * g_hi > 0:
        raise PhaseMatchingError(
            f"no angle matches n={target:.5f} at {model.lambda_pump:.0f} nm; "
            f"extraordinary index spans [{target + g_hi:.5f}, {target + g_lo:.5f}]"
        )
    return float(brentq(gap, lo, hi, xtol=1e-12, rtol=8.9e-16))
