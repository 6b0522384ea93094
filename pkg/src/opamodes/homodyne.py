"""Balanced-homodyne quadrature noise for arbitrary local-oscillator pulses.

A local oscillator of unit-normalised spectral amplitude psi_LO defines
the detected mode.  Expanding psi_LO over the output squeezing modes,
psi_LO = sum_n M_n exp(i theta_n) psi_n, the measured quadrature variance
at an added LO phase phi is the weighted sum of independent single-mode
contributions

    <Q^2> = sum_n (M_n^2 / 4) [e^{2 z_n} sin^2(theta_n + phi)
                                + e^{-2 z_n} cos^2(theta_n + phi)]
            + leakage / 4,

with vacuum variance 1/4; LO mass outside the computed mode set sees
vacuum noise, justified because the squeezing of truncated high-order
modes vanishes.  The same observable evaluated directly from the Green
pair (no mode decomposition) serves as an independent cross-check and
fixes all conjugation conventions: an LO equal to one output mode must
reproduce the single-mode law exactly.

Conventions: theta = 0 is the squeezed quadrature; decibel conversion of a
variance is 10 log10(4 <Q^2>).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .decomposition import ModeDecomposition, bloch_messiah
from .dispersion import DispersionModel
from .errors import FrameError, GridError
from .field_grid import FrequencyGrid, PumpSpec, check_time_window
from .perturbative import _frame_wavevector
from .propagator import MOVING, GreenPair, compute_green, to_moving_frame

VACUUM = 0.25


@dataclass(frozen=True)
class LocalOscillator:
    """Unit-normalised LO spectral amplitude with frame provenance."""

    amplitude: np.ndarray
    grid: FrequencyGrid
    frame: str
    label: str = ""


@dataclass(frozen=True)
class HomodyneReport:
    """Decomposition coefficients and extremal quadrature noise for one LO.

    ``eta`` is the mode-match efficiency inferred from the extremal noise;
    ``None`` flags the degenerate vacuum case 0/0.
    """

    M: np.ndarray
    theta: np.ndarray
    leakage: float
    q2_min: float
    q2_max: float
    theta_opt: float
    eta: float | None
    label: str = ""


def gaussian_lo(tau_lo: float, model: DispersionModel, L: float, grid: FrequencyGrid,
                phase_locked: bool = True, frame: str = MOVING,
                quadratic_phase: float = 0.0) -> LocalOscillator:
    """Gaussian spectral-intensity LO of duration ``tau_lo`` fs.

    With ``phase_locked`` the LO carries the phase k(w) L/2 the squeezed
    field acquires over the output half of the crystal (expressed in
    ``frame``); otherwise the spectral phase is flat in that frame.
    ``quadratic_phase`` (fs^2) adds an extra chirp term; test hook.
    """
    if tau_lo <= 0:
        raise GridError(f"tau_lo must be positive, got {tau_lo}")
    check_time_window(grid, tau_lo)
    nu = grid.offsets + (grid.center - model.omega_pump / 2.0)
    amp = np.exp(-0.5 * tau_lo**2 * nu**2).astype(complex)
    if phase_locked:
        amp = amp * np.exp(0.5j * L * _frame_wavevector(model, grid.omegas, L, frame))
    if quadratic_phase:
        amp = amp * np.exp(0.5j * quadratic_phase * nu**2)
    amp /= np.sqrt(np.sum(np.abs(amp) ** 2) * grid.spacing)
    lock = "locked" if phase_locked else "flat"
    return LocalOscillator(amplitude=amp, grid=grid, frame=frame,
                           label=f"gaussian({tau_lo:g} fs, {lock})")


def lo_decompose(lo: LocalOscillator, md: ModeDecomposition, n_top: int = None):
    """Project the LO on the output mode basis.

    Returns (M, theta, leakage) with M_n e^{i theta_n} = <psi_n, psi_LO>
    under the d omega inner product and leakage = 1 - sum M_n^2.
    """
    if lo.grid != md.grid:
        raise GridError("local oscillator and mode basis use different grids")
    if lo.frame != md.frame:
        raise FrameError(
            f"local oscillator frame {lo.frame!r} does not match mode frame "
            f"{md.frame!r}"
        )
    n_top = md.n_modes if n_top is None else min(n_top, md.n_modes)
    coeff = (md.psi[:, :n_top].conj().T @ lo.amplitude) * md.grid.spacing
    m = np.abs(coeff)
    theta = np.angle(coeff)
    leakage = float(max(0.0, 1.0 - np.sum(m**2)))
    return m, theta, leakage


def quadrature_noise(m, theta, zetas, global_phase: float = 0.0,
                     leakage: float = 0.0) -> float:
    """Detected quadrature variance at an added LO phase (vacuum = 1/4)."""
    m = np.asarray(m, dtype=float)
    theta = np.asarray(theta, dtype=float)
    z = np.asarray(zetas, dtype=float)[: m.shape[0]]
    angles = theta + global_phase
    noise = np.sum(
        m**2 / 4.0 * (np.exp(2 * z) * np.sin(angles) ** 2
                      + np.exp(-2 * z) * np.cos(angles) ** 2)
    )
    return float(noise + leakage / 4.0)


def min_max_noise(m, theta, zetas, leakage: float = 0.0):
    """Extremal quadrature noise over the global LO phase, closed form.

    The noise is a + b cos(2 phi) + c sin(2 phi), so with
    w = sum (M_n^2/2) sinh(2 z_n) e^{2 i theta_n} the extrema are
    (A -+ 2|w|)/4 at phi = -arg(w)/2 (minimum).
    """
    m = np.asarray(m, dtype=float)
    z = np.asarray(zetas, dtype=float)[: m.shape[0]]
    theta = np.asarray(theta, dtype=float)
    a = float(np.sum(m**2 * np.cosh(2 * z)) + leakage)
    w = complex(np.sum(m**2 / 2.0 * np.sinh(2 * z) * np.exp(2j * theta)))
    q2_min = (a - 2 * abs(w)) / 4.0
    q2_max = (a + 2 * abs(w)) / 4.0
    theta_opt = -0.5 * np.angle(w) if w != 0 else 0.0
    return q2_min, q2_max, float(theta_opt)


def efficiency(q2_min: float, q2_max: float) -> float | None:
    """Mode-match efficiency from the extremal noise pair.

    eta = (-16 Q+ Q- + 4 Q+ + 4 Q- - 1) / (4 Q+ + 4 Q- - 2) with
    Q+- the extremal variances; ``None`` when the denominator vanishes
    (vacuum, 0/0).
    """
    denom = 4.0 * q2_max + 4.0 * q2_min - 2.0
    if abs(denom) < 1e-12:
        return None
    num = -16.0 * q2_max * q2_min + 4.0 * q2_max + 4.0 * q2_min - 1.0
    return num / denom


def homodyne_report(lo: LocalOscillator, md: ModeDecomposition,
                    n_top: int = None) -> HomodyneReport:
    """Full homodyne prediction for one LO against one mode basis."""
    m, theta, leakage = lo_decompose(lo, md, n_top=n_top)
    q2_min, q2_max, theta_opt = min_max_noise(m, theta, md.zetas, leakage)
    return HomodyneReport(
        M=m, theta=theta, leakage=leakage, q2_min=q2_min, q2_max=q2_max,
        theta_opt=theta_opt, eta=efficiency(q2_min, q2_max), label=lo.label,
    )


def quadrature_noise_from_green(lo: LocalOscillator, gp: GreenPair,
                                global_phase: float = 0.0) -> float:
    """Quadrature variance straight from the Green pair; decomposition-free.

    With g = psi_LO^+ C and h = psi_LO^+ S (d omega weighted),

        <Q^2(phi)> = (|g|^2 + |h|^2 - 2 Re[e^{2 i phi} conj(g . h)]) / 4,

    where g . h is the unconjugated dot product.  The sign convention makes
    an LO equal to psi_n with phi = 0 read the squeezed quadrature.
    """
    if lo.grid != gp.grid:
        raise GridError("local oscillator and Green pair use different grids")
    if lo.frame != gp.frame:
        raise FrameError(
            f"local oscillator frame {lo.frame!r} does not match Green pair "
            f"frame {gp.frame!r}"
        )
    u = lo.amplitude * np.sqrt(gp.grid.spacing)
    g = u.conj() @ gp.C
    h = u.conj() @ gp.S
    cross = np.sum(g * h)
    return float(
        (np.sum(np.abs(g) ** 2) + np.sum(np.abs(h) ** 2)
         - 2.0 * np.real(np.exp(2j * global_phase) * np.conj(cross))) / 4.0
    )


def lo_sweep(tau_values, l_nl_values, spec_template: PumpSpec,
             model: DispersionModel, grid: FrequencyGrid, scheme="split_step",
             n_steps=None, phase_locked: bool = True, n_top: int = None,
             decompositions: dict = None):
    """Homodyne figures of merit over a (L_nl, tau_LO) grid.

    Returns a list of row dicts ordered by (L_nl, tau_LO), CSV-ready.
    ``decompositions`` may carry precomputed ``ModeDecomposition`` objects
    keyed by L_nl to avoid repeated propagation.
    """
    rows = []
    for l_nl in l_nl_values:
        if decompositions is not None and l_nl in decompositions:
            md = decompositions[l_nl]
        else:
            spec = replace(spec_template, L_nl=float(l_nl))
            gp = to_moving_frame(compute_green(spec, model, grid, scheme=scheme,
                                               n_steps=n_steps))
            md = bloch_messiah(gp)
            if decompositions is not None:
                decompositions[l_nl] = md
        for tau in tau_values:
            lo = gaussian_lo(float(tau), model, spec_template.L, grid,
                             phase_locked=phase_locked, frame=md.frame)
            rep = homodyne_report(lo, md, n_top=n_top)
            rows.append({
                "L_nl_mm": float(l_nl),
                "tau_LO_fs": float(tau),
                "q2_min": rep.q2_min,
                "q2_max": rep.q2_max,
                "eta": math.nan if rep.eta is None else rep.eta,
                "theta_opt_rad": rep.theta_opt,
                "leakage": rep.leakage,
            })
    return rows
