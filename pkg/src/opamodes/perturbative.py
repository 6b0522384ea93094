"""First-order and Gaussian analytic models of the weak-pumping regime.

To first order in L/L_nl the amplifier's anomalous Green function is

    S(w, w') = (L/L_nl) p(w + w') exp(i [k(w) - k(w')] L/2) sinc(L dk / 2)

with dk the exact phase mismatch.  Replacing the sinc by matched Gaussians
along the two principal axes w + w' = w_p and w = w' yields a Gaussian
kernel whose Schmidt reduction is closed form: the squeezing parameters
form a geometric sequence and the modes are Hermite-Gauss functions of a
single characteristic time tau_s = sqrt(2 / (delta Delta)).

The two-photon spectral amplitude of the weak-pump output is the same
kernel up to a propagation phase, Psi(w, w') = S(w, w') exp(i k(w') L);
its Takagi (Schmidt) modes coincide with the squeezing modes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .decomposition import _hermite_profile
from .dispersion import PUMP, SIGNAL, DispersionModel, beta, wavevector
from .errors import DomainError
from .field_grid import FrequencyGrid, PumpSpec, pump_profile
from .linalg import takagi
from .propagator import LAB, MOVING


@dataclass(frozen=True)
class GaussianModel:
    """Parameters of the Gaussian approximation to the first-order kernel.

    Attributes
    ----------
    delta : float
        Spectral correlation width of a photon pair, rad/fs.
    Delta : float
        Phase-matching bandwidth, rad/fs.
    N : float
        Mean photons per pulse.
    r : float
        Mode-spread parameter, ln(Delta/delta)/2.
    tau_s : float
        Characteristic mode duration sqrt(2/(delta Delta)), fs.
    """

    delta: float
    Delta: float
    N: float
    r: float
    tau_s: float


def _frame_wavevector(model, omegas, L, frame):
    """Signal wavevector in the requested frame (moving strips b0 + b1 dw)."""
    k = wavevector(model, omegas, SIGNAL, check_window=False)
    if frame == LAB:
        return k
    if frame == MOVING:
        w_half = model.omega_pump / 2.0
        b0 = float(wavevector(model, w_half, SIGNAL))
        b1 = beta(model, SIGNAL, 1)
        return k - b0 - b1 * (omegas - w_half)
    raise ValueError(f"unknown frame {frame!r}")


def first_order_S(spec: PumpSpec, model: DispersionModel, grid: FrequencyGrid,
                  frame: str = LAB) -> np.ndarray:
    """First-order anomalous Green function on the grid, d omega weighted.

    Valid for L/L_nl << 1; a warning is emitted above 0.1.
    """
    ratio = spec.L / spec.L_nl if math.isfinite(spec.L_nl) else 0.0
    if ratio > 0.1:
        warnings.warn(
            f"first-order kernel requested at L/L_nl = {ratio:.2f}; "
            "accuracy degrades beyond 0.1", stacklevel=2,
        )
    n = grid.n_points
    p = pump_profile(spec, grid)
    k_sig = wavevector(model, grid.omegas, SIGNAL, check_window=False)
    k_pump = wavevector(model, grid.pump_omegas, PUMP, check_window=False)
    idx = np.add.outer(np.arange(n), np.arange(n))
    dk = k_pump[idx] - k_sig[:, None] - k_sig[None, :]
    k_frame = _frame_wavevector(model, grid.omegas, spec.L, frame)
    phase = np.exp(0.5j * spec.L * (k_frame[:, None] - k_frame[None, :]))
    return ratio * p[idx] * phase * np.sinc(0.5 * spec.L * dk / np.pi) * grid.spacing


def gaussian_params(spec: PumpSpec, model: DispersionModel) -> GaussianModel:
    """Fit the Gaussian kernel widths from the dispersion coefficients.

    1/delta^2 = tau_p^2 + (L^2/10)(b1 - b1p)^2 comes from the pump envelope
    and the group-velocity mismatch; 1/Delta^2 = L b2 / 12 from the signal
    group-velocity dispersion; N = (L/2 L_nl)^2 tau_p^2 delta Delta.
    """
    b1 = beta(model, SIGNAL, 1)
    b1p = beta(model, PUMP, 1)
    b2 = beta(model, SIGNAL, 2)
    if b2 <= 0:
        raise DomainError(
            f"signal group-velocity dispersion must be positive for the "
            f"Gaussian model, got {b2:.3f} fs^2/mm"
        )
    inv_delta2 = spec.tau_p**2 + spec.L**2 / 10.0 * (b1 - b1p) ** 2
    delta = 1.0 / math.sqrt(inv_delta2)
    big_delta = 1.0 / math.sqrt(spec.L * b2 / 12.0)
    ratio = spec.L / spec.L_nl if math.isfinite(spec.L_nl) else 0.0
    n_photons = ratio**2 / 4.0 * spec.tau_p**2 * delta * big_delta
    r = 0.5 * math.log(big_delta / delta)
    tau_s = math.sqrt(2.0 / (delta * big_delta))
    return GaussianModel(delta=delta, Delta=big_delta, N=n_photons, r=r, tau_s=tau_s)


def analytic_zetas(gm: GaussianModel, n_max: int) -> np.ndarray:
    """Geometric squeezing-parameter sequence sqrt(N) tanh^n(r) / cosh(r)."""
    n = np.arange(n_max)
    return math.sqrt(gm.N) / math.cosh(gm.r) * np.tanh(gm.r) ** n


def gaussian_kernel(gm: GaussianModel, spec: PumpSpec, model: DispersionModel,
                    grid: FrequencyGrid, frame: str = LAB) -> np.ndarray:
    """The Gaussian stand-in for the first-order kernel, d omega weighted."""
    nu = grid.offsets + (grid.center - model.omega_pump / 2.0)
    u = np.add.outer(nu, nu)
    v = np.subtract.outer(nu, nu)
    amp = math.sqrt(2.0 * gm.N / (math.pi * gm.delta * gm.Delta))
    envelope = np.exp(-(u**2) / (2 * gm.delta**2) - v**2 / (2 * gm.Delta**2))
    k_frame = _frame_wavevector(model, grid.omegas, spec.L, frame)
    phase = np.exp(0.5j * spec.L * (k_frame[:, None] - k_frame[None, :]))
    return amp * envelope * phase * grid.spacing


def hermite_mode(n: int, gm: GaussianModel, model: DispersionModel, L: float,
                 grid: FrequencyGrid, side: str = "output",
                 frame: str = MOVING) -> np.ndarray:
    """Hermite-Gauss squeezing mode of order ``n``, normalised on the grid.

    Output modes carry the phase +k(w) L/2 acquired over the second half of
    the crystal, input modes the opposite sign; in the moving frame the
    group-velocity part of that phase is stripped.
    """
    if n > 20:
        raise ValueError("Hermite-Gauss orders above 20 are not supported")
    nu = grid.offsets + (grid.center - model.omega_pump / 2.0)
    profile = _hermite_profile(n, nu * gm.tau_s)
    k_frame = _frame_wavevector(model, grid.omegas, L, frame)
    sign = {"output": 1.0, "input": -1.0}[side]
    mode = profile * np.exp(sign * 0.5j * k_frame * L)
    return mode / np.sqrt(np.sum(np.abs(mode) ** 2) * grid.spacing)


def biphoton_from_green(s_matrix: np.ndarray, model: DispersionModel,
                        grid: FrequencyGrid, L: float) -> np.ndarray:
    """Two-photon spectral amplitude from a lab-frame weak-pump S matrix.

    Psi(w, w') = S(w, w') exp(i k(w') L); the extra column phase undoes the
    input-side propagation so Psi is symmetric for a real pump.
    """
    k_sig = wavevector(model, grid.omegas, SIGNAL, check_window=False)
    return np.asarray(s_matrix) * np.exp(1j * k_sig * L)[None, :]


def schmidt_decompose(psi_matrix: np.ndarray, grid: FrequencyGrid):
    """Takagi (Schmidt) reduction of a symmetric two-photon amplitude.

    Returns the descending coefficient vector and the mode matrix with one
    continuum-normalised mode per column.  Raises ``ValueError`` when the
    input is not symmetric to within 1e-6.
    """
    coeffs, q = takagi(np.asarray(psi_matrix), symmetry_rtol=1e-6)
    return coeffs, q / np.sqrt(grid.spacing)
