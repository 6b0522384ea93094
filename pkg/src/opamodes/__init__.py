"""Squeezing-mode analysis of a pulsed single-pass optical parametric amplifier.

The package propagates the classical analogue of the parametric
interaction through a type-I BBO waveguide, assembles the Bogoliubov
Green-function pair of the amplifier, reduces it to independent squeezing
modes, and predicts homodyne-detected quadrature noise for arbitrary
local-oscillator pulses.
"""

__version__ = "0.1.0"

from .dispersion import (
    DispersionModel,
    bbo_model,
    beta,
    find_phase_matching_angle,
    phase_mismatch,
    phase_mismatch_quadratic,
    refractive_index,
    vacuum_model,
    wavevector,
)
from .field_grid import FrequencyGrid, PumpSpec, make_grid, pump_profile, transform
from .propagator import (
    GreenPair,
    compute_green,
    propagate_field,
    symplectic_residuals,
    to_lab_frame,
    to_moving_frame,
)
from .decomposition import (
    ModeDecomposition,
    bloch_messiah,
    fit_hermite_width,
    total_photons,
    verify_conjugacy,
    zeta_scaling_table,
)
from .perturbative import (
    GaussianModel,
    analytic_zetas,
    biphoton_from_green,
    first_order_S,
    gaussian_params,
    hermite_mode,
    schmidt_decompose,
)
from .homodyne import (
    HomodyneReport,
    LocalOscillator,
    efficiency,
    gaussian_lo,
    homodyne_report,
    lo_decompose,
    lo_sweep,
    min_max_noise,
    quadrature_noise,
    quadrature_noise_from_green,
)

__all__ = [name for name in dir() if not name.startswith("_")]
