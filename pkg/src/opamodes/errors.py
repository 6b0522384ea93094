"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit with 2,
numerical-invariant violations with 3, and convergence/stability failures
with 4.
"""


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


class DomainError(ValueError):
    """Frequency or wavelength outside the supported material window."""


class PhaseMatchingError(ValueError):
    """No propagation angle can phase-match the requested wavelengths."""


class GridError(ValueError):
    """Invalid grid construction or a grid too small for its contents."""


class FrameError(RuntimeError):
    """Lab/moving reference-frame tags were mixed or a frame change reapplied."""


class InstabilityError(RuntimeError):
    """Field norm grew beyond the physical gain bound; step size too coarse."""


class ConvergenceError(RuntimeError):
    """An iterative computation failed to reach its target accuracy."""


class SymplecticError(RuntimeError):
    """A Green-function pair violates the Bogoliubov consistency relations."""


class DegeneracyError(RuntimeError):
    """Degenerate-block resolution failed during mode extraction.

    Carries the offending index block so callers can inspect it.
    """

    def __init__(self, message, block=None, residual=None):
        super().__init__(message)
        self.block = block
        self.residual = residual


class FitError(RuntimeError):
    """A least-squares profile fit did not describe the data."""
