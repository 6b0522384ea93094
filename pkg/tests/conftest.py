"""Shared fixtures.

Development-scale fixtures use a 128-point grid so individual module tests
stay fast; the production-scale workspace used by the acceptance suite is
built lazily and cached for the whole session.
"""

import pytest

from opamodes.decomposition import bloch_messiah
from opamodes.dispersion import bbo_model, vacuum_model
from opamodes.field_grid import PumpSpec, make_grid
from opamodes.propagator import compute_green, to_moving_frame


@pytest.fixture(scope="session")
def bbo():
    return bbo_model()


@pytest.fixture(scope="session")
def vacuum():
    return vacuum_model()


@pytest.fixture(scope="session")
def grid128(bbo):
    return make_grid(128, bbo.omega_pump / 2.0, 2.0)


@pytest.fixture(scope="session")
def spec_weak(bbo):
    return PumpSpec(tau_p=24.0, omega_p=bbo.omega_pump, L_nl=100.0, L=1.0)


@pytest.fixture(scope="session")
def spec_strong(bbo):
    return PumpSpec(tau_p=24.0, omega_p=bbo.omega_pump, L_nl=0.5, L=1.0)


@pytest.fixture(scope="session")
def green_weak(spec_weak, bbo, grid128):
    return compute_green(spec_weak, bbo, grid128, n_steps=200)


@pytest.fixture(scope="session")
def green_strong(spec_strong, bbo, grid128):
    return compute_green(spec_strong, bbo, grid128, n_steps=200)


@pytest.fixture(scope="session")
def modes_weak(green_weak):
    return bloch_messiah(to_moving_frame(green_weak))


@pytest.fixture(scope="session")
def modes_strong(green_strong):
    return bloch_messiah(to_moving_frame(green_strong))


class ProductionWorkspace:
    """Paper-defaults runs at n = 512, computed once on first use."""

    N_POINTS = 512
    SPAN = 2.0
    TAU_P = 24.0
    L = 1.0

    def __init__(self):
        self.model = bbo_model()
        self.grid = make_grid(self.N_POINTS, self.model.omega_pump / 2.0, self.SPAN)
        self._greens = {}
        self._modes = {}
        self._widths = {}

    def spec(self, l_nl):
        return PumpSpec(tau_p=self.TAU_P, omega_p=self.model.omega_pump,
                        L_nl=float(l_nl), L=self.L)

    def green(self, l_nl):
        if l_nl not in self._greens:
            self._greens[l_nl] = compute_green(self.spec(l_nl), self.model, self.grid)
        return self._greens[l_nl]

    def modes(self, l_nl):
        if l_nl not in self._modes:
            self._modes[l_nl] = bloch_messiah(to_moving_frame(self.green(l_nl)))
        return self._modes[l_nl]

    def fitted_width(self, l_nl, n=0):
        from opamodes.decomposition import fit_hermite_width

        key = (l_nl, n)
        if key not in self._widths:
            self._widths[key] = fit_hermite_width(self.modes(l_nl).psi[:, n],
                                                  n, self.grid)
        return self._widths[key]


@pytest.fixture(scope="session")
def prod():
    return ProductionWorkspace()
