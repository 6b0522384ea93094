"""Takagi-factorisation tests: the one audited routine used by both the
mode extraction and the two-photon Schmidt reduction."""

import numpy as np
import pytest

from opamodes.linalg import takagi


def reconstruct(values, q):
    return (q * values[None, :]) @ q.T


def unitarity(q):
    return np.linalg.norm(q.conj().T @ q - np.eye(q.shape[0]))


class TestTakagi:
    @pytest.mark.parametrize("n", [1, 2, 5, 16, 33])
    def test_random_symmetric(self, n):
        rng = np.random.default_rng(n)
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        a = a + a.T
        values, q = takagi(a)
        assert np.linalg.norm(reconstruct(values, q) - a) < 1e-11 * max(1, np.linalg.norm(a))
        assert unitarity(q) < 1e-12
        assert np.all(values >= 0)
        assert np.all(np.diff(values) <= 1e-12)
        np.testing.assert_allclose(values, np.linalg.svd(a, compute_uv=False),
                                   atol=1e-10)

    def test_real_with_negative_eigenvalues(self):
        """Negative real eigenvalues become positive values with complex vectors."""
        rng = np.random.default_rng(5)
        a = rng.normal(size=(8, 8))
        a = a + a.T
        values, q = takagi(a)
        assert np.linalg.norm(reconstruct(values, q) - a) < 1e-12 * np.linalg.norm(a)
        np.testing.assert_allclose(np.sort(values),
                                   np.sort(np.abs(np.linalg.eigvalsh(a))),
                                   rtol=1e-10)

    def test_degenerate_values(self):
        rng = np.random.default_rng(9)
        u, _ = np.linalg.qr(rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
        d = np.array([2.0, 2.0, 2.0, 1.0, 1.0, 0.5])
        a = (u * d[None, :]) @ u.T
        values, q = takagi(a)
        np.testing.assert_allclose(values, d, atol=1e-12)
        assert np.linalg.norm(reconstruct(values, q) - a) < 1e-12
        assert unitarity(q) < 1e-13

    def test_graded_tiny_and_zero_values(self):
        """Values spanning 13 decades and exact zeros keep Q unitary."""
        rng = np.random.default_rng(13)
        u, _ = np.linalg.qr(rng.normal(size=(7, 7)) + 1j * rng.normal(size=(7, 7)))
        d = np.array([3.0, 1.0, 1e-4, 1e-9, 1e-13, 0.0, 0.0])
        a = (u * d[None, :]) @ u.T
        values, q = takagi(a)
        assert unitarity(q) < 1e-10
        assert np.linalg.norm(reconstruct(values, q) - a) < 1e-12
        np.testing.assert_allclose(np.sort(values)[::-1], d, atol=1e-11)

    def test_zero_matrix(self):
        values, q = takagi(np.zeros((4, 4)))
        assert np.allclose(values, 0)
        assert unitarity(q) < 1e-14

    def test_rank_one(self):
        rng = np.random.default_rng(21)
        u = rng.normal(size=5) + 1j * rng.normal(size=5)
        u /= np.linalg.norm(u)
        a = 0.7 * np.outer(u, u)
        values, q = takagi(a)
        assert values[0] == pytest.approx(0.7, rel=1e-12)
        assert abs(np.vdot(q[:, 0], u)) == pytest.approx(1.0, abs=1e-10)

    def test_shape_validation(self):
        with pytest.raises(ValueError, match="square"):
            takagi(np.zeros((3, 4)))

    def test_symmetry_validation(self):
        rng = np.random.default_rng(2)
        a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        with pytest.raises(ValueError, match="symmetric"):
            takagi(a)
