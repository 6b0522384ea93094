"""Takagi factorisation of complex symmetric matrices.

A complex symmetric M factors as M = Q diag(s) Q^T with Q unitary and
s >= 0.  The factorisation is computed through the real symmetric
representation of the antilinear map x -> M conj(x),

    G = [[Re M, Im M], [Im M, -Re M]],

whose spectrum comes in +/- pairs: an eigenvector (a; b) of eigenvalue
s > 0 yields the Takagi vector q = a + i b, and multiplying q by i maps it
to the -s eigenspace, which keeps the positive-branch vectors complex
orthonormal automatically.

That pairing degrades once 2s approaches the eigensolver's resolution:
the +s and -s eigenspaces then mix and the extracted vectors lose complex
orthonormality.  Singular values below a safety floor are therefore
handled separately: their joint subspace (exactly closed under
multiplication by i) is re-orthonormalised as a complex space and the
map's restriction to it, again complex symmetric, is factored
recursively.  Each level divides the scale by the floor ratio, so the
recursion is at most a few levels deep.

This single routine backs both the degenerate-block rotation of the
Bloch-Messiah reduction and the Schmidt decomposition of the two-photon
spectrum.
"""

from __future__ import annotations

import numpy as np

#: singular values below this fraction of the largest are re-paired
#: explicitly instead of trusting the +/- eigenspace split
_SAFE_RATIO = 1e-5


def takagi(m: np.ndarray, symmetry_rtol: float = 1e-10):
    """Factor a complex symmetric matrix as M = Q diag(values) Q^T.

    Parameters
    ----------
    m : ndarray
        Square complex symmetric matrix.
    symmetry_rtol : float
        Largest tolerated relative asymmetry ||M - M^T|| / ||M||.

    Returns
    -------
    values : ndarray
        Singular values of ``m``, descending, >= 0.
    q : ndarray
        Unitary matrix whose columns are the paired Takagi vectors.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    scale = np.linalg.norm(m)
    if scale > 0 and np.linalg.norm(m - m.T) > symmetry_rtol * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    m = 0.5 * (m + m.T)
    values, q = _takagi_recursive(m)
    order = np.argsort(values, kind="stable")[::-1]
    return values[order], q[:, order]


def _takagi_recursive(m: np.ndarray):
    n = m.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=complex)

    re, im = np.ascontiguousarray(m.real), np.ascontiguousarray(m.imag)
    g = np.block([[re, im], [im, -re]])
    eigvals, eigvecs = np.linalg.eigh(g)
    order = np.argsort(eigvals)[::-1]
    eigvals, eigvecs = eigvals[order], eigvecs[:, order]

    top = eigvals[0] if eigvals.size else 0.0
    floor = max(_SAFE_RATIO * top, 64 * np.finfo(float).eps * max(top, 1e-300))

    safe = np.nonzero(eigvals > floor)[0]
    values = list(eigvals[safe])
    columns = [eigvecs[:n, i] + 1j * eigvecs[n:, i] for i in safe]
    n_rest = n - len(values)
    if n_rest == 0:
        return np.asarray(values), np.column_stack(columns)

    # the remaining complex subspace: real span of all |eig| <= floor
    # eigenvectors, mapped to C^n and re-orthonormalised exactly
    rest = np.abs(eigvals) <= floor
    cands = eigvecs[:n, rest] + 1j * eigvecs[n:, rest]
    if columns:
        q_pos = np.column_stack(columns)
        cands = cands - q_pos @ (q_pos.conj().T @ cands)
    u, s, _ = np.linalg.svd(cands, full_matrices=False)
    if s.shape[0] < n_rest or s[n_rest - 1] < 1e-7:
        raise ValueError("failed to pair the small-value subspace")
    basis = u[:, :n_rest]

    sub = basis.conj().T @ m @ basis.conj()
    if np.linalg.norm(sub) <= 64 * np.finfo(float).eps * max(top, 1e-300) * n:
        sub_values = np.zeros(n_rest)
        sub_q = np.eye(n_rest, dtype=complex)
    else:
        sub_values, sub_q = _takagi_recursive(0.5 * (sub + sub.T))
    values.extend(sub_values)
    columns.append(basis @ sub_q)
    return np.asarray(values), np.column_stack(columns)
