"""Static figure rendering for the report path.

Each function turns one already-computed table into a PNG next to its CSV.
Rendering is intentionally plain; the CSVs stay the authoritative output.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import numpy as np
import matplotlib.pyplot as plt


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_zeta_bars(path, modes, columns, analytic=None):
    """Rescaled squeezing parameters per mode, one bar group per pumping strength.

    ``columns`` maps a label to a vector of L_nl * zeta_n values.
    """
    fig, ax = plt.subplots(figsize=(6.5, 4))
    n_sets = len(columns) + (analytic is not None)
    width = 0.8 / max(n_sets, 1)
    for i, (label, vals) in enumerate(columns.items()):
        ax.bar(np.asarray(modes) + i * width, vals, width, label=label)
    if analytic is not None:
        ax.bar(np.asarray(modes) + (n_sets - 1) * width, analytic, width,
               color="k", label="gaussian model")
    ax.set_yscale("log")
    ax.set_xlabel("mode number n")
    ax.set_ylabel(r"$L_{nl}\,\zeta_n$ (mm)")
    ax.legend(fontsize=8)
    _save(fig, path)


def render_mode_intensities(path, omegas, intensities):
    """Spectral intensities |psi_n|^2; ``intensities`` maps label -> vector."""
    fig, ax = plt.subplots(figsize=(6.5, 4))
    styles = ["-", "--", ":", "-."]
    for i, (label, vals) in enumerate(intensities.items()):
        ax.plot(omegas, vals, styles[i % len(styles)], label=label)
    ax.set_xlabel(r"$\omega$ (rad/fs)")
    ax.set_ylabel(r"$|\psi_n(\omega)|^2$ (fs/rad)")
    ax.legend(fontsize=8)
    _save(fig, path)


def render_mode_phase(path, omegas, curves):
    """Intensity and phase of the dominant mode at two pumping strengths.

    ``curves`` maps label -> (intensity, phase) pairs.
    """
    fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(6.5, 5.5), sharex=True)
    for label, (inten, phase) in curves.items():
        ax0.plot(omegas, inten, label=label)
        ax1.plot(omegas, phase, label=label)
    ax0.set_ylabel(r"$|\psi_0|^2$ (fs/rad)")
    ax1.set_ylabel(r"arg $\psi_0$ (rad)")
    ax1.set_xlabel(r"$\omega$ (rad/fs)")
    ax0.legend(fontsize=8)
    _save(fig, path)


def render_mode_widths(path, inv_l_nl, tau_columns):
    """Fitted mode durations versus pumping strength 1/L_nl."""
    fig, ax = plt.subplots(figsize=(6.5, 4))
    for label, vals in tau_columns.items():
        ax.plot(inv_l_nl, vals, "o-", label=label)
    ax.set_xlabel(r"$1/L_{nl}$ (1/mm)")
    ax.set_ylabel(r"fitted $\tau_s$ (fs)")
    ax.legend(fontsize=8)
    _save(fig, path)


def render_sweep(path, rows, ycol, ylabel, logy=False):
    """One line per L_nl of column ``ycol`` against tau_LO."""
    fig, ax = plt.subplots(figsize=(6.5, 4))
    l_nls = sorted({r["L_nl_mm"] for r in rows})
    for l_nl in l_nls:
        pts = [(r["tau_LO_fs"], r[ycol]) for r in rows if r["L_nl_mm"] == l_nl]
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], "o-",
                label=f"L_nl = {l_nl:g} mm")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(r"$\tau_{LO}$ (fs)")
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)
    _save(fig, path)


def render_coefficient_bars(path, modes, columns):
    """LO decomposition weights M_n^2 on a log scale, one group per tau_LO."""
    fig, ax = plt.subplots(figsize=(6.5, 4))
    width = 0.8 / max(len(columns), 1)
    floor = 1e-12
    for i, (label, vals) in enumerate(columns.items()):
        ax.bar(np.asarray(modes) + i * width, np.maximum(vals, floor), width,
               label=label)
    ax.set_yscale("log")
    ax.set_ylim(bottom=1e-8)
    ax.set_xlabel("mode number n")
    ax.set_ylabel(r"$M_n^2$")
    ax.legend(fontsize=8)
    _save(fig, path)
