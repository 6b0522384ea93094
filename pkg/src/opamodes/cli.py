"""Batch front-end: configuration parsing, run orchestration, file output.

One JSON configuration file fully determines a run; outputs are CSV tables
(with ``#`` metadata headers carrying the config hash and package version)
plus rendered PNG figures, written to the chosen output directory.
Re-running an identical configuration reproduces the CSV bytes exactly.

Exit codes: 0 success, 2 configuration error, 3 numerical-invariant
violation, 4 convergence/stability failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .decomposition import bloch_messiah, fit_hermite_width, verify_conjugacy
from .dispersion import (BBO_SELLMEIER_E, BBO_SELLMEIER_O, PUMP, SIGNAL,
                         DispersionModel, beta, find_phase_matching_angle,
                         phase_mismatch, refractive_index, wavelength_nm,
                         wavevector)
from .errors import (ConfigError, ConvergenceError, DegeneracyError,
                     DomainError, FitError, FrameError, GridError,
                     InstabilityError, PhaseMatchingError, SymplecticError)
from .field_grid import FrequencyGrid, PumpSpec, make_grid
from .homodyne import (LocalOscillator, gaussian_lo, lo_decompose, lo_sweep,
                       quadrature_noise, quadrature_noise_from_green)
from .io import save_green, save_modes, write_csv, write_json
from .perturbative import analytic_zetas, gaussian_params
from .propagator import (RK4, SPLIT_STEP, GreenPair, compute_green,
                         to_moving_frame)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3
EXIT_CONVERGENCE = 4

_CONFIG_ERRORS = (ConfigError, DomainError, GridError, PhaseMatchingError,
                  FrameError)
_INVARIANT_ERRORS = (SymplecticError, DegeneracyError, FitError)
_CONVERGENCE_ERRORS = (InstabilityError, ConvergenceError)


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration; one instance fully describes a run."""

    lambda_pump_nm: float = 400.0
    lambda_signal_nm: float = 800.0
    theta_deg: float | None = None
    sellmeier_o: tuple = BBO_SELLMEIER_O
    sellmeier_e: tuple = BBO_SELLMEIER_E
    n_points: int = 512
    span_rad_fs: float = 2.0
    tau_p_fs: float = 24.0
    L_mm: float = 1.0
    L_nl_mm: tuple = (100.0, 1.0, 1.0 / 3.0, 1.0 / 15.0)
    scheme: str = SPLIT_STEP
    n_steps: int | None = None
    rk4_check: bool = False
    rk4_steps: int | None = None
    n_modes_report: int = 12
    tau_lo_fs: tuple = (4.0, 6.0, 8.0, 10.0, 12.0, 15.0, 18.0, 22.0, 26.0,
                        30.0, 36.0, 42.0, 50.0)
    phase_locked: bool = True
    fig8_L_nl_mm: float = 0.5
    fig8_tau_lo_fs: tuple = (15.0, 30.0, 50.0)
    figures: bool = True
    deterministic: bool = True

    def payload(self) -> dict:
        out = {}
        for name in self.__dataclass_fields__:
            value = getattr(self, name)
            out[name] = list(value) if isinstance(value, tuple) else value
        return out

    @property
    def config_hash(self) -> str:
        text = json.dumps(self.payload(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def load_config(path) -> RunConfig:
    """Read and validate a JSON configuration file."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kwargs = {}
    for key, value in raw.items():
        if isinstance(value, list):
            value = tuple(value)
        kwargs[key] = value
    try:
        cfg = RunConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.n_points < 2 or (cfg.n_points & (cfg.n_points - 1)) != 0:
        raise ConfigError(f"n_points must be a power of two, got {cfg.n_points}")
    if cfg.span_rad_fs <= 0:
        raise ConfigError("span_rad_fs must be positive")
    if cfg.tau_p_fs <= 0 or cfg.L_mm <= 0:
        raise ConfigError("tau_p_fs and L_mm must be positive")
    if not cfg.L_nl_mm or any(l <= 0 for l in cfg.L_nl_mm):
        raise ConfigError("L_nl_mm must be a non-empty list of positive lengths")
    if cfg.scheme not in (SPLIT_STEP, RK4):
        raise ConfigError(f"scheme must be {SPLIT_STEP!r} or {RK4!r}")
    if any(t <= 0 for t in cfg.tau_lo_fs):
        raise ConfigError("tau_lo_fs entries must be positive")


# -- shared construction ----------------------------------------------------

def build_model(cfg: RunConfig) -> DispersionModel:
    model = DispersionModel(
        sellmeier_o=tuple(cfg.sellmeier_o), sellmeier_e=tuple(cfg.sellmeier_e),
        lambda_pump=cfg.lambda_pump_nm, lambda_signal=cfg.lambda_signal_nm,
    )
    if cfg.theta_deg is None:
        return replace(model, theta=find_phase_matching_angle(model))
    return replace(model, theta=math.radians(cfg.theta_deg))


def build_grid(cfg: RunConfig, model: DispersionModel) -> FrequencyGrid:
    return make_grid(cfg.n_points, model.omega_pump / 2.0, cfg.span_rad_fs)


def build_spec(cfg: RunConfig, model: DispersionModel, l_nl: float) -> PumpSpec:
    return PumpSpec(tau_p=cfg.tau_p_fs, omega_p=model.omega_pump,
                    L_nl=float(l_nl), L=cfg.L_mm)


def _label(l_nl: float) -> str:
    return ("%g" % float(l_nl)).replace(".", "p").replace("-", "m").replace("+", "")


class _Workspace:
    """Per-run cache of Green pairs and decompositions shared across verbs."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.model = build_model(cfg)
        self.grid = build_grid(cfg, self.model)
        self.meta = {"config_hash": cfg.config_hash, "version": __version__}
        self._greens = {}
        self._modes = {}

    def green(self, l_nl: float) -> GreenPair:
        if l_nl not in self._greens:
            spec = build_spec(self.cfg, self.model, l_nl)
            self._greens[l_nl] = compute_green(
                spec, self.model, self.grid, scheme=self.cfg.scheme,
                n_steps=self.cfg.n_steps,
            )
        return self._greens[l_nl]

    def modes(self, l_nl: float):
        if l_nl not in self._modes:
            self._modes[l_nl] = bloch_messiah(to_moving_frame(self.green(l_nl)))
        return self._modes[l_nl]


# -- subcommands -------------------------------------------------------------

def cmd_dispersion(ws: _Workspace, out: str) -> None:
    """Wavevector tables, dispersion coefficients, phase-matching report."""
    cfg, model, grid = ws.cfg, ws.model, ws.grid
    dk0 = float(phase_mismatch(model, model.omega_signal, model.omega_signal))
    write_json(os.path.join(out, "phase_matching.json"), {
        **ws.meta,
        "theta_rad": model.theta,
        "theta_deg": math.degrees(model.theta),
        "n_signal": float(refractive_index(model, model.omega_signal)),
        "n_pump_at_theta": float(refractive_index(model, model.omega_pump,
                                                  "extraordinary-at-theta")),
        "delta_k_degenerate_rad_mm": dk0,
    })

    rows = [(f, order, beta(model, f, order)) for f in (SIGNAL, PUMP)
            for order in (1, 2, 3)]
    write_csv(os.path.join(out, "betas.csv"),
              ["field", "order", "value_fs_n_per_mm"], rows, ws.meta)

    omegas = grid.omegas
    k_sig = wavevector(model, omegas, SIGNAL, check_window=False)
    n_sig = refractive_index(model, omegas, check_window=False)
    write_csv(os.path.join(out, "dispersion_signal.csv"),
              ["omega_rad_fs", "lambda_nm", "n", "k_rad_mm"],
              np.column_stack([omegas, wavelength_nm(omegas), n_sig, k_sig]),
              ws.meta)
    pump_ax = grid.pump_omegas
    k_p = wavevector(model, pump_ax, PUMP, check_window=False)
    n_p = refractive_index(model, pump_ax, "extraordinary-at-theta",
                           check_window=False)
    write_csv(os.path.join(out, "dispersion_pump.csv"),
              ["omega_rad_fs", "lambda_nm", "n", "k_rad_mm"],
              np.column_stack([pump_ax, wavelength_nm(pump_ax), n_p, k_p]),
              ws.meta)


def cmd_greens(ws: _Workspace, out: str) -> None:
    """Green pairs for every pumping strength, with consistency report."""
    cfg = ws.cfg
    report = []
    for l_nl in cfg.L_nl_mm:
        gp = ws.green(l_nl)
        save_green(gp, os.path.join(out, f"green_{_label(l_nl)}"), ws.meta)
        row = [_label(l_nl), l_nl, gp.scheme, gp.n_steps,
               gp.residuals[0], gp.residuals[1], gp.edge_ratio]
        if cfg.rk4_check:
            gp_ref = compute_green(gp.spec, ws.model, ws.grid, scheme=RK4,
                                   n_steps=cfg.rk4_steps)
            diff_c = np.linalg.norm(gp_ref.C - gp.C) / np.linalg.norm(gp.C)
            s_scale = max(np.linalg.norm(gp.S), 1e-30)
            diff_s = np.linalg.norm(gp_ref.S - gp.S) / s_scale
            row += [diff_c, diff_s]
        report.append(row)
    names = ["label", "L_nl_mm", "scheme", "n_steps", "residual_unitarity",
             "residual_symmetry", "edge_ratio"]
    if cfg.rk4_check:
        names += ["rk4_rel_diff_C", "rk4_rel_diff_S"]
    write_csv(os.path.join(out, "greens_report.csv"), names, report, ws.meta)


def _quadratic_phase(md, grid) -> float:
    """Quadratic spectral-phase coefficient of the dominant mode, fs^2."""
    psi0 = md.psi[:, 0]
    weight = np.abs(psi0) ** 2
    keep = weight > 1e-6 * weight.max()
    nu = grid.offsets[keep]
    phase = np.unwrap(np.angle(psi0[keep]))
    coeffs = np.polynomial.polynomial.polyfit(nu, phase, 2, w=np.sqrt(weight[keep]))
    return float(2.0 * coeffs[2])  # phase = ... + (c2/2) nu^2


def cmd_modes(ws: _Workspace, out: str) -> None:
    """Decompositions, mode-shape tables, width fits, conjugacy report."""
    cfg, grid = ws.cfg, ws.grid
    n_rep = cfg.n_modes_report
    l_nls = list(cfg.L_nl_mm)
    weakest, strongest = max(l_nls), min(l_nls)

    conj_rows, fig6_rows = [], []
    fig3_cols = {}
    for l_nl in l_nls:
        md = ws.modes(l_nl)
        trimmed = replace(md, phi=md.phi[:, :n_rep], psi=md.psi[:, :n_rep])
        save_modes(trimmed, os.path.join(out, f"modes_{_label(l_nl)}"), ws.meta)
        overlaps = verify_conjugacy(md, 5)
        conj_rows.append([_label(l_nl), l_nl] + [float(v) for v in overlaps])
        fig3_cols[l_nl] = l_nl * md.zetas[:n_rep]
        taus = []
        for k in range(3):
            # strong pumping distorts higher modes; a failed profile fit is
            # reported as a hole, not a fatal error
            try:
                taus.append(fit_hermite_width(md.psi[:, k], k, grid))
            except FitError:
                taus.append(math.nan)
        fig6_rows.append([1.0 / l_nl] + taus + [_quadratic_phase(md, grid)])

    write_csv(os.path.join(out, "conjugacy.csv"),
              ["label", "L_nl_mm"] + [f"overlap{k}" for k in range(5)],
              conj_rows, ws.meta)

    spec_weak = build_spec(cfg, ws.model, weakest)
    gm = gaussian_params(spec_weak, ws.model)
    analytic = weakest * analytic_zetas(gm, n_rep)
    names = ["mode"] + [f"Lnl_zeta_{_label(l)}" for l in l_nls] + ["gaussian_model"]
    rows = np.column_stack([np.arange(n_rep)]
                           + [fig3_cols[l] for l in l_nls] + [analytic])
    write_csv(os.path.join(out, "fig3.csv"), names, rows, ws.meta)

    md_weak = ws.modes(weakest)
    inten = np.abs(md_weak.psi[:, :3]) ** 2
    write_csv(os.path.join(out, "fig4.csv"),
              ["omega_rad_fs", "psi0_abs2", "psi1_abs2", "psi2_abs2"],
              np.column_stack([grid.omegas, inten]), ws.meta)

    md_strong = ws.modes(strongest)
    fig5 = np.column_stack([
        grid.omegas,
        np.abs(md_weak.psi[:, 0]) ** 2, np.angle(md_weak.psi[:, 0]),
        np.abs(md_strong.psi[:, 0]) ** 2, np.angle(md_strong.psi[:, 0]),
    ])
    write_csv(os.path.join(out, "fig5.csv"),
              ["omega_rad_fs", "abs2_weak", "phase_weak", "abs2_strong",
               "phase_strong"], fig5, ws.meta)

    fig6_rows.sort(key=lambda r: r[0])
    write_csv(os.path.join(out, "fig6.csv"),
              ["inv_L_nl_per_mm", "tau_s0_fs", "tau_s1_fs", "tau_s2_fs",
               "quad_phase_fs2"], fig6_rows, ws.meta)

    if cfg.figures:
        from . import figures
        figures.render_zeta_bars(
            os.path.join(out, "fig3.png"), np.arange(n_rep),
            {f"L_nl = {l:g} mm": fig3_cols[l] for l in l_nls}, analytic)
        figures.render_mode_intensities(
            os.path.join(out, "fig4.png"), grid.omegas,
            {f"n = {k}": inten[:, k] for k in range(3)})
        figures.render_mode_phase(
            os.path.join(out, "fig5.png"), grid.omegas,
            {f"L_nl = {weakest:g} mm": (fig5[:, 1], fig5[:, 2]),
             f"L_nl = {strongest:g} mm": (fig5[:, 3], fig5[:, 4])})
        figures.render_mode_widths(
            os.path.join(out, "fig6.png"), [r[0] for r in fig6_rows],
            {f"n = {k}": [r[1 + k] for r in fig6_rows] for k in range(3)})


def cmd_gaussian(ws: _Workspace, out: str) -> None:
    """Analytic weak-pump model and its comparison against the numerics."""
    cfg = ws.cfg
    weakest = max(cfg.L_nl_mm)
    spec = build_spec(cfg, ws.model, weakest)
    gm = gaussian_params(spec, ws.model)
    write_json(os.path.join(out, "gaussian.json"), {
        **ws.meta,
        "L_nl_mm": weakest,
        "delta_rad_fs": gm.delta,
        "Delta_rad_fs": gm.Delta,
        "inv_delta_fs": 1.0 / gm.delta,
        "inv_Delta_fs": 1.0 / gm.Delta,
        "photons_per_pulse": gm.N,
        "r": gm.r,
        "tau_s_fs": gm.tau_s,
    })
    md = ws.modes(weakest)
    n_rep = cfg.n_modes_report
    za = analytic_zetas(gm, n_rep)
    zn = md.zetas[:n_rep]
    rows = np.column_stack([np.arange(n_rep), za, zn,
                            np.divide(zn, za, out=np.zeros(n_rep),
                                      where=za > 0)])
    write_csv(os.path.join(out, "zeta_compare.csv"),
              ["mode", "zeta_analytic", "zeta_numeric", "ratio"], rows, ws.meta)


def cmd_homodyne(ws: _Workspace, out: str) -> None:
    """LO sweeps, decomposition bars, and the oracle cross-check."""
    cfg, grid = ws.cfg, ws.grid
    decos = {l: ws.modes(l) for l in cfg.L_nl_mm}
    spec0 = build_spec(cfg, ws.model, cfg.L_nl_mm[0])
    rows = lo_sweep(cfg.tau_lo_fs, cfg.L_nl_mm, spec0, ws.model, grid,
                    phase_locked=cfg.phase_locked, decompositions=decos)
    names = ["L_nl_mm", "tau_LO_fs", "q2_min", "q2_max", "eta",
             "theta_opt_rad", "leakage"]
    write_csv(os.path.join(out, "sweep.csv"), names,
              [[r[k] for k in names] for r in rows], ws.meta)

    taus = sorted({r["tau_LO_fs"] for r in rows})
    fig7_rows, fig9_rows = [], []
    for tau in taus:
        r7, r9 = [tau], [tau]
        for l_nl in cfg.L_nl_mm:
            match = next(r for r in rows
                         if r["tau_LO_fs"] == tau and r["L_nl_mm"] == float(l_nl))
            r7.append(match["q2_min"])
            r9.append(match["eta"])
        fig7_rows.append(r7)
        fig9_rows.append(r9)
    lab = [f"q2_min_{_label(l)}" for l in cfg.L_nl_mm]
    write_csv(os.path.join(out, "fig7.csv"), ["tau_LO_fs"] + lab, fig7_rows, ws.meta)
    lab = [f"eta_{_label(l)}" for l in cfg.L_nl_mm]
    write_csv(os.path.join(out, "fig9.csv"), ["tau_LO_fs"] + lab, fig9_rows, ws.meta)

    # LO decomposition bars at the dedicated pumping strength
    md8 = ws.modes(cfg.fig8_L_nl_mm)
    n_rep = cfg.n_modes_report
    cols = {}
    for tau in cfg.fig8_tau_lo_fs:
        lo = gaussian_lo(float(tau), ws.model, cfg.L_mm, grid,
                         phase_locked=cfg.phase_locked, frame=md8.frame)
        m, _, _ = lo_decompose(lo, md8, n_top=n_rep)
        cols[tau] = m**2
    write_csv(os.path.join(out, "fig8.csv"),
              ["mode"] + [f"M2_tau{_label(t)}" for t in cfg.fig8_tau_lo_fs],
              np.column_stack([np.arange(n_rep)]
                              + [cols[t] for t in cfg.fig8_tau_lo_fs]), ws.meta)

    # decomposition path against the direct Green-pair observable
    gp_mov = to_moving_frame(ws.green(cfg.fig8_L_nl_mm))
    md_chk = md8
    worst = 0.0
    rng = np.random.default_rng(2024)
    for trial in range(8):
        v = rng.normal(size=grid.n_points) + 1j * rng.normal(size=grid.n_points)
        v /= np.sqrt(np.sum(np.abs(v) ** 2) * grid.spacing)
        lo = LocalOscillator(amplitude=v, grid=grid, frame=md_chk.frame)
        m, th, leak = lo_decompose(lo, md_chk)
        for phase in (0.0, 0.7, 1.9):
            a = quadrature_noise(m, th, md_chk.zetas, phase, leak)
            b = quadrature_noise_from_green(lo, gp_mov, phase)
            worst = max(worst, abs(a - b))
    write_json(os.path.join(out, "homodyne_report.json"), {
        **ws.meta,
        "oracle_max_abs_diff": worst,
        "fig8_L_nl_mm": cfg.fig8_L_nl_mm,
    })

    if cfg.figures:
        from . import figures
        figures.render_sweep(os.path.join(out, "fig7.png"), rows, "q2_min",
                             r"$\langle Q^2\rangle_{min}$", logy=True)
        figures.render_sweep(os.path.join(out, "fig9.png"), rows, "eta",
                             r"$\eta$")
        figures.render_coefficient_bars(
            os.path.join(out, "fig8.png"), np.arange(n_rep),
            {f"tau_LO = {t:g} fs": cols[t] for t in cfg.fig8_tau_lo_fs})


_COMMANDS = {
    "dispersion": cmd_dispersion,
    "greens": cmd_greens,
    "modes": cmd_modes,
    "gaussian": cmd_gaussian,
    "homodyne": cmd_homodyne,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="opamodes",
        description="Squeezing-mode analysis of a pulsed parametric amplifier",
    )
    parser.add_argument("command", choices=list(_COMMANDS) + ["all"])
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--no-figures", action="store_true",
                        help="skip PNG rendering")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        if args.no_figures:
            cfg = replace(cfg, figures=False)
        os.makedirs(args.out, exist_ok=True)
        ws = _Workspace(cfg)
        commands = list(_COMMANDS) if args.command == "all" else [args.command]
        for name in commands:
            _COMMANDS[name](ws, args.out)
    except _CONFIG_ERRORS as exc:
        print(f"opamodes: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _INVARIANT_ERRORS as exc:
        print(f"opamodes: numerical invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except _CONVERGENCE_ERRORS as exc:
        print(f"opamodes: convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
