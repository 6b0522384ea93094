"""Deterministic CSV/JSON serialisation of the package's data objects.

Every CSV starts with ``#``-prefixed metadata lines (sorted keys) so files
are self-describing and diffable.  Floats are written with Python's
shortest round-trip repr; rerunning an identical configuration reproduces
the bytes exactly.
"""

from __future__ import annotations

import json
import math
import os

import numpy as np

from .dispersion import DispersionModel
from .field_grid import PumpSpec, make_grid
from .propagator import GreenPair
from .decomposition import ModeDecomposition


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def write_csv(path, names, rows, meta: dict = None) -> None:
    """Write one CSV with ``#`` metadata header lines and a column header."""
    lines = []
    for key in sorted((meta or {})):
        lines.append(f"# {key}={_fmt(meta[key])}")
    lines.append(",".join(names))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_json(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _matrix_rows(m: np.ndarray):
    """Interleave re/im columns of a complex matrix, one row per grid row."""
    out = np.empty((m.shape[0], 2 * m.shape[1]))
    out[:, 0::2] = m.real
    out[:, 1::2] = m.imag
    return out


def _model_payload(model: DispersionModel) -> dict:
    return {
        "sellmeier_o": list(model.sellmeier_o),
        "sellmeier_e": list(model.sellmeier_e),
        "theta_rad": model.theta,
        "lambda_pump_nm": model.lambda_pump,
        "lambda_signal_nm": model.lambda_signal,
    }


def save_green(gp: GreenPair, directory, meta: dict = None) -> None:
    """Serialise a Green pair: C.csv and S.csv plus a JSON provenance record."""
    os.makedirs(directory, exist_ok=True)
    n = gp.grid.n_points
    names = ["omega_rad_fs"]
    for j in range(n):
        names += [f"re{j}", f"im{j}"]
    for tag, m in (("C", gp.C), ("S", gp.S)):
        rows = np.column_stack([gp.grid.omegas, _matrix_rows(m)])
        write_csv(os.path.join(directory, f"{tag}.csv"), names, rows, meta)
    payload = dict(gp.meta)
    payload["model"] = _model_payload(gp.model)
    payload.update(meta or {})
    write_json(os.path.join(directory, "meta.json"), payload)


def load_green(directory) -> GreenPair:
    """Rebuild a Green pair from :func:`save_green` output."""
    with open(os.path.join(directory, "meta.json")) as fh:
        meta = json.load(fh)
    mats = {}
    for tag in ("C", "S"):
        raw = np.loadtxt(os.path.join(directory, f"{tag}.csv"), delimiter=",",
                         comments="#", skiprows=_n_header(os.path.join(directory, f"{tag}.csv")))
        omegas = raw[:, 0]
        mats[tag] = raw[:, 1::2] + 1j * raw[:, 2::2]
    n = mats["C"].shape[0]
    grid = make_grid(n, float(meta["grid_center_rad_fs"]),
                     float(meta["grid_spacing_rad_fs"]) * n)
    spec = PumpSpec(tau_p=float(meta["tau_p_fs"]), omega_p=float(meta["omega_p_rad_fs"]),
                    L_nl=float(meta["L_nl_mm"]), L=float(meta["L_mm"]))
    mp = meta["model"]
    model = DispersionModel(
        sellmeier_o=tuple(mp["sellmeier_o"]), sellmeier_e=tuple(mp["sellmeier_e"]),
        theta=float(mp["theta_rad"]), lambda_pump=float(mp["lambda_pump_nm"]),
        lambda_signal=float(mp["lambda_signal_nm"]),
    )
    residuals = None
    if meta.get("residual_unitarity") is not None:
        residuals = (float(meta["residual_unitarity"]), float(meta["residual_symmetry"]))
    return GreenPair(C=mats["C"], S=mats["S"], grid=grid, frame=meta["frame"],
                     spec=spec, model=model, scheme=meta["scheme"],
                     n_steps=int(meta["n_steps"]), residuals=residuals,
                     edge_ratio=float(meta.get("edge_ratio", 0.0)))


def _n_header(path) -> int:
    count = 0
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                count += 1
            else:
                return count + 1  # column-name row
    return count


def save_modes(md: ModeDecomposition, directory, meta: dict = None) -> None:
    """Serialise a decomposition: zetas.csv, phi.csv, psi.csv, meta.json."""
    os.makedirs(directory, exist_ok=True)
    write_csv(os.path.join(directory, "zetas.csv"), ["n", "zeta"],
              list(enumerate(md.zetas)), meta)
    names = ["omega_rad_fs"]
    for j in range(md.n_modes):
        names += [f"re{j}", f"im{j}"]
    for tag, m in (("phi", md.phi), ("psi", md.psi)):
        rows = np.column_stack([md.grid.omegas, _matrix_rows(m)])
        write_csv(os.path.join(directory, f"{tag}.csv"), names, rows, meta)
    payload = dict(md.meta)
    payload.update({
        "frame": md.frame,
        "pairing_residual": md.pairing_residual,
        "n_modes": md.n_modes,
    })
    payload.update(meta or {})
    write_json(os.path.join(directory, "meta.json"), payload)
