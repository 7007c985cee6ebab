"""Solvation tables, temperature sweeps and figure datasets.

Values are carried at full precision; rounding happens only in
:func:`format_rows`.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .calibration import (DEFAULT_RADII_GRID, CalibrationSet, default_params,
                          default_temperature_grid, figure_data, fit_alpha_line,
                          load_params)
from .ions import IonSpec, ReferenceDataset, builtin_ion_set
from .solvents import SolventModel
from .thermo import AlphaLike, entropy, free_energy
from .units import DEFAULT_UNITS, UnitSystem

__all__ = [
    "AlphaSource",
    "resolve_alpha",
    "TABLE_COLUMNS",
    "solvation_table",
    "sweep",
    "fig1_rows",
    "fig2_rows",
    "format_rows",
    "ROUNDING",
]

log = logging.getLogger(__name__)

TABLE_COLUMNS = (
    "ion",
    "dG_expt", "dG_born", "dG_msa", "dG_hsbc", "dG_err_pct",
    "dS_expt", "dS_born", "dS_msa", "dS_hsbc", "dS_err_pct",
)

#: decimals used when presenting each column; missing columns print as-is
ROUNDING = {
    "dG_expt": 0, "dG_born": 0, "dG_msa": 0, "dG_hsbc": 0, "dG_err_pct": 1,
    "dS_expt": 0, "dS_born": 0, "dS_msa": 0, "dS_hsbc": 0, "dS_err_pct": 1,
    "dG": 0, "dS": 0, "alpha": 6, "alpha_line": 6, "a1": 6, "a2": 6,
}


@dataclass(frozen=True)
class AlphaSource:
    """A resolved alpha: a constant or an alpha(T) line, with provenance."""

    kind: str
    alpha: AlphaLike
    description: str

    def __call__(self, T: float) -> float:
        return float(self.alpha(T)) if callable(self.alpha) else float(self.alpha)


def resolve_alpha(solvent: SolventModel, source: str = "params",
                  params: str | Path | None = None, explicit: float | None = None,
                  radii_grid: Sequence[float] = DEFAULT_RADII_GRID,
                  units: UnitSystem = DEFAULT_UNITS) -> AlphaSource:
    """Pick exactly one alpha source.

    ``params`` may name a parameter file or a directory of ``<solvent>.json``
    files; without it the shipped line for the solvent is used.
    """
    if source == "explicit":
        if explicit is None:
            raise ValueError("explicit alpha source needs a value")
        if explicit < 0:
            raise ValueError("alpha must be non-negative")
        return AlphaSource("explicit", float(explicit), f"alpha = {explicit}")
    if source == "fit":
        cs = fit_alpha_line(solvent, default_temperature_grid(solvent), radii_grid, units)
        return AlphaSource("fit", cs, f"fitted line a1={cs.a1:.6f} a2={cs.a2:.6f}")
    if source == "params":
        if params is None:
            cs = default_params(solvent.name)
            where = "shipped parameters"
        else:
            p = Path(params)
            if p.is_dir():
                p = p / f"{solvent.name}.json"
            cs = load_params(p)
            where = str(p)
            if cs.solvent != solvent.name:
                raise ValueError(f"{p} holds parameters for {cs.solvent}, not {solvent.name}")
        return AlphaSource("params", cs, f"{where}: a1={cs.a1:.6f} a2={cs.a2:.6f}")
    raise ValueError(f"unknown alpha source {source!r}")


def _pct(a: float, b: float) -> float:
    return abs(a - b) / abs(b) * 100.0


def solvation_table(solvent: SolventModel, alpha: AlphaLike, T: float = 25.0,
                    ions: Iterable[IonSpec] | None = None,
                    reference: ReferenceDataset | None = None,
                    units: UnitSystem = DEFAULT_UNITS, dT: float = 0.1) -> list[dict]:
    """One row per ion: experiment, Born, MSA and HSBC free energies/entropies.

    Error columns are |HSBC - MSA| / |MSA| in percent.
    """
    rows = []
    for ion in ions if ions is not None else builtin_ion_set(units):
        row = {"ion": ion.name}
        for key, model in (("born", "Born"), ("msa", "MSA"), ("hsbc", "HSBC")):
            a = alpha if model == "HSBC" else None
            row[f"dG_{key}"] = free_energy(model, ion, solvent, T, a, units)
            row[f"dS_{key}"] = entropy(model, ion, solvent, T, a, units, dT)
        row["dG_err_pct"] = _pct(row["dG_hsbc"], row["dG_msa"])
        row["dS_err_pct"] = _pct(row["dS_hsbc"], row["dS_msa"])
        if reference is not None:
            row["dG_expt"] = reference.get(ion.name, solvent.name, "dG_expt")
            row["dS_expt"] = reference.get(ion.name, solvent.name, "dS_expt")
        rows.append({k: row[k] for k in TABLE_COLUMNS if k in row})
    return rows


def sweep(solvent: SolventModel, ions: Iterable[IonSpec], models: Sequence[str],
          T_start: float, T_stop: float, T_step: float, alpha: AlphaLike | None,
          units: UnitSystem = DEFAULT_UNITS, dT: float = 0.1) -> list[dict]:
    """dG and dS over a temperature grid, clipped to the solvent's valid range."""
    if T_step <= 0:
        raise ValueError("temperature step must be positive")
    lo, hi = solvent.valid_range
    a, b = sorted((T_start, T_stop))
    if a < lo or b > hi:
        log.warning("sweep %g..%g degC clipped to the valid range %g..%g degC of %s",
                    a, b, lo, hi, solvent.name)
        a, b = max(a, lo), min(b, hi)
    if a > b:
        return []
    n = int(math.floor((b - a) / T_step + 1e-9))
    temps = [a + i * T_step for i in range(n + 1)]
    if b - temps[-1] > 1e-9:
        temps.append(b)
    rows = []
    ions = list(ions)
    for model in models:
        for ion in ions:
            am = alpha if model == "HSBC" else None
            for T in temps:
                rows.append({
                    "solvent": solvent.name, "ion": ion.name, "model": model, "T": T,
                    "dG": free_energy(model, ion, solvent, T, am, units),
                    "dS": entropy(model, ion, solvent, T, am, units, dT),
                })
    return rows


def fig1_rows(solvent: SolventModel, temperatures: Sequence[float],
              radii_grid: Sequence[float] = DEFAULT_RADII_GRID,
              units: UnitSystem = DEFAULT_UNITS) -> list[dict]:
    """Exact and modelled h against |E_n|, alpha fitted per temperature."""
    rows = []
    for T in temperatures:
        for p in figure_data(solvent, T, radii_grid, None, units):
            rows.append({"solvent": p.solvent, "T": p.T, "R": p.R, "E_n": p.E_n,
                         "h_exact": p.h_exact, "h_model": p.h_model, "alpha": p.alpha})
    return rows


def fig2_rows(calibrations: Iterable[CalibrationSet]) -> list[dict]:
    """alpha samples per solvent with the fitted line evaluated alongside."""
    rows = []
    for cs in calibrations:
        for s in cs.samples:
            rows.append({"solvent": cs.solvent, "T": s.T, "alpha": s.alpha,
                         "alpha_line": cs(s.T), "a1": cs.a1, "a2": cs.a2,
                         "r_squared": cs.r_squared})
    return rows


def _present(key: str, value):
    if value is None:
        return "N/R"
    if isinstance(value, float):
        d = ROUNDING.get(key)
        if d is None:
            return value
        out = round(value, d)
        if d == 0:
            return int(out)
        return out + 0.0
    return value


def format_rows(rows: list[dict], fmt: str = "csv", columns: Sequence[str] | None = None,
                rounded: bool = True) -> str:
    """Render rows as CSV, a Markdown table or JSON."""
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    cooked = [{c: (_present(c, r.get(c)) if rounded else r.get(c)) for c in columns}
              for r in rows]
    if fmt == "json":
        return json.dumps(cooked, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in cooked:
            w.writerow([("" if v is None else v) for v in r.values()])
        return buf.getvalue()
    if fmt == "markdown":
        lines = ["| " + " | ".join(columns) + " |",
                 "|" + "|".join("---" for _ in columns) + "|"]
        for r in cooked:
            lines.append("| " + " | ".join(str(v) for v in r.values()) + " |")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")
