"""Least-squares calibration of the HSBC/MSA parameter alpha.

For a fixed solvent and temperature, alpha minimises

    sum_R (h_exact(R) - alpha sqrt|E_n(R)|)^2

over a grid of Born-ion radii, where h_exact = sigma_Born / sigma_MSA - 1 and
E_n is evaluated at the MSA surface charge. The problem is linear in alpha so
the minimiser is closed form. Per-temperature values are then regressed on a
straight line alpha(T) = a1 + a2 T.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .solvents import SolventModel, eps_of_T, msa_shift
from .units import DEFAULT_UNITS, UnitSystem

__all__ = [
    "DEFAULT_RADII_GRID",
    "CalibrationError",
    "CalibrationSample",
    "CalibrationSet",
    "h_exact",
    "msa_normal_field",
    "fit_alpha",
    "fit_alpha_line",
    "default_temperature_grid",
    "save_params",
    "load_params",
    "default_params",
    "figure_data",
    "FigurePoint",
]

#: 1.0 to 20.0 angstrom in 0.1 angstrom steps.
DEFAULT_RADII_GRID = tuple(round(1.0 + 0.1 * i, 10) for i in range(191))


class CalibrationError(ValueError):
    """Calibration inputs are degenerate or a parameter file is invalid."""


@dataclass(frozen=True)
class CalibrationSample:
    T: float
    alpha: float
    sse: float | None = None


@dataclass(frozen=True)
class CalibrationSet:
    """alpha samples for one solvent and the straight line through them.

    Instances are callable: ``cs(T)`` returns ``a1 + a2 T``.
    """

    solvent: str
    samples: tuple[CalibrationSample, ...]
    a1: float
    a2: float
    r_squared: float | None = None
    fitted_at_grid: tuple[float, ...] | None = None
    tolerance: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        if self.fitted_at_grid is not None:
            object.__setattr__(self, "fitted_at_grid", tuple(self.fitted_at_grid))
        self.validate()

    def validate(self) -> None:
        if not (math.isfinite(self.a1) and math.isfinite(self.a2)):
            raise CalibrationError("a1 and a2 must be finite")
        for s in self.samples:
            if not s.alpha > 0:
                raise CalibrationError(f"non-positive alpha {s.alpha} at T = {s.T}")
        if self.r_squared is not None and not 0.0 <= self.r_squared <= 1.0:
            raise CalibrationError(f"r_squared {self.r_squared} outside [0, 1]")
        if self.tolerance < 0:
            raise CalibrationError("negative tolerance")
        for s in self.samples:
            gap = abs(self.a1 + self.a2 * s.T - s.alpha)
            if gap > self.tolerance * (1 + 1e-9) + 1e-15:
                raise CalibrationError(
                    f"line misses sample at T = {s.T} by {gap:.3g} "
                    f"(recorded tolerance {self.tolerance:.3g})"
                )

    def alpha(self, T):
        if np.ndim(T):
            return self.a1 + self.a2 * np.asarray(T, dtype=float)
        return self.a1 + self.a2 * float(T)

    __call__ = alpha

    def to_dict(self) -> dict:
        d = asdict(self)
        d["samples"] = [asdict(s) for s in self.samples]
        d["fitted_at_grid"] = list(self.fitted_at_grid) if self.fitted_at_grid else None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CalibrationSet":
        try:
            samples = tuple(
                CalibrationSample(float(s["T"]), float(s["alpha"]),
                                  None if s.get("sse") is None else float(s["sse"]))
                for s in d.get("samples", [])
            )
            grid = d.get("fitted_at_grid")
            return cls(
                solvent=str(d["solvent"]),
                samples=samples,
                a1=float(d["a1"]),
                a2=float(d["a2"]),
                r_squared=None if d.get("r_squared") is None else float(d["r_squared"]),
                fitted_at_grid=None if grid is None else tuple(float(r) for r in grid),
                tolerance=float(d.get("tolerance", 0.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, CalibrationError):
                raise
            raise CalibrationError(f"malformed parameter set: {exc}") from exc


def h_exact(R, solvent: SolventModel, T: float):
    """Exact perturbation sigma_Born / sigma_MSA - 1, i.e. delta_s / R."""
    R = np.asarray(R, dtype=float)
    if np.any(R <= 0):
        raise ValueError("radii must be positive")
    out = msa_shift(solvent, T).delta_s / R
    return float(out) if out.ndim == 0 else out


def msa_normal_field(R, solvent: SolventModel, T: float,
                     units: UnitSystem = DEFAULT_UNITS):
    """E_n for a unit charge of radius R carrying the MSA surface charge."""
    R = np.asarray(R, dtype=float)
    eps = eps_of_T(solvent, T)
    delta = msa_shift(solvent, T).delta_s
    with np.errstate(divide="ignore", invalid="ignore"):
        sigma = -units.eps_hat(eps) / (4.0 * np.pi * R * (R + delta))
        E = -1.0 / R**2 - 2.0 * np.pi * sigma
    E = np.where(np.isinf(R), 0.0, E)
    return float(E) if E.ndim == 0 else E


def _fit_terms(solvent, T, radii, units):
    radii = np.asarray(radii, dtype=float)
    if radii.size == 0:
        raise CalibrationError("radii grid is empty")
    if np.any(radii <= 0) or np.any(np.isnan(radii)):
        raise CalibrationError("radii must be positive")
    with np.errstate(divide="ignore"):
        h = msa_shift(solvent, T).delta_s / radii
    E = np.abs(msa_normal_field(radii, solvent, T, units))
    return h, E


def fit_alpha(solvent: SolventModel, T: float,
              radii_grid: Sequence[float] = DEFAULT_RADII_GRID,
              units: UnitSystem = DEFAULT_UNITS) -> tuple[float, float]:
    """Least-squares alpha (angstrom) at one temperature and its residual sum."""
    h, E = _fit_terms(solvent, T, radii_grid, units)
    denom = E.sum()
    if not denom > 0:
        raise CalibrationError("all normal fields vanish on the radii grid")
    alpha = float((h * np.sqrt(E)).sum() / denom)
    sse = float(((h - alpha * np.sqrt(E)) ** 2).sum())
    return alpha, sse


def default_temperature_grid(solvent: SolventModel, n: int = 5) -> list[float]:
    lo, hi = solvent.valid_range
    return [float(t) for t in np.linspace(lo, hi, n)]


def fit_alpha_line(solvent: SolventModel, T_grid: Sequence[float] | None = None,
                   radii_grid: Sequence[float] = DEFAULT_RADII_GRID,
                   units: UnitSystem = DEFAULT_UNITS) -> CalibrationSet:
    """Fit alpha at each temperature, then an ordinary least-squares line."""
    if T_grid is None:
        T_grid = default_temperature_grid(solvent)
    T_grid = [float(t) for t in T_grid]
    if len(set(T_grid)) < 2:
        raise CalibrationError("need at least two distinct temperatures for a line")
    samples = []
    for T in T_grid:
        a, sse = fit_alpha(solvent, T, radii_grid, units)
        samples.append(CalibrationSample(T, a, sse))

    t = np.array([s.T for s in samples])
    y = np.array([s.alpha for s in samples])
    tm, ym = t.mean(), y.mean()
    a2 = float(((t - tm) * (y - ym)).sum() / ((t - tm) ** 2).sum())
    a1 = float(ym - a2 * tm)
    resid = y - (a1 + a2 * t)
    ss_tot = float(((y - ym) ** 2).sum())
    ss_res = float((resid**2).sum())
    r2 = 1.0 if ss_tot == 0.0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return CalibrationSet(
        solvent=solvent.name,
        samples=tuple(samples),
        a1=a1,
        a2=a2,
        r_squared=r2,
        fitted_at_grid=tuple(float(r) for r in radii_grid),
        tolerance=float(np.abs(resid).max()),
    )


def save_params(cset: CalibrationSet, path: str | Path) -> None:
    Path(path).write_text(json.dumps(cset.to_dict(), indent=2) + "\n", encoding="utf-8")


def load_params(path: str | Path) -> CalibrationSet:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CalibrationError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise CalibrationError(f"{path}: expected a JSON object")
    return CalibrationSet.from_dict(data)


def default_params(solvent: str) -> CalibrationSet:
    """Shipped alpha(T) line for a built-in solvent."""
    ref = resources.files("hsbcmsa").joinpath("data").joinpath("alpha_params").joinpath(f"{solvent}.json")
    if not ref.is_file():
        raise KeyError(f"no shipped alpha parameters for solvent {solvent!r}")
    with resources.as_file(ref) as p:
        return load_params(p)


@dataclass(frozen=True)
class FigurePoint:
    solvent: str
    T: float
    R: float
    E_n: float
    h_exact: float
    h_model: float
    alpha: float = field(default=0.0)


def figure_data(solvent: SolventModel, T: float,
                radii_grid: Sequence[float] = DEFAULT_RADII_GRID,
                alpha: float | None = None,
                units: UnitSystem = DEFAULT_UNITS) -> list[FigurePoint]:
    """Exact and modelled h(E_n) sampled on a radii grid.

    ``alpha`` defaults to the least-squares value at ``T`` on the same grid.
    An infinite radius gives the E_n = 0 point.
    """
    if alpha is None:
        alpha, _ = fit_alpha(solvent, T, radii_grid, units)
    h, E = _fit_terms(solvent, T, radii_grid, units)
    rows = []
    for R, hx, e in zip(np.asarray(radii_grid, dtype=float), h, E):
        rows.append(FigurePoint(solvent.name, float(T), float(R), float(e), float(hx),
                                float(alpha * math.sqrt(e)), float(alpha)))
    return rows
