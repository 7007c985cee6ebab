"""Born, MSA and HSBC/MSA free energies and entropies of spherical ions.

Surface charges are in reduced units (e0 / angstrom^2): the Born charge is
``-eps_hat q / (4 pi R^2)``. The normal field follows the same scaling, so
that the bare Coulomb field at the ion surface is ``q / R^2``:

    E_n = 4 pi (q dG/dn - K sigma) = -q / R^2 - 2 pi sigma

where K sigma = sigma / 2 on a sphere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

from scipy import integrate

from .ions import IonSpec
from .solvents import SolventModel, TemperatureRangeError, eps_of_T, msa_shift
from .units import DEFAULT_UNITS, UnitSystem

__all__ = [
    "MODELS",
    "ThermoResult",
    "ConvergenceError",
    "born_energy",
    "msa_energy",
    "born_sigma",
    "msa_sigma",
    "h_model",
    "normal_field",
    "hsbc_solve",
    "free_energy",
    "entropy",
    "solvate",
    "charging_ratio",
]

MODELS = ("Born", "MSA", "HSBC")

AlphaLike = Union[float, Callable[[float], float]]


class ConvergenceError(RuntimeError):
    """An iterative solve did not reach its tolerance."""

    def __init__(self, message: str, iterations: int, residual: float):
        super().__init__(f"{message} (iterations={iterations}, residual={residual:.3e})")
        self.iterations = iterations
        self.residual = residual


@dataclass(frozen=True)
class ThermoResult:
    model: str
    dG: float
    dS: float | None
    sigma: float
    E_n: float
    h: float
    iterations: int = 0


def _check_eps(eps_out: float, units: UnitSystem) -> None:
    if eps_out < units.eps_in:
        raise ValueError(f"need eps_out >= eps_in, got {eps_out} < {units.eps_in}")


def born_energy(ion: IonSpec, eps_out: float, units: UnitSystem = DEFAULT_UNITS) -> float:
    """Born solvation free energy, kJ/mol."""
    _check_eps(eps_out, units)
    return -units.K_B * ion.q**2 * (1.0 / units.eps_in - 1.0 / eps_out) / ion.R


def msa_energy(ion: IonSpec, solvent: SolventModel, T: float,
               units: UnitSystem = DEFAULT_UNITS) -> float:
    """MSA solvation free energy, kJ/mol: Born with R replaced by R + delta_s."""
    eps = eps_of_T(solvent, T)
    _check_eps(eps, units)
    delta = msa_shift(solvent, T).delta_s
    return -units.K_B * ion.q**2 * (1.0 / units.eps_in - 1.0 / eps) / (ion.R + delta)


def born_sigma(ion: IonSpec, eps_out: float, units: UnitSystem = DEFAULT_UNITS) -> float:
    _check_eps(eps_out, units)
    return -units.eps_hat(eps_out) * ion.q / (4.0 * math.pi * ion.R**2)


def msa_sigma(ion: IonSpec, solvent: SolventModel, T: float,
              units: UnitSystem = DEFAULT_UNITS) -> float:
    eps = eps_of_T(solvent, T)
    _check_eps(eps, units)
    delta = msa_shift(solvent, T).delta_s
    return -units.eps_hat(eps) * ion.q / (4.0 * math.pi * ion.R * (ion.R + delta))


def h_model(E_n, alpha: float):
    """HSBC/MSA perturbation alpha * sqrt(|E_n|). Works on scalars and arrays."""
    if alpha < 0:
        raise ValueError(f"alpha must be non-negative, got {alpha}")
    return alpha * abs(E_n) ** 0.5


def normal_field(ion: IonSpec, sigma: float, units: UnitSystem = DEFAULT_UNITS) -> float:
    """Normal field at a sphere carrying uniform induced charge ``sigma``."""
    return -ion.q / ion.R**2 - 2.0 * math.pi * sigma


def _alpha_at(alpha: AlphaLike, T: float) -> float:
    return float(alpha(T)) if callable(alpha) else float(alpha)


def hsbc_solve(ion: IonSpec, solvent: SolventModel, T: float, alpha: AlphaLike,
               units: UnitSystem = DEFAULT_UNITS, tol: float = 1e-12,
               max_iter: int = 500) -> ThermoResult:
    """Self-consistent HSBC/MSA surface charge and free energy of a sphere.

    Solves (1 + h(E_n(sigma))) sigma = sigma_Born by fixed-point iteration.
    ``alpha`` may be a number or a callable of temperature.
    """
    a = _alpha_at(alpha, T)
    if a < 0:
        raise ValueError(f"alpha must be non-negative, got {a}")
    eps = eps_of_T(solvent, T)
    sb = born_sigma(ion, eps, units)
    g_born = born_energy(ion, eps, units)
    if sb == 0.0:
        return ThermoResult("HSBC", g_born, None, 0.0, normal_field(ion, 0.0), 0.0)

    def residual(s):
        return abs((1.0 + h_model(normal_field(ion, s), a)) * s - sb) / abs(sb)

    sigma = sb
    res = residual(sigma)
    damping = 1.0
    it = 0
    while res > tol:
        if it >= max_iter:
            raise ConvergenceError("HSBC fixed point did not converge", it, res)
        it += 1
        target = sb / (1.0 + h_model(normal_field(ion, sigma), a))
        trial = sigma + damping * (target - sigma)
        trial_res = residual(trial)
        if trial_res > res and damping == 1.0:
            damping = 0.5
            trial = sigma + damping * (target - sigma)
            trial_res = residual(trial)
        sigma, res = trial, trial_res

    E = normal_field(ion, sigma)
    return ThermoResult("HSBC", g_born * (sigma / sb), None, sigma, E, h_model(E, a), it)


def free_energy(model: str, ion: IonSpec, solvent: SolventModel, T: float,
                alpha: AlphaLike | None = None,
                units: UnitSystem = DEFAULT_UNITS) -> float:
    if model == "Born":
        return born_energy(ion, eps_of_T(solvent, T), units)
    if model == "MSA":
        return msa_energy(ion, solvent, T, units)
    if model == "HSBC":
        if alpha is None:
            raise ValueError("HSBC model needs an alpha")
        return hsbc_solve(ion, solvent, T, alpha, units).dG
    raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")


def _stencil(solvent: SolventModel, T: float, dT: float) -> tuple[list[float], list[float]]:
    """Nodes and weights of a second-order first-derivative stencil in range.

    Central when T +- dT fits in the valid range; one-sided three-point at
    the range edges.
    """
    lo, hi = solvent.valid_range
    if not lo <= T <= hi:
        raise TemperatureRangeError(
            f"T = {T} degC is outside the valid range [{lo}, {hi}] degC "
            f"of solvent {solvent.name}"
        )
    if T - dT >= lo and T + dT <= hi:
        return [T - dT, T + dT], [-0.5 / dT, 0.5 / dT]
    if T + 2 * dT <= hi:
        return [T, T + dT, T + 2 * dT], [-1.5 / dT, 2.0 / dT, -0.5 / dT]
    if T - 2 * dT >= lo:
        return [T - 2 * dT, T - dT, T], [0.5 / dT, -2.0 / dT, 1.5 / dT]
    raise TemperatureRangeError(
        f"valid range of {solvent.name} is too narrow for a step of {dT} K"
    )


def _derivative(f: Callable[[float], float], solvent, T, dT) -> float:
    nodes, weights = _stencil(solvent, T, dT)
    return sum(w * f(t) for t, w in zip(nodes, weights))


def entropy(model: str, ion: IonSpec, solvent: SolventModel, T: float,
            alpha: AlphaLike | None = None, units: UnitSystem = DEFAULT_UNITS,
            dT: float = 0.1, method: str = "fd", dT_h: float = 0.01) -> float:
    """Solvation entropy -d(dG)/dT in J/(mol K).

    ``method="fd"`` differentiates the model free energy numerically.
    ``method="analytic"`` differentiates the closed forms (Born, MSA) or, for
    HSBC, uses the quotient rule on eps_hat / (1 + h) with h' taken by finite
    differences of step ``dT_h``.
    """
    if method == "fd":
        slope = _derivative(lambda t: free_energy(model, ion, solvent, t, alpha, units),
                            solvent, T, dT)
        return -1000.0 * slope
    if method != "analytic":
        raise ValueError(f"unknown entropy method {method!r}")

    eps = eps_of_T(solvent, T)
    deps = solvent.law.derivative(T)
    q2 = ion.q**2
    if model == "Born":
        return 1000.0 * units.K_B * q2 * deps / (eps**2 * ion.R)
    if model == "MSA":
        shift = msa_shift(solvent, T)
        g = 1.0 / units.eps_in - 1.0 / eps
        Rd = ion.R + shift.delta_s
        slope = -units.K_B * q2 * (deps / eps**2 / Rd - g * shift.d_delta_s_dT / Rd**2)
        return -1000.0 * slope
    if model == "HSBC":
        if alpha is None:
            raise ValueError("HSBC model needs an alpha")
        eh = units.eps_hat(eps)
        deh = units.eps_in * deps / eps**2
        h = hsbc_solve(ion, solvent, T, alpha, units).h
        dh = _derivative(lambda t: hsbc_solve(ion, solvent, t, alpha, units).h,
                         solvent, T, dT_h)
        pref = units.K_B * q2 / (units.eps_in * ion.R)
        return 1000.0 * pref * (deh * (1.0 + h) - dh * eh) / (1.0 + h) ** 2
    raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")


def solvate(model: str, ion: IonSpec, solvent: SolventModel, T: float,
            alpha: AlphaLike | None = None, units: UnitSystem = DEFAULT_UNITS,
            dT: float = 0.1) -> ThermoResult:
    """Free energy, entropy and surface quantities for one model."""
    eps = eps_of_T(solvent, T)
    dS = entropy(model, ion, solvent, T, alpha, units, dT)
    if model == "Born":
        s = born_sigma(ion, eps, units)
        return ThermoResult("Born", born_energy(ion, eps, units), dS, s,
                            normal_field(ion, s, units), 0.0)
    if model == "MSA":
        s = msa_sigma(ion, solvent, T, units)
        h = msa_shift(solvent, T).delta_s / ion.R
        return ThermoResult("MSA", msa_energy(ion, solvent, T, units), dS, s,
                            normal_field(ion, s, units), h)
    r = hsbc_solve(ion, solvent, T, alpha, units)
    return ThermoResult("HSBC", r.dG, dS, r.sigma, r.E_n, r.h, r.iterations)


def charging_ratio(h1: float) -> float:
    """Nonlinear-to-linear charging free energy ratio for h(q) = h1 sqrt(q).

    2 (1 + h1) int_0^1 q dq / (1 + h1 sqrt(q)), integrated in u = sqrt(q).
    """
    if h1 < 0:
        raise ValueError(f"h1 must be non-negative, got {h1}")
    if h1 == 0:
        return 1.0
    val, _ = integrate.quad(lambda u: 2.0 * u**3 / (1.0 + h1 * u), 0.0, 1.0,
                            epsabs=1e-12, epsrel=1e-12)
    return 2.0 * (1.0 + h1) * val
