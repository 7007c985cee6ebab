"""Kirkwood series for point charges inside a dielectric sphere."""

from __future__ import annotations

import numpy as np
from scipy.special import eval_legendre

from ..units import DEFAULT_UNITS, UnitSystem

__all__ = ["kirkwood_energy"]


def kirkwood_energy(positions, charges, R: float, eps_out: float,
                    units: UnitSystem = DEFAULT_UNITS, n_terms: int = 50,
                    center=(0.0, 0.0, 0.0)) -> float:
    """Reaction-field energy (kJ/mol) of charges in a sphere of radius R.

    Truncated multipole series with terms n = 0 .. n_terms - 1; the n = 0
    term alone is the Born energy of the net charge.
    """
    pos = np.atleast_2d(np.asarray(positions, dtype=float)) - np.asarray(center, dtype=float)
    q = np.atleast_1d(np.asarray(charges, dtype=float))
    r = np.linalg.norm(pos, axis=1)
    if np.any(r >= R):
        raise ValueError("charges must lie strictly inside the sphere")
    ei, eo = units.eps_in, eps_out
    with np.errstate(invalid="ignore", divide="ignore"):
        cosg = (pos @ pos.T) / np.outer(r, r)
    cosg = np.nan_to_num(cosg, nan=1.0).clip(-1.0, 1.0)
    rr = np.outer(r, r) / R**2
    total = 0.0
    for n in range(n_terms):
        coef = (n + 1) * (ei - eo) / (n * ei + (n + 1) * eo)
        total += coef * float(q @ (rr**n * eval_legendre(n, cosg)) @ q)
    return units.K_B * total / (ei * R)
