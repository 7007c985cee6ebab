"""Physical constants in (kJ/mol, angstrom, e0) units."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import constants as _c

__all__ = ["K_BORN", "UnitSystem", "DEFAULT_UNITS"]

#: N_L e0^2 / (8 pi eps0), in kJ angstrom / mol (about 694.7).
K_BORN = _c.N_A * _c.e**2 / (8.0 * math.pi * _c.epsilon_0) * 1e10 / 1e3


@dataclass(frozen=True)
class UnitSystem:
    """Born constant and solute dielectric constant.

    Surface charges are carried in reduced units where the Born charge of a
    sphere is ``-eps_hat q / (4 pi R^2)``; ``K_B`` converts them to energies.
    """

    K_B: float = K_BORN
    eps_in: float = 1.0

    def __post_init__(self):
        if self.eps_in < 1.0:
            raise ValueError(f"eps_in must be >= 1, got {self.eps_in}")
        if self.K_B <= 0:
            raise ValueError("K_B must be positive")

    def eps_hat(self, eps_out: float) -> float:
        return (eps_out - self.eps_in) / eps_out

    @property
    def energy_per_potential(self) -> float:
        """kJ/mol per unit of q * phi_reac, with phi_reac = int sigma G dA."""
        return 4.0 * math.pi * self.K_B / self.eps_in


DEFAULT_UNITS = UnitSystem()
