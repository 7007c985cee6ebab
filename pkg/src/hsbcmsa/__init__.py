"""Born, MSA and HSBC/MSA ion solvation thermodynamics."""

__version__ = "0.1.0"

from .calibration import (CalibrationSet, default_params, figure_data, fit_alpha,
                          fit_alpha_line, h_exact, load_params, save_params)
from .ions import (IonSpec, ReferenceDataset, builtin_ion_set, builtin_reference, get_ion,
                   load_reference, radius_from_born)
from .solvents import (BUILTIN_SOLVENTS, DielectricLaw, SolventModel, deps_dT, eps_of_T,
                       get_solvent, msa_shift, wertheim_lambda)
from .thermo import (ThermoResult, born_energy, born_sigma, charging_ratio, entropy,
                     free_energy, h_model, hsbc_solve, msa_energy, msa_sigma, normal_field,
                     solvate)
from .units import DEFAULT_UNITS, K_BORN, UnitSystem

__all__ = [
    "BUILTIN_SOLVENTS", "CalibrationSet", "DEFAULT_UNITS", "DielectricLaw", "IonSpec",
    "K_BORN", "ReferenceDataset", "SolventModel", "ThermoResult", "UnitSystem",
    "born_energy", "born_sigma", "builtin_ion_set", "builtin_reference", "charging_ratio",
    "default_params", "deps_dT", "entropy", "eps_of_T", "figure_data", "fit_alpha",
    "fit_alpha_line", "free_energy", "get_ion", "get_solvent", "h_exact", "h_model",
    "hsbc_solve", "load_params", "load_reference", "msa_energy", "msa_shift", "msa_sigma",
    "normal_field", "radius_from_born", "save_params", "solvate", "wertheim_lambda",
]
