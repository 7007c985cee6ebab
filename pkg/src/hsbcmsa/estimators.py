"""scikit-learn compatible wrappers around calibration and solvation.

These make the calibration line and the solvation models usable inside
pipelines and grid searches. Inputs are column arrays: temperatures in degC
for :class:`AlphaTemperatureRegressor`, ion radii in angstrom (optionally
with a valence column) for :class:`SolvationEstimator`.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .calibration import (DEFAULT_RADII_GRID, CalibrationSample, CalibrationSet,
                          default_params, fit_alpha)
from .ions import IonSpec
from .solvents import SolventModel, get_solvent
from .thermo import MODELS, free_energy, solvate
from .units import UnitSystem

__all__ = ["AlphaTemperatureRegressor", "SolvationEstimator"]


def _solvent(s) -> SolventModel:
    return s if isinstance(s, SolventModel) else get_solvent(s)


class AlphaTemperatureRegressor(RegressorMixin, BaseEstimator):
    """Straight-line model alpha(T) = a1 + a2 T for one solvent.

    ``fit(X)`` computes the least-squares alpha at every temperature in X
    and regresses a line through them. ``fit(X, y)`` skips the per-T fits
    and regresses the supplied alpha values directly.

    Attributes set by ``fit``: ``intercept_`` (a1), ``coef_`` (a2),
    ``alphas_``, ``r_squared_``, ``calibration_set_``.
    """

    def __init__(self, solvent="W", radii_grid=None):
        self.solvent = solvent
        self.radii_grid = radii_grid

    def fit(self, X, y=None):
        X = check_array(X, ensure_2d=False)
        T = X.reshape(-1) if X.ndim == 1 or X.shape[1] == 1 else None
        if T is None:
            raise ValueError("X must hold a single column of temperatures")
        if len(np.unique(T)) < 2:
            raise ValueError("need at least two distinct temperatures")
        solvent = _solvent(self.solvent)
        grid = DEFAULT_RADII_GRID if self.radii_grid is None else tuple(self.radii_grid)
        if y is None:
            fits = [fit_alpha(solvent, float(t), grid) for t in T]
            alphas = np.array([a for a, _ in fits])
            sses = [s for _, s in fits]
        else:
            alphas = check_array(y, ensure_2d=False).reshape(-1).astype(float)
            if len(alphas) != len(T):
                raise ValueError("X and y have different lengths")
            sses = [None] * len(T)
        a2, a1 = np.polyfit(T, alphas, 1)
        resid = alphas - (a1 + a2 * T)
        ss_tot = float(((alphas - alphas.mean()) ** 2).sum())
        r2 = 1.0 if ss_tot == 0.0 else min(1.0, max(0.0, 1.0 - float((resid**2).sum()) / ss_tot))
        self.intercept_ = float(a1)
        self.coef_ = np.array([float(a2)])
        self.alphas_ = alphas
        self.r_squared_ = r2
        self.calibration_set_ = CalibrationSet(
            solvent=solvent.name,
            samples=tuple(CalibrationSample(float(t), float(a), s)
                          for t, a, s in zip(T, alphas, sses)),
            a1=float(a1), a2=float(a2), r_squared=r2,
            fitted_at_grid=grid if y is None else None,
            tolerance=float(np.abs(resid).max()),
        )
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "calibration_set_")
        T = check_array(X, ensure_2d=False).reshape(-1)
        return self.intercept_ + self.coef_[0] * T


class SolvationEstimator(TransformerMixin, RegressorMixin, BaseEstimator):
    """Solvation free energy of spherical ions under one model.

    X has one column of radii (angstrom) and an optional second column of
    valences (default +1). ``predict`` returns dG in kJ/mol; ``transform``
    returns the columns ``dG, dS, sigma, E_n, h``.

    ``alpha`` selects the HSBC parameter: a number, ``"params"`` for the
    shipped alpha(T) line of the solvent, or ``"fit"`` to calibrate a line
    during ``fit``. It is ignored by the Born and MSA models.
    """

    feature_names_out = ("dG", "dS", "sigma", "E_n", "h")

    def __init__(self, model="HSBC", solvent="W", temperature=25.0, alpha="params",
                 eps_in=1.0):
        self.model = model
        self.solvent = solvent
        self.temperature = temperature
        self.alpha = alpha
        self.eps_in = eps_in

    def _ions(self, X):
        X = check_array(X)
        if X.shape[1] not in (1, 2):
            raise ValueError("X must have a radius column and optionally a valence column")
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} columns, expected {self.n_features_in_}")
        z = X[:, 1] if X.shape[1] == 2 else np.ones(len(X))
        if np.any(z != np.round(z)):
            raise ValueError("valences must be integers")
        return [IonSpec(f"ion{i}", int(zi), float(R)) for i, (R, zi) in enumerate(zip(X[:, 0], z))]

    def fit(self, X, y=None):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        X = check_array(X)
        self.n_features_in_ = X.shape[1]
        self._ions(X)
        self.solvent_ = _solvent(self.solvent)
        self.units_ = UnitSystem(eps_in=self.eps_in)
        if self.model != "HSBC":
            self.alpha_ = None
        elif isinstance(self.alpha, str):
            if self.alpha == "params":
                self.alpha_ = default_params(self.solvent_.name)
            elif self.alpha == "fit":
                lo, hi = self.solvent_.valid_range
                T = np.linspace(lo, hi, 5).reshape(-1, 1)
                self.alpha_ = AlphaTemperatureRegressor(self.solvent_).fit(T).calibration_set_
            else:
                raise ValueError(f"unknown alpha source {self.alpha!r}")
        else:
            if self.alpha < 0:
                raise ValueError("alpha must be non-negative")
            self.alpha_ = float(self.alpha)
        return self

    def transform(self, X):
        check_is_fitted(self, "solvent_")
        out = []
        for ion in self._ions(X):
            r = solvate(self.model, ion, self.solvent_, self.temperature, self.alpha_,
                        self.units_)
            out.append([r.dG, r.dS, r.sigma, r.E_n, r.h])
        return np.array(out, dtype=float).reshape(-1, 5)

    def predict(self, X):
        check_is_fitted(self, "solvent_")
        return np.array([free_energy(self.model, ion, self.solvent_, self.temperature,
                                     self.alpha_, self.units_) for ion in self._ions(X)])

    def get_feature_names_out(self, input_features=None):
        return np.array(self.feature_names_out, dtype=object)
