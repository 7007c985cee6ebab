"""End-to-end acceptance criteria, one marker per criterion.

The terminal summary prints a single pass/fail line for each criterion;
a criterion passes only if every test carrying its marker passes.
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from threadpoolctl import threadpool_limits

from hsbcmsa.bem import (ChargeSet, PanelSystem, apply_K, icosphere, kirkwood_energy,
                         reaction_energy, solve_linear, solve_nonlinear)
from hsbcmsa.calibration import (DEFAULT_RADII_GRID, default_params, fit_alpha,
                                 fit_alpha_line, h_exact, msa_normal_field)
from hsbcmsa.ions import IonSpec, radius_from_born
from hsbcmsa.solvents import BUILTIN_SOLVENTS, eps_of_T, wertheim_lambda
from hsbcmsa.tables import solvation_table
from hsbcmsa.thermo import (born_energy, charging_ratio, entropy, free_energy, hsbc_solve,
                            msa_energy)
from hsbcmsa.units import K_BORN

from oracles import charging_ratio_mp

SOLVENTS = ["W", "MeOH", "F", "AN", "DMF"]
acceptance = pytest.mark.acceptance


@pytest.fixture(scope="module")
def fitted_lines():
    return {s: fit_alpha_line(BUILTIN_SOLVENTS[s]) for s in SOLVENTS}


def _max_abs_diff(ions, reference, solvent, column, compute):
    return max(abs(compute(ion) - reference.get(ion.name, solvent, column)) for ion in ions)


@acceptance(1, "Born dG, 9 ions x 5 solvents, +-1 kJ/mol")
@pytest.mark.parametrize("solvent", SOLVENTS)
def test_born_free_energies(solvent, ions, reference):
    s = BUILTIN_SOLVENTS[solvent]
    eps = eps_of_T(s, 25.0)
    assert _max_abs_diff(ions, reference, solvent, "dG_born",
                         lambda i: born_energy(i, eps)) <= 1.0


@acceptance(2, "MSA dG, 45 values, +-1 kJ/mol")
@pytest.mark.parametrize("solvent", SOLVENTS)
def test_msa_free_energies(solvent, ions, reference):
    s = BUILTIN_SOLVENTS[solvent]
    assert _max_abs_diff(ions, reference, solvent, "dG_msa",
                         lambda i: msa_energy(i, s, 25.0)) <= 1.0


@acceptance(2, "MSA dG, 45 values, +-1 kJ/mol")
def test_msa_lithium_anchors(ions):
    li = ions[0]
    anchors = {"W": -485, "MeOH": -392, "F": -461, "AN": -371, "DMF": -335}
    for s, g in anchors.items():
        assert abs(msa_energy(li, BUILTIN_SOLVENTS[s], 25.0) - g) <= 1.0


@acceptance(3, "Born and MSA dS, +-1 J/(mol K)")
@pytest.mark.parametrize("method", ["fd", "analytic"])
@pytest.mark.parametrize("solvent", SOLVENTS)
def test_born_msa_entropies(solvent, method, ions, reference):
    s = BUILTIN_SOLVENTS[solvent]
    for model, col in (("Born", "dS_born"), ("MSA", "dS_msa")):
        worst = _max_abs_diff(ions, reference, solvent, col,
                              lambda i: entropy(model, i, s, 25.0, method=method))
        assert worst <= 1.0, f"{solvent} {col}: max deviation {worst:.2f} J/(mol K)"


@acceptance(3, "Born and MSA dS, +-1 J/(mol K)")
def test_entropy_anchors(ions):
    w = BUILTIN_SOLVENTS["W"]
    assert abs(entropy("Born", ions[0], w, 25.0) + 46) <= 1.0
    assert abs(entropy("MSA", ions[0], w, 25.0) + 198) <= 1.0


@acceptance(4, "alpha calibration within 5%, r^2 >= 0.99")
def test_water_alpha_samples():
    w = BUILTIN_SOLVENTS["W"]
    for sample in default_params("W").samples:
        alpha, _ = fit_alpha(w, sample.T)
        assert abs(alpha / sample.alpha - 1) <= 0.05


@acceptance(4, "alpha calibration within 5%, r^2 >= 0.99")
@pytest.mark.parametrize("solvent", SOLVENTS)
def test_alpha_lines(solvent, fitted_lines):
    ref, cs = default_params(solvent), fitted_lines[solvent]
    assert abs(cs.a1 / ref.a1 - 1) <= 0.05
    assert abs(cs.a2 / ref.a2 - 1) <= 0.05
    assert cs.r_squared >= 0.99


@acceptance(5, "HSBC dG within 3% or 10 kJ/mol; HSBC-vs-MSA error bounds")
@pytest.mark.parametrize("source", ["fitted", "shipped"])
@pytest.mark.parametrize("solvent", SOLVENTS)
def test_hsbc_columns(solvent, source, ions, reference, fitted_lines):
    s = BUILTIN_SOLVENTS[solvent]
    line = fitted_lines[solvent] if source == "fitted" else default_params(solvent)
    rows = solvation_table(s, line, 25.0, ions)
    for ion, row in zip(ions, rows):
        ref = reference.get(ion.name, solvent, "dG_hsbc")
        assert abs(row["dG_hsbc"] - ref) <= max(0.03 * abs(ref), 10.0)
        assert row["dG_err_pct"] <= 4.2 + 2.0
        assert row["dS_err_pct"] <= 6.2 + 2.0


@acceptance(6, "h-model error <= 12% on the default grid, worst at small R and high T")
def test_h_model_quality(fitted_lines):
    w = BUILTIN_SOLVENTS["W"]
    line = fitted_lines["W"]
    R = np.asarray(DEFAULT_RADII_GRID)
    worst = 0.0
    for T in np.linspace(0.0, 100.0, 21):
        h = h_exact(R, w, T)
        model = line(T) * np.sqrt(np.abs(msa_normal_field(R, w, T)))
        worst = max(worst, float((np.abs(model - h) / h).max()))
    assert worst <= 0.12

    def err(R, T):
        h = h_exact(R, w, T)
        return abs(line(T) * np.sqrt(abs(msa_normal_field(R, w, T))) - h) / h

    assert err(0.8, 100.0) > err(2.0, 0.0)


@acceptance(7, "charging ratio: 1 at h1 = 0, <= 1.15 and monotone on [0, 1]")
def test_charging_linearity():
    assert charging_ratio(0.0) == 1.0
    grid = [charging_ratio(h) for h in np.round(np.arange(0.0, 1.0001, 0.1), 10)]
    assert max(grid) <= 1.15
    assert all(b >= a for a, b in zip(grid, grid[1:]))
    assert charging_ratio(0.6) == pytest.approx(charging_ratio_mp(0.6), abs=1e-10)
    assert charging_ratio(0.6) == pytest.approx(1.086, abs=5e-4)


@pytest.fixture(scope="module")
def unit_sphere_system():
    return PanelSystem(icosphere(1.0, 3), ChargeSet([[0, 0, 0]], [1.0]), eps_out=78.283)


@acceptance(8, "BEM validation on icosphere subdivision 3")
def test_bem_eigenvalue(unit_sphere_system):
    Ks = apply_K(unit_sphere_system, np.ones(len(unit_sphere_system)))
    assert np.abs(Ks - 0.5).max() / 0.5 <= 0.02


@acceptance(8, "BEM validation on icosphere subdivision 3")
def test_bem_born(unit_sphere_system):
    g = reaction_energy(unit_sphere_system, solve_linear(unit_sphere_system).sigma)
    assert abs(g / (-K_BORN * (1 - 1 / 78.283)) - 1) <= 0.01


@acceptance(8, "BEM validation on icosphere subdivision 3")
def test_bem_kirkwood(unit_sphere_system):
    q = ChargeSet([[0.5, 0, 0]], [1.0])
    s = unit_sphere_system.with_charges(q)
    g = reaction_energy(s, solve_linear(s).sigma)
    ref = kirkwood_energy(q.positions, q.charges, 1.0, 78.283, n_terms=50)
    assert abs(g / ref - 1) <= 0.02


@acceptance(8, "BEM validation on icosphere subdivision 3")
def test_bem_nonlinear_sphere(ions):
    li = ions[0]
    w = BUILTIN_SOLVENTS["W"]
    system = PanelSystem(icosphere(li.R, 3), ChargeSet([[0, 0, 0]], [1.0]),
                         eps_out=eps_of_T(w, 25.0), alpha=0.685)
    g = reaction_energy(system, solve_nonlinear(system).sigma)
    assert abs(g / hsbc_solve(li, w, 25.0, 0.685).dG - 1) <= 0.015


@acceptance(8, "BEM validation on icosphere subdivision 3")
def test_bem_alpha_zero(unit_sphere_system):
    lin = solve_linear(unit_sphere_system)
    non = solve_nonlinear(unit_sphere_system)
    assert np.abs(non.sigma - lin.sigma).max() <= 1e-10 * np.abs(lin.sigma).max()


@acceptance(9, "property suites: symmetry, limits, Wertheim, round trip, determinism")
def test_property_charge_symmetry(ions):
    for s in SOLVENTS:
        solvent, line = BUILTIN_SOLVENTS[s], default_params(s)
        for ion in ions:
            for model in ("Born", "MSA", "HSBC"):
                assert free_energy(model, ion.with_charge(1), solvent, 25.0, line) == \
                    free_energy(model, ion.with_charge(-1), solvent, 25.0, line)


@acceptance(9, "property suites: symmetry, limits, Wertheim, round trip, determinism")
def test_property_born_limits(ions):
    w = BUILTIN_SOLVENTS["W"]
    for ion in ions:
        assert hsbc_solve(ion, w, 25.0, 0.0).dG == born_energy(ion, eps_of_T(w, 25.0))
    big = IonSpec("x", 1, 1e4)
    g = born_energy(big, eps_of_T(w, 25.0))
    assert abs(hsbc_solve(big, w, 25.0, 0.685).dG / g - 1) < 1e-2
    assert abs(msa_energy(big, w, 25.0) / g - 1) < 1e-3


@acceptance(9, "property suites: symmetry, limits, Wertheim, round trip, determinism")
def test_property_wertheim_residual():
    for eps in np.logspace(0, 3, 400):
        lam = wertheim_lambda(eps)
        assert abs(lam**2 * (1 + lam) ** 4 - 16 * eps) / (16 * eps) <= 1e-12


@acceptance(9, "property suites: symmetry, limits, Wertheim, round trip, determinism")
def test_property_radius_round_trip():
    for R in np.linspace(0.3, 20.0, 500):
        g = born_energy(IonSpec("x", 1, R), 78.3)
        assert abs(radius_from_born(g, 78.3) / R - 1) <= 1e-12


@acceptance(9, "property suites: symmetry, limits, Wertheim, round trip, determinism")
def test_property_thread_count_independence(ions):
    def table(s):
        return solvation_table(BUILTIN_SOLVENTS[s], default_params(s), 25.0, ions)

    serial = [table(s) for s in SOLVENTS]
    with ThreadPoolExecutor(max_workers=5) as pool:
        threaded = list(pool.map(table, SOLVENTS))
    assert serial == threaded

    mesh = icosphere(1.0, 2)
    energies = []
    for n in sorted({1, os.cpu_count() or 1}):
        with threadpool_limits(limits=n):
            s = PanelSystem(mesh, ChargeSet([[0.2, 0, 0]], [1.0]), eps_out=80.0, alpha=0.7)
            energies.append(reaction_energy(s, solve_nonlinear(s).sigma))
    assert max(energies) - min(energies) <= 1e-12 * abs(energies[0])
