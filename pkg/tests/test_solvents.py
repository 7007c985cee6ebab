import json
import math

import numpy as np
import pytest

from hsbcmsa.solvents import (BUILTIN_SOLVENTS, DielectricLaw, DomainError, SolventModel,
                              TemperatureRangeError, deps_dT, dump_solvents, eps_of_T,
                              get_solvent, load_solvents, msa_shift, wertheim_lambda)

from oracles import bisect_lambda

W, MEOH, F, AN, DMF = (BUILTIN_SOLVENTS[k] for k in ("W", "MeOH", "F", "AN", "DMF"))


def test_water_cubic_at_25():
    direct = -1.410e-6 * 25**3 + 9.398e-4 * 25**2 - 0.40008 * 25 + 87.740
    assert eps_of_T(W, 25.0) == pytest.approx(direct, rel=1e-14)
    assert eps_of_T(W, 25.0) == pytest.approx(78.3033, abs=1e-4)


def test_methanol_reference_point():
    assert eps_of_T(MEOH, 25.0) == pytest.approx(32.63, rel=1e-14)


def test_dmf_cubic_at_25():
    assert eps_of_T(DMF, 25.0) == pytest.approx(37.001, abs=1e-3)


@pytest.mark.parametrize("solvent,T,expected", [
    (W, 25.0, -0.35573), (F, 20.0, -0.72), (AN, 20.0, -0.16),
])
def test_deps_dT_values(solvent, T, expected):
    assert deps_dT(solvent, T) == pytest.approx(expected, abs=5e-6)


@pytest.mark.parametrize("name", list(BUILTIN_SOLVENTS))
def test_deps_dT_matches_central_difference(name):
    s = BUILTIN_SOLVENTS[name]
    lo, hi = s.valid_range
    h = 0.01
    for T in np.linspace(lo + h, hi - h, 50):
        fd = (eps_of_T(s, T + h) - eps_of_T(s, T - h)) / (2 * h)
        assert deps_dT(s, T) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("solvent,T", [(W, 101.0), (F, 17.9), (AN, 25.5), (MEOH, 0.0)])
def test_out_of_range_is_an_error(solvent, T):
    with pytest.raises(TemperatureRangeError, match=solvent.name):
        eps_of_T(solvent, T)


def test_eps_above_one_on_valid_range():
    for s in BUILTIN_SOLVENTS.values():
        lo, hi = s.valid_range
        assert all(eps_of_T(s, T) > 1 for T in np.linspace(lo, hi, 101))


def test_wertheim_trivial_root():
    assert wertheim_lambda(1.0) == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("eps", [78.283, 32.63, 109.0, 2.5, 999.0])
def test_wertheim_against_bisection(eps):
    assert wertheim_lambda(eps) == pytest.approx(bisect_lambda(eps), rel=1e-12)


def test_wertheim_values():
    assert wertheim_lambda(78.283) == pytest.approx(2.65264, abs=1e-5)
    assert wertheim_lambda(32.63) == pytest.approx(2.213, abs=1e-3)


def test_wertheim_residual_and_monotone_on_log_grid():
    grid = np.logspace(0, 3, 200)
    lam = np.array([wertheim_lambda(e) for e in grid])
    resid = np.abs(lam**2 * (1 + lam) ** 4 - 16 * grid) / (16 * grid)
    assert resid.max() <= 1e-12
    assert np.all(np.diff(lam) > 0)


def test_wertheim_domain():
    with pytest.raises(DomainError):
        wertheim_lambda(0.99)


def test_msa_shift_water():
    sh = msa_shift(W, 25.0)
    assert sh.delta_s == pytest.approx(1.42 / bisect_lambda(eps_of_T(W, 25.0)), rel=1e-12)
    assert sh.delta_s == pytest.approx(0.5353, abs=1e-4)
    assert sh.delta_s == 1.42 / sh.lam
    fd = (msa_shift(W, 25.01).delta_s - msa_shift(W, 24.99).delta_s) / 0.02
    assert sh.d_delta_s_dT == pytest.approx(fd, rel=1e-5)
    assert sh.d_delta_s_dT == pytest.approx(4.958e-4, rel=1e-3)


def test_msa_shift_acetonitrile():
    eps = 37.5 - 0.16 * 5
    assert eps_of_T(AN, 25.0) == pytest.approx(eps)
    assert msa_shift(AN, 25.0).delta_s == pytest.approx(2.135 / bisect_lambda(eps), rel=1e-12)
    assert msa_shift(AN, 25.0).delta_s == pytest.approx(0.941, abs=1e-3)


@pytest.mark.parametrize("name", list(BUILTIN_SOLVENTS))
def test_shift_derivative_matches_difference(name):
    s = BUILTIN_SOLVENTS[name]
    lo, hi = s.valid_range
    T = 0.5 * (lo + hi)
    fd = (msa_shift(s, T + 0.01).delta_s - msa_shift(s, T - 0.01).delta_s) / 0.02
    assert msa_shift(s, T).d_delta_s_dT == pytest.approx(fd, rel=1e-5)


def test_delta_decreases_with_eps():
    lam = [wertheim_lambda(e) for e in (5, 20, 80, 200)]
    deltas = [1.5 / x for x in lam]
    assert deltas == sorted(deltas, reverse=True)


def test_law_validation():
    with pytest.raises(ValueError):
        DielectricLaw("quartic", (1.0,), (0.0, 1.0))
    with pytest.raises(ValueError):
        SolventModel("X", -1.0, W.law)


def test_registry_round_trip(tmp_path):
    path = tmp_path / "solvents.json"
    dump_solvents(path)
    loaded = load_solvents(path)
    assert set(loaded) == set(BUILTIN_SOLVENTS)
    for name, s in BUILTIN_SOLVENTS.items():
        assert loaded[name] == s
    assert json.loads(path.read_text())[0]["law"]["variant"] == "cubic"


def test_custom_solvent(tmp_path):
    path = tmp_path / "custom.json"
    path.write_text(json.dumps({"name": "X", "R_s": 2.0, "law": {"variant": "linear",
                                "params": [50.0, 0.2, 25.0]}, "valid_range": [0, 50]}))
    extra = load_solvents(path)
    s = get_solvent("X", extra)
    assert eps_of_T(s, 30.0) == pytest.approx(49.0)
    with pytest.raises(KeyError):
        get_solvent("nope")


def test_solvents_are_immutable():
    with pytest.raises(Exception):
        W.R_s = 3.0
    assert math.isclose(W.R_s, 1.42)
