"""Solvent dielectric laws, the Wertheim relation and the MSA radius shift.

All laws take temperature in degrees Celsius. Derivatives are returned per
kelvin, which is the same number as per degree Celsius.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

__all__ = [
    "DielectricLaw",
    "SolventModel",
    "MsaShift",
    "TemperatureRangeError",
    "DomainError",
    "eps_of_T",
    "deps_dT",
    "wertheim_lambda",
    "msa_shift",
    "BUILTIN_SOLVENTS",
    "get_solvent",
    "load_solvents",
    "dump_solvents",
]

VARIANTS = ("cubic", "loglinear", "linear")


class TemperatureRangeError(ValueError):
    """Temperature outside a dielectric law's valid range."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


@dataclass(frozen=True)
class DielectricLaw:
    """Closed-form dielectric constant as a function of temperature (deg C).

    ``variant`` selects the form and ``params`` holds its coefficients:

    * ``cubic``: ``(c3, c2, c1, c0)`` with eps = c3 T^3 + c2 T^2 + c1 T + c0
    * ``loglinear``: ``(eps_T0, a_hat, T0)`` with
      log10 eps = log10 eps_T0 - a_hat (T - T0)
    * ``linear``: ``(eps_T0, a, T0)`` with eps = eps_T0 - a (T - T0)
    """

    variant: str
    params: tuple[float, ...]
    valid_range: tuple[float, float]

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown dielectric law variant {self.variant!r}")
        expected = 4 if self.variant == "cubic" else 3
        if len(self.params) != expected:
            raise ValueError(
                f"{self.variant} law needs {expected} parameters, got {len(self.params)}"
            )
        lo, hi = self.valid_range
        if not lo < hi:
            raise ValueError(f"empty valid range {self.valid_range}")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        object.__setattr__(self, "valid_range", (float(lo), float(hi)))

    def value(self, T: float) -> float:
        p = self.params
        if self.variant == "cubic":
            c3, c2, c1, c0 = p
            return ((c3 * T + c2) * T + c1) * T + c0
        if self.variant == "loglinear":
            eps0, a_hat, T0 = p
            return eps0 * 10.0 ** (-a_hat * (T - T0))
        eps0, a, T0 = p
        return eps0 - a * (T - T0)

    def derivative(self, T: float) -> float:
        p = self.params
        if self.variant == "cubic":
            c3, c2, c1, _ = p
            return (3.0 * c3 * T + 2.0 * c2) * T + c1
        if self.variant == "loglinear":
            _, a_hat, _ = p
            return -a_hat * math.log(10.0) * self.value(T)
        return -p[1]


@dataclass(frozen=True)
class SolventModel:
    name: str
    R_s: float
    law: DielectricLaw

    def __post_init__(self):
        if not self.R_s > 0:
            raise ValueError(f"solvent radius must be positive, got {self.R_s}")

    @property
    def valid_range(self) -> tuple[float, float]:
        return self.law.valid_range


@dataclass(frozen=True)
class MsaShift:
    lam: float
    delta_s: float
    d_delta_s_dT: float
    # kept for the entropy path
    d_lam_dT: float = field(default=0.0)


def _check_range(solvent: SolventModel, T: float) -> None:
    lo, hi = solvent.valid_range
    if not (lo <= T <= hi) or math.isnan(T):
        raise TemperatureRangeError(
            f"T = {T} degC is outside the valid range [{lo}, {hi}] degC "
            f"of solvent {solvent.name}"
        )


def eps_of_T(solvent: SolventModel, T: float) -> float:
    """Dielectric constant of ``solvent`` at ``T`` degrees Celsius."""
    _check_range(solvent, T)
    return solvent.law.value(T)


def deps_dT(solvent: SolventModel, T: float) -> float:
    """Analytic temperature derivative of the dielectric constant, per K."""
    _check_range(solvent, T)
    return solvent.law.derivative(T)


def _wertheim_lhs(lam: float) -> float:
    return lam * lam * (1.0 + lam) ** 4


def wertheim_lambda(eps: float) -> float:
    """Positive root of lam^2 (1 + lam)^4 = 16 eps.

    The left side is strictly increasing for lam > 0, so bisection on a fixed
    bracket always converges; a few Newton steps then polish to machine
    precision.
    """
    if not eps >= 1.0:
        raise DomainError(f"Wertheim relation needs eps >= 1, got {eps}")
    target = 16.0 * eps
    lo, hi = 1e-8, 64.0
    if _wertheim_lhs(hi) < target:
        raise DomainError(f"eps = {eps} is beyond the supported bracket")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _wertheim_lhs(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * hi:
            break
    lam = 0.5 * (lo + hi)
    for _ in range(4):
        f = _wertheim_lhs(lam) - target
        df = 2.0 * lam * (1.0 + lam) ** 3 * (1.0 + 3.0 * lam)
        step = f / df
        lam -= step
        if abs(step) <= 1e-16 * lam:
            break
    return lam


def msa_shift(solvent: SolventModel, T: float) -> MsaShift:
    """MSA radius shift delta_s = R_s / lambda and its temperature slope.

    The slope uses implicit differentiation of the Wertheim relation,
    lam' = 16 eps' / (2 lam (1 + lam)^3 (1 + 3 lam)).
    """
    eps = eps_of_T(solvent, T)
    deps = solvent.law.derivative(T)
    lam = wertheim_lambda(eps)
    dlam = 16.0 * deps / (2.0 * lam * (1.0 + lam) ** 3 * (1.0 + 3.0 * lam))
    return MsaShift(
        lam=lam,
        delta_s=solvent.R_s / lam,
        d_delta_s_dT=-solvent.R_s * dlam / lam**2,
        d_lam_dT=dlam,
    )


BUILTIN_SOLVENTS: dict[str, SolventModel] = {
    "W": SolventModel(
        "W",
        1.420,
        DielectricLaw("cubic", (-1.410e-6, 9.398e-4, -0.40008, 87.740), (0.0, 100.0)),
    ),
    "MeOH": SolventModel(
        "MeOH", 1.855, DielectricLaw("loglinear", (32.63, 0.26e-2, 25.0), (5.0, 55.0))
    ),
    "F": SolventModel(
        "F", 1.725, DielectricLaw("linear", (109.0, 0.72, 20.0), (18.0, 25.0))
    ),
    "AN": SolventModel(
        "AN", 2.135, DielectricLaw("linear", (37.50, 0.16, 20.0), (15.0, 25.0))
    ),
    "DMF": SolventModel(
        "DMF",
        2.585,
        DielectricLaw(
            "cubic", (-1.000389e-6, 7.718531e-4, -0.2204448, 42.04569), (-60.0, 120.0)
        ),
    ),
}


def get_solvent(name: str, extra: dict[str, SolventModel] | None = None) -> SolventModel:
    if extra and name in extra:
        return extra[name]
    try:
        return BUILTIN_SOLVENTS[name]
    except KeyError:
        known = sorted(set(BUILTIN_SOLVENTS) | set(extra or ()))
        raise KeyError(f"unknown solvent {name!r}; known: {', '.join(known)}") from None


def _solvent_to_dict(s: SolventModel) -> dict:
    return {
        "name": s.name,
        "R_s": s.R_s,
        "law": {"variant": s.law.variant, "params": list(s.law.params)},
        "valid_range": list(s.law.valid_range),
    }


def _solvent_from_dict(d: dict) -> SolventModel:
    try:
        law = DielectricLaw(
            d["law"]["variant"], tuple(d["law"]["params"]), tuple(d["valid_range"])
        )
        return SolventModel(str(d["name"]), float(d["R_s"]), law)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed solvent entry {d!r}: {exc}") from exc


def dump_solvents(path: str | Path, solvents: Iterable[SolventModel] | None = None) -> None:
    """Write solvents (default: the built-in registry) as a JSON list."""
    if solvents is None:
        solvents = BUILTIN_SOLVENTS.values()
    data = [_solvent_to_dict(s) for s in solvents]
    Path(path).write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


def load_solvents(path: str | Path) -> dict[str, SolventModel]:
    """Read custom solvents from a JSON file (a list or a single object)."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(data, dict):
        data = [data]
    out = {}
    for entry in data:
        s = _solvent_from_dict(entry)
        out[s.name] = s
    return out
