"""Ion definitions and the reference-table CSV reader.

Ion radii are not tabulated: they are recovered by inverting the Born
equation on the water Born column shipped in ``data/table2.csv``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterator

from .solvents import BUILTIN_SOLVENTS, DomainError, eps_of_T
from .units import DEFAULT_UNITS, UnitSystem

__all__ = [
    "IonSpec",
    "ReferenceRow",
    "ReferenceDataset",
    "ReferenceFormatError",
    "ION_NAMES",
    "QUANTITIES",
    "TABLE_FILES",
    "radius_from_born",
    "builtin_ion_set",
    "get_ion",
    "load_reference",
    "builtin_reference",
]

ION_NAMES = ("Li+", "Na+", "K+", "Rb+", "Cs+", "F-", "Cl-", "Br-", "I-")
QUANTITIES = (
    "dG_expt", "dG_born", "dG_msa", "dG_hsbc",
    "dS_expt", "dS_born", "dS_msa", "dS_hsbc",
)
HEADER = ("ion", "solvent") + QUANTITIES
NOT_REPORTED = "N/R"

#: solvent name -> shipped reference table
TABLE_FILES = {
    "W": "table2.csv",
    "MeOH": "table4.csv",
    "F": "table5.csv",
    "AN": "table6.csv",
    "DMF": "table7.csv",
}


class ReferenceFormatError(ValueError):
    """A reference CSV could not be parsed or failed validation."""


@dataclass(frozen=True)
class IonSpec:
    name: str
    z: int
    R: float

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError(f"ion radius must be positive, got {self.R}")
        if abs(self.z) < 1:
            raise ValueError(f"ion valence must be nonzero, got {self.z}")

    @property
    def q(self) -> float:
        return float(self.z)

    def with_charge(self, z: int) -> "IonSpec":
        return IonSpec(self.name, z, self.R)


@dataclass(frozen=True)
class ReferenceRow:
    ion: str
    solvent: str
    quantity: str
    value: float | None
    not_reported: bool = False

    @property
    def units(self) -> str:
        return "kJ/mol" if self.quantity.startswith("dG") else "J/(mol K)"


class ReferenceDataset:
    """Reference values keyed by (ion, solvent, quantity)."""

    def __init__(self, rows: list[ReferenceRow] | None = None):
        self.rows: list[ReferenceRow] = []
        self._index: dict[tuple[str, str, str], ReferenceRow] = {}
        for row in rows or ():
            self.add(row)

    def add(self, row: ReferenceRow) -> None:
        key = (row.ion, row.solvent, row.quantity)
        if key in self._index:
            raise ReferenceFormatError(f"duplicate reference entry {key}")
        self._index[key] = row
        self.rows.append(row)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[ReferenceRow]:
        return iter(self.rows)

    def get(self, ion: str, solvent: str, quantity: str) -> float | None:
        """Value of a cell, or None when missing or not reported."""
        row = self._index.get((ion, solvent, quantity))
        if row is None or row.not_reported:
            return None
        return row.value

    def merge(self, other: "ReferenceDataset") -> "ReferenceDataset":
        return ReferenceDataset(self.rows + other.rows)

    @property
    def solvents(self) -> list[str]:
        return sorted({r.solvent for r in self.rows})


def radius_from_born(dG_born: float, eps: float, z: int = 1,
                     units: UnitSystem = DEFAULT_UNITS) -> float:
    """Invert the Born equation: the radius (angstrom) giving ``dG_born`` kJ/mol."""
    if not dG_born < 0:
        raise DomainError(f"Born energy must be negative, got {dG_born}")
    if not eps > units.eps_in:
        raise DomainError(f"need eps_out > eps_in, got {eps}")
    return units.K_B * (1.0 / units.eps_in - 1.0 / eps) * z * z / abs(dG_born)


def _parse_cell(text: str, lineno: int, column: str) -> tuple[float | None, bool]:
    text = text.strip()
    if text == NOT_REPORTED:
        return None, True
    try:
        value = float(text)
    except ValueError:
        raise ReferenceFormatError(
            f"line {lineno}: cannot parse {column}={text!r} as a number"
        ) from None
    if not math.isfinite(value):
        raise ReferenceFormatError(f"line {lineno}: non-finite {column}")
    return value, False


def _read_reference(lines, known_solvents, source: str) -> ReferenceDataset:
    data = ReferenceDataset()
    reader = csv.reader(lines)
    header = None
    for lineno, record in enumerate(reader, start=1):
        if not record or all(not c.strip() for c in record):
            continue
        if header is None:
            header = tuple(c.strip() for c in record)
            if header != HEADER:
                raise ReferenceFormatError(
                    f"{source}: line {lineno}: expected header {','.join(HEADER)}"
                )
            continue
        if len(record) != len(HEADER):
            raise ReferenceFormatError(
                f"{source}: line {lineno}: expected {len(HEADER)} fields, got {len(record)}"
            )
        ion, solvent = record[0].strip(), record[1].strip()
        if ion not in ION_NAMES:
            raise ReferenceFormatError(f"{source}: line {lineno}: unknown ion {ion!r}")
        if solvent not in known_solvents:
            raise ReferenceFormatError(
                f"{source}: line {lineno}: unknown solvent {solvent!r}"
            )
        for column, cell in zip(QUANTITIES, record[2:]):
            value, nr = _parse_cell(cell, lineno, column)
            try:
                data.add(ReferenceRow(ion, solvent, column, value, nr))
            except ReferenceFormatError as exc:
                raise ReferenceFormatError(f"{source}: line {lineno}: {exc}") from None
    return data


def load_reference(path: str | Path, solvents=None) -> ReferenceDataset:
    """Read a reference CSV. ``N/R`` cells become ``not_reported`` rows.

    ``solvents`` is the set of accepted solvent names (default: built-ins).
    """
    known = set(solvents) if solvents is not None else set(BUILTIN_SOLVENTS)
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        return _read_reference(fh, known, str(path))


def _data_file(name: str):
    return resources.files("hsbcmsa").joinpath("data").joinpath(name)


def builtin_reference(data_dir: str | Path | None = None) -> ReferenceDataset:
    """All shipped tables merged into one dataset."""
    out = ReferenceDataset()
    for fname in TABLE_FILES.values():
        if data_dir is None:
            with resources.as_file(_data_file(fname)) as p:
                out = out.merge(load_reference(p))
        else:
            out = out.merge(load_reference(Path(data_dir) / fname))
    return out


@lru_cache(maxsize=None)
def _builtin_ions(units: UnitSystem) -> tuple[IonSpec, ...]:
    with resources.as_file(_data_file(TABLE_FILES["W"])) as p:
        table = load_reference(p)
    eps_w = eps_of_T(BUILTIN_SOLVENTS["W"], 25.0)
    ions = []
    for name in ION_NAMES:
        z = 1 if name.endswith("+") else -1
        dG = table.get(name, "W", "dG_born")
        ions.append(IonSpec(name, z, radius_from_born(dG, eps_w, z, units)))
    return tuple(ions)


def builtin_ion_set(units: UnitSystem = DEFAULT_UNITS) -> list[IonSpec]:
    """The nine monovalent ions, radii from the water Born column at 25 degC."""
    return list(_builtin_ions(units))


def get_ion(name: str, units: UnitSystem = DEFAULT_UNITS) -> IonSpec:
    for ion in _builtin_ions(units):
        if ion.name == name:
            return ion
    raise KeyError(f"unknown ion {name!r}; known: {', '.join(ION_NAMES)}")
