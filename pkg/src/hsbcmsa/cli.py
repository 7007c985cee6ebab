"""Command-line front end: tables, calibration, sweeps, figure data and BEM runs."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .bem import (ChargeSet, MeshFormatError, PanelSystem, icosphere, read_charges,
                  read_off, reaction_energy, solve_linear, solve_nonlinear)
from .calibration import (DEFAULT_RADII_GRID, CalibrationError, fit_alpha,
                          fit_alpha_line, save_params)
from .ions import (ION_NAMES, TABLE_FILES, ReferenceFormatError, builtin_ion_set,
                   builtin_reference, get_ion, load_reference)
from .solvents import BUILTIN_SOLVENTS, get_solvent, load_solvents
from .tables import (TABLE_COLUMNS, fig1_rows, fig2_rows, format_rows, resolve_alpha,
                     solvation_table, sweep)
from .thermo import MODELS, hsbc_solve
from .units import DEFAULT_UNITS

log = logging.getLogger("hsbcmsa")

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _solvents(args) -> dict:
    return load_solvents(args.solvents_file) if args.solvents_file else {}


def _solvent(args, name):
    return get_solvent(name, _solvents(args))


def _alpha(args, solvent):
    if args.alpha is not None:
        return resolve_alpha(solvent, "explicit", explicit=args.alpha)
    return resolve_alpha(solvent, args.alpha_source, params=args.params)


def _reference(args, solvent_name):
    """Reference rows for one solvent, or None (with a warning) if unavailable."""
    fname = TABLE_FILES.get(solvent_name)
    if fname is None:
        log.warning("no reference table for solvent %s; Expt columns omitted", solvent_name)
        return None
    if args.data_dir is None:
        return builtin_reference()
    path = Path(args.data_dir) / fname
    if not path.is_file():
        log.warning("reference file %s not found; Expt columns omitted", path)
        return None
    return load_reference(path, set(BUILTIN_SOLVENTS) | set(_solvents(args)))


def _radii(args):
    if args.r_min is None and args.r_max is None and args.r_step is None:
        return DEFAULT_RADII_GRID
    lo = 1.0 if args.r_min is None else args.r_min
    hi = 20.0 if args.r_max is None else args.r_max
    step = 0.1 if args.r_step is None else args.r_step
    if step <= 0 or hi < lo or lo <= 0:
        raise ValueError("radii grid needs 0 < r-min <= r-max and r-step > 0")
    n = int(round((hi - lo) / step))
    return tuple(round(lo + i * step, 10) for i in range(n + 1))


def _ions(names):
    if not names:
        return builtin_ion_set()
    return [get_ion(n) for n in names]


def cmd_tables(args) -> int:
    names = args.solvent or list(TABLE_FILES)
    chunks = []
    for name in names:
        solvent = _solvent(args, name)
        src = _alpha(args, solvent)
        log.info("%s: alpha from %s", name, src.description)
        ref = _reference(args, name)
        rows = solvation_table(solvent, src.alpha, args.T, reference=ref)
        cols = [c for c in TABLE_COLUMNS if ref is not None or "expt" not in c]
        for r in rows:
            r["solvent"] = name
        chunks.append((name, rows, ["solvent"] + cols))
    if args.format == "json":
        data = {name: json.loads(format_rows(rows, "json", cols)) for name, rows, cols in chunks}
        text = json.dumps(data, indent=2) + "\n"
    elif args.format == "markdown":
        text = "\n".join(f"### {name}\n\n" + format_rows(rows, "markdown", cols[1:])
                         for name, rows, cols in chunks)
    else:
        cols = chunks[0][2] if len({tuple(c[2]) for c in chunks}) == 1 else ["solvent"] + list(TABLE_COLUMNS)
        text = format_rows([r for _, rows, _ in chunks for r in rows], "csv", cols)
    _emit(text, args.out)
    return EXIT_OK


def cmd_fit(args) -> int:
    solvent = _solvent(args, args.solvent)
    grid = _radii(args)
    temps = args.temps
    if temps is not None and len(set(temps)) == 1:
        alpha, sse = fit_alpha(solvent, temps[0], grid)
        print(f"notice: a single temperature gives no alpha(T) line; "
              f"alpha({temps[0]:g} degC) = {alpha:.6f} (sse {sse:.3e})")
        return EXIT_OK
    cs = fit_alpha_line(solvent, temps, grid)
    if args.out:
        save_params(cs, args.out)
    if args.format == "json":
        print(json.dumps({"solvent": cs.solvent, "a1": round(cs.a1, 6), "a2": round(cs.a2, 6),
                          "r_squared": round(cs.r_squared, 6)}))
    else:
        print(f"{cs.solvent}: a1 = {cs.a1:.6f}  a2 = {cs.a2:.6f}  r^2 = {cs.r_squared:.6f}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    solvent = _solvent(args, args.solvent)
    models = args.models or list(MODELS)
    alpha = _alpha(args, solvent).alpha if "HSBC" in models else None
    rows = sweep(solvent, _ions(args.ions), models, args.t_start, args.t_stop, args.t_step,
                 alpha)
    cols = ["solvent", "ion", "model", "T", "dG", "dS"]
    _emit(format_rows(rows, args.format, cols, rounded=not args.full_precision), args.out)
    return EXIT_OK


def cmd_figdata(args) -> int:
    grid = _radii(args)
    names = list(TABLE_FILES) if args.solvents is None else args.solvents
    if args.figure == 1:
        cols = ["solvent", "T", "R", "E_n", "h_exact", "h_model", "alpha"]
        rows = []
        for name in names:
            rows += fig1_rows(_solvent(args, name), args.temps or [25.0, 75.0], grid)
    else:
        cols = ["solvent", "T", "alpha", "alpha_line", "a1", "a2", "r_squared"]
        rows = fig2_rows(fit_alpha_line(_solvent(args, n), None, grid) for n in names)
    _emit(format_rows(rows, args.format, cols, rounded=False), args.out)
    return EXIT_OK


def cmd_bem(args) -> int:
    solvent = _solvent(args, args.solvent)
    eps_out = args.eps_out if args.eps_out is not None else solvent.law.value(args.T)
    if args.icosphere_demo:
        R = get_ion(args.ion).R
        mesh = icosphere(R, args.subdivisions)
        charges = ChargeSet([[0.0, 0.0, 0.0]], [float(get_ion(args.ion).z)])
    else:
        if not (args.mesh and args.charges):
            raise ValueError("bem needs --mesh and --charges, or --icosphere-demo")
        mesh = read_off(args.mesh)
        charges = read_charges(args.charges)
    if args.linear:
        alpha = 0.0
    elif args.alpha is not None:
        alpha = args.alpha
    else:
        alpha = float(resolve_alpha(solvent, args.alpha_source, params=args.params)(args.T))
    system = PanelSystem(mesh, charges, eps_in=1.0, eps_out=eps_out, alpha=alpha)
    sol = solve_linear(system) if args.linear else solve_nonlinear(system)
    energy = reaction_energy(system, sol.sigma)
    summary = {"energy_kJ_mol": energy, "iterations": sol.iterations, "residual": sol.residual,
               "panels": len(mesh), "alpha": alpha, "eps_out": eps_out}
    if args.icosphere_demo and alpha > 0:
        summary["spherical_reference_kJ_mol"] = hsbc_solve(get_ion(args.ion), solvent, args.T,
                                                           alpha).dG
    if args.sigma_out:
        lines = ["panel,cx,cy,cz,area,sigma,E_n"]
        for k, (c, a, s, e) in enumerate(zip(mesh.centroids, mesh.areas, sol.sigma, sol.E_n)):
            lines.append(f"{k},{c[0]!r},{c[1]!r},{c[2]!r},{a!r},{s!r},{e!r}")
        Path(args.sigma_out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    _emit(json.dumps(summary, indent=2) + "\n", args.out)
    return EXIT_OK


def validation_checks(args=None) -> list[tuple[str, bool, str]]:
    """Compare computed tables and calibrations with the shipped reference data."""
    data_dir = getattr(args, "data_dir", None)
    ref = builtin_reference(data_dir)
    results = []
    ions = builtin_ion_set(DEFAULT_UNITS)
    for name in TABLE_FILES:
        solvent = BUILTIN_SOLVENTS[name]
        rows = solvation_table(solvent, resolve_alpha(solvent).alpha, 25.0, ions, ref)
        for col, tol in (("dG_born", 1.0), ("dG_msa", 1.0), ("dS_born", 1.0), ("dS_msa", 1.0)):
            worst = max(abs(r[col] - ref.get(r["ion"], name, col)) for r in rows)
            results.append((f"{name} {col}", worst <= tol + 0.5, f"max |diff| {worst:.2f}"))
        worst = max(abs(r["dG_hsbc"] - ref.get(r["ion"], name, "dG_hsbc"))
                    / max(0.03 * abs(ref.get(r["ion"], name, "dG_hsbc")), 10.0) for r in rows)
        results.append((f"{name} dG_hsbc", worst <= 1.0, f"max diff / tolerance {worst:.2f}"))
        cs = fit_alpha_line(solvent)
        shipped = resolve_alpha(solvent).alpha
        da1 = abs(cs.a1 - shipped.a1) / abs(shipped.a1)
        da2 = abs(cs.a2 - shipped.a2) / abs(shipped.a2)
        results.append((f"{name} alpha line", max(da1, da2) <= 0.05 and cs.r_squared >= 0.99,
                        f"a1 {100 * da1:.1f}%  a2 {100 * da2:.1f}%  r^2 {cs.r_squared:.4f}"))
    return results


def cmd_validate(args) -> int:
    results = validation_checks(args)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<20s} {detail}")
    failed = sum(not ok for _, ok, _ in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data-dir", help="directory holding reference table CSVs")
    common.add_argument("--params", help="alpha parameter file, or a directory of <solvent>.json")
    common.add_argument("--solvents-file", help="JSON file with custom solvent definitions")
    common.add_argument("--format", choices=("csv", "markdown", "json"), default="csv")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    alpha = argparse.ArgumentParser(add_help=False)
    alpha.add_argument("--alpha-source", choices=("params", "fit"), default="params",
                       help="shipped/--params line, or a fresh calibration")
    alpha.add_argument("--alpha", type=float, help="explicit constant alpha (angstrom)")

    radii = argparse.ArgumentParser(add_help=False)
    radii.add_argument("--r-min", type=float)
    radii.add_argument("--r-max", type=float)
    radii.add_argument("--r-step", type=float)

    p = argparse.ArgumentParser(prog="hsbcmsa",
                                description="Ion solvation thermodynamics: Born, MSA and HSBC/MSA.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tables", parents=[common, alpha], help="per-solvent ion tables")
    t.add_argument("--solvent", action="append", help="solvent name (repeatable; default all)")
    t.add_argument("--T", type=float, default=25.0, help="temperature, degC")
    t.set_defaults(func=cmd_tables)

    f = sub.add_parser("fit", parents=[common, radii], help="calibrate the alpha(T) line")
    f.add_argument("--solvent", required=True)
    f.add_argument("--temps", type=float, nargs="+", help="temperatures, degC")
    f.set_defaults(func=cmd_fit)

    s = sub.add_parser("sweep", parents=[common, alpha], help="dG and dS over temperature")
    s.add_argument("--solvent", required=True)
    s.add_argument("--ions", nargs="+", choices=ION_NAMES)
    s.add_argument("--models", nargs="+", choices=MODELS)
    s.add_argument("--t-start", type=float, required=True)
    s.add_argument("--t-stop", type=float, required=True)
    s.add_argument("--t-step", type=float, default=5.0)
    s.add_argument("--full-precision", action="store_true", help="skip presentation rounding")
    s.set_defaults(func=cmd_sweep)

    g = sub.add_parser("figdata", parents=[common, radii], help="h(E_n) curves and alpha(T) series")
    g.add_argument("--figure", type=int, choices=(1, 2), required=True)
    g.add_argument("--solvents", nargs="*", help="solvent names (default all built-ins)")
    g.add_argument("--temps", type=float, nargs="+", help="temperatures for h(E_n) curves")
    g.set_defaults(func=cmd_figdata)

    b = sub.add_parser("bem", parents=[common], help="boundary-element solve on a mesh")
    b.add_argument("--mesh", help="OFF surface mesh (angstrom)")
    b.add_argument("--charges", help="point charges, 'x y z q' per line")
    b.add_argument("--icosphere-demo", action="store_true",
                   help="centred ion in an icosphere cavity of its radius")
    b.add_argument("--ion", default="Li+", choices=ION_NAMES)
    b.add_argument("--subdivisions", type=int, default=3)
    b.add_argument("--solvent", default="W")
    b.add_argument("--T", type=float, default=25.0)
    b.add_argument("--eps-out", type=float, help="override the solvent dielectric constant")
    mode = b.add_mutually_exclusive_group()
    mode.add_argument("--linear", action="store_true", help="plain dielectric boundary condition")
    mode.add_argument("--alpha", type=float, help="explicit alpha (angstrom)")
    b.add_argument("--alpha-source", choices=("params",), default="params")
    b.add_argument("--sigma-out", help="per-panel sigma CSV")
    b.set_defaults(func=cmd_bem)

    v = sub.add_parser("validate", parents=[common], help="compare against reference tables")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (MeshFormatError, ReferenceFormatError, CalibrationError, FileNotFoundError,
            KeyError, ValueError, RuntimeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"hsbcmsa {args.command}: error: {msg}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
