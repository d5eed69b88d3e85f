"""Command-line front end: ``analytic``, ``solve``, ``verify`` and ``compare``.

Exit codes: 0 success, 2 configuration or input error, 3 solver divergence,
4 a declared tolerance was violated.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any

import numpy as np
import numpy.polynomial.polynomial as npoly
from numpy.typing import NDArray

from . import diagnostics as dg
from .config import FAMILIES, RunConfig, as_dict, format_complex, load_config
from .errors import ConfigError, DivergenceError, VortexError
from .holomorphic import HoloMap, polynomial_roots
from .integrable import SingleFieldSolution, TodaSolution, bradlow_eval
from .solver import FieldSet, newton_solve, singular_parts
from .solver import residual as solver_residual
from .surface import Grid, build_grid

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGENCE = 3
EXIT_TOLERANCE = 4

FloatArray = NDArray[np.float64]


class ToleranceViolation(Exception):
    def __init__(self, message: str, report: dict[str, Any]) -> None:
        super().__init__(message)
        self.report = report


# ---------------------------------------------------------------------------
# field files
# ---------------------------------------------------------------------------


def field_columns(n_flavors: int) -> list[str]:
    return (
        ["x", "y"]
        + [f"h{A}" for A in range(1, n_flavors + 1)]
        + [f"phi{A}_sq" for A in range(1, n_flavors + 1)]
    )


def write_fields(path: Path, grid: Grid, h: FloatArray) -> None:
    """CSV of active nodes, row-major over ``(x, y)``, 17 significant digits."""
    F = h.shape[0]
    act = grid.active
    cols = [grid.z.real[act], grid.z.imag[act]]
    cols += [h[A][act] for A in range(F)]
    with np.errstate(under="ignore", invalid="ignore"):
        cols += [np.exp(2.0 * h[A][act]) for A in range(F)]
    data = np.column_stack(cols)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(field_columns(F)) + "\n")
        np.savetxt(fh, data, fmt="%.17g", delimiter=",")


def read_fields(path: Path, grid: Grid) -> dict[str, FloatArray]:
    """Columns of a field CSV scattered back onto ``grid`` (NaN where absent)."""
    try:
        with open(path) as fh:
            header = fh.readline().strip().split(",")
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read field file {path}: {exc}") from None
    if header[:2] != ["x", "y"] or data.shape[1] != len(header):
        raise ConfigError(f"malformed field file {path}: header {header}")
    i = np.rint((data[:, 0] - grid.x[0]) / grid.spacing).astype(np.int64)
    j = np.rint((data[:, 1] - grid.x[0]) / grid.spacing).astype(np.int64)
    n = grid.shape[0]
    if i.min(initial=0) < 0 or j.min(initial=0) < 0 or i.max(initial=0) >= n or j.max(initial=0) >= n:
        raise ConfigError(f"field file {path} does not match the configured grid")
    off = np.abs(grid.z[i, j] - (data[:, 0] + 1j * data[:, 1]))
    if off.size and off.max() > 1e-6 * grid.spacing:
        raise ConfigError(f"field file {path} does not match the configured grid")
    out = {}
    for c, name in enumerate(header[2:], start=2):
        arr = np.full(grid.shape, np.nan)
        arr[i, j] = data[:, c]
        out[name] = arr
    return out


def _write_json(path: Path, obj: Any) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n")


def _jsonable(v: Any) -> Any:
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, complex):
        return format_complex(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


# ---------------------------------------------------------------------------
# analytic families
# ---------------------------------------------------------------------------


def _impurity_map(cfg: RunConfig) -> tuple[HoloMap, list[tuple[complex, float]]]:
    if cfg.alpha is None or not cfg.alpha > 0:
        raise ConfigError("[map] alpha > 0 is required for the impurity family")
    ft = HoloMap(cfg.ftilde, cfg.f_den)
    if abs(ft(0.0)) == 0.0:
        raise ConfigError("[map] ftilde(0) must be non-zero")
    f = ft.times_power(cfg.alpha + 1.0)
    # f' = z^alpha ((alpha + 1) ft + z ft'); ft' only exists for polynomials here
    P = np.asarray(ft.numerator)
    ram = [(0j, float(cfg.alpha))]
    if len(ft.denominator) == 1:
        rest = npoly.polyadd((cfg.alpha + 1.0) * P, npoly.polymulx(npoly.polyder(P)))
        ram += [(z, float(m)) for z, m in polynomial_roots(rest)]
    return f, ram


def analytic_fields(cfg: RunConfig, grid: Grid) -> tuple[FloatArray, dict[str, Any]]:
    """Closed-form ``h_A`` on the grid and a residual summary for the family."""
    family = cfg.family
    if family is None or family not in FAMILIES:
        raise ConfigError(f"[problem] family: {family!r} is not an analytic family")
    l0, lam = cfg.signs()
    surface = grid.surface
    act = grid.active
    z = grid.z[act]
    base = np.log((1.0 - l0 * np.abs(z) ** 2) / 2.0)
    R = surface.radius_cutoff
    if family == "toda":
        if cfg.f1 is None or cfg.f2 is None:
            raise ConfigError("[map] f1 and f2 are required for the toda family")
        sol = TodaSolution(HoloMap(cfg.f1), HoloMap(cfg.f2), lam)
        e1, e2 = sol.fields(grid.z)
        h = np.full((2, *grid.shape), np.nan)
        with np.errstate(invalid="ignore", divide="ignore"):
            for A, e in enumerate((e1, e2)):
                h[A][act] = 0.5 * np.log(e[act]) + base
        div = sol.divisors(search_radius=2 * R)
        res = dg.toda_residual(grid, lam, (e1, e2), div)
        mask = dg.annulus_mask(grid, [p for d in div for p, _ in d])
        if lam == 1:
            mask &= sol.positivity_mask(grid.z, det_floor=0.1)
        summary = {"max_abs": dg.max_on(mask, res), "region": "annulus", "nodes": int(mask.sum())}
        return h, summary
    if family == "impurity":
        f, ram = _impurity_map(cfg)
    else:
        f = cfg.holomap()
        try:
            ram = [(p, float(m)) for p, m in f.ramification_divisor(search_radius=2 * R)]
        except VortexError:
            ram = []
    h = np.full((1, *grid.shape), np.nan)
    if family == "bradlow":
        with np.errstate(divide="ignore"):
            g = 0.5 * np.log(bradlow_eval(surface, f, z))
    else:
        sol1 = SingleFieldSolution(surface, lam, f)
        g = np.full(z.shape, -np.inf)
        ok = z != 0 if family == "impurity" else np.ones(z.shape, bool)
        g[ok] = sol1.g(z[ok])
    h[0][act] = g + base
    gfull = np.full(grid.shape, np.nan)
    gfull[act] = g
    res = dg.liouville_residual(grid, lam, gfull, ram)
    mask = dg.annulus_mask(grid, [p for p, _ in ram])
    summary = {"max_abs": dg.max_on(mask, res), "region": "annulus", "nodes": int(mask.sum())}
    return h, summary


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _out_dir(cfg: RunConfig, override: str | None) -> Path:
    d = Path(override or cfg.out_dir or ".")
    d.mkdir(parents=True, exist_ok=True)
    return d


def cmd_analytic(cfg: RunConfig, out: Path) -> dict[str, Any]:
    """Write ``fields.csv`` and ``metadata.json`` for a closed-form family."""
    surface = cfg.surface()
    grid = build_grid(surface, cfg.grid_n)
    h, summary = analytic_fields(cfg, grid)
    write_fields(out / "fields.csv", grid, h)
    l0, lam = cfg.signs()
    meta = {
        "command": "analytic",
        "family": cfg.family,
        "lambda0": l0,
        "lambda": lam,
        "radius": surface.radius_cutoff,
        "grid_n": cfg.grid_n,
        "spacing": grid.spacing,
        "residual": summary,
        "config": as_dict(cfg),
    }
    _write_json(out / "metadata.json", meta)
    return meta


def _solve_report(cfg: RunConfig, fs: FieldSet) -> dict[str, Any]:
    spec = fs.spec
    rep = dg.flux_report(spec, fs)
    zeros = [[format_complex(z) for z in dg.locate_zeros(fs, A + 1)] for A in range(spec.n_flavors)]
    return {
        "converged": fs.converged,
        "iterations": fs.iterations,
        "final_residual": fs.final_residual,
        "boundary_mismatch": fs.boundary_mismatch,
        "spacing": fs.grid.spacing,
        "flux": {
            "k": _jsonable(rep.k),
            "contracted": _jsonable(rep.contracted),
            "contracted_abs": _jsonable(rep.contracted_abs),
            "contracted_grid": _jsonable(rep.contracted_grid),
            "tail": _jsonable(rep.tail),
            "N_inferred": _jsonable(rep.N_inferred),
            "N_inferred_abs": _jsonable(rep.N_inferred_abs),
            "V_bps": rep.V_bps,
        },
        "zeros": zeros,
    }


def cmd_solve(cfg: RunConfig, out: Path) -> dict[str, Any]:
    """Solve, then write ``fields.csv``, ``history.json`` and ``report.json``."""
    try:
        spec = cfg.problem_spec()
    except ConfigError:
        raise
    except VortexError as exc:  # no vacuum, bad centers: the config is at fault
        raise ConfigError(f"[problem] {type(exc).__name__}: {exc}") from None
    try:
        fs = newton_solve(spec, cfg.solver_config())
    except DivergenceError as exc:
        _write_json(out / "history.json", {"converged": False, "residual_history": exc.history})
        raise
    _write_json(
        out / "history.json",
        {"converged": True, "iterations": fs.iterations, "residual_history": fs.residual_history},
    )
    write_fields(out / "fields.csv", fs.grid, fs.h)
    report = _solve_report(cfg, fs)
    report["config"] = as_dict(cfg)
    _write_json(out / "report.json", report)
    return report


def _fieldset_from_file(cfg: RunConfig, path: Path) -> FieldSet:
    spec = cfg.problem_spec()
    grid = spec.grid()
    cols = read_fields(path, grid)
    F = spec.n_flavors
    try:
        h = np.array([cols[f"h{A}"] for A in range(1, F + 1)])
    except KeyError as exc:
        raise ConfigError(f"field file {path} lacks column {exc}") from None
    s, _ = singular_parts(spec, grid)
    with np.errstate(invalid="ignore"):
        v = h - s
    return FieldSet(spec=spec, grid=grid, h=h, s=s, v=v, divisors=(), converged=True)


def _stencil_ok(grid: Grid, v: FloatArray) -> NDArray[np.bool_]:
    f = np.isfinite(v)
    ok = np.zeros_like(f)
    ok[1:-1, 1:-1] = f[1:-1, 1:-1] & f[2:, 1:-1] & f[:-2, 1:-1] & f[1:-1, 2:] & f[1:-1, :-2]
    return ok & grid.interior


def cmd_verify(cfg: RunConfig, out: Path, fields_path: Path, tol: float | None) -> dict[str, Any]:
    """Recompute residuals (and fluxes for solver output) from a field file."""
    report: dict[str, Any] = {"command": "verify", "fields": str(fields_path)}
    violations = []
    if cfg.family is not None:
        grid = build_grid(cfg.surface(), cfg.grid_n)
        cols = read_fields(fields_path, grid)
        h_ref, _ = analytic_fields(cfg, grid)
        F = h_ref.shape[0]
        l0, lam = cfg.signs()
        with np.errstate(invalid="ignore", divide="ignore"):
            base = np.log((1.0 - l0 * np.abs(grid.z) ** 2) / 2.0)
        g = [cols[f"h{A}"] - base for A in range(1, F + 1)]
        if cfg.family == "toda":
            assert cfg.f1 is not None and cfg.f2 is not None
            sol = TodaSolution(HoloMap(cfg.f1), HoloMap(cfg.f2), lam)
            div = sol.divisors(search_radius=2 * grid.surface.radius_cutoff)
            with np.errstate(over="ignore"):
                e2g = (np.exp(2 * g[0]), np.exp(2 * g[1]))
            res = dg.toda_residual(grid, lam, e2g, div)
            mask = dg.annulus_mask(grid, [p for d in div for p, _ in d])
            if lam == 1:
                mask &= sol.positivity_mask(grid.z, det_floor=0.1)
        else:
            if cfg.family == "impurity":
                _, ram = _impurity_map(cfg)
            else:
                ram = [(p, float(m)) for p, m in cfg.holomap().ramification_divisor(search_radius=2 * grid.surface.radius_cutoff)]
            res = dg.liouville_residual(grid, lam, g[0], ram)
            mask = dg.annulus_mask(grid, [p for p, _ in ram])
        resid = dg.max_on(mask, res)
        limit = tol if tol is not None else cfg.residual_tol
        report["residual"] = {"max_abs": resid, "region": "annulus", "tolerance": limit, "pass": limit is None or resid < limit}
        if limit is not None and not resid < limit:
            violations.append(f"residual {resid:.3e} >= {limit:.3e}")
    else:
        fs = _fieldset_from_file(cfg, fields_path)
        spec = fs.spec
        R = solver_residual(spec, fs)
        # nodes whose regular part cannot be recovered (h = s = -inf) are skipped
        known = np.all(np.isfinite(fs.v), axis=0)
        ok = np.array([_stencil_ok(fs.grid, fs.v[A]) & known for A in range(spec.n_flavors)])
        vals = np.abs(R)[ok]
        resid = float(vals.max()) if vals.size else 0.0
        limit = tol if tol is not None else (cfg.residual_tol if cfg.residual_tol is not None else cfg.tol)
        report["residual"] = {"max_abs": resid, "region": "interior", "tolerance": limit, "pass": resid < limit}
        if not resid < limit:
            violations.append(f"residual {resid:.3e} >= {limit:.3e}")
        flux = _solve_report(cfg, fs)
        report["flux"] = flux["flux"]
        report["zeros"] = flux["zeros"]
        expected = np.array([len(v) for v in spec.vortices], dtype=float)
        dev = np.abs(np.asarray(flux["flux"]["contracted_abs"]) - expected)
        report["flux"]["expected_abs"] = expected.tolist()
        if cfg.flux_tol is not None:
            bad = dev > cfg.flux_tol * np.maximum(1.0, expected)
            report["flux"]["pass"] = not bool(bad.any())
            if bad.any():
                violations.append(f"flux deviation {dev.max():.3e} exceeds {cfg.flux_tol}")
    report["violations"] = violations
    _write_json(out / "verify.json", report)
    if violations:
        raise ToleranceViolation("; ".join(violations), report)
    return report


def cmd_compare(
    cfg: RunConfig, out: Path, a_path: Path | None, b_path: Path | None, tol: float | None
) -> dict[str, Any]:
    """Norms of the difference between two field files, or a file and the closed form."""
    a_path = a_path or (Path(cfg.compare_a) if cfg.compare_a else None)
    b_path = b_path or (Path(cfg.compare_b) if cfg.compare_b else None)
    if a_path is None:
        raise ConfigError("[compare] a: no field file to compare")
    grid = build_grid(cfg.surface(), cfg.grid_n)
    a = read_fields(a_path, grid)
    if b_path is not None:
        b = read_fields(b_path, grid)
        target = str(b_path)
    else:
        h, _ = analytic_fields(cfg, grid)
        b = {f"h{A + 1}": h[A] for A in range(h.shape[0])}
        with np.errstate(under="ignore", invalid="ignore"):
            b.update({f"phi{A + 1}_sq": np.exp(2.0 * h[A]) for A in range(h.shape[0])})
        target = f"closed form ({cfg.family})"
    columns = list(cfg.compare_columns) or [c for c in a if c in b]
    missing = [c for c in columns if c not in a or c not in b]
    if missing:
        raise ConfigError(f"[compare] columns: {missing} not present in both inputs")
    cores = [z for zs in cfg.vortices for z in zs]
    results = {}
    violations = []
    for c in columns:
        norms = dg.compare_fields(a[c], b[c], cfg.compare_region, grid, cores)
        results[c] = {"l_inf": norms.l_inf, "l2": norms.l2}
        if tol is not None and not norms.l_inf < tol:
            violations.append(f"{c}: l_inf {norms.l_inf:.3e} >= {tol:.3e}")
    report = {
        "command": "compare",
        "a": str(a_path),
        "b": target,
        "region": cfg.compare_region,
        "norms": results,
        "tolerance": tol,
        "violations": violations,
    }
    _write_json(out / "compare.json", report)
    if violations:
        raise ToleranceViolation("; ".join(violations), report)
    return report


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="exotic-vortex", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log solver progress")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("analytic", "sample a closed-form solution"),
        ("solve", "solve a vortex problem numerically"),
        ("verify", "check residuals and fluxes of a field file"),
        ("compare", "compare two field files or a file and its closed form"),
    ):
        sp_ = sub.add_parser(name, help=help_)
        sp_.add_argument("--config", required=True, help="run configuration file")
        sp_.add_argument("--out", help="output directory (default: [output] dir or .)")
        sp_.add_argument("--tol", type=float, help="tolerance override")
        sp_.add_argument("--grid-n", type=int, help="grid size override")
        if name == "verify":
            sp_.add_argument("fields", nargs="?", help="field CSV (default: OUT/fields.csv)")
        if name == "compare":
            sp_.add_argument("files", nargs="*", help="field CSVs a [b]")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args.config)
        if args.grid_n is not None:
            cfg = replace(cfg, grid_n=args.grid_n)
        if args.tol is not None and args.command == "solve":
            cfg = replace(cfg, tol=args.tol)
        out = _out_dir(cfg, args.out)
        if args.command == "analytic":
            result = cmd_analytic(cfg, out)
        elif args.command == "solve":
            result = cmd_solve(cfg, out)
        elif args.command == "verify":
            path = Path(args.fields) if args.fields else out / "fields.csv"
            result = cmd_verify(cfg, out, path, args.tol)
        else:
            files = [Path(f) for f in args.files]
            if len(files) > 2:
                raise ConfigError("compare takes at most two field files")
            result = cmd_compare(
                cfg, out, files[0] if files else None, files[1] if len(files) > 1 else None, args.tol
            )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except ToleranceViolation as exc:
        print(f"tolerance violated: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except VortexError as exc:
        print(f"input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    summary = {k: result[k] for k in ("residual", "converged", "iterations", "flux", "norms") if k in result}
    print(json.dumps(_jsonable(summary), sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
