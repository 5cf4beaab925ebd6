"""Command-line front end.

Each subcommand runs one stage for every scenario (from ``--config`` or a
single scenario assembled from flags) and writes ``<out>/<scenario>/<stage>.csv``
plus an SVG where the stage has one. Exit status is 0 iff every check passed,
1 if any failed, 2 for usage or configuration errors.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from dataclasses import field as dc_field

import numpy as np

from . import plotting
from .capacity import GridSpec, RingCondenser, capacity_convergence, write_mask
from .errors import BreakpointError
from .fields import beltrami_residual, dilatation_field, fixture as load_fixture, mu_from_radial_map, sample_points
from .geometry import Annulus, QuadratureSpec, as_point
from .gfmo import dispersion_sup, exponent_grid, lemma2_check, lemma2_shell_decomposition, named_field
from .growth import audit_image_capacity, dilatation_context, proposition1_check, theorem1_report
from .report import RunSummary, emit_csv

OUT_ENV = "BELTRAMI_GROWTH_OUT"
STAGES = ("dispersion", "lemma2", "capacity", "ringq", "growth")
RESIDUAL_SAMPLES = 100
RESIDUAL_STEP = 1e-5
RESIDUAL_LIMIT = 1e-5
CAPACITY_SLACK = 0.02


class ConfigError(ValueError):
    pass


@dataclass
class Scenario:
    name: str = "default"
    fixture: str = "log"
    field: str = "from-map"
    center: complex = 0j
    grid: tuple = (math.e + 0.1, 30.0, 24)
    dispersion_grid: tuple = (math.e + 0.01, math.e + 6.01, 13)
    rings: tuple = ((1.0, math.e), (math.e, math.e ** 3))
    ring: tuple = (1.0, math.e)
    quadrature: QuadratureSpec = dc_field(default_factory=QuadratureSpec)
    grid_spec: GridSpec = dc_field(default_factory=lambda: GridSpec(256))
    outputs: tuple = ("csv", "svg")
    seed: int = 0
    mask: bool = False

    def radii(self) -> np.ndarray:
        return exponent_grid(*self.grid)

    def dispersion_radii(self) -> np.ndarray:
        return exponent_grid(*self.dispersion_grid)


def _parse_grid(text, what="grid"):
    try:
        start, end, count = text.split(":")
        g = (float(start), float(end), int(count))
    except ValueError:
        raise ConfigError(f"{what}: expected start:end:count, got {text!r}") from None
    if not g[0] > math.e:
        raise ConfigError(f"{what}: start exponent {g[0]} must exceed e so that radii exceed e**e")
    if g[1] < g[0] or g[2] < 1:
        raise ConfigError(f"{what}: need end >= start and count >= 1, got {text!r}")
    return g


def _parse_ring(text, what="ring"):
    try:
        r1, r2 = (float(t) for t in text.split(":"))
    except ValueError:
        raise ConfigError(f"{what}: expected r_inner:r_outer, got {text!r}") from None
    if not 0 < r1 < r2:
        raise ConfigError(f"{what}: need 0 < r_inner < r_outer, got {text!r}")
    return (r1, r2)


def _parse_center(text, what="center"):
    try:
        if "," in text:
            x, y = text.split(",")
            return as_point((float(x), float(y)))
        return as_point(complex(text.replace(" ", "")))
    except ValueError:
        raise ConfigError(f"{what}: expected x,y or a complex literal, got {text!r}") from None


_KEYS = {
    "fixture", "field", "center", "grid", "dispersion_grid", "ring", "rings", "cells", "tolerance",
    "max_iterations", "scheme", "radial_panels", "nodes_per_panel", "angular_nodes", "panel_spacing",
    "outputs", "seed", "mask",
}


def _apply(sc: Scenario, key: str, value: str) -> None:
    if key == "fixture":
        sc.fixture = value
    elif key == "field":
        sc.field = value
    elif key == "center":
        sc.center = _parse_center(value)
    elif key == "grid":
        sc.grid = _parse_grid(value)
    elif key == "dispersion_grid":
        sc.dispersion_grid = _parse_grid(value, "dispersion_grid")
    elif key == "ring":
        sc.ring = _parse_ring(value)
    elif key == "rings":
        sc.rings = tuple(_parse_ring(t.strip(), "rings") for t in value.split(";") if t.strip())
    elif key in ("cells", "tolerance", "max_iterations", "scheme"):
        name = {"cells": "cells_per_axis", "tolerance": "solver_tolerance"}.get(key, key)
        conv = {"cells_per_axis": int, "solver_tolerance": float, "max_iterations": int, "scheme": str}[name]
        sc.grid_spec = dataclasses.replace(sc.grid_spec, **{name: conv(value)})
    elif key in ("radial_panels", "nodes_per_panel", "angular_nodes", "panel_spacing"):
        conv = str if key == "panel_spacing" else int
        sc.quadrature = dataclasses.replace(sc.quadrature, **{key: conv(value)})
    elif key == "outputs":
        outs = tuple(t.strip() for t in value.split(",") if t.strip())
        if not set(outs) <= {"csv", "svg"}:
            raise ConfigError(f"outputs: expected a subset of csv,svg, got {value!r}")
        sc.outputs = outs
    elif key == "seed":
        sc.seed = int(value)
    elif key == "mask":
        sc.mask = value.strip().lower() in ("1", "true", "yes", "on")
    else:
        raise ConfigError(f"unknown key {key!r}")


def _validate(sc: Scenario) -> None:
    load_fixture(sc.fixture, sc.center)
    if sc.field != "from-map":
        named_field(sc.field, sc.center)


def load_config(path) -> list[Scenario]:
    """Scenarios from an INI file; one section per scenario, ``[DEFAULT]`` shared."""
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not cp.sections():
        raise ConfigError(f"{path}: no scenario sections")
    scenarios = []
    for section in cp.sections():
        sc = Scenario(name=section)
        for key, value in cp.items(section):
            if key not in _KEYS:
                raise ConfigError(f"{path}: [{section}] {key}: unknown key")
            try:
                _apply(sc, key, value)
            except (ConfigError, ValueError) as exc:
                raise ConfigError(f"{path}: [{section}] {key}: {exc}") from None
        try:
            _validate(sc)
        except ValueError as exc:
            raise ConfigError(f"{path}: [{section}]: {exc}") from None
        scenarios.append(sc)
    return scenarios


def _field_for(sc: Scenario, f):
    return dilatation_field(f) if sc.field == "from-map" else named_field(sc.field, sc.center)


def _out(base, sc: Scenario, name):
    return os.path.join(base, sc.name, name)


def run_dispersion(sc: Scenario, out: str) -> RunSummary:
    s = RunSummary(sc.name)
    f = load_fixture(sc.fixture, sc.center)
    rep = dispersion_sup(_field_for(sc, f), sc.center, sc.dispersion_radii(), sc.quadrature)
    s.record(bool(np.all(np.isfinite(rep.mean_deviations))), "dispersion: non-finite deviation")
    if "csv" in sc.outputs:
        s.artifacts.append(emit_csv(_out(out, sc, "dispersion.csv"), rep.csv_columns, rep.rows()))
    if not rep.stabilizing:
        print(f"note {sc.name}: dispersion not stabilizing on the grid", file=sys.stderr)
    return s


def run_lemma2(sc: Scenario, out: str) -> RunSummary:
    s = RunSummary(sc.name)
    f = load_fixture(sc.fixture, sc.center)
    phi = _field_for(sc, f)
    radii = sc.radii()
    disp = dispersion_sup(phi, sc.center, np.union1d(sc.dispersion_radii(), radii), sc.quadrature)
    rep = lemma2_check(phi, sc.center, radii, sc.quadrature, disp)
    for R, ok in zip(rep.radius_grid, rep.passed):
        s.record(bool(ok), f"shell-integral bound at R={R:.6g}")
    shells = lemma2_shell_decomposition(phi, sc.center, radii[-1], sc.quadrature)
    for label, ok in shells.checks.items():
        s.record(bool(ok), f"shell step '{label}' at R={radii[-1]:.6g}")
    if "csv" in sc.outputs:
        s.artifacts.append(emit_csv(_out(out, sc, "lemma2.csv"), rep.csv_columns, rep.rows()))
    if "svg" in sc.outputs:
        s.artifacts.append(plotting.lemma2_figure(_out(out, sc, "lemma2.svg"), rep))
    return s


def run_capacity(sc: Scenario, out: str) -> RunSummary:
    s = RunSummary(sc.name)
    r1, r2 = sc.ring
    cond = RingCondenser.concentric(r1, r2, sc.center)
    n = sc.grid_spec.cells_per_axis
    h_ok = [m for m in (n // 4, n // 2, n) if m >= 16 and cond.gap >= 8 * 2 * r2 / m]
    if not h_ok:
        raise ConfigError(f"[{sc.name}] cells: {n} cells do not resolve the ring {sc.ring}")
    rep = capacity_convergence(cond, h_ok, sc.grid_spec)
    for est in rep.estimates:
        s.record(est.value >= rep.lower_bound * (1 - CAPACITY_SLACK),
                 f"area lower bound at {est.grid.cells_per_axis} cells: {est.value:.6g} < {rep.lower_bound:.6g}")
    if len(rep.estimates) > 1:
        s.record(rep.converges_monotonically(), "capacity: no monotone improvement under refinement")
    if "csv" in sc.outputs:
        s.artifacts.append(emit_csv(_out(out, sc, "capacity.csv"), rep.csv_columns, rep.rows()))
    if "svg" in sc.outputs:
        s.artifacts.append(plotting.capacity_figure(_out(out, sc, "capacity.svg"), rep))
    if sc.mask:
        path = _out(out, sc, "capacity_mask.txt")
        write_mask(path, cond, sc.grid_spec.with_cells(h_ok[0]))
        s.artifacts.append(path)
    return s


def run_ringq(sc: Scenario, out: str) -> RunSummary:
    s = RunSummary(sc.name)
    f = load_fixture(sc.fixture, sc.center)
    reports = []
    for r1, r2 in sc.rings:
        reports.extend(proposition1_check(f, sc.center, r1, r2, q=sc.quadrature))
    for rep in reports:
        s.record(rep.passed, f"ring inequality ({rep.r1:.6g}, {rep.r2:.6g}), eta {rep.eta_label}")
    if "csv" in sc.outputs:
        s.artifacts.append(emit_csv(_out(out, sc, "ringq.csv"), reports[0].csv_columns,
                                    [r.row() for r in reports]))
    return s


def run_growth(sc: Scenario, out: str) -> RunSummary:
    s = RunSummary(sc.name)
    f = load_fixture(sc.fixture, sc.center)
    radii = sc.radii()
    if radii.size < 8:
        raise ConfigError(f"[{sc.name}] grid: the growth stage needs at least 8 radii")
    ctx = dilatation_context(dilatation_field(f), sc.center, sc.dispersion_radii(), sc.quadrature)
    rep = theorem1_report(f, ctx, radii, sc.quadrature)
    for c in rep.chains:
        for label, ok in c.checks.items():
            s.record(bool(ok), f"{label} at R={c.R:.6g}")
    s.record(rep.liminf_holds, f"liminf proxy {rep.liminf_proxy:.6g} < l_f = {rep.l_f:.6g}")
    if "csv" in sc.outputs:
        s.artifacts.append(emit_csv(_out(out, sc, "growth.csv"), rep.csv_columns, rep.rows()))
    if "svg" in sc.outputs:
        s.artifacts.append(plotting.growth_figure(_out(out, sc, "growth.svg"), rep))
    return s


def run_audit(sc: Scenario, out: str) -> RunSummary:
    """Grid-solver audit of the closed-form image capacity (informational) and the Beltrami residual."""
    s = RunSummary(sc.name)
    f = load_fixture(sc.fixture, sc.center)
    rows = audit_image_capacity(f, sc.center, sc.radii()[:2], sc.grid_spec)
    if "csv" in sc.outputs:
        s.artifacts.append(emit_csv(_out(out, sc, "capacity_audit.csv"),
                                    ("R", "analytic", "grid_estimate", "relative_gap"), rows))
    pts = sample_points(Annulus(sc.center, 0.5, 10.0), RESIDUAL_SAMPLES, sc.seed,
                        avoid=f.profile.breakpoints, margin=4 * RESIDUAL_STEP)
    try:
        res = beltrami_residual(f, mu_from_radial_map(f), pts, RESIDUAL_STEP)
    except BreakpointError as exc:
        s.record(False, f"Beltrami residual: {exc}")
    else:
        s.record(res < RESIDUAL_LIMIT, f"Beltrami residual {res:.3e} >= {RESIDUAL_LIMIT:g}")
    return s


RUNNERS = {
    "dispersion": run_dispersion,
    "lemma2": run_lemma2,
    "capacity": run_capacity,
    "ringq": run_ringq,
    "growth": run_growth,
}


def run_scenario(sc: Scenario, stage: str, out: str) -> RunSummary:
    t0 = time.perf_counter()
    if stage == "all":
        summary = RunSummary(sc.name)
        for name in STAGES:
            summary.merge(RUNNERS[name](sc, out))
        summary.merge(run_audit(sc, out))
    else:
        summary = RUNNERS[stage](sc, out)
    summary.wall_time = time.perf_counter() - t0
    return summary


def default_scenarios() -> list[Scenario]:
    return [Scenario(name="log", fixture="log"),
            Scenario(name="power2", fixture="power:2", grid=(math.e + 1, 40.0, 24))]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with one section per scenario")
    common.add_argument("--fixture", help="identity, power:K, log, or a profile table path")
    common.add_argument("--field", help="from-map, const:Q, logplus or abs (dispersion and lemma2 stages)")
    common.add_argument("--center", help="z0 as x,y")
    common.add_argument("--grid", help="log-radius grid start:end:count (radii e**t); "
                                       "for 'dispersion' this sets the dispersion grid")
    common.add_argument("--ring", help="concentric condenser r_C:r_A for the capacity stage")
    common.add_argument("--cells", type=int, help="grid cells per axis for the capacity solver")
    common.add_argument("--scheme", choices=("conforming", "cell-center"))
    common.add_argument("--panels", type=int, help="radial quadrature panels per segment")
    common.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./out)")
    common.add_argument("--parallel", action="store_true", help="run scenarios in separate processes")
    common.add_argument("--seed", type=int, help="seed for residual sample points")
    common.add_argument("--mask", action="store_true", help="export the capacity grid mask as text")

    p = argparse.ArgumentParser(prog="beltrami-growth", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, text in (("dispersion", "disk means and maximal-dispersion estimate"),
                       ("lemma2", "weighted shell integral against C log log R"),
                       ("capacity", "grid capacity of a round ring vs closed forms"),
                       ("ringq", "ring inequality for the fixture's dilatation"),
                       ("growth", "capacity chain and growth ratios"),
                       ("all", "every stage plus solver and residual audits")):
        sub.add_parser(name, parents=[common], help=text)
    return p


def _overrides(args) -> dict:
    ov = {}
    for key in ("fixture", "field", "center", "ring", "cells", "scheme", "seed"):
        v = getattr(args, key)
        if v is not None:
            ov[key] = str(v)
    if args.panels is not None:
        ov["radial_panels"] = str(args.panels)
    if args.grid is not None:
        ov["dispersion_grid" if args.command == "dispersion" else "grid"] = args.grid
    if args.mask:
        ov["mask"] = "1"
    return ov


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = args.out or os.environ.get(OUT_ENV) or "out"
    try:
        if args.config:
            scenarios = load_config(args.config)
        elif args.command == "all" and not any(
                getattr(args, k) is not None for k in ("fixture", "field", "grid", "ring", "cells")):
            scenarios = default_scenarios()
        else:
            scenarios = [Scenario(name=args.fixture.replace(":", "") if args.fixture else "default",
                                  fixture=args.fixture or "log")]
        for sc in scenarios:
            for key, value in _overrides(args).items():
                try:
                    _apply(sc, key, value)
                except (ConfigError, ValueError) as exc:
                    raise ConfigError(f"--{key.replace('_', '-')}: {exc}") from None
            _validate(sc)
        if args.parallel and len(scenarios) > 1:
            with ProcessPoolExecutor() as pool:
                summaries = list(pool.map(run_scenario, scenarios, [args.command] * len(scenarios),
                                          [out] * len(scenarios)))
        else:
            summaries = [run_scenario(sc, args.command, out) for sc in scenarios]
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for s in summaries:
        print(s.line())
        for label in s.failures:
            print(f"  violated: {label}")
    return 0 if all(s.ok for s in summaries) else 1


if __name__ == "__main__":
    sys.exit(main())
