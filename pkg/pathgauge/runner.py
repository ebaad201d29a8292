"""
Scenario execution.

Every task is computed before anything is written, so a failing run leaves
no partial output. Grid points fan out over a thread pool whose map keeps
input order, which keeps the CSV files identical for any worker count.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import numpy as np

from pathgauge.classical import ShootingSolver, action_and_phase, classical_potential, integrate_worldline
from pathgauge.config import DEFAULT_THREADS, THREADS_ENV
from pathgauge.errors import PathGaugeError, ScenarioError, TaskFailed
from pathgauge.fields import FieldConfig
from pathgauge.flux import (
    NESTED_TOL_FACTOR,
    FluxResult,
    electromagnetic_flux,
    flux_loop,
    flux_open,
    flux_surface,
    full_sphere_flux,
    homotopy_surface,
    spacetime_rectangle_surface,
    sphere_slice_surface,
)
from pathgauge.oned import check_1d_quantization, estimate_alpha1, field_route_flux, pair_flux, source_coefficient
from pathgauge.output.csvfiles import write_csv
from pathgauge.paths import LoopSpec, PathFamily
from pathgauge.potential import deviations, gauge_report, path_transform, potential_field, potential_grid
from pathgauge.quantization import check_phase, scan_charges
from pathgauge.scenarios import Scenario, build_closed_form, build_field, build_paths
from pathgauge.spacetime import Constants, minkowski_dot

logger = logging.getLogger(__name__)

POINT_COLUMNS = ["x0", "x1", "x2", "x3"]
POTENTIAL_COLUMNS = POINT_COLUMNS + ["A_0", "A_1", "A_2", "A_3", "err"]
QUANTIZE_COLUMNS = ["phase", "n", "residual", "quantized"]


@dataclass
class TaskOutput:
    """One task's CSV content plus what the summary prints."""

    name: str
    kind: str
    header: list[str]
    rows: list[list]
    summary: dict[str, Any] = field(default_factory=dict)
    table: Optional[tuple[list[str], list[list]]] = None


@dataclass
class RunContext:
    scenario: Scenario
    field: FieldConfig
    paths: dict[str, PathFamily]
    constants: Constants
    quad: dict
    workers: int
    results: dict[str, TaskOutput] = field(default_factory=dict)

    @classmethod
    def build(cls, scenario: Scenario, workers: int = DEFAULT_THREADS) -> "RunContext":
        return cls(
            scenario=scenario,
            field=build_field(scenario.field),
            paths=build_paths(scenario),
            constants=scenario.constants.build(),
            quad=scenario.tolerances.quad(),
            workers=max(1, workers),
        )

    def map(self, fn: Callable, items: Sequence) -> list:
        if self.workers <= 1 or len(items) <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(fn, items))

    def closed_form(self, name: str, params: dict):
        return build_closed_form(name, params, self.scenario.field)


def threads_from_env(default: int = DEFAULT_THREADS) -> int:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning("ignoring %s=%r (not an integer)", THREADS_ENV, raw)
        return default


# =========================
# Task Runners
# =========================
def _potential_rows(samples) -> list[list]:
    return [[*s.x, *s.A, s.err_estimate] for s in samples]


def run_potential(ctx: RunContext, task, seed: int) -> TaskOutput:
    grid = task.grid.build(seed)
    samples = potential_grid(ctx.field, ctx.paths[task.path], grid, task.form, workers=ctx.workers, **ctx.quad)
    table = [[*np.round(s.x, 6), *s.A, *s.A_upper] for s in samples]
    return TaskOutput(
        task.name,
        task.kind,
        POTENTIAL_COLUMNS,
        _potential_rows(samples),
        {"path": task.path, "points": len(samples), "max err estimate": max(s.err_estimate for s in samples)},
        (POINT_COLUMNS + ["A_0", "A_1", "A_2", "A_3", "A^0", "A^1", "A^2", "A^3"], table),
    )


def run_gauge_compare(ctx: RunContext, task, seed: int) -> TaskOutput:
    grid = task.grid.build(seed)
    samples = potential_grid(ctx.field, ctx.paths[task.path], grid, task.form, workers=ctx.workers, **ctx.quad)
    exact = ctx.closed_form(task.closed_form, task.closed_form_params)
    dev = deviations(samples, exact).max(axis=1)
    report = gauge_report(samples, exact)
    rows = [row + [d] for row, d in zip(_potential_rows(samples), dev)]
    return TaskOutput(
        task.name,
        task.kind,
        POTENTIAL_COLUMNS + ["deviation"],
        rows,
        {
            "path": task.path,
            "closed form": task.closed_form,
            "points": report.points,
            "max deviation": report.max_deviation,
            "mean deviation": report.mean_deviation,
            "max err estimate": report.max_error_estimate,
        },
    )


def _surface_flux(ctx: RunContext, task) -> TaskOutput:
    spec = task.surface
    n = task.winding
    if spec.kind == "spacetime_rectangle":
        res = flux_surface(ctx.field, spacetime_rectangle_surface(spec.ct_range, spec.x_range), **ctx.quad)
        return TaskOutput(task.name, task.kind, ["flux", "err"], [[n * res.value, n * res.err_estimate]])

    def slice_flux(phi: float) -> FluxResult:
        return flux_surface(ctx.field, sphere_slice_surface(spec.radius, phi, spec.center), **ctx.quad)

    results = ctx.map(slice_flux, list(spec.phi))
    phis = list(spec.phi)
    if spec.full_sphere:
        results.append(full_sphere_flux(ctx.field, spec.radius, spec.center, **ctx.quad))
        phis.append(2.0 * math.pi)
    rows = [[phi, n * r.value, n * r.err_estimate] for phi, r in zip(phis, results)]
    table = None
    if ctx.scenario.field.kind == "monopole":
        g = float(ctx.scenario.field.params["g"])
        table = (["phi", "flux", "2 g phi"], [[phi, flux, 2.0 * g * phi] for phi, flux, _ in rows])
    return TaskOutput(task.name, task.kind, ["phi", "flux", "err"], rows, {"slices": len(rows)}, table)


def run_flux(ctx: RunContext, task, seed: int) -> TaskOutput:
    if task.surface is not None:
        return _surface_flux(ctx, task)

    a, b = ctx.paths[task.path_a], ctx.paths[task.path_b]
    background = None
    if task.background is not None:
        background = ctx.closed_form(task.background, task.background_params)
    loop = LoopSpec(a, b, task.winding)
    quad = ctx.quad

    def one(x) -> FluxResult:
        if task.route == "loop":
            potential = background
            if potential is None:
                potential = potential_field(ctx.field, a, **{**quad, "tol": quad["tol"] * NESTED_TOL_FACTOR})
            return flux_loop(potential, loop, x, discontinuities=ctx.field.discontinuities, **quad)
        if task.route == "open":
            res = flux_open(ctx.field, a, b, x, **quad)
        elif task.route == "surface":
            res = flux_surface(ctx.field, homotopy_surface(a, b, x), **quad)
        else:
            res = electromagnetic_flux(ctx.field, a, b, x, background, **quad)
        n = task.winding
        return FluxResult(n * res.value, res.route, n * res.err_estimate, res.flagged, res.note)

    grid = task.grid.build(seed)
    results = ctx.map(one, grid)
    rows = [[*x, r.value, r.err_estimate] for x, r in zip(grid, results)]
    summary = {
        "loop": f"{task.path_a} - {task.path_b}" + (f" (x{task.winding})" if task.winding > 1 else ""),
        "route": results[0].route if results else task.route,
        "points": len(rows),
    }
    flagged = sum(r.flagged for r in results)
    if flagged:
        summary["flagged"] = flagged
    table = (POINT_COLUMNS + ["flux", "err"], rows)
    return TaskOutput(task.name, task.kind, POINT_COLUMNS + ["flux", "err"], rows, summary, table)


def run_transform(ctx: RunContext, task, seed: int) -> TaskOutput:
    a, b = ctx.paths[task.path_a], ctx.paths[task.path_b]
    step = ctx.scenario.tolerances.stencil_step
    flux = None
    if task.background is not None:
        background = ctx.closed_form(task.background, task.background_params)
        loop = LoopSpec(a, b)

        def flux(p):
            return flux_loop(background, loop, p, discontinuities=ctx.field.discontinuities, **ctx.quad).value

    grid = task.grid.build(seed)
    pairs = ctx.map(lambda x: path_transform(ctx.field, a, b, x, step, flux=flux, **ctx.quad), grid)
    rows = [[*x, *lhs, *rhs] for x, (lhs, rhs) in zip(grid, pairs)]
    worst = max(float(np.max(np.abs(lhs - rhs))) for lhs, rhs in pairs)
    header = POINT_COLUMNS + [f"lhs_{i}" for i in range(4)] + [f"rhs_{i}" for i in range(4)]
    return TaskOutput(
        task.name,
        task.kind,
        header,
        rows,
        {"paths": f"A({task.path_b}) - A({task.path_a})", "points": len(rows), "max |lhs - rhs|": worst},
    )


def run_quantize(ctx: RunContext, task, seed: int) -> TaskOutput:
    tol = ctx.scenario.tolerances.phase_tol
    if task.dirac is not None:
        g = task.dirac.g
        reports = scan_charges(g, task.dirac.e_values, ctx.constants, tol)
        hbar_c = ctx.constants.hbar * ctx.constants.c
        table = (
            ["e", "2eg/hbar c", "n", "quantized"],
            [[e, 2.0 * e * g / hbar_c, r.n_nearest, r.quantized] for e, r in zip(task.dirac.e_values, reports)],
        )
    else:
        if task.source is not None:
            source = ctx.results[task.source]
            col = source.header.index("flux")
            fluxes = [row[col] for row in source.rows]
        else:
            fluxes = list(task.fluxes)
        reports = [check_phase(f, ctx.constants, tol) for f in fluxes]
        table = (["flux"] + QUANTIZE_COLUMNS, [[f, *r.row()] for f, r in zip(fluxes, reports)])
    summary = {
        "checks": len(reports),
        "quantized": sum(r.quantized for r in reports),
        "nonzero n": sum(r.quantized and not r.trivial for r in reports),
    }
    return TaskOutput(task.name, task.kind, QUANTIZE_COLUMNS, [r.row() for r in reports], summary, table)


def run_classical(ctx: RunContext, task, seed: int) -> TaskOutput:
    tol = ctx.scenario.tolerances.ode_tol
    summary: dict[str, Any] = {}
    if task.endpoint is not None:
        solver = ShootingSolver(
            ctx.field, task.y_init, charge=task.charge, mass=task.mass, constants=ctx.constants, tol=tol
        )
        line = solver.solve(task.endpoint)
        s = np.linspace(0.0, 1.0, task.samples)
        A = classical_potential(ctx.field, solver, task.endpoint, step=task.fd_step, order=ctx.quad["order"])
        summary["A_mu(classical, endpoint)"] = "[" + ", ".join(f"{v:.10g}" for v in A) + "]"
    else:
        line = integrate_worldline(
            ctx.field, task.y_init, task.u_init, task.s_span, tol,
            charge=task.charge, mass=task.mass, constants=ctx.constants,
        )
        s = np.linspace(task.s_span[0], task.s_span[1], task.samples)
    y, u = line.at(s)
    shell = minkowski_dot(u, u)
    summary["mass-shell drift"] = float(np.max(np.abs(shell - shell[0])))
    summary["return distance"] = float(np.linalg.norm(y[-1, 1:] - y[0, 1:]))
    if np.all(shell > 0):
        summary["proper-time action"] = action_and_phase(line, ctx.constants).proper_time_action
    rows = [[si, *yi, *ui] for si, yi, ui in zip(s, y, u)]
    header = ["s"] + [f"y{i}" for i in range(4)] + [f"u{i}" for i in range(4)]
    return TaskOutput(task.name, task.kind, header, rows, summary)


def run_oned(ctx: RunContext, task, seed: int) -> TaskOutput:
    c = ctx.constants
    e = c.e
    alpha1 = task.alpha1 if task.alpha1 is not None else e * e / (c.hbar * c.c)
    tol = ctx.scenario.tolerances.phase_tol
    pairs = [spec.build() for spec in task.pairs]

    def one(pair) -> list:
        area = pair.area
        field_flux = math.nan
        if task.field_route:
            field_flux = field_route_flux(pair, e, tol=ctx.quad["tol"], order=ctx.quad["order"])
        report = check_1d_quantization(area, alpha1, tol)
        return [area, pair_flux(pair, e), field_flux, *report.row()]

    rows = ctx.map(one, pairs)
    summary: dict[str, Any] = {"alpha1": alpha1, "Gauss factor (d=1)": source_coefficient(1), "pairs": len(rows)}
    if task.mass is not None:
        est = estimate_alpha1(task.mass, c)
        summary["alpha1 scale"] = est.alpha_scale
        summary["A_max"] = est.area_max
    header = ["area", "flux", "field_flux"] + QUANTIZE_COLUMNS
    return TaskOutput(task.name, task.kind, header, rows, summary, (header, rows))


TASK_RUNNERS: dict[str, Callable[[RunContext, Any, int], TaskOutput]] = {
    "potential": run_potential,
    "gauge_compare": run_gauge_compare,
    "flux": run_flux,
    "transform": run_transform,
    "quantize": run_quantize,
    "classical": run_classical,
    "oned": run_oned,
}


# =========================
# Scenario Runs
# =========================
def execute(scenario: Scenario, workers: int = DEFAULT_THREADS) -> list[TaskOutput]:
    """
    Run every task in order and return the outputs without writing anything.

    Raises:
        ScenarioError: a builder or task rejected its parameters
        TaskFailed: a numerical failure, tagged with the task name
    """
    ctx = RunContext.build(scenario, workers)
    outputs = []
    for index, task in enumerate(scenario.tasks):
        logger.info("running %s task '%s'", task.kind, task.name)
        try:
            out = TASK_RUNNERS[task.kind](ctx, task, scenario.seed + index)
        except ScenarioError:
            raise
        except ValueError as e:
            raise ScenarioError(f"task '{task.name}': {e}") from e
        except PathGaugeError as e:
            raise TaskFailed(task.name, e) from e
        ctx.results[task.name] = out
        outputs.append(out)
    return outputs


def write_outputs(scenario: Scenario, outputs: Sequence[TaskOutput], out_dir) -> list[Path]:
    base = Path(out_dir) / scenario.name
    return [write_csv(base / f"{o.name}.csv", o.header, o.rows) for o in outputs]


def run_scenario(scenario: Scenario, out_dir, workers: int = DEFAULT_THREADS) -> tuple[list[TaskOutput], list[Path]]:
    outputs = execute(scenario, workers)
    return outputs, write_outputs(scenario, outputs, out_dir)
