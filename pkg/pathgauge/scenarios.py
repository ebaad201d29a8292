"""
Scenario configs: the JSON schema, semantic checks and builders.

A scenario names one field, a set of path families and a list of tasks.
Structure is checked by pydantic; cross references (task -> path, task ->
earlier task) are checked by validate_scenario(), which returns
(is_valid, error_message) like the other validators in this package.
"""

from __future__ import annotations

import difflib
import itertools
import json
import logging
from pathlib import Path
from typing import Annotated, Any, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, model_validator

from pathgauge.config import (
    CLASSICAL_FD_STEP,
    DEFAULT_SEED,
    ODE_TOL,
    PHASE_TOLERANCE,
    PRESET_NAMES,
    PRESETS_PATH,
    STENCIL_STEP,
    QUAD_MAX_DEPTH,
    QUAD_ORDER,
    QUAD_TOL,
    SCHEMA_VERSION,
)
from pathgauge.errors import GeometryError, ScenarioError
from pathgauge.fields import (
    FieldConfig,
    confined_electric_block,
    confined_magnetic_disk,
    load_tabulated,
    monopole,
    uniform_electric,
    uniform_field,
    uniform_magnetic,
    zero_field,
)
from pathgauge.gauges import CLOSED_FORMS, closed_form
from pathgauge.oned import PairGeometry, Worldline1D
from pathgauge.paths import BUILTIN_PATHS, JACOBIAN_MODES, PathFamily, builtin_path, waypoint_path
from pathgauge.spacetime import UNIT_PRESETS, Constants, constants_preset
from pathgauge.strings import t

logger = logging.getLogger(__name__)

Vec4 = Annotated[list[float], Field(min_length=4, max_length=4)]
Event = Annotated[list[float], Field(min_length=2, max_length=2)]


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# =========================
# Shared Blocks
# =========================
class ConstantsSpec(_Model):
    units: Literal[tuple(UNIT_PRESETS)] = "natural"  # type: ignore[valid-type]
    hbar: Optional[PositiveFloat] = None
    c: Optional[PositiveFloat] = None
    e: Optional[PositiveFloat] = None

    def build(self) -> Constants:
        base = constants_preset(self.units)
        return Constants(
            hbar=self.hbar if self.hbar is not None else base.hbar,
            c=self.c if self.c is not None else base.c,
            e=self.e if self.e is not None else base.e,
        )


class TolerancesSpec(_Model):
    quad_tol: PositiveFloat = QUAD_TOL
    quad_order: Annotated[int, Field(ge=2, le=200)] = QUAD_ORDER
    max_depth: PositiveInt = QUAD_MAX_DEPTH
    phase_tol: PositiveFloat = PHASE_TOLERANCE
    ode_tol: PositiveFloat = ODE_TOL
    stencil_step: PositiveFloat = STENCIL_STEP

    def quad(self) -> dict:
        return {"tol": self.quad_tol, "order": self.quad_order, "max_depth": self.max_depth}


class FieldSpec(_Model):
    kind: Literal[
        "zero", "uniform", "uniform_electric", "uniform_magnetic", "monopole", "disk", "eblock", "tabulated"
    ]
    params: dict[str, Any] = {}


class PathSpec(_Model):
    """Either a builtin family (with params) or fixed waypoints followed by the evaluation point."""

    builtin: Optional[str] = None
    params: dict[str, Any] = {}
    waypoints: Optional[list[Vec4]] = None
    jacobian_mode: Literal[JACOBIAN_MODES] = "analytic"  # type: ignore[valid-type]

    @model_validator(mode="after")
    def _one_source(self):
        if (self.builtin is None) == (self.waypoints is None):
            raise ValueError("a path needs exactly one of 'builtin' or 'waypoints'")
        if self.waypoints is not None and len(self.waypoints) < 1:
            raise ValueError("'waypoints' needs at least the starting point")
        return self


class AxisRange(_Model):
    start: float
    stop: float
    num: PositiveInt = 1


class RandomGrid(_Model):
    count: PositiveInt
    low: Vec4
    high: Vec4


class GridSpec(_Model):
    """Evaluation points: an explicit list, a (ct, x, y, z) product of ranges, or seeded uniform draws."""

    points: Optional[list[Vec4]] = None
    ranges: Optional[Annotated[list[AxisRange], Field(min_length=4, max_length=4)]] = None
    random: Optional[RandomGrid] = None

    @model_validator(mode="after")
    def _one_source(self):
        given = [k for k in ("points", "ranges", "random") if getattr(self, k) is not None]
        if len(given) != 1:
            raise ValueError("a grid needs exactly one of 'points', 'ranges' or 'random'")
        return self

    def build(self, seed: int = DEFAULT_SEED) -> list[np.ndarray]:
        if self.points is not None:
            return [np.asarray(p, dtype=float) for p in self.points]
        if self.ranges is not None:
            axes = [np.linspace(r.start, r.stop, r.num) for r in self.ranges]
            return [np.array(p) for p in itertools.product(*axes)]
        rng = np.random.default_rng(seed)
        draws = rng.uniform(self.random.low, self.random.high, size=(self.random.count, 4))
        return list(draws)


# =========================
# Tasks
# =========================
class _Task(_Model):
    name: Annotated[str, Field(min_length=1, pattern=r"^[A-Za-z0-9_.-]+$")]


class PotentialTask(_Task):
    kind: Literal["potential"]
    path: str
    form: Literal["plain", "antisymmetrized"] = "plain"
    grid: GridSpec


class GaugeCompareTask(_Task):
    kind: Literal["gauge_compare"]
    path: str
    closed_form: Literal[tuple(CLOSED_FORMS)]  # type: ignore[valid-type]
    closed_form_params: dict[str, Any] = {}
    form: Literal["plain", "antisymmetrized"] = "plain"
    grid: GridSpec


class SurfaceConfig(_Model):
    kind: Literal["sphere_slice", "spacetime_rectangle"]
    radius: PositiveFloat = 1.0
    center: Vec4 = [0.0, 0.0, 0.0, 0.0]
    phi: list[float] = []
    full_sphere: bool = False
    ct_range: Optional[Annotated[list[float], Field(min_length=2, max_length=2)]] = None
    x_range: Optional[Annotated[list[float], Field(min_length=2, max_length=2)]] = None

    @model_validator(mode="after")
    def _complete(self):
        if self.kind == "sphere_slice" and not (self.phi or self.full_sphere):
            raise ValueError("a sphere_slice sweep needs 'phi' values or 'full_sphere'")
        if self.kind == "spacetime_rectangle" and (self.ct_range is None or self.x_range is None):
            raise ValueError("a spacetime_rectangle needs 'ct_range' and 'x_range'")
        return self


class FluxTask(_Task):
    """Point-wise flux of path_a - path_b over a grid, or a flux through a fixed surface."""

    kind: Literal["flux"]
    path_a: Optional[str] = None
    path_b: Optional[str] = None
    route: Literal["auto", "open", "loop", "surface"] = "auto"
    background: Optional[Literal[tuple(CLOSED_FORMS)]] = None  # type: ignore[valid-type]
    background_params: dict[str, Any] = {}
    winding: PositiveInt = 1
    grid: Optional[GridSpec] = None
    surface: Optional[SurfaceConfig] = None

    @model_validator(mode="after")
    def _inputs(self):
        if self.surface is None:
            if self.path_a is None or self.path_b is None or self.grid is None:
                raise ValueError("a loop flux task needs 'path_a', 'path_b' and 'grid'")
        return self


class TransformTask(_Task):
    kind: Literal["transform"]
    path_a: str
    path_b: str
    grid: GridSpec
    background: Optional[Literal[tuple(CLOSED_FORMS)]] = None  # type: ignore[valid-type]
    background_params: dict[str, Any] = {}


class DiracScan(_Model):
    g: float
    e_values: Annotated[list[float], Field(min_length=1)]


class QuantizeTask(_Task):
    """Phase checks on an earlier flux task's values, on explicit fluxes, or a Dirac charge scan."""

    kind: Literal["quantize"]
    source: Optional[str] = None
    fluxes: Optional[list[float]] = None
    dirac: Optional[DiracScan] = None

    @model_validator(mode="after")
    def _one_source(self):
        given = [k for k in ("source", "fluxes", "dirac") if getattr(self, k) is not None]
        if len(given) != 1:
            raise ValueError("a quantize task needs exactly one of 'source', 'fluxes' or 'dirac'")
        return self


class ClassicalTask(_Task):
    """
    An initial-value world line, sampled for CSV output.

    With `endpoint`, the classical path from y_init to the endpoint over
    s in [0, 1] is found by shooting instead, and its potential is reported.
    """

    kind: Literal["classical"]
    y_init: Vec4 = [0.0, 0.0, 0.0, 0.0]
    u_init: Optional[Vec4] = None
    s_span: Annotated[list[float], Field(min_length=2, max_length=2)] = [0.0, 1.0]
    samples: Annotated[int, Field(ge=2)] = 65
    charge: float = 1.0
    mass: PositiveFloat = 1.0
    endpoint: Optional[Vec4] = None
    fd_step: PositiveFloat = CLASSICAL_FD_STEP

    @model_validator(mode="after")
    def _inputs(self):
        if (self.u_init is None) == (self.endpoint is None):
            raise ValueError("a classical task needs exactly one of 'u_init' or 'endpoint'")
        return self


class PairSpec(_Model):
    """A pair as a rectangle (cT, L), a timelike diamond (cT, v), or two explicit (ct, x) polylines."""

    rectangle: Optional[Annotated[list[float], Field(min_length=2, max_length=2)]] = None
    diamond: Optional[Annotated[list[float], Field(min_length=2, max_length=2)]] = None
    electron: Optional[list[Event]] = None
    positron: Optional[list[Event]] = None
    strict: bool = True

    @model_validator(mode="after")
    def _one_shape(self):
        given = [k for k in ("rectangle", "diamond", "electron") if getattr(self, k) is not None]
        if len(given) != 1:
            raise ValueError("a pair needs exactly one of 'rectangle', 'diamond' or 'electron'/'positron'")
        if (self.electron is None) != (self.positron is None):
            raise ValueError("explicit pairs need both 'electron' and 'positron'")
        return self

    def build(self) -> PairGeometry:
        if self.rectangle is not None:
            return PairGeometry.rectangle(*self.rectangle)
        if self.diamond is not None:
            return PairGeometry.diamond(*self.diamond)
        return PairGeometry(
            Worldline1D(np.asarray(self.electron), self.strict),
            Worldline1D(np.asarray(self.positron), self.strict),
        )


class OnedTask(_Task):
    kind: Literal["oned"]
    pairs: Annotated[list[PairSpec], Field(min_length=1)]
    alpha1: Optional[PositiveFloat] = None
    field_route: bool = True
    mass: Optional[PositiveFloat] = None


TaskSpec = Annotated[
    Union[PotentialTask, GaugeCompareTask, FluxTask, TransformTask, QuantizeTask, ClassicalTask, OnedTask],
    Field(discriminator="kind"),
]


class Scenario(_Model):
    schema_version: int = SCHEMA_VERSION
    name: Annotated[str, Field(min_length=1, pattern=r"^[A-Za-z0-9_.-]+$")]
    description: str = ""
    seed: int = DEFAULT_SEED
    constants: ConstantsSpec = ConstantsSpec()
    tolerances: TolerancesSpec = TolerancesSpec()
    field: FieldSpec
    paths: dict[str, PathSpec] = {}
    tasks: Annotated[list[TaskSpec], Field(min_length=1)]

    def with_overrides(
        self,
        *,
        tol: Optional[float] = None,
        quad_order: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> "Scenario":
        """Copy with CLI overrides applied and re-validated."""
        data = self.model_dump(mode="json")
        if tol is not None:
            data["tolerances"]["quad_tol"] = tol
        if quad_order is not None:
            data["tolerances"]["quad_order"] = quad_order
        if seed is not None:
            data["seed"] = seed
        return Scenario.model_validate(data)


# =========================
# Semantic Validation
# =========================
def validate_scenario(scenario: Scenario) -> tuple[bool, str]:
    """
    Cross-reference checks the schema cannot express.

    Returns:
        (is_valid, error_message)
    """
    if scenario.schema_version != SCHEMA_VERSION:
        return False, t("schema_version_error", found=scenario.schema_version, expected=SCHEMA_VERSION)

    for name, spec in scenario.paths.items():
        if spec.builtin is not None and spec.builtin not in BUILTIN_PATHS:
            return False, f"path '{name}': unknown builtin '{spec.builtin}' (choose from {', '.join(BUILTIN_PATHS)})"

    seen: dict[str, str] = {}
    for task in scenario.tasks:
        if task.name in seen:
            return False, t("duplicate_task", task=task.name)
        for attr in ("path", "path_a", "path_b"):
            ref = getattr(task, attr, None)
            if ref is not None and ref not in scenario.paths:
                return False, t("unknown_path", task=task.name, path=ref)
        if task.kind == "quantize" and task.source is not None:
            if seen.get(task.source) != "flux":
                return False, t("unknown_task_ref", task=task.name, ref=task.source)
        if task.kind == "oned":
            for k, pair in enumerate(task.pairs):
                try:
                    pair.build()
                except GeometryError as e:
                    return False, f"task '{task.name}', pair {k}: {e}"
        seen[task.name] = task.kind
    return True, ""


# =========================
# Builders
# =========================
FIELD_BUILDERS = {
    "zero": lambda **_: zero_field(),
    "uniform": lambda E0=(0.0, 0.0, 0.0), B0=(0.0, 0.0, 0.0), **_: uniform_field(E0, B0),
    "uniform_electric": lambda E0, **_: uniform_electric(E0),
    "uniform_magnetic": lambda B0, **_: uniform_magnetic(B0),
    "monopole": lambda g, r_far=None, **_: monopole(g, r_far),
    "disk": lambda B0, r0, r_far=None, **_: confined_magnetic_disk(B0, r0, r_far),
    "eblock": lambda E0, dt, dx, c=1.0, **_: confined_electric_block(E0, dt, dx, c),
    "tabulated": lambda path, **_: load_tabulated(path),
}


def _call(label: str, builder, params: dict):
    try:
        return builder(**params)
    except TypeError as e:
        raise ScenarioError(f"{label}: bad parameters {sorted(params)} ({e})") from e
    except ValueError as e:
        raise ScenarioError(f"{label}: {e}") from e


def build_field(spec: FieldSpec) -> FieldConfig:
    return _call(f"field '{spec.kind}'", FIELD_BUILDERS[spec.kind], dict(spec.params))


def build_path(name: str, spec: PathSpec, field_spec: FieldSpec) -> PathFamily:
    """Builtin families see the field parameters too (e.g. r_far, dt, dx), overridden by their own."""
    if spec.waypoints is not None:
        path = waypoint_path(spec.waypoints, name=name)
    else:
        params = {**field_spec.params, **spec.params}
        path = _call(f"path '{name}'", lambda **p: builtin_path(spec.builtin, **p), params)
    return path.with_mode(spec.jacobian_mode) if spec.jacobian_mode != path.jacobian_mode else path


def build_paths(scenario: Scenario) -> dict[str, PathFamily]:
    return {name: build_path(name, spec, scenario.field) for name, spec in scenario.paths.items()}


def build_closed_form(name: str, params: dict, field_spec: FieldSpec):
    return _call(f"closed form '{name}'", lambda **p: closed_form(name, **p), {**field_spec.params, **params})


# =========================
# Loading and Presets
# =========================
def parse_scenario(data: dict) -> Scenario:
    """
    Validate a config mapping.

    Raises:
        pydantic.ValidationError: on schema violations
        ScenarioError: on semantic errors
    """
    scenario = Scenario.model_validate(data)
    ok, msg = validate_scenario(scenario)
    if not ok:
        raise ScenarioError(msg)
    return scenario


def load_scenario(path) -> Scenario:
    """
    Load a JSON scenario file.

    Raises:
        FileNotFoundError: missing file
        ScenarioError: unreadable JSON or semantic errors
        pydantic.ValidationError: schema violations
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(t("config_not_found", path=path))
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ScenarioError(t("config_unreadable", path=path, error=e)) from e
    return parse_scenario(data)


def dump_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario.model_dump(mode="json"), indent=2) + "\n"


def list_presets() -> list[tuple[str, str]]:
    """(name, description) for every shipped preset, in the documented order."""
    return [(name, load_preset(name).description) for name in PRESET_NAMES]


def load_preset(name: str) -> Scenario:
    if name not in PRESET_NAMES:
        message = t("unknown_preset", name=name, available=", ".join(PRESET_NAMES))
        close = difflib.get_close_matches(name, PRESET_NAMES, n=3)
        if close:
            message += "\n" + t("unknown_preset_hint", suggestions=", ".join(close))
        raise ScenarioError(message)
    return load_scenario(PRESETS_PATH / f"{name}.json")
