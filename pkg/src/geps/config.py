"""JSON run configuration: schema, validation and conversion to library objects.

Validation is all-or-nothing.  ``parse_config`` either returns a complete
:class:`RunConfig` or raises :class:`ConfigError`, and nothing is built from
a config that fails any check.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from .integrate import IntegratorConfig
from .models import (BodyParams, CirculationParams, HeisenbergParams, InertiaTensor,
                     body_inertia, total_inertia)

MODELS = ("heisenberg", "kirchhoff", "chaplygin_lamb", "sleigh_reduced", "sleigh_full")
STATE_DIM = {"heisenberg": 2, "kirchhoff": 3, "chaplygin_lamb": 3, "sleigh_reduced": 2, "sleigh_full": 3}


class ConfigError(ValueError):
    pass


_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_count = {"type": "integer", "minimum": 1}
_range = {"type": "array", "prefixItems": [_num, _num, {"type": "integer", "minimum": 1}],
          "minItems": 3, "maxItems": 3}
_mat3 = {"type": "array", "minItems": 3, "maxItems": 3,
         "items": {"type": "array", "items": _num, "minItems": 3, "maxItems": 3}}


def _obj(props: dict, required: tuple = ()) -> dict:
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


SCHEMA = _obj({
    "model": {"enum": list(MODELS)},
    "inertia": _obj({k: _num for k in ("J", "L1", "L2", "M", "Z", "N")}, ("J", "L1", "L2", "M", "Z", "N")),
    "body": _obj({"m": _pos, "I_cm": _pos, "a": _num, "b": _num}, ("m", "I_cm")),
    "added": _mat3,
    "circulation": _obj({"rho": _pos, "kappa": _num, "alpha": _num, "beta": _num}),
    "heisenberg": _obj({
        "mass": {"oneOf": [_pos, {"type": "array", "minItems": 2, "maxItems": 2,
                                  "items": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}}]},
        "charge": _num, "field": _num, "sigma": _num,
    }),
    "initial": _obj({
        "state": {"type": "array", "items": _num},
        "velocity": {"type": "array", "items": _num},
        "pose": {"type": "array", "items": _num, "minItems": 3, "maxItems": 3},
    }),
    "integrator": _obj({"method": {"enum": ["rk4", "rk45"]}, "h": _pos, "t_final": _pos,
                        "stride": _count, "atol": _pos, "rtol": _pos}),
    "output": _obj({"path": {"type": "string"}, "format": {"enum": ["csv", "json"]}, "stride": _count}),
    "portrait": _obj({
        "grid": _obj({"omega": _range, "v1": _range}, ("omega", "v1")),
        "energies": {"type": "array", "items": _num, "minItems": 1},
        "t_final": _pos,
        "equilibria": {"type": "boolean"},
        "separatrix": {"type": "boolean"},
        "workers": _count,
    }),
    "measure": _obj({"Z": {"type": "array", "items": _num, "minItems": 1},
                     "L1": {"type": "array", "items": _num, "minItems": 1}}, ("Z", "L1")),
    "equilibria": _obj({"span": _range}),
}, ("model",))


@dataclass(frozen=True)
class PortraitSpec:
    """Initial conditions for a reduced-sleigh portrait: an (omega, v1) grid or energy levels."""

    grid: tuple | None = None
    energies: tuple | None = None
    t_final: float = 50.0
    equilibria: bool = True
    separatrix: bool = True
    workers: int = 4

    def __post_init__(self):
        if (self.grid is None) == (self.energies is None):
            raise ConfigError("$.portrait: exactly one of 'grid' or 'energies' is required")
        if self.grid is not None and any(r[2] < 1 for r in self.grid):
            raise ConfigError("$.portrait.grid: grid must be nonempty")


@dataclass(frozen=True)
class OutputSpec:
    path: str | None = None
    format: str = "csv"
    stride: int = 1


@dataclass(frozen=True)
class RunConfig:
    model: str
    inertia: InertiaTensor | None
    circ: CirculationParams
    heisenberg: HeisenbergParams | None
    heisenberg_sigma: float
    state0: np.ndarray
    pose0: np.ndarray
    integrator: IntegratorConfig
    output: OutputSpec
    portrait: PortraitSpec | None = None
    measure: tuple | None = None
    equilibria_span: tuple = (-2.0, 2.0, 9)
    raw: dict = field(default_factory=dict, repr=False, compare=False)


def _path(err: jsonschema.ValidationError) -> str:
    parts = "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)
    return "$" + parts


def _describe(err: jsonschema.ValidationError) -> str:
    if err.validator == "additionalProperties":
        extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
        return f"{_path(err)}: unknown key(s) {', '.join(map(repr, extra))}"
    if err.validator == "required":
        return f"{_path(err)}: {err.message}"
    return f"{_path(err)}: expected {err.validator} {err.validator_value!r}, found {err.instance!r}"


def _inertia(doc: dict) -> InertiaTensor:
    try:
        if "inertia" in doc:
            if "body" in doc or "added" in doc:
                raise ConfigError("$: give either 'inertia' or 'body'+'added', not both")
            return InertiaTensor(**{k: float(v) for k, v in doc["inertia"].items()})
        if "body" in doc:
            added = np.asarray(doc.get("added", np.zeros((3, 3))), dtype=float)
            return total_inertia(body_inertia(BodyParams(**doc["body"])), added)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"$.inertia: {exc}") from None
    raise ConfigError("$: model requires 'inertia' (or 'body' with 'added')")


def parse_config(text: str) -> RunConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    errors = sorted(jsonschema.Draft202012Validator(SCHEMA).iter_errors(doc),
                    key=lambda e: (list(map(str, e.absolute_path)), e.validator))
    if errors:
        raise ConfigError("; ".join(_describe(e) for e in errors))

    model = doc["model"]
    circ = CirculationParams(**doc.get("circulation", {}))
    inertia, heis, hsigma = None, None, 1.0
    if model == "heisenberg":
        block = doc.get("heisenberg")
        if block is None:
            raise ConfigError("$: model 'heisenberg' requires a 'heisenberg' block")
        # the fiber value defaults to the charge
        hsigma = float(block.get("sigma", block.get("charge", 1.0)))
        try:
            heis = HeisenbergParams(block.get("mass", 1.0), block.get("charge", 1.0), block.get("field", 1.0))
        except ValueError as exc:
            raise ConfigError(f"$.heisenberg.mass: {exc}") from None
    else:
        inertia = _inertia(doc)
        if model.startswith("sleigh") and not inertia.D > 0:
            raise ConfigError("$.inertia: M J - L2^2 must be positive")

    init = doc.get("initial", {})
    n = STATE_DIM[model]
    if "state" in init and "velocity" in init:
        raise ConfigError("$.initial: give either 'state' or 'velocity', not both")
    if "velocity" in init:
        if model == "heisenberg":
            raise ConfigError("$.initial.velocity: not available for model 'heisenberg'")
        vel = np.asarray(init["velocity"], dtype=float)
        if vel.size != n:
            raise ConfigError(f"$.initial.velocity: expected {n} components, found {vel.size}")
        state = vel if model == "sleigh_reduced" else inertia.matrix @ vel
    else:
        state = np.asarray(init.get("state", np.zeros(n)), dtype=float)
        if state.size != n:
            raise ConfigError(f"$.initial.state: expected {n} components, found {state.size}")

    try:
        integ = IntegratorConfig(**doc.get("integrator", {}))
    except ValueError as exc:
        raise ConfigError(f"$.integrator: {exc}") from None

    portrait = None
    if "portrait" in doc:
        if model != "sleigh_reduced":
            raise ConfigError("$.portrait: portraits are defined for model 'sleigh_reduced' only")
        p = dict(doc["portrait"])
        if "grid" in p:
            p["grid"] = (tuple(p["grid"]["omega"]), tuple(p["grid"]["v1"]))
        if "energies" in p:
            p["energies"] = tuple(float(h) for h in p["energies"])
        portrait = PortraitSpec(**p)

    measure = None
    if "measure" in doc:
        measure = (tuple(doc["measure"]["Z"]), tuple(doc["measure"]["L1"]))

    return RunConfig(
        model=model, inertia=inertia, circ=circ, heisenberg=heis, heisenberg_sigma=hsigma,
        state0=state, pose0=np.asarray(init.get("pose", (0.0, 0.0, 0.0)), dtype=float),
        integrator=integ, output=OutputSpec(**doc.get("output", {})), portrait=portrait,
        measure=measure, equilibria_span=tuple(doc.get("equilibria", {}).get("span", (-2.0, 2.0, 9))),
        raw=doc,
    )


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)
