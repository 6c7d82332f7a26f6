"""Scenario files: a JSON description of a run, validated before anything is computed."""

from __future__ import annotations

import dataclasses
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .case_studies import PRESETS, Preset, get_preset
from .certificates import (
    CertificateSpec,
    check_iss_envelope,
    check_razumikhin_envelope,
    check_stable_flow_envelope,
    check_stable_jump_envelope,
)
from .errors import SchemaError
from .hybrid_time import HybridArc, InputSignal
from .io import read_arc_csv
from .report import CheckReport
from .system import PRIORITIES, SELECTIONS
from .toolkit import ComparisonFunction

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_VEC = {"type": "array", "items": _NUM, "minItems": 1}
_FUNC = {
    "oneOf": [
        _NUM,
        {
            "type": "object",
            "properties": {
                "type": {"enum": ["linear", "power", "saturating", "zero", "table"]},
                "k": _NUM,
                "p": _NUM,
                "points": {"type": "array", "items": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}},
                "class": {"enum": ["K", "Kinf", "PD", "nondecreasing"]},
            },
            "required": ["type"],
            "additionalProperties": False,
        },
    ]
}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["system"],
    "properties": {
        "name": {"type": "string"},
        "system": {
            "type": "object",
            "additionalProperties": False,
            "required": ["preset"],
            "properties": {
                "preset": {"enum": sorted(PRESETS)},
                "params": {"type": "object"},
            },
        },
        "sim": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "h": _POS,
                "T": {"type": "number", "minimum": 0},
                "J": {"type": "integer", "minimum": 0},
                "priority": {"enum": list(PRIORITIES)},
                "selection": {"enum": list(SELECTIONS)},
                "seed": {"type": "integer"},
                "zeno_guard": {"type": "integer", "minimum": 1},
                "event_tol": _POS,
            },
        },
        "initial": {
            "type": "object",
            "additionalProperties": False,
            "required": ["type"],
            "properties": {
                "type": {"enum": ["preset", "constant", "csv"]},
                "value": _VEC,
                "path": {"type": "string"},
            },
        },
        "input": {
            "type": "object",
            "additionalProperties": False,
            "required": ["type"],
            "properties": {
                "type": {"enum": ["preset", "zero", "constant", "sine", "csv"]},
                "value": _VEC,
                "path": {"type": "string"},
                "amplitude": _NUM,
                "frequency": _NUM,
                "phase": _NUM,
            },
        },
        "certificate": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                **{k: _FUNC for k in ("alpha1", "alpha2", "alpha3", "rho", "gamma1", "gamma2")},
                **{k: _NUM for k in ("lam1", "lam2", "mu", "eps", "varpi", "lam")},
                "N0": {"type": "integer", "minimum": 1},
            },
        },
        "envelopes": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["kind"],
                "properties": {
                    "kind": {"enum": ["razumikhin", "stable-flow", "stable-jump", "iss"]},
                    "mu": _NUM,
                    "lam": _NUM,
                    "alpha2": _FUNC,
                    "beta": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["c", "a", "b"],
                        "properties": {"c": _NUM, "a": _NUM, "b": _NUM},
                    },
                    "gamma": _FUNC,
                },
            },
        },
        "checks": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"stride": {"type": "integer", "minimum": 1}, "trace": {"type": "boolean"}},
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dir": {"type": "string"},
                "derivatives": {"type": "boolean"},
                "max_violations": {"type": "integer", "minimum": 0},
            },
        },
    },
}


@dataclass
class Scenario:
    """A validated scenario resolved into runnable objects."""

    name: str
    preset: Preset
    config: dict
    out_dir: Path
    derivatives: bool = True
    max_violations: int | None = 50
    stride: int = 1
    trace: bool = True
    envelopes: list = field(default_factory=list)

    def envelope_reports(self, sol) -> list[CheckReport]:
        return [_run_envelope(e, self.preset.certificate, sol, self.trace) for e in self.envelopes]


def _func(spec) -> ComparisonFunction:
    try:
        return ComparisonFunction.from_spec(spec)
    except (KeyError, ValueError) as exc:
        raise SchemaError(f"bad comparison function {spec!r}: {exc}") from None


def _run_envelope(e: dict, cert: CertificateSpec, sol, trace: bool) -> CheckReport:
    kind = e["kind"]
    if kind == "iss":
        b = e.get("beta")
        if b is None or "gamma" not in e:
            raise SchemaError("an iss envelope needs beta and gamma")
        c, a, bj = b["c"], b["a"], b["b"]
        return check_iss_envelope(sol, lambda r0, t, j: c * r0 * math.exp(-a * t - bj * j), _func(e["gamma"]), trace=trace)
    alpha2 = _func(e["alpha2"]) if "alpha2" in e else cert.alpha2
    if alpha2 is None:
        raise SchemaError(f"the {kind} envelope needs alpha2")
    mu = e.get("mu", cert.mu)
    lam = e.get("lam", cert.lam1 if kind == "razumikhin" else cert.lam)
    if mu is None or lam is None:
        raise SchemaError(f"the {kind} envelope needs mu and lam")
    if kind == "razumikhin":
        if cert.V_state is None:
            raise SchemaError("the razumikhin envelope needs a state-valued certificate")
        return check_razumikhin_envelope(sol, cert.V_state, mu, lam, alpha2, trace=trace)
    if cert.V_func is None:
        raise SchemaError(f"the {kind} envelope needs a functional certificate")
    fn = check_stable_flow_envelope if kind == "stable-flow" else check_stable_jump_envelope
    return fn(sol, cert.V_func, mu, lam, alpha2, trace=trace)


def parse_json(text: str, source: str = "<config>") -> dict:
    """Parse JSON, turning syntax errors into :class:`SchemaError` with line and column."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def validate_config(cfg: dict, source: str = "<config>") -> None:
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "(root)"
        raise SchemaError(f"{source}: {where}: {exc.message}") from None


def seed_from_env(default: int) -> int:
    raw = os.environ.get("HYMEM_SEED")
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise SchemaError(f"HYMEM_SEED must be an integer, got {raw!r}") from None


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from None
    cfg = parse_json(text, str(path))
    return build_scenario(cfg, base=path.parent, source=str(path))


def build_scenario(cfg: dict, base: Path | None = None, source: str = "<config>") -> Scenario:
    """Validate ``cfg`` and resolve it. Raises :class:`SchemaError` on any config problem."""
    validate_config(cfg, source)
    base = base or Path(".")
    sim = cfg.get("sim", {})
    seed = seed_from_env(sim.get("seed", 0))
    sysc = cfg["system"]
    try:
        preset = get_preset(sysc["preset"], seed=seed, **sysc.get("params", {}))
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"{source}: system: {exc}") from None
    T, J = preset.config.horizon
    try:
        preset.config = dataclasses.replace(
            preset.config,
            h=sim.get("h", preset.config.h),
            horizon=(float(sim.get("T", T)), int(sim.get("J", J))),
            priority=sim.get("priority", preset.config.priority),
            selection=sim.get("selection", preset.config.selection),
            seed=seed,
            zeno_guard=sim.get("zeno_guard", preset.config.zeno_guard),
            event_tol=sim.get("event_tol", preset.config.event_tol),
        )
    except ValueError as exc:
        raise SchemaError(f"{source}: sim: {exc}") from None
    _apply_initial(preset, cfg.get("initial"), base, source)
    _apply_input(preset, cfg.get("input"), base, source)
    _apply_certificate(preset, cfg.get("certificate"), source)
    out = cfg.get("output", {})
    checks = cfg.get("checks", {})
    name = cfg.get("name", preset.name)
    return Scenario(
        name=name,
        preset=preset,
        config=cfg,
        out_dir=(base / out.get("dir", f"out-{name}")),
        derivatives=out.get("derivatives", True),
        max_violations=out.get("max_violations", 50),
        stride=checks.get("stride", 1),
        trace=checks.get("trace", True),
        envelopes=list(cfg.get("envelopes", [])),
    )


def _apply_initial(preset: Preset, spec: dict | None, base: Path, source: str) -> None:
    if spec is None or spec["type"] == "preset":
        return
    n = preset.system.state_dim
    if spec["type"] == "constant":
        v = spec.get("value")
        if v is None or len(v) != n:
            raise SchemaError(f"{source}: initial: constant value needs {n} entries")
        preset.initial = HybridArc.constant(v, -preset.system.delta, 0.0, step=preset.config.h)
    else:
        if "path" not in spec:
            raise SchemaError(f"{source}: initial: csv needs a path")
        try:
            preset.initial = read_arc_csv(base / spec["path"])
        except (OSError, ValueError) as exc:
            raise SchemaError(f"{source}: initial: {exc}") from None


def _apply_input(preset: Preset, spec: dict | None, base: Path, source: str) -> None:
    if spec is None or spec["type"] == "preset":
        return
    m = preset.system.input_dim
    kind = spec["type"]
    if kind == "zero":
        preset.input = InputSignal.zero(m)
    elif kind == "constant":
        v = spec.get("value")
        if v is None or len(v) != m:
            raise SchemaError(f"{source}: input: constant value needs {m} entries")
        preset.input = InputSignal.constant(v)
    elif kind == "csv":
        if "path" not in spec:
            raise SchemaError(f"{source}: input: csv needs a path")
        try:
            arc = read_arc_csv(base / spec["path"], interpolation="linear")
        except (OSError, ValueError) as exc:
            raise SchemaError(f"{source}: input: {exc}") from None
        if arc.dim != m:
            raise SchemaError(f"{source}: input: csv has {arc.dim} columns, system takes {m}")
        preset.input = InputSignal.from_arc(arc)
    else:
        a, w, ph = spec.get("amplitude", 1.0), spec.get("frequency", 1.0), spec.get("phase", 0.0)
        preset.input = InputSignal.from_function(lambda t, j: [a * math.sin(w * t + ph)] * m, m)


def _apply_certificate(preset: Preset, spec: dict | None, source: str) -> None:
    if not spec:
        return
    changes = {}
    for k, v in spec.items():
        changes[k] = _func(v) if k in ("alpha1", "alpha2", "alpha3", "rho", "gamma1", "gamma2") else v
    try:
        preset.certificate = dataclasses.replace(preset.certificate, notes=list(preset.certificate.notes), **changes)
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"{source}: certificate: {exc}") from None
