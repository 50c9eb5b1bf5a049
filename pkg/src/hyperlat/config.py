"""Run configuration for the command-line tools (schema ``hyperlat/config/v1``)."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import jsonschema

from .tightbinding import ModelParams
from .transmission import (BACKGROUND_FILTER_WIDTH, DEVICE_PARAMS, ENSEMBLE_SIZE, KAPPA0, KAPPA_EXT,
                           PORT_COUPLING, TransmissionConfig)

CONFIG_SCHEMA_ID = "hyperlat/config/v1"
OUTPUT_ENV = "HYPERLAT_OUTPUT_DIR"
DEFAULT_OUTPUT = "hyperlat-out"

_NUM = {"type": "number"}
_OFFSETS = {"type": "object", "additionalProperties": _NUM}
_SEED = {"type": ["integer", "null"], "minimum": 0}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "schema": {"const": CONFIG_SCHEMA_ID},
        "lattice": {"type": "object", "additionalProperties": False, "properties": {
            "p": {"enum": [6, 7, 8, 9, 10, 11, 12]},
            "shells": {"type": "integer", "minimum": 0, "maximum": 6}}},
        "model": {"type": "object", "additionalProperties": False, "properties": {
            "omega0": _NUM, "t": _NUM,
            "onsite_sigma": {"type": "number", "minimum": 0},
            "hop_sigma": {"type": "number", "minimum": 0},
            "ring_offsets": _OFFSETS, "seed": _SEED,
            "convention": {"enum": ["full-wave", "half-wave"]}}},
        "spectrum": {"type": "object", "additionalProperties": False, "properties": {
            "bins": {"type": "integer", "minimum": 1},
            "tol_flat": {"type": "number", "exclusiveMinimum": 0}}},
        "scan": {"type": "object", "additionalProperties": False, "properties": {
            "shells": {"type": "array", "items": {"type": "integer", "minimum": 0, "maximum": 6}, "minItems": 1}}},
        "transmission": {"type": "object", "additionalProperties": False, "properties": {
            "omega0": _NUM, "t": _NUM,
            "onsite_sigma": {"type": "number", "minimum": 0},
            "hop_sigma": {"type": "number", "minimum": 0},
            "ring_offsets": _OFFSETS, "seed": _SEED,
            "kappa0": {"type": "number", "exclusiveMinimum": 0},
            "kappa_ext": {"type": "number", "minimum": 0},
            "port_coupling": {"type": "number", "exclusiveMinimum": 0},
            "port_sites": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2},
            "input_port": {"type": "integer", "minimum": 0},
            "output_port": {"type": "integer", "minimum": 0},
            "freq_start": _NUM, "freq_stop": _NUM,
            "n_freq": {"type": "integer", "minimum": 2},
            "ensemble_size": {"type": "integer", "minimum": 1},
            "measured": {"type": ["string", "null"]},
            "filter_width": {"type": "number", "exclusiveMinimum": 0}}},
        "render": {"type": "object", "additionalProperties": False, "properties": {
            "states": {"type": "array", "items": {"type": "integer"}},
            "loop_faces": {"type": ["array", "null"], "items": {"type": "integer", "minimum": 0},
                           "minItems": 1, "maxItems": 2}}},
        "output": {"type": "object", "additionalProperties": False, "properties": {
            "directory": {"type": "string"},
            "formats": {"type": "array", "items": {"enum": ["csv", "json", "svg"]}}}},
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    p: int = 7
    shells: int = 3
    model: ModelParams = field(default_factory=ModelParams)
    convention: str = "full-wave"
    bins: int = 120
    tol_flat: float = 1e-8
    scan_shells: tuple = (1, 2, 3)
    transmission: TransmissionConfig = field(default_factory=TransmissionConfig)
    port_sites: Optional[tuple] = None
    port_coupling: float = PORT_COUPLING
    input_port: int = 0
    output_port: int = 2
    states: tuple = (-1,)
    loop_faces: Optional[tuple] = None
    output_dir: Path = Path(DEFAULT_OUTPUT)
    formats: tuple = ("csv", "json", "svg")
    raw: dict = field(default_factory=dict)


def validate(doc) -> None:
    errors = sorted(_VALIDATOR.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise ConfigError(f"{e.json_path}: {e.message}")


def load(path=None, overrides: Optional[dict] = None, base_dir=None) -> RunConfig:
    """Read, validate and resolve a config file; ``path=None`` gives the defaults."""
    doc: dict = {}
    if path is not None:
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file {path} not found") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        base_dir = base_dir or path.parent
    for key, value in (overrides or {}).items():
        block, name = key.split(".")
        doc.setdefault(block, {})[name] = value
    validate(doc)
    return resolve(doc, Path(base_dir) if base_dir else Path.cwd())


def resolve(doc: dict, base_dir: Path) -> RunConfig:
    lat = doc.get("lattice", {})
    mdl = dict(doc.get("model", {}))
    convention = mdl.pop("convention", "full-wave")
    spec = doc.get("spectrum", {})
    tr = dict(doc.get("transmission", {}))
    rnd = doc.get("render", {})
    out = doc.get("output", {})
    try:
        model = ModelParams(**mdl)
        if convention == "full-wave" and model.t >= 0:
            raise ValueError("full-wave convention needs t < 0")
        measured = tr.pop("measured", None)
        if measured is not None:
            measured = Path(measured)
            if not measured.is_absolute():
                measured = base_dir / measured
            if not measured.is_file():
                raise ConfigError(f"$.transmission.measured: file {measured} not found")
        tparams = DEVICE_PARAMS.replace(**{k: tr.pop(k) for k in
                                           ("omega0", "t", "onsite_sigma", "hop_sigma", "ring_offsets", "seed")
                                           if k in tr})
        if tparams.t >= 0:
            raise ValueError("transmission hopping t must be < 0")
        port_sites = tr.pop("port_sites", None)
        port_coupling = tr.pop("port_coupling", PORT_COUPLING)
        input_port = tr.pop("input_port", 0)
        output_port = tr.pop("output_port", 2)
        tconf = TransmissionConfig(
            params=tparams,
            kappa0=tr.pop("kappa0", KAPPA0),
            kappa_ext=tr.pop("kappa_ext", KAPPA_EXT),
            freq_start=tr.pop("freq_start", None),
            freq_stop=tr.pop("freq_stop", None),
            n_freq=tr.pop("n_freq", 4001),
            ensemble_size=tr.pop("ensemble_size", ENSEMBLE_SIZE),
            measured_path=str(measured) if measured else None,
            filter_width=tr.pop("filter_width", BACKGROUND_FILTER_WIDTH),
        )
        n_ports = len(port_sites) if port_sites else 4
        for name, q in (("input_port", input_port), ("output_port", output_port)):
            if q >= n_ports:
                raise ValueError(f"{name} {q} out of range for {n_ports} ports")
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    directory = out.get("directory") or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT
    loop_faces = rnd.get("loop_faces")
    return RunConfig(
        p=lat.get("p", 7),
        shells=lat.get("shells", 3),
        model=model,
        convention=convention,
        bins=spec.get("bins", 120),
        tol_flat=spec.get("tol_flat", 1e-8),
        scan_shells=tuple(doc.get("scan", {}).get("shells", (1, 2, 3))),
        transmission=tconf,
        port_sites=tuple(port_sites) if port_sites else None,
        port_coupling=port_coupling,
        input_port=input_port,
        output_port=output_port,
        states=tuple(rnd.get("states", (-1,))),
        loop_faces=tuple(loop_faces) if loop_faces else None,
        output_dir=Path(directory),
        formats=tuple(out.get("formats", ("csv", "json", "svg"))),
        raw=doc,
    )
