"""Strict TOML configuration for the simulator.

Sections: [array], [frontend], [matching], [scenario], [sweep]. Every key is
optional except that a [matching] section must name both ``rx`` and ``tx``.
Angles are given in degrees and converted to radians here.
"""

from __future__ import annotations

import hashlib
import json
import math

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError, DomainError
from .frontend import RadioFrontEnd
from .scenario import DEFAULT_SPACINGS, ScenarioConfig

_NUMBER = "number"
_INT = "int"
_STR = "str"
_COMPLEX = "complex"
_NUMBERS = "numbers"
_STRS = "strs"
_PAIR = "pair"

DEFAULTS = {
    "array": {
        "configuration": ("side-by-side", _STR),
        "count": (16, _INT),
        "apertures_over_lambda": ([6.0], _NUMBERS),
        "offset_over_lambda": (0.0, _NUMBER),
        "radius_over_lambda": (1e-3, _NUMBER),
        "dissipation_ratio": (1e-3, _NUMBER),
    },
    "frontend": {
        "frequency_hz": (3.5e9, _NUMBER),
        "z_generator_ohm": ([186.0, -31.6], _COMPLEX),
        "z_load_ohm": ([186.0, -31.6], _COMPLEX),
        "noise_resistance_ohm": (5.0, _NUMBER),
        "rho": ([0.1, 0.0], _COMPLEX),
        "antenna_temperature_k": (290.0, _NUMBER),
        "bandwidth_hz": (20e6, _NUMBER),
        "tx_power_dbw": (-30.0, _NUMBER),
    },
    "matching": {
        "rx": (["full"], _STRS),
        "tx": (["full"], _STRS),
    },
    "scenario": {
        "users": (10, _INT),
        "azimuth_deg": ([-90.0, 90.0], _PAIR),
        "distance_m": ([15.0, 150.0], _PAIR),
        "bs_height_m": (10.0, _NUMBER),
        "distance_distribution": ("uniform", _STR),
        "reference_azimuth_deg": (-90.0, _NUMBER),
        "reference_distance_m": (50.0, _NUMBER),
    },
    "sweep": {
        "spacings_over_lambda": (list(DEFAULT_SPACINGS), _NUMBERS),
        "combiners": (["mmse"], _STRS),
        "drops": (200, _INT),
        "seed": (0, _INT),
        "workers": (1, _INT),
        "azimuth_step_deg": (1.0, _NUMBER),
    },
}


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _coerce(key, value, kind):
    if kind == _INT:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(key, f"expected an integer, got {value!r}")
        return value
    if kind == _NUMBER:
        if not _is_number(value):
            raise ConfigError(key, f"expected a number, got {value!r}")
        return float(value)
    if kind == _STR:
        if not isinstance(value, str):
            raise ConfigError(key, f"expected a string, got {value!r}")
        return value
    if kind == _STRS:
        value = [value] if isinstance(value, str) else value
        if not isinstance(value, list) or not value or not all(isinstance(v, str) for v in value):
            raise ConfigError(key, "expected a string or a non-empty list of strings")
        return list(value)
    if kind == _NUMBERS:
        value = [value] if _is_number(value) else value
        if not isinstance(value, list) or not value or not all(_is_number(v) for v in value):
            raise ConfigError(key, "expected a number or a non-empty list of numbers")
        return [float(v) for v in value]
    if kind == _PAIR:
        if not isinstance(value, list) or len(value) != 2 or not all(_is_number(v) for v in value):
            raise ConfigError(key, "expected a list of two numbers")
        return [float(v) for v in value]
    if kind == _COMPLEX:
        if _is_number(value):
            return [float(value), 0.0]
        if isinstance(value, list) and len(value) == 2 and all(_is_number(v) for v in value):
            return [float(v) for v in value]
        raise ConfigError(key, "expected a number or [real, imag]")
    raise AssertionError(kind)


def resolve(doc: dict) -> dict:
    """Validate a parsed document and fill in defaults; returns plain JSON-able data."""
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "configuration must be a table")
    for section in doc:
        if section not in DEFAULTS:
            raise ConfigError(section, "unknown section")
        if not isinstance(doc[section], dict):
            raise ConfigError(section, "expected a table")
    if "matching" in doc:
        for key in ("rx", "tx"):
            if key not in doc["matching"]:
                raise ConfigError(f"matching.{key}", "missing required key")
    out = {}
    for section, fields in DEFAULTS.items():
        given = doc.get(section, {})
        for key in given:
            if key not in fields:
                raise ConfigError(f"{section}.{key}", "unknown key")
        out[section] = {}
        for key, (default, kind) in fields.items():
            value = given.get(key, default)
            out[section][key] = _coerce(f"{section}.{key}", value, kind)
    return out


def read_document(path) -> dict:
    """Parse a TOML file without validating it."""
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<file>", f"invalid TOML: {exc}") from None


def load(path) -> dict:
    return resolve(read_document(path))


def digest(resolved: dict) -> str:
    blob = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _check(key, cond, message):
    if not cond:
        raise ConfigError(key, message)


def to_scenario(resolved: dict) -> ScenarioConfig:
    """Build the scenario; domain errors are reported against the closest key."""
    a, f, m, s, w = (resolved[k] for k in ("array", "frontend", "matching", "scenario", "sweep"))
    _check("sweep.seed", 0 <= w["seed"] < 2**64, "seed must be an unsigned 64-bit integer")
    _check("sweep.drops", w["drops"] >= 1, "must be >= 1")
    _check("sweep.workers", w["workers"] >= 1, "must be >= 1")
    _check("scenario.users", s["users"] >= 1, "must be >= 1")
    _check("array.count", a["count"] >= 1, "must be >= 1")
    _check("sweep.azimuth_step_deg", w["azimuth_step_deg"] > 0, "must be positive")
    for key, values in (("sweep.spacings_over_lambda", w["spacings_over_lambda"]),
                        ("array.apertures_over_lambda", a["apertures_over_lambda"])):
        _check(key, all(v > 0 for v in values), "values must be positive")
    for key in ("rx", "tx"):
        for kind in m[key]:
            _check(f"matching.{key}", kind in ("full", "self", "none"), f"unknown matching kind {kind!r}")
    _check("matching.tx", len(m["rx"]) == len(m["tx"]) or 1 in (len(m["rx"]), len(m["tx"])),
           "rx and tx lists must have equal length (or length 1)")
    for kind in w["combiners"]:
        _check("sweep.combiners", kind in ("mr", "mmse"), f"unknown combiner {kind!r}")
    _check("array.configuration", a["configuration"] in ("side-by-side", "collinear", "parallel-in-echelon"),
           "unknown configuration")
    _check("scenario.distance_distribution", s["distance_distribution"] in ("uniform", "area"),
           "expected 'uniform' or 'area'")
    try:
        fe = RadioFrontEnd(
            frequency=f["frequency_hz"],
            z_generator=complex(*f["z_generator_ohm"]),
            z_load=complex(*f["z_load_ohm"]),
            noise_resistance=f["noise_resistance_ohm"],
            rho=complex(*f["rho"]),
            antenna_temperature=f["antenna_temperature_k"],
            bandwidth=f["bandwidth_hz"],
            tx_power=10 ** (f["tx_power_dbw"] / 10),
            dissipation_ratio=a["dissipation_ratio"],
            radius_over_wavelength=a["radius_over_lambda"],
        )
        fe.dipole()
        fe.lna()
        fe.noise_physics()
    except DomainError as exc:
        raise ConfigError("frontend", str(exc)) from None
    try:
        return ScenarioConfig(
            frontend=fe,
            configuration=a["configuration"],
            offset=a["offset_over_lambda"],
            count=a["count"],
            apertures=tuple(a["apertures_over_lambda"]),
            spacings=tuple(w["spacings_over_lambda"]),
            users=s["users"],
            azimuth_range=tuple(math.radians(v) for v in s["azimuth_deg"]),
            distance_range=tuple(s["distance_m"]),
            bs_height=s["bs_height_m"],
            distance_distribution=s["distance_distribution"],
            rx_matching=tuple(m["rx"]),
            tx_matching=tuple(m["tx"]),
            combiners=tuple(w["combiners"]),
            drops=w["drops"],
            seed=w["seed"],
            workers=w["workers"],
            reference_azimuth=math.radians(s["reference_azimuth_deg"]),
            reference_distance=s["reference_distance_m"],
        )
    except DomainError as exc:
        raise ConfigError("scenario", str(exc)) from None
