"""Experiment configuration: one TOML file fully determines a run.

A config is five small tables (grid, symbol, exponents, suite, tolerances)
plus the scalars kind / seed / outdir.  Every key is checked against the
schema for the experiment kind: unknown keys are errors, not warnings,
because a silently ignored typo ("famly_size = 100") corrupts the
experiment it was meant to steer.

The identity of a run is ``config_hash(cfg)``, a digest of every value
that can influence a reported number -- the seed included, the output
directory and worker count excluded.  Two runs with equal hashes must
produce byte-identical result tables.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace

try:
    import tomllib
except ModuleNotFoundError:                       # 3.10 fallback
    import tomli as tomllib

from ..errors import ConfigError

KINDS = ("decay", "strichartz", "wellposed", "dunkl", "admissible")

# The flow window for the Strichartz ratio R(f) is part of the estimate
# being tested, not a knob; it is deliberately absent from the schema.
TIME_HORIZON = 8.0


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    seed: int = 20260816
    outdir: str = "results"
    grid: dict = field(default_factory=dict)
    symbol: dict = field(default_factory=dict)
    exponents: dict = field(default_factory=dict)
    suite: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)


_NUM = (int, float)

# schema leaves: key -> tuple of accepted python types
_GRID_KEYS = {"d": (int,), "k": (int,), "half_length": _NUM, "n": (int,)}
_SYMBOL_KEYS = {"kind": (str,), "m": _NUM}

_SCHEMAS = {
    "decay": {
        "grid": {"min_n": (int,)},
        "symbol": {},
        "exponents": {},
        "suite": {"window": (list,), "samples": (int,)},
        "tolerances": {"exponent": _NUM},
    },
    "strichartz": {
        "grid": _GRID_KEYS,
        "symbol": _SYMBOL_KEYS,
        "exponents": {"q": _NUM, "r": _NUM, "r_tilde": _NUM, "s": _NUM},
        "suite": {
            "family_size": (int,),
            "scaling_packets": (int,),
            "trivial_packets": (int,),
            "time_nodes": (int,),
        },
        "tolerances": {
            "scaling_band": _NUM,
            "trivial": _NUM,
            "stability": _NUM,
            "family_cap": _NUM,
        },
    },
    "wellposed": {
        "grid": _GRID_KEYS,
        "symbol": _SYMBOL_KEYS,
        "exponents": {"s": _NUM, "p": _NUM},
        "suite": {
            "amplitude": _NUM,
            "width": _NUM,
            "time_nodes": (int,),
            "max_iters": (int,),
            "margin": _NUM,
        },
        "tolerances": {"rho_bar": _NUM, "identity": _NUM},
    },
    "dunkl": {
        "grid": {},
        "symbol": {},
        "exponents": {},
        "suite": {"orders": (list,), "recurrence_draws": (int,)},
        "tolerances": {
            "exponent": _NUM,
            "bessel": _NUM,
            "recurrence": _NUM,
            "reduction": _NUM,
            "envelope_drift": _NUM,
        },
    },
    "admissible": {
        "grid": {},
        "symbol": {},
        "exponents": {},
        "suite": {"resolution": (int,), "roundtrip_draws": (int,),
                  "contexts": (list,)},
        "tolerances": {"residual": _NUM},
    },
}

_CONTEXT_KEYS = {
    "euclidean": {"type": (str,), "d": (int,), "m": _NUM,
                  "hessian_rank": (int,), "k": (int,)},
    "dunkl": {"type": (str,), "d": (int,), "m": _NUM,
              "gamma1": _NUM, "gamma2": _NUM, "k": (int,)},
}

_DEFAULTS = {
    "decay": {
        "grid": {"min_n": 512},
        "suite": {"window": [4.0, 64.0], "samples": 22},
        "tolerances": {"exponent": 0.15},
    },
    "strichartz": {
        "grid": {"d": 2, "k": 1, "half_length": 64.0, "n": 512},
        "symbol": {"kind": "fractional", "m": 2.0},
        # strictly admissible and exactly on the scaling line for
        # d=2, k=1, m=2: 2/6 + 5/12 = (1/2 - 1/8) + (1/2 - 1/8)
        "exponents": {"q": 6.0, "r": 8.0, "r_tilde": 8.0, "s": 5.0 / 12.0},
        "suite": {"family_size": 50, "scaling_packets": 20,
                  "trivial_packets": 3, "time_nodes": 96},
        "tolerances": {"scaling_band": 0.02, "trivial": 1e-12,
                       "stability": 0.05, "family_cap": 10.0},
    },
    "wellposed": {
        "grid": {"d": 3, "k": 2, "half_length": 16.0, "n": 64},
        "symbol": {"kind": "fractional", "m": 3.0},
        "exponents": {"s": 1.0, "p": 3.0},
        "suite": {"amplitude": 2.0, "width": 2.0, "time_nodes": 9,
                  "max_iters": 20, "margin": 0.3},
        "tolerances": {"rho_bar": 0.5, "identity": 1e-9},
    },
    "dunkl": {
        "suite": {"orders": [2, 3, 4, 5], "recurrence_draws": 100},
        "tolerances": {"exponent": 0.15, "bessel": 1e-10,
                       "recurrence": 1e-6, "reduction": 1e-6,
                       "envelope_drift": 0.01},
    },
    "admissible": {
        "suite": {
            "resolution": 48,
            "roundtrip_draws": 10000,
            "contexts": [
                {"type": "euclidean", "d": 2, "m": 2.0,
                 "hessian_rank": 2, "k": 1},
                {"type": "euclidean", "d": 4, "m": 2.0,
                 "hessian_rank": 4, "k": 2},
                {"type": "dunkl", "d": 2, "m": 2.0,
                 "gamma1": 0.5, "gamma2": 0.25, "k": 1},
                {"type": "dunkl", "d": 2, "m": 2.0,
                 "gamma1": 0.0, "gamma2": 0.0, "k": 1},
            ],
        },
        "tolerances": {"residual": 1e-12},
    },
}


def _check_table(kind, table, mapping, schema):
    for key, value in mapping.items():
        if key not in schema:
            known = ", ".join(sorted(schema)) or "none"
            raise ConfigError(
                f"unknown key {table}.{key} for a {kind} config "
                f"(known keys: {known})")
        if not isinstance(value, schema[key]) or isinstance(value, bool):
            names = "/".join(t.__name__ for t in schema[key])
            raise ConfigError(
                f"{table}.{key} must be {names}, got {value!r}")


def _check_contexts(entries):
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise ConfigError(f"suite.contexts[{i}] must be a table")
        ctype = entry.get("type")
        if ctype not in _CONTEXT_KEYS:
            raise ConfigError(
                f"suite.contexts[{i}].type must be 'euclidean' or 'dunkl', "
                f"got {ctype!r}")
        _check_table("admissible", f"suite.contexts[{i}]", entry,
                     _CONTEXT_KEYS[ctype])


def from_mapping(mapping, kind=None) -> ExperimentConfig:
    """Validate a raw mapping (parsed TOML) into an ExperimentConfig."""
    if not isinstance(mapping, dict):
        raise ConfigError("config root must be a table")
    data = dict(mapping)
    cfg_kind = data.pop("kind", kind)
    if cfg_kind not in KINDS:
        raise ConfigError(f"kind must be one of {', '.join(KINDS)}, "
                          f"got {cfg_kind!r}")
    if kind is not None and cfg_kind != kind:
        raise ConfigError(
            f"config is for kind {cfg_kind!r} but the {kind!r} suite "
            "was requested")

    seed = data.pop("seed", ExperimentConfig.seed)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError(f"seed must be a nonnegative integer, got {seed!r}")
    outdir = data.pop("outdir", ExperimentConfig.outdir)
    if not isinstance(outdir, str):
        raise ConfigError(f"outdir must be a string, got {outdir!r}")

    schema = _SCHEMAS[cfg_kind]
    defaults = _DEFAULTS.get(cfg_kind, {})
    tables = {}
    for table in ("grid", "symbol", "exponents", "suite", "tolerances"):
        given = data.pop(table, {})
        if not isinstance(given, dict):
            raise ConfigError(f"{table} must be a table, got {given!r}")
        _check_table(cfg_kind, table, given, schema[table])
        merged = dict(defaults.get(table, {}))
        merged.update(given)
        tables[table] = merged
    if data:
        raise ConfigError(
            f"unknown top-level key(s): {', '.join(sorted(data))}")

    if cfg_kind == "admissible":
        _check_contexts(tables["suite"]["contexts"])
    return ExperimentConfig(kind=cfg_kind, seed=seed, outdir=outdir, **tables)


def default_config(kind) -> ExperimentConfig:
    return from_mapping({}, kind=kind)


def load_config(path, kind=None) -> ExperimentConfig:
    with open(path, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from None
    return from_mapping(raw, kind=kind)


def with_overrides(cfg: ExperimentConfig, seed=None,
                   outdir=None) -> ExperimentConfig:
    if seed is not None:
        cfg = replace(cfg, seed=int(seed))
    if outdir is not None:
        cfg = replace(cfg, outdir=str(outdir))
    return cfg


def _canonical(value):
    """JSON-stable view: dict keys sorted, floats kept as repr round-trips."""
    if isinstance(value, dict):
        return {str(k): _canonical(value[k]) for k in sorted(value)}
    if isinstance(value, (list, tuple)):
        return [_canonical(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)          # json cannot carry inf losslessly
    return value


def config_hash(cfg: ExperimentConfig) -> str:
    payload = {
        "kind": cfg.kind,
        "seed": cfg.seed,
        "grid": _canonical(cfg.grid),
        "symbol": _canonical(cfg.symbol),
        "exponents": _canonical(cfg.exponents),
        "suite": _canonical(cfg.suite),
        "tolerances": _canonical(cfg.tolerances),
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]
