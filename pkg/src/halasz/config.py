"""Run configuration: one TOML (or JSON) document per run.

See the README for the full schema. Every "auto" value is resolved here so
that outputs can echo explicit numbers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError, UnitDiscError
from .euler import default_step
from .meanvalue import FAMILIES as MEANVALUE_FAMILIES, max_step
from .multiplicative import DEFAULT_CHUNK, MultiplicativeSpec, canonical_battery
from .primes import MAX_LIMIT

RUN_KEYS = {
    "x_values", "grid_step", "quadrature_step", "chunk_size", "output", "constants_file", "threads",
    "sieve_limit", "spec", "specs", "battery", "meanvalue", "smooth", "scan",
}


@dataclass(frozen=True)
class MeanValueConfig:
    T_values: tuple = (1.0, 5.0, 10.0)
    x_values: tuple = ()
    families: tuple = MEANVALUE_FAMILIES
    seeds: tuple = tuple(range(1, 21))
    h_values: tuple = (0.0, 1.0)


@dataclass(frozen=True)
class RunConfig:
    specs: tuple
    x_values: tuple
    grid_step: float | None = None
    quadrature_step: float | None = None
    chunk_size: int = DEFAULT_CHUNK
    output: str = "halasz_out"
    constants_file: str = "default"
    threads: int = 1
    sieve_limit: int | None = None
    meanvalue: MeanValueConfig = field(default_factory=MeanValueConfig)
    smooth_theta: float | None = None

    @property
    def spec(self) -> MultiplicativeSpec:
        return self.specs[0]

    def grid_step_for(self, x: float) -> float:
        return default_step(x) if self.grid_step is None else self.grid_step

    def quadrature_step_for(self, x: float) -> float:
        return max_step(x) if self.quadrature_step is None else self.quadrature_step

    def meanvalue_x(self) -> tuple:
        return self.meanvalue.x_values or self.x_values

    def needed_limit(self, meanvalue: bool = False) -> int:
        xs = list(self.x_values) + (list(self.meanvalue_x()) if meanvalue else [])
        return max(100, int(math.floor(max(xs))))

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, specs=tuple(s.with_seed(seed) for s in self.specs))


def _auto(value, name):
    if value is None or value == "auto":
        return None
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a positive number or 'auto', got {value!r}") from None
    if not v > 0 or not math.isfinite(v):
        raise ConfigError(f"{name} must be positive, got {value!r}")
    return v


def _positive_int(value, name) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"{name} must be a positive integer, got {value!r}")
    return value


def _reals(values, name, minimum) -> tuple:
    if not isinstance(values, (list, tuple)) or not values:
        raise ConfigError(f"{name} must be a nonempty list")
    try:
        out = tuple(float(v) for v in values)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must hold numbers") from None
    if any(not math.isfinite(v) or v < minimum for v in out):
        raise ConfigError(f"{name} entries must be finite and >= {minimum:g}")
    if any(b <= a for a, b in zip(out, out[1:])):
        raise ConfigError(f"{name} must be strictly ascending")
    return out


def _specs(doc) -> tuple:
    sources = [k for k in ("spec", "specs", "battery") if k in doc]
    if len(sources) != 1:
        raise ConfigError("give exactly one of 'spec', 'specs' or 'battery'")
    try:
        if "battery" in doc:
            if doc["battery"] != "canonical":
                raise ConfigError(f"unknown battery {doc['battery']!r}")
            return tuple(canonical_battery())
        if "spec" in doc:
            if not isinstance(doc["spec"], dict):
                raise ConfigError("'spec' must be a table")
            return (MultiplicativeSpec.from_dict(doc["spec"]),)
        if not isinstance(doc["specs"], list) or not doc["specs"]:
            raise ConfigError("'specs' must be a nonempty array of tables")
        return tuple(MultiplicativeSpec.from_dict(d) for d in doc["specs"])
    except UnitDiscError as exc:
        raise ConfigError(str(exc)) from exc


def _scan_values(scan) -> tuple:
    try:
        start, stop, num = float(scan["start"]), float(scan["stop"]), int(scan["num"])
    except (KeyError, TypeError, ValueError):
        raise ConfigError("[scan] needs numeric start, stop and num") from None
    if not 2 <= start < stop or num < 2:
        raise ConfigError("[scan] needs 2 <= start < stop and num >= 2")
    return tuple(float(v) for v in np.unique(np.round(np.geomspace(start, stop, num))))


def _meanvalue(section) -> MeanValueConfig:
    if not isinstance(section, dict):
        raise ConfigError("[meanvalue] must be a table")
    extra = set(section) - {"T_values", "x_values", "families", "seeds", "h_values"}
    if extra:
        raise ConfigError(f"unknown [meanvalue] keys: {sorted(extra)}")
    mv = MeanValueConfig()
    kw = {}
    if "T_values" in section:
        kw["T_values"] = _reals(section["T_values"], "meanvalue.T_values", 1.0)
    if "x_values" in section:
        kw["x_values"] = _reals(section["x_values"], "meanvalue.x_values", 2.0)
    if "families" in section:
        fams = tuple(section["families"])
        bad = [f for f in fams if f not in MEANVALUE_FAMILIES]
        if bad or not fams:
            raise ConfigError(f"meanvalue.families must be drawn from {MEANVALUE_FAMILIES}")
        kw["families"] = fams
    if "seeds" in section:
        kw["seeds"] = tuple(_positive_int(s, "meanvalue.seeds") for s in section["seeds"])
    if "h_values" in section:
        try:
            kw["h_values"] = tuple(float(h) for h in section["h_values"])
        except (TypeError, ValueError):
            raise ConfigError("meanvalue.h_values must hold numbers") from None
    return replace(mv, **kw)


def parse_config(doc: dict, base_dir: str | Path = ".") -> RunConfig:
    """Validate a parsed document and resolve relative paths against ``base_dir``.

    Raises:
        ConfigError: on any unknown key, missing key or out-of-range value.
    """
    if not isinstance(doc, dict):
        raise ConfigError("config must be a key-value document")
    extra = set(doc) - RUN_KEYS
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")
    specs = _specs(doc)
    if "scan" in doc:
        if "x_values" in doc:
            raise ConfigError("give either x_values or [scan], not both")
        x_values = _scan_values(doc["scan"])
    elif "x_values" in doc:
        x_values = _reals(doc["x_values"], "x_values", 2.0)
    else:
        raise ConfigError("config needs x_values (or a [scan] range)")

    constants = doc.get("constants_file", "default")
    if not isinstance(constants, str):
        raise ConfigError("constants_file must be a path or 'default'")
    if constants != "default" and not Path(constants).is_absolute():
        constants = str(Path(base_dir) / constants)

    sieve = doc.get("sieve_limit", "auto")
    if sieve != "auto":
        sieve = _positive_int(sieve, "sieve_limit")
        if sieve < 2 or sieve > MAX_LIMIT:
            raise ConfigError(f"sieve_limit must lie in [2, {MAX_LIMIT}]")
    smooth = doc.get("smooth")
    theta = None
    if smooth is not None:
        if not isinstance(smooth, dict) or set(smooth) - {"theta"}:
            raise ConfigError("[smooth] takes only 'theta'")
        try:
            theta = float(smooth.get("theta", 0.5))
        except (TypeError, ValueError):
            raise ConfigError("smooth.theta must be a number") from None
        if not 0 < theta <= 1:
            raise ConfigError("smooth.theta must lie in (0, 1]")
    output = doc.get("output", "halasz_out")
    if not isinstance(output, str) or not output:
        raise ConfigError("output must be a directory path")

    return RunConfig(
        specs=specs,
        x_values=x_values,
        grid_step=_auto(doc.get("grid_step"), "grid_step"),
        quadrature_step=_auto(doc.get("quadrature_step"), "quadrature_step"),
        chunk_size=_positive_int(doc.get("chunk_size", DEFAULT_CHUNK), "chunk_size"),
        output=output,
        constants_file=constants,
        threads=_positive_int(doc.get("threads", 1), "threads"),
        sieve_limit=None if sieve == "auto" else sieve,
        meanvalue=_meanvalue(doc["meanvalue"]) if "meanvalue" in doc else MeanValueConfig(),
        smooth_theta=theta,
    )


def load_config(path: str | Path) -> RunConfig:
    """Read a .toml (default) or .json run document."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        if path.suffix == ".json":
            doc = json.loads(raw)
        else:
            doc = tomllib.loads(raw.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    return parse_config(doc, path.parent)
