"""Scenario configuration: defaults, YAML loading and validation."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import yaml

from .aero import Aircraft
from .atmosphere import AtmosphereConstants
from .channel import ArrayPattern, CellTopology, LinkBudgetParams
from .energy import BatteryParams
from .solar import PanelConfig

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DateScenario:
    name: str
    date: date
    alpha_ext: float

    def __post_init__(self):
        if self.alpha_ext <= 0:
            raise ConfigError(f"scenario {self.name}: alpha_ext must be positive")


WINTER = DateScenario("ws", date(2021, 12, 21), 0.29)
SUMMER = DateScenario("ss", date(2021, 6, 21), 0.465)


@dataclass(frozen=True)
class Bounds:
    h_min: float = 18_000.0
    h_max: float = 24_000.0
    v_max: float = 60.0

    def __post_init__(self):
        if not self.h_min < self.h_max:
            raise ConfigError(f"bounds: h_min ({self.h_min}) must be below h_max ({self.h_max})")
        if not (11_000.0 <= self.h_min and self.h_max <= 32_000.0):
            raise ConfigError("bounds: altitudes must lie within [11000, 32000] m")
        if self.v_max <= 0:
            raise ConfigError("bounds: v_max must be positive")


@dataclass(frozen=True)
class ScenarioConfig:
    longitude: float = 39.1047
    latitude: float = 22.3095
    utc_offset_hours: float = 3.0
    scenarios: tuple[DateScenario, ...] = (WINTER, SUMMER)
    dt_hours: float = 1.0
    solar_constant: float = 1361.0
    aircraft: Aircraft = field(default_factory=Aircraft)
    panel: PanelConfig = field(default_factory=PanelConfig)
    battery: BatteryParams = field(default_factory=BatteryParams)
    link: LinkBudgetParams = field(default_factory=LinkBudgetParams)
    pattern: ArrayPattern = field(default_factory=ArrayPattern)
    topology: CellTopology = field(default_factory=CellTopology)
    atmosphere: AtmosphereConstants = field(default_factory=AtmosphereConstants)
    qos_mbps: tuple[float, ...] = (1.0, 2.0, 4.0)
    bounds: Bounds = field(default_factory=Bounds)
    upsilon: float = 0.1
    delta: float = 1e-4
    max_iter: int = 100
    radius: float = 3000.0  # station-keeping radius, informational
    seed: int = 0
    night_tx_w: float | None = None  # None: whatever a full battery funds
    polynomial_atmosphere: bool = False
    partial_rule: str = "threshold"  # or "optimal"; see noma.allocate_partial
    baseline: bool = False
    baseline_altitude: float = 21_000.0
    baseline_speed_factor: float = 1.2

    def __post_init__(self):
        if not 0 < self.upsilon <= 1:
            raise ConfigError("upsilon must be in (0, 1]")
        if self.delta <= 0 or self.max_iter < 1:
            raise ConfigError("delta must be positive and max_iter >= 1")
        steps = 24.0 / self.dt_hours
        if self.dt_hours <= 0 or abs(steps - round(steps)) > 1e-9 or self.dt_hours < 1 / 6 - 1e-12:
            raise ConfigError("dt_hours must divide 24 and be at least 10 minutes")
        if any(q < 0 for q in self.qos_mbps) or not self.qos_mbps:
            raise ConfigError("qos_mbps must be a non-empty list of non-negative values")
        if not self.bounds.h_min <= self.baseline_altitude <= self.bounds.h_max:
            raise ConfigError("baseline_altitude must lie within the altitude bounds")
        if self.baseline_speed_factor < 1:
            raise ConfigError("baseline_speed_factor must be >= 1 (at or above stall)")
        if self.night_tx_w is not None and self.night_tx_w < 0:
            raise ConfigError("night_tx_w must be non-negative")
        if not self.scenarios:
            raise ConfigError("at least one date scenario is required")
        if self.partial_rule not in ("threshold", "optimal"):
            raise ConfigError("partial_rule must be 'threshold' or 'optimal'")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")

    def to_dict(self) -> dict:
        return json.loads(json.dumps(dataclasses.asdict(self), default=str))

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


_SECTIONS = {
    "aircraft": Aircraft,
    "panel": PanelConfig,
    "battery": BatteryParams,
    "link": LinkBudgetParams,
    "pattern": ArrayPattern,
    "topology": CellTopology,
    "atmosphere": AtmosphereConstants,
    "bounds": Bounds,
}

_PI_NAMES = {"psi_c", "psi_e", "half_beamwidth"}


def _angle(v):
    # allow "pi/6" style strings for angles
    if isinstance(v, str):
        expr = v.replace(" ", "")
        if expr.startswith("pi/"):
            return math.pi / float(expr[3:])
        if expr == "pi":
            return math.pi
    return float(v)


def _section(cls, raw, name):
    if not isinstance(raw, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown keys in {name!r}: {', '.join(unknown)}")
    kwargs = {}
    for k, v in raw.items():
        kwargs[k] = _angle(v) if k in _PI_NAMES else v
        log.info("override %s.%s = %r", name, k, v)
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def _scenarios(raw):
    out = []
    for item in raw:
        if isinstance(item, str):
            key = item.lower()
            if key in ("ws", "winter"):
                out.append(WINTER)
                continue
            if key in ("ss", "summer"):
                out.append(SUMMER)
                continue
            raise ConfigError(f"unknown scenario shorthand {item!r}")
        unknown = sorted(set(item) - {"name", "date", "alpha_ext"})
        if unknown:
            raise ConfigError(f"unknown keys in scenario: {', '.join(unknown)}")
        d = item["date"]
        d = d if isinstance(d, date) else date.fromisoformat(str(d))
        out.append(DateScenario(str(item.get("name", d.isoformat())), d, float(item["alpha_ext"])))
    return tuple(out)


def from_mapping(data: dict | None) -> ScenarioConfig:
    data = dict(data or {})
    known = {f.name for f in dataclasses.fields(ScenarioConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    kwargs = {}
    for key, value in data.items():
        if key in _SECTIONS:
            kwargs[key] = _section(_SECTIONS[key], value, key)
        elif key == "scenarios":
            kwargs[key] = _scenarios(value)
        elif key == "qos_mbps":
            vals = value if isinstance(value, (list, tuple)) else [value]
            kwargs[key] = tuple(float(v) for v in vals)
            log.info("override qos_mbps = %r", kwargs[key])
        else:
            kwargs[key] = value
            log.info("override %s = %r", key, value)
    try:
        return ScenarioConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(source: str | Path | None = None) -> ScenarioConfig:
    """Load a scenario from a YAML/JSON file path or document text.

    An empty or missing document yields the shipped defaults.
    """
    if source is None:
        return ScenarioConfig()
    text = source
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and Path(source).is_file()):
        text = Path(source).read_text()
    data = yaml.safe_load(text) if str(text).strip() else None
    if data is not None and not isinstance(data, dict):
        raise ConfigError("config document must be a mapping")
    return from_mapping(data)


def with_overrides(cfg: ScenarioConfig, **changes) -> ScenarioConfig:
    return dataclasses.replace(cfg, **changes)
