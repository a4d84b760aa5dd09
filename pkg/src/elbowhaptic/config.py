"""Top-level simulation config: sections ``sensor``, ``mapping``, ``actuator``,
``skin`` and ``loop`` in the flat dotted-key format of :mod:`kvfile`.

Every key is optional except ``mapping.type`` (and that section's required
keys); omitted keys take the defaults of the component dataclasses.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from . import kvfile
from .actuator import ActuatorParams
from .contact import SITE_STIFFNESS, ForceSensorParams, SkinModel
from .errors import ConfigError
from .mapping import ConstantGain, MappingSpec, mapping_from_entries, mapping_items, validate_mapping
from .sensing import FlexSensorParams, FilterSpec, LowPass, MovingAverage, check_filter_rate


@dataclass(frozen=True)
class LoopConfig:
    rate: float = 100.0  # Hz
    duration: float = 10.0  # s
    safety_force_limit: float = 18.0  # N
    safety_enabled: bool = True
    seed: int = 0
    noise_enabled: bool = True

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError(f"loop rate must be > 0, got {self.rate}")
        if not self.duration >= 0:
            raise ValueError(f"duration must be >= 0, got {self.duration}")
        if not self.safety_force_limit > 0:
            raise ValueError(f"safety_force_limit must be > 0, got {self.safety_force_limit}")
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an integer in [0, 2**64), got {self.seed!r}")


@dataclass(frozen=True)
class SimConfig:
    sensor: FlexSensorParams = field(default_factory=FlexSensorParams)
    filter: FilterSpec = field(default_factory=MovingAverage)
    mapping: MappingSpec = field(default_factory=ConstantGain)
    actuator: ActuatorParams = field(default_factory=ActuatorParams)
    skin: SkinModel = field(default_factory=SkinModel)
    force_sensor: ForceSensorParams = field(default_factory=ForceSensorParams)
    loop: LoopConfig = field(default_factory=LoopConfig)

    def __post_init__(self):
        check_filter_rate(self.filter, self.loop.rate)
        problems = validate_mapping(self.mapping)
        if problems:
            raise ValueError("invalid mapping: " + "; ".join(map(str, problems)))
        if self.mapping.stroke_limit > self.actuator.stroke:
            raise ValueError(
                f"mapping stroke limit {self.mapping.stroke_limit} mm exceeds "
                f"actuator stroke {self.actuator.stroke} mm"
            )
        if self.loop.safety_force_limit > self.actuator.max_force:
            raise ValueError(
                f"safety_force_limit {self.loop.safety_force_limit} N exceeds "
                f"actuator max_force {self.actuator.max_force} N"
            )

    def replace(self, **sections) -> "SimConfig":
        """Copy with whole sections replaced, or single fields via
        ``section__field=value`` keywords."""
        updates = {}
        for name, value in sections.items():
            if "__" in name:
                sec, fld = name.split("__", 1)
                base = updates.get(sec, getattr(self, sec))
                updates[sec] = dataclasses.replace(base, **{fld: value})
            else:
                updates[name] = value
        return dataclasses.replace(self, **updates)

    @property
    def dt(self) -> float:
        return 1.0 / self.loop.rate


# key -> (section attribute, dataclass field, kind)
_KEYS = {
    "sensor.r_extended_ohm": ("sensor", "r_extended", float),
    "sensor.r_flexed_ohm": ("sensor", "r_flexed", float),
    "sensor.theta_min_deg": ("sensor", "theta_min", float),
    "sensor.r_fixed_ohm": ("sensor", "r_fixed", float),
    "sensor.v_supply_v": ("sensor", "v_supply", float),
    "sensor.adc_bits": ("sensor", "adc_bits", int),
    "sensor.noise_sigma_ohm": ("sensor", "noise_sigma_ohm", float),
    "actuator.stroke_mm": ("actuator", "stroke", float),
    "actuator.max_force_n": ("actuator", "max_force", float),
    "actuator.max_speed_mm_s": ("actuator", "max_speed", float),
    "actuator.stiction_band_mm": ("actuator", "stiction_band", float),
    "actuator.pos_quantization_mm": ("actuator", "pos_quantization", float),
    "actuator.pos_noise_sigma_mm": ("actuator", "pos_noise_sigma", float),
    "skin.site": ("skin", "site_name", str),
    "skin.stiffness_n_per_m": ("skin", "stiffness", float),
    "skin.contact_offset_mm": ("skin", "contact_offset", float),
    "skin.sensor_range_n": ("force_sensor", "range_max", float),
    "skin.sensor_noise_sigma_n": ("force_sensor", "noise_sigma", float),
    "skin.sensor_quantization_n": ("force_sensor", "quantization", float),
    "loop.rate_hz": ("loop", "rate", float),
    "loop.duration_s": ("loop", "duration", float),
    "loop.safety_force_limit_n": ("loop", "safety_force_limit", float),
    "loop.safety_enabled": ("loop", "safety_enabled", bool),
    "loop.seed": ("loop", "seed", int),
    "loop.noise_enabled": ("loop", "noise_enabled", bool),
}
_FILTER_KEYS = ("sensor.filter.type", "sensor.filter.window", "sensor.filter.cutoff_hz")


def _typed(entry, key, kind):
    v = entry.value
    if kind is bool:
        ok = isinstance(v, bool)
    elif kind is int:
        ok = isinstance(v, int) and not isinstance(v, bool)
    elif kind is float:
        ok = isinstance(v, (int, float)) and not isinstance(v, bool)
        v = float(v) if ok else v
    else:
        ok = isinstance(v, str)
    if not ok:
        raise ConfigError(f"expected {kind.__name__}, got {entry.value!r}", line=entry.line, key=key)
    return v


def _build(section, cls, fields, entries, keys_for_field):
    try:
        return cls(**fields)
    except ValueError as exc:
        # attribute the failure to the first key of this section that was set
        for key in keys_for_field:
            if key in entries:
                raise ConfigError(str(exc), line=entries[key].line, key=key) from None
        raise ConfigError(str(exc), key=f"{section}.*") from None


def config_from_text(text: str, path: Union[str, Path, None] = None) -> SimConfig:
    try:
        return _config_from_entries(kvfile.read_assignments(text))
    except ConfigError as exc:
        if path is not None and exc.path is None:
            raise ConfigError(exc.message, line=exc.line, key=exc.key, path=path) from None
        raise


def load_config(path: Union[str, Path]) -> SimConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}", path=path) from None
    return config_from_text(text, path)


def _config_from_entries(entries) -> SimConfig:
    for key, e in entries.items():
        if key in _KEYS or key in _FILTER_KEYS or key.startswith("mapping."):
            continue
        raise ConfigError("unknown key", line=e.line, key=key)

    fields = {sec: {} for sec in ("sensor", "actuator", "skin", "force_sensor", "loop")}
    for key, (sec, fld, kind) in _KEYS.items():
        if key in entries:
            fields[sec][fld] = _typed(entries[key], key, kind)

    keys_of = {}
    for key, (sec, _, _) in _KEYS.items():
        keys_of.setdefault(sec, []).append(key)

    skin = fields["skin"]
    site = skin.get("site_name", "forearm")
    if "stiffness" not in skin:
        if site not in SITE_STIFFNESS:
            e = entries["skin.site"]
            raise ConfigError(
                f"site {site!r} has no preset stiffness; set skin.stiffness_n_per_m",
                line=e.line, key="skin.site",
            )
        skin["stiffness"] = SITE_STIFFNESS[site]

    sensor = _build("sensor", FlexSensorParams, fields["sensor"], entries, keys_of["sensor"])
    actuator = _build("actuator", ActuatorParams, fields["actuator"], entries, keys_of["actuator"])
    skin_model = _build("skin", SkinModel, skin, entries, keys_of["skin"])
    force = _build("skin", ForceSensorParams, fields["force_sensor"], entries,
                   keys_of["force_sensor"])
    loop = _build("loop", LoopConfig, fields["loop"], entries, keys_of["loop"])
    filt = _filter_from_entries(entries)

    if "mapping.type" in entries:
        mapping = mapping_from_entries(entries, default_stroke=actuator.stroke)
    else:
        raise ConfigError("mapping.type missing", key="mapping.type")

    try:
        return SimConfig(sensor, filt, mapping, actuator, skin_model, force, loop)
    except ValueError as exc:
        msg = str(exc)
        for key in ("sensor.filter.cutoff_hz", "mapping.stroke_limit_mm",
                    "loop.safety_force_limit_n", "actuator.stroke_mm", "actuator.max_force_n"):
            if key in entries:
                raise ConfigError(msg, line=entries[key].line, key=key) from None
        raise ConfigError(msg) from None


def _filter_from_entries(entries) -> FilterSpec:
    kind_entry = entries.get("sensor.filter.type")
    kind = kind_entry.value if kind_entry else "moving_average"
    if kind == "moving_average":
        if "sensor.filter.cutoff_hz" in entries:
            e = entries["sensor.filter.cutoff_hz"]
            raise ConfigError("cutoff_hz only applies to low_pass", line=e.line,
                              key="sensor.filter.cutoff_hz")
        if "sensor.filter.window" not in entries:
            return MovingAverage()
        e = entries["sensor.filter.window"]
        window = _typed(e, "sensor.filter.window", int)
        try:
            return MovingAverage(window)
        except ValueError as exc:
            raise ConfigError(str(exc), line=e.line, key="sensor.filter.window") from None
    if kind == "low_pass":
        if "sensor.filter.window" in entries:
            e = entries["sensor.filter.window"]
            raise ConfigError("window only applies to moving_average", line=e.line,
                              key="sensor.filter.window")
        if "sensor.filter.cutoff_hz" not in entries:
            raise ConfigError("sensor.filter.cutoff_hz missing", key="sensor.filter.cutoff_hz")
        e = entries["sensor.filter.cutoff_hz"]
        try:
            return LowPass(_typed(e, "sensor.filter.cutoff_hz", float))
        except ValueError as exc:
            raise ConfigError(str(exc), line=e.line, key="sensor.filter.cutoff_hz") from None
    raise ConfigError(f"unknown filter type {kind!r}", line=kind_entry.line,
                      key="sensor.filter.type")


def config_items(cfg: SimConfig):
    items = []
    for key, (sec, fld, kind) in _KEYS.items():
        value = getattr(getattr(cfg, sec), fld)
        items.append((key, kind(value) if kind is not str else value))
    if isinstance(cfg.filter, MovingAverage):
        items += [("sensor.filter.type", "moving_average"),
                  ("sensor.filter.window", int(cfg.filter.window))]
    else:
        items += [("sensor.filter.type", "low_pass"),
                  ("sensor.filter.cutoff_hz", float(cfg.filter.cutoff_hz))]
    items += mapping_items(cfg.mapping)
    return sorted(items)


def format_config(cfg: SimConfig) -> str:
    """Canonical text form; ``config_from_text(format_config(c)) == c``."""
    return kvfile.format_assignments(config_items(cfg))
