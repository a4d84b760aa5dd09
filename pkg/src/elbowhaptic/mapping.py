"""Programmable angle -> actuator displacement laws."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import List, NamedTuple, Tuple, Union

from . import kvfile
from .errors import ConfigError

DEFAULT_STROKE_MM = 20.0
DEFAULT_GAIN_MM_PER_DEG = 0.123

# Grammar keywords held back for multi-tactor stimulation patterns.
RESERVED_TYPES = ("spatiotemporal", "multi_channel")


@dataclass(frozen=True)
class ConstantGain:
    gain: float = DEFAULT_GAIN_MM_PER_DEG  # mm/deg
    reference_angle: float = 180.0
    stroke_limit: float = DEFAULT_STROKE_MM


@dataclass(frozen=True)
class PiecewiseLinear:
    breakpoints: Tuple[Tuple[float, float], ...]  # (angle deg, displacement mm)
    stroke_limit: float = DEFAULT_STROKE_MM

    def __post_init__(self):
        object.__setattr__(
            self, "breakpoints", tuple((float(a), float(d)) for a, d in self.breakpoints)
        )


MappingSpec = Union[ConstantGain, PiecewiseLinear]


class Violation(NamedTuple):
    field: str
    message: str

    def __str__(self):
        return self.message


def validate_mapping(spec: MappingSpec) -> List[Violation]:
    """Every invariant the mapping breaks; an empty list means valid."""
    out = []
    if not spec.stroke_limit > 0:
        out.append(Violation("stroke_limit", "stroke limit must be > 0"))
    if isinstance(spec, ConstantGain):
        if not spec.gain >= 0:
            out.append(Violation("gain", "gain must be ≥ 0"))
        if not 0 <= spec.reference_angle <= 180:
            out.append(Violation("reference_angle", "reference angle must be in [0, 180]"))
        return out
    bps = spec.breakpoints
    if len(bps) < 2:
        out.append(Violation("breakpoints", "need at least 2 breakpoints"))
    angles = [a for a, _ in bps]
    disps = [d for _, d in bps]
    if any(not 0 <= a <= 180 for a in angles):
        out.append(Violation("breakpoints", "breakpoint angle outside [0, 180]"))
    if any(a2 <= a1 for a1, a2 in zip(angles, angles[1:])):
        out.append(Violation("breakpoints", "angles not strictly increasing"))
    if any(d2 > d1 for d1, d2 in zip(disps, disps[1:])):
        out.append(Violation("breakpoints", "displacements increase with angle"))
    if any(d < 0 for d in disps):
        out.append(Violation("breakpoints", "negative displacement"))
    if any(d > spec.stroke_limit for d in disps):
        out.append(Violation("breakpoints", "displacement exceeds stroke"))
    return out


def evaluate(spec: MappingSpec, angle: float) -> float:
    """Unchecked evaluation; callers validate ``spec`` once up front."""
    if isinstance(spec, ConstantGain):
        x = spec.gain * (spec.reference_angle - angle)
    else:
        bps = spec.breakpoints
        if angle <= bps[0][0]:
            x = bps[0][1]
        elif angle >= bps[-1][0]:
            x = bps[-1][1]
        else:
            i = bisect.bisect_right(bps, (angle, float("inf")))
            (a0, d0), (a1, d1) = bps[i - 1], bps[i]
            x = d0 + (d1 - d0) * (angle - a0) / (a1 - a0)
    return min(max(x, 0.0), spec.stroke_limit)


def command_from_angle(spec: MappingSpec, angle: float) -> float:
    """Displacement command (mm) for an elbow angle in degrees."""
    problems = validate_mapping(spec)
    if problems:
        raise ConfigError("invalid mapping: " + "; ".join(map(str, problems)))
    if not 0.0 <= angle <= 180.0:
        raise ValueError(f"angle {angle} outside [0, 180]")
    return evaluate(spec, angle)


# -- config section ------------------------------------------------------

_FIELD_KEYS = {
    "gain": "mapping.gain_mm_per_deg",
    "reference_angle": "mapping.reference_angle_deg",
    "breakpoints": "mapping.breakpoints",
    "stroke_limit": "mapping.stroke_limit_mm",
}
_TYPE_KEYS = {
    "constant_gain": {"mapping.type", "mapping.gain_mm_per_deg",
                      "mapping.reference_angle_deg", "mapping.stroke_limit_mm"},
    "piecewise_linear": {"mapping.type", "mapping.breakpoints", "mapping.stroke_limit_mm"},
}


def _number(entries, key, default=None):
    if key not in entries:
        if default is None:
            raise ConfigError("missing", key=key)
        return float(default)
    e = entries[key]
    if isinstance(e.value, bool) or not isinstance(e.value, (int, float)):
        raise ConfigError("expected a number", line=e.line, key=key)
    return float(e.value)


def mapping_from_entries(entries, default_stroke: float = DEFAULT_STROKE_MM) -> MappingSpec:
    """Build and validate a MappingSpec from parsed ``mapping.*`` entries."""
    entries = {k: v for k, v in entries.items() if k.startswith("mapping.")}
    if "mapping.type" not in entries:
        raise ConfigError("mapping.type missing", key="mapping.type")
    t = entries["mapping.type"]
    if t.value in RESERVED_TYPES:
        raise ConfigError(f"mapping type {t.value!r} is unimplemented",
                          line=t.line, key="mapping.type")
    if t.value not in _TYPE_KEYS:
        raise ConfigError(f"unknown mapping type {t.value!r}", line=t.line, key="mapping.type")
    for key, e in entries.items():
        if key not in _TYPE_KEYS[t.value]:
            raise ConfigError(f"unknown key for mapping.type={t.value}", line=e.line, key=key)

    stroke = _number(entries, "mapping.stroke_limit_mm", default_stroke)
    if t.value == "constant_gain":
        spec = ConstantGain(
            gain=_number(entries, "mapping.gain_mm_per_deg"),
            reference_angle=_number(entries, "mapping.reference_angle_deg", 180.0),
            stroke_limit=stroke,
        )
    else:
        if "mapping.breakpoints" not in entries:
            raise ConfigError("mapping.breakpoints missing", key="mapping.breakpoints")
        e = entries["mapping.breakpoints"]
        raw = e.value
        ok = isinstance(raw, list) and all(
            isinstance(p, list) and len(p) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in p)
            for p in raw
        )
        if not ok:
            raise ConfigError("breakpoints must be a list of [angle_deg, displacement_mm] pairs",
                              line=e.line, key="mapping.breakpoints")
        spec = PiecewiseLinear(breakpoints=tuple(tuple(p) for p in raw), stroke_limit=stroke)

    problems = validate_mapping(spec)
    if problems:
        first = problems[0]
        key = _FIELD_KEYS[first.field]
        line = entries[key].line if key in entries else None
        msg = "; ".join(str(p) for p in problems)
        raise ConfigError(msg, line=line, key=key)
    return spec


def parse_mapping_config(text: str, default_stroke: float = DEFAULT_STROKE_MM) -> MappingSpec:
    """Parse a config fragment holding ``mapping.*`` assignments.

    Keys outside the mapping section are rejected.
    """
    entries = kvfile.read_assignments(text)
    for key, e in entries.items():
        if not key.startswith("mapping."):
            raise ConfigError("not a mapping key", line=e.line, key=key)
    return mapping_from_entries(entries, default_stroke)


def mapping_items(spec: MappingSpec):
    if isinstance(spec, ConstantGain):
        return [
            ("mapping.type", "constant_gain"),
            ("mapping.gain_mm_per_deg", float(spec.gain)),
            ("mapping.reference_angle_deg", float(spec.reference_angle)),
            ("mapping.stroke_limit_mm", float(spec.stroke_limit)),
        ]
    return [
        ("mapping.type", "piecewise_linear"),
        ("mapping.breakpoints", [list(p) for p in spec.breakpoints]),
        ("mapping.stroke_limit_mm", float(spec.stroke_limit)),
    ]


def format_mapping(spec: MappingSpec) -> str:
    return kvfile.format_assignments(mapping_items(spec))
