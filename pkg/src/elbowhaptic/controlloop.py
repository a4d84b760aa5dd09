"""Fixed-rate control loop mirroring the device firmware.

Each tick: read the flex sensor, filter the angle, map it to a displacement
command, limit the command so the predicted contact force stays under the
safety limit, step the actuator against the skin load, then read back
position and force and emit one :class:`LogRecord`.
"""

from __future__ import annotations

import csv
import math
import re
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import List, NamedTuple, Tuple, Union

import numpy as np

from .actuator import ActuatorState, actuator_step, position_feedback, quantize
from .config import SimConfig
from .contact import ForceSensorParams, SkinModel, contact_force, force_sensor_read
from .errors import DataError
from .mapping import evaluate
from .sensing import filter_init, filter_step, measure_angle


class LogRecord(NamedTuple):
    tick: int
    t: float
    angle_raw: float
    angle_filtered: float
    command: float
    position_measured: float
    force_measured: float
    stalled: bool


def safety_clamp(command: float, skin: SkinModel, limit: float) -> float:
    """Largest command <= ``command`` whose predicted contact force is <= ``limit``."""
    if not limit > 0:
        raise ValueError(f"safety limit must be > 0, got {limit}")
    x_max = skin.contact_offset + limit * 1000.0 / skin.stiffness
    if command <= x_max:
        return command
    # step down past any rounding in the forward model
    while x_max > 0 and contact_force(skin, x_max) > limit:
        x_max = math.nextafter(x_max, -math.inf)
    return x_max


def safe_force_limit(limit: float, sensor: ForceSensorParams, noise: bool = True) -> float:
    """Contact-force target for the clamp so the sensor *reading* stays within
    ``limit`` plus the worst-case noise excursion.

    Round-to-nearest quantization can lift a reading above the true force by
    half a step, so an off-grid limit is pulled down until the highest
    reachable reading no longer exceeds ``limit + 3 sigma``. Returns 0 when
    even zero contact force cannot guarantee that (limit under half a step).
    """
    e = 3.0 * sensor.noise_sigma if noise else 0.0
    q = sensor.quantization
    ceiling = limit + e
    if q <= 0:
        return limit
    m = math.floor(ceiling / q)
    while m > 0 and m * q > ceiling:
        m -= 1
    f = min(limit, (m + 0.5) * q - e)
    while f > 0 and quantize(f + e, q) > ceiling:
        f = math.nextafter(f, -math.inf)
    return max(f, 0.0)


def record_count(rate: float, duration: float) -> int:
    """ceil(rate * duration), evaluated on the decimal values as written."""
    return math.ceil(Fraction(repr(float(rate))) * Fraction(repr(float(duration))))


def noise_streams(seed: int, n: int = 3) -> List[np.random.Generator]:
    """Independent generators for flex, position and force noise."""
    return [np.random.Generator(np.random.PCG64(s))
            for s in np.random.SeedSequence(seed).spawn(n)]


class Simulation:
    """One device instance advanced tick by tick.

    Noise sources draw from separate seeded streams so the downstream part of
    the loop can be re-run from logged raw angles (see :meth:`advance`).
    """

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        self.dt = 1.0 / cfg.loop.rate
        self.tick_index = 0
        self.filter_state = filter_init(cfg.filter)
        self.actuator = ActuatorState()
        if cfg.loop.noise_enabled:
            self.flex_rng, self.pos_rng, self.force_rng = noise_streams(cfg.loop.seed)
        else:
            self.flex_rng = self.pos_rng = self.force_rng = None
        self._limit = (
            safe_force_limit(cfg.loop.safety_force_limit, cfg.force_sensor, cfg.loop.noise_enabled)
            if cfg.loop.safety_enabled else None
        )

    def sense(self, true_angle: float) -> float:
        """Raw angle estimate for a true elbow angle."""
        sensor = self.cfg.sensor
        # the bend sensor saturates outside its modeled range
        angle = min(max(true_angle, sensor.theta_min), 180.0)
        return measure_angle(sensor, angle, self.flex_rng)[1]

    def advance(self, angle_raw: float) -> LogRecord:
        """Everything downstream of angle acquisition for one tick."""
        cfg = self.cfg
        self.filter_state, angle_f = filter_step(
            cfg.filter, self.filter_state, angle_raw, cfg.loop.rate
        )
        command = evaluate(cfg.mapping, angle_f)
        if self._limit is not None:
            if self._limit > 0:
                command = safety_clamp(command, cfg.skin, self._limit)
            else:
                command = min(command, cfg.skin.contact_offset)
        load = contact_force(cfg.skin, self.actuator.position)
        self.actuator = actuator_step(cfg.actuator, self.actuator, command, load, self.dt)
        pos_meas = position_feedback(cfg.actuator, self.actuator, self.pos_rng)
        force_meas = force_sensor_read(
            cfg.force_sensor, contact_force(cfg.skin, self.actuator.position), self.force_rng
        )
        rec = LogRecord(
            self.tick_index,
            self.tick_index / cfg.loop.rate,
            angle_raw,
            angle_f,
            command,
            pos_meas,
            force_meas,
            self.actuator.stalled,
        )
        self.tick_index += 1
        return rec

    def tick(self, true_angle: float) -> LogRecord:
        return self.advance(self.sense(true_angle))


def tick(sim: Simulation, true_angle: float) -> Tuple[Simulation, LogRecord]:
    rec = sim.tick(true_angle)
    return sim, rec


# -- traces --------------------------------------------------------------


@dataclass(frozen=True)
class Sine:
    center: float
    amplitude: float
    frequency: float  # Hz
    phase_deg: float = 0.0

    def angle(self, t: float) -> float:
        return self.center + self.amplitude * math.sin(
            2 * math.pi * self.frequency * t + math.radians(self.phase_deg)
        )

    def bounds(self):
        a = abs(self.amplitude)
        return self.center - a, self.center + a


@dataclass(frozen=True)
class Ramp:
    start: float
    end: float
    duration: float

    def angle(self, t: float) -> float:
        if self.duration <= 0 or t >= self.duration:
            return self.end
        return self.start + (self.end - self.start) * t / self.duration

    def bounds(self):
        return min(self.start, self.end), max(self.start, self.end)


@dataclass(frozen=True)
class Hold:
    angle_deg: float

    def angle(self, t: float) -> float:
        return self.angle_deg

    def bounds(self):
        return self.angle_deg, self.angle_deg


@dataclass(frozen=True)
class FileTrace:
    path: str
    times: Tuple[float, ...]
    angles: Tuple[float, ...]

    def angle(self, t: float) -> float:
        ts, angs = self.times, self.angles
        if t <= ts[0]:
            return angs[0]
        if t >= ts[-1]:
            return angs[-1]
        i = bisect_right(ts, t)
        t0, t1 = ts[i - 1], ts[i]
        return angs[i - 1] + (angs[i] - angs[i - 1]) * (t - t0) / (t1 - t0)

    def bounds(self):
        return min(self.angles), max(self.angles)


TraceSpec = Union[Sine, Ramp, Hold, FileTrace]


def check_trace(trace: TraceSpec) -> TraceSpec:
    lo, hi = trace.bounds()
    if lo < 0 or hi > 180:
        raise ValueError(f"trace angles span [{lo}, {hi}], outside [0, 180]")
    if isinstance(trace, Sine) and not trace.frequency >= 0:
        raise ValueError("sine frequency must be >= 0")
    if isinstance(trace, Ramp) and not trace.duration >= 0:
        raise ValueError("ramp duration must be >= 0")
    return trace


def load_trace_csv(path: Union[str, Path]) -> FileTrace:
    """Read a ``t_s,angle_deg`` CSV."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"{path}: cannot read trace: {exc}") from None
    if not rows or [c.strip() for c in rows[0]] != ["t_s", "angle_deg"]:
        raise DataError(f"{path}: line 1: header must be 't_s,angle_deg'")
    times, angles = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise DataError(f"{path}: line {lineno}: expected 2 columns, got {len(row)}")
        try:
            t, a = float(row[0]), float(row[1])
        except ValueError:
            raise DataError(f"{path}: line {lineno}: non-numeric value") from None
        if times and not t > times[-1]:
            raise DataError(f"{path}: line {lineno}: t_s must be strictly increasing")
        times.append(t)
        angles.append(a)
    if not times:
        raise DataError(f"{path}: trace has no rows")
    trace = FileTrace(str(path), tuple(times), tuple(angles))
    try:
        return check_trace(trace)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None


_TRACE_FIELDS = {
    "sine": (Sine, {"center": "center", "amplitude": "amplitude", "freq": "frequency",
                    "frequency": "frequency", "phase": "phase_deg"}, {"center", "amplitude", "frequency"}),
    "ramp": (Ramp, {"from": "start", "to": "end", "duration": "duration"},
             {"start", "end", "duration"}),
    "hold": (Hold, {"angle": "angle_deg"}, {"angle_deg"}),
}


def parse_trace(text: str) -> TraceSpec:
    """Parse a trace description.

    ``sine:center=105,amplitude=75,freq=0.25[,phase=DEG]``,
    ``ramp:from=180,to=30,duration=5``, ``hold:angle=100`` or ``file:PATH``.
    A bare number is shorthand for a hold.
    """
    text = text.strip()
    if re.fullmatch(r"[-+0-9.eE]+", text):
        try:
            return check_trace(Hold(float(text)))
        except ValueError as exc:
            raise DataError(f"trace {text!r}: {exc}") from None
    kind, sep, rest = text.partition(":")
    if not sep:
        raise DataError(f"trace {text!r}: expected KIND:ARGS")
    if kind == "file":
        return load_trace_csv(rest)
    if kind not in _TRACE_FIELDS:
        raise DataError(f"trace {text!r}: unknown kind {kind!r} (sine, ramp, hold, file)")
    cls, aliases, required = _TRACE_FIELDS[kind]
    kwargs = {}
    for part in filter(None, (p.strip() for p in rest.split(","))):
        name, eq, value = part.partition("=")
        if not eq or name.strip() not in aliases:
            raise DataError(f"trace {text!r}: bad argument {part!r}")
        try:
            kwargs[aliases[name.strip()]] = float(value)
        except ValueError:
            raise DataError(f"trace {text!r}: {name.strip()} is not a number") from None
    missing = required - kwargs.keys()
    if missing:
        raise DataError(f"trace {text!r}: missing {', '.join(sorted(missing))}")
    try:
        return check_trace(cls(**kwargs))
    except ValueError as exc:
        raise DataError(f"trace {text!r}: {exc}") from None


def run(cfg: SimConfig, trace: TraceSpec, duration: float = None) -> List[LogRecord]:
    """Simulate ``ceil(rate * duration)`` ticks, sampling the trace at tick times."""
    check_trace(trace)
    duration = cfg.loop.duration if duration is None else duration
    sim = Simulation(cfg)
    rate = cfg.loop.rate
    return [sim.tick(trace.angle(k / rate)) for k in range(record_count(rate, duration))]
