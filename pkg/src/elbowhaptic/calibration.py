"""Force-displacement sweeps, stiffness identification and flex-sensor calibration."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Tuple

from .actuator import ActuatorState, actuator_step, position_feedback
from .config import SimConfig
from .contact import contact_force, force_sensor_read
from .controlloop import noise_streams
from .errors import CalibrationError, DataError, DegenerateDataError, FitError
from .sensing import FlexSensorParams

SWEEP_HEADER = ("x_mm", "force_n")
DEFAULT_CONTACT_THRESHOLD_N = 0.05


@dataclass(frozen=True)
class SweepResult:
    samples: Tuple[Tuple[float, float], ...]  # (extension mm, force N)
    site_name: str = ""
    truncated: bool = False

    def __post_init__(self):
        xs = [x for x, _ in self.samples]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise DataError("sweep extensions must be strictly increasing")


@dataclass(frozen=True)
class StiffnessFit:
    stiffness: float  # N/m
    contact_offset: float  # mm
    residual_rms: float  # N
    n_contact_samples: int

    def format(self) -> str:
        return (
            f"stiffness_n_per_m={self.stiffness:.10g}\n"
            f"contact_offset_mm={self.contact_offset:.10g}\n"
            f"residual_rms_n={self.residual_rms:.6g}\n"
            f"n_contact_samples={self.n_contact_samples}\n"
        )

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def sweep(
    cfg: SimConfig,
    x_max: float = 18.0,
    step: float = 1.0,
    settle_ticks: int = 100,
) -> SweepResult:
    """Step the actuator through 0, step, 2*step, ... x_max against the
    configured skin, recording measured position and force once each point
    has settled.

    The actuator is commanded directly (no mapping, no safety clamp). A
    stall ends the sweep after recording the stalled point. Points where the
    measured position did not advance past the previous sample are skipped.
    """
    stroke = cfg.actuator.stroke
    if not step > 0:
        raise ValueError(f"step must be > 0, got {step}")
    if not 0 <= x_max <= stroke:
        raise ValueError(f"x_max must be in [0, {stroke}], got {x_max}")
    if settle_ticks < 1:
        raise ValueError(f"settle_ticks must be >= 1, got {settle_ticks}")

    if cfg.loop.noise_enabled:
        _, pos_rng, force_rng = noise_streams(cfg.loop.seed)
    else:
        pos_rng = force_rng = None
    n_points = int(math.floor(x_max / step + 1e-9)) + 1
    dt = 1.0 / cfg.loop.rate
    state = ActuatorState()
    samples = []
    truncated = False
    for i in range(n_points):
        command = min(i * step, stroke)
        for _ in range(settle_ticks):
            load = contact_force(cfg.skin, state.position)
            state = actuator_step(cfg.actuator, state, command, load, dt)
        x = position_feedback(cfg.actuator, state, pos_rng)
        f = force_sensor_read(cfg.force_sensor, contact_force(cfg.skin, state.position), force_rng)
        if not samples or x > samples[-1][0]:
            samples.append((x, f))
        if state.stalled:
            truncated = True
            break
    return SweepResult(tuple(samples), cfg.skin.site_name, truncated)


def fit_stiffness(
    result: SweepResult,
    contact_threshold: float = DEFAULT_CONTACT_THRESHOLD_N,
    through_origin: bool = False,
) -> StiffnessFit:
    """Least-squares line F = a*x + b through the in-contact samples.

    Stiffness is ``a`` in N/m and the contact offset is the line's x-intercept
    (clamped at 0). ``through_origin`` forces b = 0.
    """
    pts = [(x, f) for x, f in result.samples if f > contact_threshold]
    if len(pts) < 2:
        raise FitError(
            f"need at least 2 samples with force > {contact_threshold} N, got {len(pts)}"
        )
    n = len(pts)
    xs = [x for x, _ in pts]
    fs = [f for _, f in pts]
    if through_origin:
        sxx = math.fsum(x * x for x in xs)
        if sxx == 0:
            raise DegenerateDataError("all contact samples at zero extension")
        a = math.fsum(x * f for x, f in pts) / sxx
        b = 0.0
    else:
        xm = math.fsum(xs) / n
        fm = math.fsum(fs) / n
        sxx = math.fsum((x - xm) ** 2 for x in xs)
        if sxx == 0:
            raise DegenerateDataError("contact samples share one extension; slope undefined")
        a = math.fsum((x - xm) * (f - fm) for x, f in pts) / sxx
        b = fm - a * xm
    if not a > 0:
        raise DegenerateDataError(f"fitted slope {a:.6g} N/mm is not positive")
    rms = math.sqrt(math.fsum((f - (a * x + b)) ** 2 for x, f in pts) / n)
    return StiffnessFit(
        stiffness=a * 1000.0,
        contact_offset=max(0.0, -b / a),
        residual_rms=rms,
        n_contact_samples=n,
    )


def format_sweep(result: SweepResult) -> str:
    lines = [",".join(SWEEP_HEADER)]
    lines.extend(f"{x!r},{f!r}" for x, f in result.samples)
    return "\n".join(lines) + "\n"


def parse_sweep(text: str, source: str = "<sweep>", site_name: str = "") -> SweepResult:
    rows = csv.reader(io.StringIO(text))
    header = next(rows, None)
    if header is None or tuple(h.strip() for h in header) != SWEEP_HEADER:
        raise DataError(f"{source}: line 1: header must be 'x_mm,force_n'")
    samples = []
    for lineno, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise DataError(f"{source}: line {lineno}: expected 2 columns, got {len(row)}")
        try:
            x, f = float(row[0]), float(row[1])
        except ValueError:
            raise DataError(f"{source}: line {lineno}: non-numeric value") from None
        if samples and not x > samples[-1][0]:
            raise DataError(f"{source}: line {lineno}: x_mm must be strictly increasing")
        samples.append((x, f))
    return SweepResult(tuple(samples), site_name)


def read_sweep(path) -> SweepResult:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"{path}: cannot read sweep: {exc}") from None
    return parse_sweep(text, str(path), Path(path).stem)


def _code_resistance(params: FlexSensorParams, code: int) -> float:
    full = params.full_scale
    if not 0 < code <= full:
        raise CalibrationError(f"ADC code {code} outside (0, {full}]")
    return params.r_fixed * (full - code) / code


def two_point_angle_cal(
    params: FlexSensorParams,
    first: Tuple[int, float],
    second: Tuple[int, float],
) -> FlexSensorParams:
    """Refit the linear resistance-angle law from two (adc_code, angle_deg)
    readings. Point order does not matter.
    """
    (c1, a1), (c2, a2) = sorted([tuple(first), tuple(second)], key=lambda p: p[1])
    if c1 == c2:
        raise CalibrationError(f"both calibration readings are ADC code {c1}")
    if a1 == a2:
        raise CalibrationError(f"both calibration points are at {a1} deg")
    r1, r2 = _code_resistance(params, c1), _code_resistance(params, c2)
    slope = (r1 - r2) / (a2 - a1)  # ohm per degree of flexion
    if not slope > 0:
        raise CalibrationError("resistance must increase with flexion")
    r_ext = r2 + (a2 - 180.0) * slope
    r_flex = r2 + (a2 - params.theta_min) * slope
    try:
        return replace(params, r_extended=r_ext, r_flexed=r_flex)
    except ValueError as exc:
        raise CalibrationError(str(exc)) from None


def angle_cal_from_extension(
    params: FlexSensorParams, reading_at_180: int, reading_at_known: Tuple[int, float]
) -> FlexSensorParams:
    return two_point_angle_cal(params, (reading_at_180, 180.0), reading_at_known)
