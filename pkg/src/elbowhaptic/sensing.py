"""Flex sensor, voltage divider and ADC models plus the inverse angle chain.

Angles are in degrees with 180 meaning a fully extended elbow and smaller
values meaning flexion. The bend sensor's resistance grows with flexion and
is read through a divider whose tap sits across the fixed resistor, so the
tap voltage rises as the arm straightens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np


@dataclass(frozen=True)
class FlexSensorParams:
    r_extended: float = 20_000.0
    r_flexed: float = 40_000.0
    theta_min: float = 30.0
    r_fixed: float = 42_000.0
    v_supply: float = 5.0
    adc_bits: int = 10
    noise_sigma_ohm: float = 400.0

    def __post_init__(self):
        if not 0 < self.r_extended < self.r_flexed:
            raise ValueError(
                f"need 0 < r_extended < r_flexed, got {self.r_extended}, {self.r_flexed}"
            )
        if not 0 < self.theta_min < 180:
            raise ValueError(f"theta_min must be in (0, 180), got {self.theta_min}")
        if self.r_fixed <= 0:
            raise ValueError(f"r_fixed must be > 0, got {self.r_fixed}")
        if self.v_supply <= 0:
            raise ValueError(f"v_supply must be > 0, got {self.v_supply}")
        if isinstance(self.adc_bits, bool) or int(self.adc_bits) != self.adc_bits:
            raise ValueError(f"adc_bits must be an integer, got {self.adc_bits!r}")
        if not 8 <= self.adc_bits <= 16:
            raise ValueError(f"adc_bits must be in [8, 16], got {self.adc_bits}")
        if self.noise_sigma_ohm < 0:
            raise ValueError(f"noise_sigma_ohm must be >= 0, got {self.noise_sigma_ohm}")

    @property
    def full_scale(self) -> int:
        return (1 << int(self.adc_bits)) - 1

    @property
    def ohm_per_deg(self) -> float:
        return (self.r_flexed - self.r_extended) / (180.0 - self.theta_min)


def flex_resistance(
    params: FlexSensorParams,
    angle: float,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """Sensor resistance in ohms at ``angle``.

    Linear between ``r_extended`` at 180 deg and ``r_flexed`` at
    ``theta_min``. Passing ``rng`` adds Gaussian noise of
    ``noise_sigma_ohm``, clamped to ``[0.5 * r_extended, 1.5 * r_flexed]``.
    """
    if not params.theta_min <= angle <= 180.0:
        raise ValueError(
            f"angle {angle} outside sensor range [{params.theta_min}, 180]"
        )
    r = params.r_extended + (180.0 - angle) * params.ohm_per_deg
    if rng is not None and params.noise_sigma_ohm > 0:
        r += rng.normal(0.0, params.noise_sigma_ohm)
        r = min(max(r, 0.5 * params.r_extended), 1.5 * params.r_flexed)
    return r


def divider_voltage(params: FlexSensorParams, r_flex: float) -> float:
    """Tap voltage as a fraction of the supply."""
    if not r_flex > 0:
        raise ValueError(f"r_flex must be > 0, got {r_flex}")
    return params.r_fixed / (r_flex + params.r_fixed)


def adc_sample(params: FlexSensorParams, v_norm: float) -> int:
    if not 0.0 <= v_norm <= 1.0:
        raise ValueError(f"normalized voltage {v_norm} outside [0, 1]")
    # round half up, as a SAR converter's midpoint threshold would
    return int(math.floor(v_norm * params.full_scale + 0.5))


def angle_estimate(params: FlexSensorParams, code: int) -> float:
    """Invert code -> voltage -> resistance -> angle, clamped to the sensor range."""
    full = params.full_scale
    if not 0 <= code <= full:
        raise ValueError(f"ADC code {code} outside [0, {full}]")
    if code == 0:
        return params.theta_min
    r = params.r_fixed * (full - code) / code
    angle = 180.0 - (r - params.r_extended) / params.ohm_per_deg
    return min(max(angle, params.theta_min), 180.0)


def measure_angle(
    params: FlexSensorParams,
    angle: float,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[int, float]:
    """Full forward and inverse chain. Returns ``(adc_code, estimated_angle)``."""
    r = flex_resistance(params, angle, rng)
    code = adc_sample(params, divider_voltage(params, r))
    return code, angle_estimate(params, code)


# -- filtering -----------------------------------------------------------


@dataclass(frozen=True)
class MovingAverage:
    window: int = 5

    def __post_init__(self):
        if isinstance(self.window, bool) or int(self.window) != self.window or self.window < 1:
            raise ValueError(f"moving-average window must be an integer >= 1, got {self.window!r}")


@dataclass(frozen=True)
class LowPass:
    cutoff_hz: float

    def __post_init__(self):
        if not self.cutoff_hz > 0:
            raise ValueError(f"low-pass cutoff must be > 0, got {self.cutoff_hz}")


FilterSpec = Union[MovingAverage, LowPass]


def check_filter_rate(spec: FilterSpec, rate_hz: float) -> None:
    if isinstance(spec, LowPass) and not spec.cutoff_hz < rate_hz / 2:
        raise ValueError(
            f"low-pass cutoff {spec.cutoff_hz} Hz must be below Nyquist ({rate_hz / 2} Hz)"
        )


def filter_init(spec: FilterSpec):
    """Empty filter state for ``spec``."""
    if isinstance(spec, MovingAverage):
        return ()
    return None


def filter_step(spec: FilterSpec, state, sample: float, rate_hz: float = 100.0):
    """Advance the filter one sample. Returns ``(new_state, output)``.

    Moving-average state is the tuple of retained samples; low-pass state is
    the previous output (``None`` before the first sample, which the filter
    adopts as its initial output).
    """
    if isinstance(spec, MovingAverage):
        buf = (state + (sample,))[-spec.window:]
        # offset from the oldest sample keeps constant input exact
        base = buf[0]
        out = base + math.fsum(x - base for x in buf) / len(buf)
        return buf, out
    if state is None:
        return sample, sample
    alpha = 1.0 - math.exp(-2.0 * math.pi * spec.cutoff_hz / rate_hz)
    out = state + alpha * (sample - state)
    return out, out
