"""Micro linear actuator model.

The unit's internal position servo is represented by its closed-loop
envelope: first-order slew toward the command, a stiction dead band, and a
stall when the load reaches the rated force. There is no inertia.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

# mm; absorbs rounding when a command sits exactly on the stiction band edge
_BAND_EPS = 1e-9


@dataclass(frozen=True)
class ActuatorParams:
    stroke: float = 20.0  # mm
    max_force: float = 18.0  # N
    max_speed: float = 10.0  # mm/s
    stiction_band: float = 0.2  # mm
    pos_quantization: float = 0.02  # mm, 0 disables
    pos_noise_sigma: float = 0.0  # mm

    def __post_init__(self):
        for name in ("stroke", "max_force", "max_speed"):
            if not getattr(self, name) > 0:
                raise ValueError(f"actuator {name} must be > 0, got {getattr(self, name)}")
        for name in ("stiction_band", "pos_quantization", "pos_noise_sigma"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"actuator {name} must be >= 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class ActuatorState:
    position: float = 0.0  # mm, true extension
    stalled: bool = False


def actuator_step(
    params: ActuatorParams,
    state: ActuatorState,
    command: float,
    load_force: float,
    dt: float,
) -> ActuatorState:
    """Advance the actuator by ``dt`` seconds toward ``command`` (mm).

    ``load_force`` is the contact force at the current position. Extension is
    refused while it is at or above ``max_force``; retraction always proceeds.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if not 0.0 <= command <= params.stroke:
        raise ValueError(f"command {command} mm outside [0, {params.stroke}]")
    if load_force < 0:
        raise ValueError(f"load_force must be >= 0, got {load_force}")

    pos = state.position
    err = command - pos
    if abs(err) <= params.stiction_band + _BAND_EPS:
        return ActuatorState(pos, False)
    if err > 0 and load_force >= params.max_force:
        return ActuatorState(pos, True)
    reach = params.max_speed * dt
    if abs(err) <= reach:
        new = command
    else:
        new = pos + reach if err > 0 else pos - reach
    return ActuatorState(min(max(new, 0.0), params.stroke), False)


def bounded_normal(rng: np.random.Generator, sigma: float) -> float:
    """Gaussian draw truncated at +/-3 sigma."""
    return float(np.clip(rng.normal(0.0, sigma), -3.0 * sigma, 3.0 * sigma))


def quantize(value: float, step: float) -> float:
    if step <= 0:
        return value
    return round(value / step) * step


def position_feedback(
    params: ActuatorParams,
    state: ActuatorState,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """Reading of the built-in position sensor (mm)."""
    x = state.position
    if rng is not None and params.pos_noise_sigma > 0:
        x += bounded_normal(rng, params.pos_noise_sigma)
    x = quantize(x, params.pos_quantization)
    return min(max(x, 0.0), params.stroke)
