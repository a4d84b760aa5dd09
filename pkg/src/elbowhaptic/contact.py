"""Tactor-skin contact and the embedded force sensor."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .actuator import bounded_normal, quantize

# Per-site stiffness identified on the prototype (N/m).
SITE_STIFFNESS = {
    "forearm": 465.6,
    "hand": 8115.4,
}

TACTOR_DIAMETER_MM = 15.0


@dataclass(frozen=True)
class SkinModel:
    site_name: str = "forearm"
    stiffness: float = SITE_STIFFNESS["forearm"]  # N/m
    contact_offset: float = 0.0  # mm

    def __post_init__(self):
        if not self.stiffness > 0:
            raise ValueError(f"skin stiffness must be > 0, got {self.stiffness}")
        if not self.contact_offset >= 0:
            raise ValueError(f"contact_offset must be >= 0, got {self.contact_offset}")


def skin_preset(site: str, contact_offset: float = 0.0) -> SkinModel:
    try:
        k = SITE_STIFFNESS[site]
    except KeyError:
        raise ValueError(
            f"unknown site {site!r}; presets are {', '.join(sorted(SITE_STIFFNESS))}"
        ) from None
    return SkinModel(site, k, contact_offset)


@dataclass(frozen=True)
class ForceSensorParams:
    range_max: float = 45.0  # N
    noise_sigma: float = 0.05  # N
    quantization: float = 0.01  # N, 0 disables

    def __post_init__(self):
        if not self.range_max > 0:
            raise ValueError(f"force sensor range_max must be > 0, got {self.range_max}")
        if not self.noise_sigma >= 0 or not self.quantization >= 0:
            raise ValueError("force sensor noise_sigma and quantization must be >= 0")

    def error_bound(self, noise: bool = True) -> float:
        """Largest amount a reading can exceed the true force."""
        return (3.0 * self.noise_sigma if noise else 0.0) + self.quantization / 2


def contact_force(skin: SkinModel, extension: float) -> float:
    """Contact force (N) at actuator ``extension`` (mm)."""
    if extension < 0:
        raise ValueError(f"extension must be >= 0, got {extension}")
    # N/m * mm / 1000 -> N
    return skin.stiffness * max(0.0, extension - skin.contact_offset) / 1000.0


def force_sensor_read(
    params: ForceSensorParams,
    true_force: float,
    rng: Optional[np.random.Generator] = None,
) -> float:
    if true_force < 0:
        raise ValueError(f"true_force must be >= 0, got {true_force}")
    f = true_force
    if rng is not None and params.noise_sigma > 0:
        f += bounded_normal(rng, params.noise_sigma)
    f = quantize(f, params.quantization)
    return min(max(f, 0.0), params.range_max)
