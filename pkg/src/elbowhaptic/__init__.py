"""Control stack and hardware-in-the-loop simulator for a wearable device
that turns elbow angle into deep pressure on the forearm."""

from .actuator import ActuatorParams, ActuatorState, actuator_step, position_feedback
from .calibration import SweepResult, StiffnessFit, fit_stiffness, sweep, two_point_angle_cal
from .config import LoopConfig, SimConfig, config_from_text, format_config, load_config
from .contact import (
    SITE_STIFFNESS,
    ForceSensorParams,
    SkinModel,
    contact_force,
    force_sensor_read,
    skin_preset,
)
from .controlloop import Hold, LogRecord, Ramp, Simulation, Sine, run, safe_force_limit, safety_clamp
from .mapping import (
    ConstantGain,
    PiecewiseLinear,
    command_from_angle,
    parse_mapping_config,
    validate_mapping,
)
from .sensing import (
    FlexSensorParams,
    LowPass,
    MovingAverage,
    adc_sample,
    angle_estimate,
    divider_voltage,
    filter_step,
    flex_resistance,
)

__version__ = "0.1.0"
