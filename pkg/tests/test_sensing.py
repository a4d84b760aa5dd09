import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elbowhaptic.sensing import (
    FlexSensorParams,
    LowPass,
    MovingAverage,
    adc_sample,
    angle_estimate,
    check_filter_rate,
    divider_voltage,
    filter_init,
    filter_step,
    flex_resistance,
    measure_angle,
)

P = FlexSensorParams()


@pytest.mark.parametrize("angle, ohms", [(180, 20_000), (30, 40_000), (105, 30_000)])
def test_flex_resistance_endpoints(angle, ohms):
    assert flex_resistance(P, angle) == pytest.approx(ohms, abs=1e-9)


@pytest.mark.parametrize("angle", [29.9, 180.1, -5])
def test_flex_resistance_out_of_range(angle):
    with pytest.raises(ValueError):
        flex_resistance(P, angle)


def test_flex_resistance_noise_is_seeded_and_clamped():
    a = [flex_resistance(P, 100, np.random.default_rng(3)) for _ in range(5)]
    b = [flex_resistance(P, 100, np.random.default_rng(3)) for _ in range(5)]
    assert a == b
    wild = FlexSensorParams(noise_sigma_ohm=1e6)
    rng = np.random.default_rng(0)
    rs = [flex_resistance(wild, 100, rng) for _ in range(200)]
    assert min(rs) >= 10_000 and max(rs) <= 60_000
    assert min(rs) == 10_000 and max(rs) == 60_000


@pytest.mark.parametrize("r, v", [(20_000, 42 / 62), (40_000, 42 / 82), (42_000, 0.5)])
def test_divider_voltage(r, v):
    assert divider_voltage(P, r) == pytest.approx(v, rel=1e-12)


def test_divider_voltage_rounded_values():
    assert round(divider_voltage(P, 20_000), 5) == 0.67742
    assert round(divider_voltage(P, 40_000), 5) == 0.51220


def test_divider_rejects_nonpositive():
    with pytest.raises(ValueError):
        divider_voltage(P, 0)


@pytest.mark.parametrize("v, code", [(0.0, 0), (1.0, 1023), (0.5, 512)])
def test_adc_sample(v, code):
    assert adc_sample(P, v) == code


@pytest.mark.parametrize("v", [-0.01, 1.01])
def test_adc_sample_range(v):
    with pytest.raises(ValueError):
        adc_sample(P, v)


def _oracle_angle(params, code):
    """Bisection on the forward law for the angle whose exact (unquantized)
    code equals ``code``, clamped to the sensor range."""
    def exact_code(a):
        r = params.r_extended + (180 - a) * (params.r_flexed - params.r_extended) / (
            180 - params.theta_min)
        return params.r_fixed / (r + params.r_fixed) * ((1 << params.adc_bits) - 1)

    lo, hi = params.theta_min, 180.0  # exact_code increases with angle
    if code <= exact_code(lo):
        return lo
    if code >= exact_code(hi):
        return hi
    for _ in range(200):
        mid = (lo + hi) / 2
        if exact_code(mid) < code:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


@pytest.mark.parametrize("code", [0, 1, 300, 524, 600, 693, 1023])
def test_angle_estimate_matches_bisection_oracle(code):
    assert angle_estimate(P, code) == pytest.approx(_oracle_angle(P, code), abs=1e-9)


def test_angle_estimate_endpoints():
    code180, est180 = measure_angle(P, 180)
    assert est180 == pytest.approx(180, abs=2 * 150 / 1024)
    assert angle_estimate(P, 0) == P.theta_min
    assert P.theta_min <= angle_estimate(P, 1023) <= 180


def test_round_trip_stays_in_code_bin():
    # true and estimated angle must fall in the same code's angle interval
    for a in range(30, 181):
        code, est = measure_angle(P, a)
        lo = _oracle_angle(P, code - 0.5)
        hi = _oracle_angle(P, code + 0.5)
        assert lo - 1e-9 <= a <= hi + 1e-9
        assert lo - 1e-9 <= est <= hi + 1e-9


def test_round_trip_error_bound_worst_case():
    worst = max(abs(measure_angle(P, a)[1] - a) for a in range(30, 181))
    assert worst < 0.55


def test_angle_estimate_monotone_in_code():
    est = [angle_estimate(P, c) for c in range(P.full_scale + 1)]
    assert all(b >= a for a, b in zip(est, est[1:]))


@given(st.floats(30, 180), st.floats(30, 180))
def test_resistance_strictly_decreasing(a1, a2):
    if a1 < a2:
        assert flex_resistance(P, a1) > flex_resistance(P, a2)


@given(st.floats(1, 1e6), st.floats(1, 1e6))
def test_divider_strictly_decreasing(r1, r2):
    if r1 < r2:
        assert divider_voltage(P, r1) > divider_voltage(P, r2)


@pytest.mark.parametrize("kw", [
    dict(r_extended=40_000, r_flexed=20_000),
    dict(theta_min=0),
    dict(theta_min=180),
    dict(adc_bits=7),
    dict(adc_bits=17),
    dict(noise_sigma_ohm=-1),
])
def test_params_invariants(kw):
    with pytest.raises(ValueError):
        FlexSensorParams(**kw)


# -- filter ----------------------------------------------------------------


def _run(spec, xs, rate=100.0):
    state, out = filter_init(spec), []
    for x in xs:
        state, y = filter_step(spec, state, x, rate)
        out.append(y)
    return out


@pytest.mark.parametrize("spec", [MovingAverage(5), MovingAverage(1), LowPass(2.0)])
def test_filter_dc_gain_exact(spec):
    assert _run(spec, [120.0] * 50) == [120.0] * 50


@given(st.floats(30, 180), st.integers(1, 20))
def test_moving_average_dc_gain_any_value(x, window):
    assert _run(MovingAverage(window), [x] * (window + 3))[-1] == x


def test_moving_average_mean_and_warmup():
    out = _run(MovingAverage(3), [100.0, 110.0, 120.0, 130.0])
    assert out == [100.0, 105.0, 110.0, 120.0]


def test_window_one_is_identity():
    xs = [180.0, 12.5, 99.9, 30.0]
    assert _run(MovingAverage(1), xs) == xs


def test_low_pass_step_response():
    # one-pole: y_n = 1 - (1 - alpha)^n toward a unit step from 0
    rate, fc = 100.0, 2.0
    alpha = 1 - math.exp(-2 * math.pi * fc / rate)
    out = _run(LowPass(fc), [0.0] + [1.0] * 10, rate)
    for n, y in enumerate(out[1:], start=1):
        assert y == pytest.approx(1 - (1 - alpha) ** n, rel=1e-12)


def test_filter_spec_validation():
    with pytest.raises(ValueError):
        MovingAverage(0)
    with pytest.raises(ValueError):
        LowPass(0)
    with pytest.raises(ValueError):
        check_filter_rate(LowPass(50.0), 100.0)
    check_filter_rate(LowPass(49.0), 100.0)
