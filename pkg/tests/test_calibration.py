import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elbowhaptic.calibration import (
    StiffnessFit,
    SweepResult,
    fit_stiffness,
    format_sweep,
    parse_sweep,
    sweep,
    two_point_angle_cal,
)
from elbowhaptic.contact import SkinModel, contact_force, skin_preset
from elbowhaptic.errors import CalibrationError, DataError, DegenerateDataError, FitError
from elbowhaptic.sensing import FlexSensorParams, angle_estimate, measure_angle


def line(k, offset=0.0, xs=np.arange(0, 19.0)):
    skin = SkinModel("x", k, offset)
    return SweepResult(tuple((float(x), contact_force(skin, x)) for x in xs))


@pytest.mark.parametrize("k", [465.6, 8115.4])
def test_exact_line_recovers_parameters(k):
    fit = fit_stiffness(line(k, xs=np.linspace(0, 2.2, 12)))
    assert fit.stiffness == pytest.approx(k, rel=1e-3)
    assert fit.contact_offset == pytest.approx(0.0, abs=0.01)
    assert fit.residual_rms <= 1e-9


def test_matches_polyfit_oracle():
    rng = np.random.default_rng(7)
    xs = np.linspace(0.5, 15, 25)
    fs = 0.52 * xs - 0.3 + rng.normal(0, 0.1, xs.size)
    fit = fit_stiffness(SweepResult(tuple(zip(xs, fs))), contact_threshold=-np.inf)
    a, b = np.polyfit(xs, fs, 1)
    assert fit.stiffness == pytest.approx(a * 1000, rel=1e-10)
    assert fit.contact_offset == pytest.approx(-b / a, rel=1e-10)
    resid = fs - (a * xs + b)
    assert fit.residual_rms == pytest.approx(np.sqrt(np.mean(resid ** 2)), rel=1e-8)


def test_through_origin_matches_lstsq():
    xs = np.array([1.0, 2.0, 3.0, 5.0])
    fs = np.array([0.4, 1.1, 1.4, 2.6])
    fit = fit_stiffness(SweepResult(tuple(zip(xs, fs))), through_origin=True)
    a = np.linalg.lstsq(xs[:, None], fs, rcond=None)[0][0]
    assert fit.stiffness == pytest.approx(a * 1000, rel=1e-12)
    assert fit.contact_offset == 0.0


def test_offset_recovered():
    fit = fit_stiffness(line(1000.0, 1.5))
    assert fit.contact_offset == pytest.approx(1.5, abs=1e-9)
    assert fit.n_contact_samples == 17


def test_negative_intercept_offset_clamped():
    fit = fit_stiffness(SweepResult(((1.0, 2.0), (2.0, 3.0))))
    assert fit.contact_offset == 0.0


def test_fit_errors():
    with pytest.raises(FitError):
        fit_stiffness(SweepResult(((0.0, 0.0), (1.0, 0.5))))
    with pytest.raises(DegenerateDataError):
        fit_stiffness(SweepResult(((1.0, 2.0), (2.0, 1.0))))
    with pytest.raises(DataError):
        SweepResult(((1.0, 2.0), (1.0, 3.0)))


@settings(max_examples=200)
@given(st.floats(100, 10000), st.floats(0, 2))
def test_fit_consistency_property(k, offset):
    xs = np.arange(0, 19.0) * 0.25 + offset
    fit = fit_stiffness(line(k, offset, xs))
    assert fit.stiffness == pytest.approx(k, rel=1e-3)
    assert fit.contact_offset == pytest.approx(offset, abs=0.02)
    assert fit.residual_rms <= 1e-9


def test_sweep_forearm_noise_free(quiet_cfg):
    res = sweep(quiet_cfg, 18.0, 1.0, 100)
    assert len(res.samples) == 19 and not res.truncated
    for x, f in res.samples:
        assert f == pytest.approx(0.4656 * x, abs=0.005 + 1e-12)
    assert [x for x, _ in res.samples] == pytest.approx(list(range(19)))


def test_sweep_hand_truncated_by_stall(quiet_cfg):
    res = sweep(quiet_cfg.replace(skin=skin_preset("hand")), 18.0, 1.0, 100)
    assert res.truncated
    last_x, last_f = res.samples[-1]
    stall_x = 18 / 8.1154
    assert stall_x <= last_x <= stall_x + 0.1 + 1e-9
    assert last_f >= 18.0


def test_sweep_with_stiction_still_on_line(cfg):
    c = cfg.replace(loop__noise_enabled=False)
    res = sweep(c, 18.0, 1.0, 100)
    assert res.samples[1][0] == pytest.approx(0.8)
    assert fit_stiffness(res).stiffness == pytest.approx(465.6, rel=1e-3)


def test_sweep_zero_range(quiet_cfg):
    assert sweep(quiet_cfg, 0.0, 1.0, 10).samples == ((0.0, 0.0),)


@pytest.mark.parametrize("x_max, step, settle", [(25.0, 1.0, 10), (5.0, 0.0, 10),
                                                 (5.0, 1.0, 0), (-1.0, 1.0, 10)])
def test_sweep_preconditions(quiet_cfg, x_max, step, settle):
    with pytest.raises(ValueError):
        sweep(quiet_cfg, x_max, step, settle)


def test_sweep_deterministic(cfg):
    noisy = cfg.replace(force_sensor__noise_sigma=0.1)
    assert sweep(noisy, 18, 1, 100) == sweep(noisy, 18, 1, 100)


def test_monte_carlo_noisy_fit(cfg):
    # 100 seeded trials with 0.1 N force noise; every fit within 5 %
    noisy = cfg.replace(force_sensor__noise_sigma=0.1)
    errs = []
    for seed in range(100):
        res = sweep(noisy.replace(loop__seed=seed), 18, 1, 100)
        errs.append(fit_stiffness(res).stiffness / 465.6 - 1)
    assert max(abs(e) for e in errs) < 0.05
    assert abs(np.mean(errs)) < 0.01


def test_sweep_csv_round_trip():
    res = SweepResult(((0.0, 0.0), (0.8, 0.37), (1.8000000000000003, 0.84)))
    assert parse_sweep(format_sweep(res)).samples == res.samples
    assert format_sweep(res).splitlines()[0] == "x_mm,force_n"


@pytest.mark.parametrize("text", ["x,f\n1,2\n", "x_mm,force_n\n1,2\n1,3\n", "x_mm,force_n\n1,a\n",
                                  "", "x_mm,force_n\n1\n"])
def test_sweep_csv_errors(text):
    with pytest.raises(DataError):
        parse_sweep(text)


def test_fit_output_format():
    fit = StiffnessFit(465.6, 0.0, 1e-12, 18)
    assert fit.format().splitlines()[0] == "stiffness_n_per_m=465.6"
    assert '"stiffness": 465.6' in fit.to_json()


# -- two-point angle calibration ------------------------------------------------

P = FlexSensorParams()


def test_two_point_recovers_defaults():
    c180, c30 = measure_angle(P, 180)[0], measure_angle(P, 30)[0]
    # start from a deliberately wrong sensor law
    wrong = FlexSensorParams(r_extended=25_000, r_flexed=35_000)
    cal = two_point_angle_cal(wrong, (c180, 180.0), (c30, 30.0))
    # one code step near each endpoint, in ohms
    assert cal.r_extended == pytest.approx(20_000, abs=60)
    assert cal.r_flexed == pytest.approx(40_000, abs=120)
    assert angle_estimate(cal, c180) == pytest.approx(180.0, abs=1e-9)
    assert angle_estimate(cal, c30) == pytest.approx(30.0, abs=1e-9)


def test_two_point_interior_point_reproduced():
    c180, c90 = measure_angle(P, 180)[0], measure_angle(P, 90)[0]
    cal = two_point_angle_cal(P, (c180, 180.0), (c90, 90.0))
    assert angle_estimate(cal, c90) == pytest.approx(90.0, abs=1e-9)


def test_two_point_order_independent():
    a, b = (693, 180.0), (524, 30.0)
    assert two_point_angle_cal(P, a, b) == two_point_angle_cal(P, b, a)


@pytest.mark.parametrize("a, b", [((600, 180.0), (600, 30.0)), ((600, 90.0), (620, 90.0)),
                                  ((500, 180.0), (600, 30.0)), ((0, 180.0), (600, 30.0))])
def test_two_point_degenerate(a, b):
    with pytest.raises(CalibrationError):
        two_point_angle_cal(P, a, b)
