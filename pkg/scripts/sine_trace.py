"""Run the 0.25 Hz flexion/extension sine, write the log and SVG, and print
the lag, period and correlation measurements."""

import argparse
from pathlib import Path

import numpy as np

from elbowhaptic import Sine, load_config, run
from elbowhaptic.analysis import crossing_lags, period_ticks, xcorr_peak_lag
from elbowhaptic.plotting import DEFAULT_SPEC, emit_plot
from elbowhaptic.telemetry import atomic_write_text, format_log


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="configs/example.cfg")
    ap.add_argument("--out-dir", default="out")
    ap.add_argument("--duration", type=float, default=20.0)
    ap.add_argument("--freq", type=float, default=0.25)
    ap.add_argument("--seed", type=int)
    args = ap.parse_args()

    cfg = load_config(args.config).replace(loop__duration=args.duration)
    if args.seed is not None:
        cfg = cfg.replace(loop__seed=args.seed)
    lo, hi = cfg.sensor.theta_min, 180.0
    center = (lo + hi) / 2
    recs = run(cfg, Sine(center, (hi - lo) / 2, args.freq))

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    atomic_write_text(out / "sine.csv", format_log(recs))
    atomic_write_text(out / "sine.svg", emit_plot(DEFAULT_SPEC, recs))

    t = np.array([r.t for r in recs])
    raw = np.array([r.angle_raw for r in recs])
    filt = np.array([r.angle_filtered for r in recs])
    force = np.array([r.force_measured for r in recs])
    crossings = np.arange(1, int(t[-1] * 2 * args.freq)) / (2 * args.freq)
    lags = crossing_lags(t, raw, filt, center, crossings)
    skip = len(recs) // 5
    print(f"records            {len(recs)}")
    print(f"filter lag (s)     min {min(lags):.4f}  mean {np.mean(lags):.4f}  max {max(lags):.4f}")
    print(f"period (ticks)     angle {period_ticks(filt, skip):.2f}  "
          f"force {period_ticks(force, skip):.2f}  nominal {cfg.loop.rate / args.freq:g}")
    half = int(cfg.loop.rate / args.freq / 2) - 1
    print(f"xcorr peak lag     {xcorr_peak_lag(180.0 - filt, force, half)} ticks")
    print(f"peak force (N)     {force.max():.2f}")
    print(f"wrote {out / 'sine.csv'} and {out / 'sine.svg'}")


if __name__ == "__main__":
    main()
