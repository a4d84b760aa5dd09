"""Sweep both skin presets, fit stiffness, then repeat with a noisy force
sensor over many seeds and summarize the spread."""

import argparse
import statistics

from elbowhaptic import SITE_STIFFNESS, fit_stiffness, load_config, skin_preset, sweep
from elbowhaptic.contact import ForceSensorParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="configs/example.cfg")
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--sigma", type=float, default=0.1, help="force noise, N")
    args = ap.parse_args()

    base = load_config(args.config)
    noisy_fs = ForceSensorParams(noise_sigma=args.sigma)
    fits = {}
    print(f"{'site':8} {'true':>9} {'clean fit':>10} {'err':>8} {'mean':>9} {'sd':>7} {'worst':>7}")
    for site, k in sorted(SITE_STIFFNESS.items()):
        cfg = base.replace(skin=skin_preset(site))
        clean = fit_stiffness(sweep(cfg.replace(loop__noise_enabled=False))).stiffness
        ks = [
            fit_stiffness(sweep(cfg.replace(force_sensor=noisy_fs, loop__seed=s,
                                            loop__noise_enabled=True))).stiffness
            for s in range(args.trials)
        ]
        fits[site] = ks
        worst = max(abs(v / k - 1) for v in ks)
        print(f"{site:8} {k:9.1f} {clean:10.2f} {clean / k - 1:+8.3%} "
              f"{statistics.fmean(ks):9.1f} {statistics.stdev(ks):7.1f} {worst:7.2%}")
    if {"hand", "forearm"} <= fits.keys():
        wins = sum(h > f for h, f in zip(fits["hand"], fits["forearm"]))
        print(f"hand stiffer than forearm in {wins}/{args.trials} trials")


if __name__ == "__main__":
    main()
