"""Worst-case angle round-trip error over a 1 degree grid, per ADC width,
against the 2 * span / 2^bits target."""

import argparse
import dataclasses

from elbowhaptic import FlexSensorParams
from elbowhaptic.sensing import divider_voltage, measure_angle


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bits", type=int, nargs="*", default=[8, 10, 12, 14, 16])
    args = ap.parse_args()

    base = FlexSensorParams()
    lo, hi = divider_voltage(base, base.r_flexed), divider_voltage(base, base.r_extended)
    print(f"divider swing {lo:.4f}..{hi:.4f} of supply ({hi - lo:.1%} of ADC range)")
    print(f"{'bits':>4} {'max err':>9} {'at':>5} {'target':>9} {'ratio':>6}")
    for bits in args.bits:
        p = dataclasses.replace(base, adc_bits=bits)
        grid = range(int(p.theta_min), 181)
        errs = [(abs(measure_angle(p, float(a))[1] - a), a) for a in grid]
        err, at = max(errs)
        target = 2 * (180 - p.theta_min) / 2 ** bits
        print(f"{bits:4d} {err:9.5f} {at:5d} {target:9.5f} {err / target:6.2f}")


if __name__ == "__main__":
    main()
