"""Command-line entry point: ``elbowhaptic {simulate,replay,sweep,fit,plot}``.

Exit status is 0 on success, 1 on usage errors and 2 on data or config
errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .calibration import (
    DEFAULT_CONTACT_THRESHOLD_N,
    fit_stiffness,
    format_sweep,
    read_sweep,
    sweep,
)
from .config import format_config, load_config
from .contact import SITE_STIFFNESS, skin_preset
from .controlloop import parse_trace, run
from .errors import CalibrationError, ConfigError, DataError
from .plotting import DEFAULT_SPEC, emit_plot, spec_for_columns
from .telemetry import (
    atomic_write_text,
    format_log,
    format_report,
    read_log,
    replay_check,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def sidecar_path(log_path) -> Path:
    """Where ``simulate`` stores the resolved config next to a log."""
    p = Path(log_path)
    return p.with_name(p.name + ".cfg")


def _config_with_overrides(args):
    cfg = load_config(args.config)
    try:
        if getattr(args, "seed", None) is not None:
            cfg = cfg.replace(loop__seed=args.seed)
        if getattr(args, "no_noise", False):
            cfg = cfg.replace(loop__noise_enabled=False)
        if getattr(args, "duration", None) is not None:
            cfg = cfg.replace(loop__duration=args.duration)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return cfg


def cmd_simulate(args) -> int:
    cfg = _config_with_overrides(args)
    trace = parse_trace(args.trace)
    records = run(cfg, trace)
    atomic_write_text(args.out, format_log(records))
    atomic_write_text(sidecar_path(args.out), format_config(cfg))
    print(f"wrote {len(records)} records to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_replay(args) -> int:
    records = read_log(args.inp)
    if records:
        cfg_path = args.config or sidecar_path(args.inp)
        if not Path(cfg_path).exists():
            raise DataError(f"{args.inp}: no config given and no {cfg_path} beside the log")
        dev = replay_check(records, load_config(cfg_path))
    else:
        dev = {}
    report = format_report(dev)
    atomic_write_text(args.out, report)
    sys.stdout.write(report)
    bad = [col for col, v in dev.items() if v != 0]
    if bad:
        print(f"{args.inp}: replay deviates in column(s) {', '.join(bad)}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _config_with_overrides(args)
    if args.site is not None:
        if args.site not in SITE_STIFFNESS:
            raise UsageError(f"--site must be one of {', '.join(sorted(SITE_STIFFNESS))}")
        cfg = cfg.replace(skin=skin_preset(args.site, cfg.skin.contact_offset))
    try:
        result = sweep(cfg, args.x_max, args.step, args.settle_ticks)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    atomic_write_text(args.out, format_sweep(result))
    note = " (truncated by stall)" if result.truncated else ""
    print(f"wrote {len(result.samples)} samples to {args.out}{note}", file=sys.stderr)
    return EXIT_OK


def cmd_fit(args) -> int:
    fit = fit_stiffness(read_sweep(args.inp), args.threshold, args.through_origin)
    sys.stdout.write(fit.format())
    if args.json:
        atomic_write_text(args.json, fit.to_json() + "\n")
    return EXIT_OK


def cmd_plot(args) -> int:
    records = read_log(args.inp)
    if args.panels:
        spec = spec_for_columns([c.strip() for c in args.panels.split(",")], args.title or "")
    elif args.title:
        spec = spec_for_columns([p.column for p in DEFAULT_SPEC.panels], args.title)
    else:
        spec = DEFAULT_SPEC
    atomic_write_text(args.out, emit_plot(spec, records))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="elbowhaptic", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("simulate", help="run the control loop against an angle trace")
    s.add_argument("--config", required=True)
    s.add_argument("--trace", required=True,
                   help="sine:center=C,amplitude=A,freq=F | ramp:from=A,to=B,duration=S | "
                        "hold:angle=A | file:PATH.csv")
    s.add_argument("--out", required=True, help="log CSV; resolved config goes to OUT.cfg")
    s.add_argument("--duration", type=float, help="override loop.duration_s")
    s.add_argument("--seed", type=int, help="override loop.seed")
    s.add_argument("--no-noise", action="store_true", help="set loop.noise_enabled=false")
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("replay", help="recompute a log from its raw angles and compare")
    r.add_argument("--in", dest="inp", required=True)
    r.add_argument("--out", required=True, help="report file (key=value lines)")
    r.add_argument("--config", help="config used for the run (default: IN.cfg)")
    r.set_defaults(func=cmd_replay)

    w = sub.add_parser("sweep", help="force-displacement sweep against a skin site")
    w.add_argument("--config", required=True)
    w.add_argument("--site", help=f"skin preset ({', '.join(sorted(SITE_STIFFNESS))})")
    w.add_argument("--out", required=True)
    w.add_argument("--x-max", type=float, default=18.0, help="mm (default 18)")
    w.add_argument("--step", type=float, default=1.0, help="mm (default 1)")
    w.add_argument("--settle-ticks", type=int, default=100)
    w.add_argument("--seed", type=int)
    w.add_argument("--no-noise", action="store_true")
    w.set_defaults(func=cmd_sweep)

    f = sub.add_parser("fit", help="least-squares stiffness from a sweep CSV")
    f.add_argument("--in", dest="inp", required=True)
    f.add_argument("--through-origin", action="store_true")
    f.add_argument("--threshold", type=float, default=DEFAULT_CONTACT_THRESHOLD_N,
                   help="contact force threshold in N")
    f.add_argument("--json", metavar="PATH", help="also write the fit as JSON")
    f.set_defaults(func=cmd_fit)

    g = sub.add_parser("plot", help="SVG of log columns against time")
    g.add_argument("--in", dest="inp", required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--panels", help="comma-separated log columns (default angle,position,force)")
    g.add_argument("--title")
    g.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, DataError, CalibrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
