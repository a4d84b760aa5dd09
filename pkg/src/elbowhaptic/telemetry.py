"""Log CSV reading/writing and replay checking."""

from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path
from typing import Dict, Iterable, List, Union

from .config import SimConfig
from .controlloop import LogRecord, Simulation
from .errors import DataError

LOG_HEADER = ("tick", "t_s", "angle_raw_deg", "angle_filt_deg", "cmd_mm", "pos_mm",
              "force_n", "stalled")

# CSV column -> LogRecord field
COLUMN_FIELDS = dict(zip(LOG_HEADER, LogRecord._fields))
COLUMN_UNITS = {
    "t_s": "s", "angle_raw_deg": "deg", "angle_filt_deg": "deg", "cmd_mm": "mm",
    "pos_mm": "mm", "force_n": "N", "stalled": "", "tick": "",
}


def atomic_write_text(path: Union[str, Path], text: str) -> None:
    """Write via a temp file in the same directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    # repr is the shortest string that parses back to the same double
    return repr(float(v))


def format_log(records: Iterable[LogRecord]) -> str:
    lines = [",".join(LOG_HEADER)]
    lines.extend(",".join(_fmt(v) for v in rec) for rec in records)
    return "\n".join(lines) + "\n"


def write_log(path, records) -> None:
    atomic_write_text(path, format_log(records))


def parse_log(text: str, source: str = "<log>") -> List[LogRecord]:
    rows = csv.reader(io.StringIO(text))
    header = next(rows, None)
    if header is None or tuple(header) != LOG_HEADER:
        raise DataError(f"{source}: line 1: header must be {','.join(LOG_HEADER)!r}")
    out = []
    for lineno, row in enumerate(rows, start=2):
        if len(row) != len(LOG_HEADER):
            raise DataError(f"{source}: line {lineno}: expected {len(LOG_HEADER)} columns, "
                            f"got {len(row)}")
        try:
            stalled = {"0": False, "1": True}[row[7]]
            rec = LogRecord(int(row[0]), *(float(v) for v in row[1:7]), stalled)
        except (ValueError, KeyError):
            raise DataError(f"{source}: line {lineno}: malformed value") from None
        out.append(rec)
    return out


def read_log(path) -> List[LogRecord]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"{path}: cannot read log: {exc}") from None
    return parse_log(text, str(path))


def columns(records: List[LogRecord]) -> Dict[str, List[float]]:
    return {col: [getattr(r, f) for r in records] for col, f in COLUMN_FIELDS.items()}


REPLAY_COLUMNS = ("t_s", "angle_filt_deg", "cmd_mm", "pos_mm", "force_n", "stalled")


def replay_check(records: List[LogRecord], cfg: SimConfig) -> Dict[str, float]:
    """Re-run the loop downstream of ``angle_raw`` and compare with the log.

    Returns the maximum absolute deviation per recomputed column; an empty
    dict for an empty log. Logs produced by this package with the same
    config replay with every deviation exactly 0.
    """
    if not records:
        return {}
    sim = Simulation(cfg)
    dev = dict.fromkeys(REPLAY_COLUMNS, 0.0)
    for k, rec in enumerate(records):
        if rec.tick != k:
            raise DataError(f"log row {k + 2}: tick {rec.tick} out of sequence (expected {k})")
        again = sim.advance(rec.angle_raw)
        for col in REPLAY_COLUMNS:
            f = COLUMN_FIELDS[col]
            d = abs(float(getattr(rec, f)) - float(getattr(again, f)))
            if d > dev[col]:
                dev[col] = d
    return dev


def format_report(dev: Dict[str, float]) -> str:
    lines = [f"max_abs_dev.{col}={v!r}" for col, v in dev.items()]
    bad = [col for col, v in dev.items() if v != 0]
    lines.append("status=" + ("mismatch:" + ",".join(bad) if bad else "ok"))
    return "\n".join(lines) + "\n"
