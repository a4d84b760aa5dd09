"""Waveform measurements used to characterize logged runs."""

from __future__ import annotations

from typing import List, Sequence

import numpy as np


def crossing_time(t, y, level: float, t_near: float, half_width: float) -> float:
    """Time ``y`` crosses ``level`` near ``t_near``, from a least-squares line
    over samples within ``half_width`` seconds. Robust to sample noise."""
    t = np.asarray(t, float)
    y = np.asarray(y, float)
    m = np.abs(t - t_near) < half_width
    if m.sum() < 2:
        raise ValueError("too few samples around the crossing")
    slope, icept = np.polyfit(t[m] - t_near, y[m] - level, 1)
    if slope == 0:
        raise ValueError("signal is flat around the crossing")
    return t_near - icept / slope


def crossing_lags(t, reference, delayed, level: float, crossings: Sequence[float],
                  half_width: float = 0.25) -> List[float]:
    """``delayed``'s crossing time minus ``reference``'s, at each nominal crossing."""
    return [
        crossing_time(t, delayed, level, tc, half_width)
        - crossing_time(t, reference, level, tc, half_width)
        for tc in crossings
    ]


def period_ticks(y, skip: int = 0) -> float:
    """Fundamental period in samples from the average squared difference
    function: the lowest point of its first dip below the mean that follows
    an excursion above it, refined by a parabola through the neighbours."""
    y = np.asarray(y, float)[skip:]
    n = len(y)
    lags = np.arange(1, n // 2)
    d = np.array([np.mean((y[L:] - y[:-L]) ** 2) for L in lags])
    above = d > d.mean()
    start = int(np.argmax(above))
    if not above[start]:
        raise ValueError("no repeating structure found")
    lo = start + int(np.argmax(~above[start:]))
    if above[lo]:
        raise ValueError("no repeating structure found")
    hi = lo + int(np.argmax(above[lo:])) if above[lo:].any() else len(d)
    i = lo + int(np.argmin(d[lo:hi]))
    if i == 0 or i + 1 >= len(d):
        return float(lags[i])
    y0, y1, y2 = d[i - 1], d[i], d[i + 1]
    den = y0 - 2 * y1 + y2
    return float(lags[i] + (0.5 * (y0 - y2) / den if den > 0 else 0.0))


def xcorr_peak_lag(x, y, max_lag: int) -> int:
    """Lag (samples) maximizing the correlation of ``y[k + lag]`` with ``x[k]``,
    searched over ``[-max_lag, max_lag]``. Positive means ``y`` trails ``x``."""
    x = np.asarray(x, float) - np.mean(x)
    y = np.asarray(y, float) - np.mean(y)
    n = len(x)
    best, best_lag = -np.inf, 0
    for lag in range(-max_lag, max_lag + 1):
        if lag >= 0:
            c = np.dot(x[:n - lag], y[lag:]) / (n - lag)
        else:
            c = np.dot(x[-lag:], y[:n + lag]) / (n + lag)
        if c > best:
            best, best_lag = c, lag
    return best_lag
