"""Time-based account features."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

HOUR = 3600
BREAK_WINDOW = 48 * HOUR


def chi_square_seconds(timestamps: Sequence[int]) -> float:
    """Pearson chi-square of the seconds-of-minute field against uniform n/60."""
    ts = np.asarray(timestamps, dtype=np.int64)
    n = ts.size
    if n == 0:
        return 0.0
    observed = np.bincount(ts % 60, minlength=60).astype(np.float64)
    expected = n / 60.0
    return float(((observed - expected) ** 2).sum() / expected)


def longest_breaks(timestamps: Sequence[int], window: int = BREAK_WINDOW) -> tuple[float, float]:
    """Average longest and second-longest inactivity gap per window, in hours.

    Windows are consecutive ``window``-second slices starting at the first
    tweet; the final slice is cut at the last tweet. Window boundaries act as
    virtual events, so a tweet-free window contributes its full length as the
    longest gap. A window with a single gap has second-longest 0. A timeline
    whose tweets share one instant reports the window length for both.
    """
    ts = np.sort(np.asarray(timestamps, dtype=np.int64))
    if ts.size == 0:
        raise ValueError("longest_breaks needs at least one timestamp")
    first, last = int(ts[0]), int(ts[-1])
    if last == first:
        return window / HOUR, window / HOUR
    n_windows = max(1, math.ceil((last - first) / window))
    longest = np.empty(n_windows)
    second = np.empty(n_windows)
    for k in range(n_windows):
        start = first + k * window
        end = min(start + window, last)
        lo = np.searchsorted(ts, start, side="left")
        hi = np.searchsorted(ts, end, side="right")
        events = np.concatenate(([start], ts[lo:hi], [end]))
        gaps = np.sort(np.diff(events))
        longest[k] = gaps[-1]
        second[k] = gaps[-2] if gaps.size > 1 else 0.0
    return float(longest.mean() / HOUR), float(second.mean() / HOUR)


def median_hours(deltas: Sequence[float], default: float) -> float:
    """Median of ``deltas`` (seconds) in hours, or ``default`` when empty."""
    if len(deltas) == 0:
        return float(default)
    return float(np.median(np.asarray(deltas, dtype=np.float64)) / HOUR)
