"""Spatial-skeleton decomposition of a path into fixed-size moves.

The path is swept sample by sample; each time it ends a sample at least
`delta` away from the current skeleton level, one event per crossed step
is emitted at the linearly interpolated crossing time. Levels are tracked
as an integer index times delta from the starting value, so consecutive
skeleton levels differ by exactly one step and no floating-point drift
accumulates.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ingest import PriceSeries
from .quantise import SymbolSequence

SKELETON_CSV_HEADER = ["instrument", "delta", "i", "T_i", "level", "direction"]

CROSSING_MODES = ("multi", "single")
INPUT_KINDS = ("price", "log_return_path")


@dataclass(frozen=True)
class SkeletonSeries:
    """Decomposition output: event times, integer level indices, directions.

    The level at event i is base_level + level_indices[i] * delta; the
    event index itself (1-based) is the time-change estimate at that event.
    source_indices records which input sample produced each event, for
    diagnostics.
    """

    instrument_id: str
    delta: float
    base_level: float
    times: np.ndarray
    level_indices: np.ndarray
    directions: np.ndarray
    source_indices: np.ndarray
    input_kind: str = "price"

    def __post_init__(self):
        times = np.ascontiguousarray(self.times, dtype=np.float64)
        levels = np.ascontiguousarray(self.level_indices, dtype=np.int64)
        dirs = np.ascontiguousarray(self.directions, dtype=np.int8)
        src = np.ascontiguousarray(self.source_indices, dtype=np.int64)
        if not (times.size == levels.size == dirs.size == src.size):
            raise ValueError("skeleton arrays must have equal length")
        if self.input_kind not in INPUT_KINDS:
            raise ValueError(f"unknown input kind {self.input_kind!r}")
        for name, arr in (("times", times), ("level_indices", levels),
                          ("directions", dirs), ("source_indices", src)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return int(self.times.size)

    def levels(self) -> np.ndarray:
        """Skeleton values base_level + k_i * delta."""
        return self.base_level + self.level_indices * self.delta


def decompose(
    path: PriceSeries | np.ndarray,
    delta: float,
    *,
    times: np.ndarray | None = None,
    crossing: str = "multi",
    instrument_id: str | None = None,
    input_kind: str = "price",
) -> SkeletonSeries:
    """Extract the delta-step skeleton of a path.

    `path` is either a PriceSeries (its prices and timestamps are used) or
    a plain real-valued array, in which case `times` defaults to 0..n-1.
    crossing="multi" emits one event per delta crossed within a sample;
    crossing="single" caps it at one event per sample. All events from one
    sample interval share its interpolation line; when the interval has
    zero time width the events land on its (shared) timestamp.
    """
    if isinstance(path, PriceSeries):
        values = path.prices
        if times is None:
            times = path.times
        if instrument_id is None:
            instrument_id = path.instrument_id
    else:
        values = np.ascontiguousarray(path, dtype=np.float64)
    if instrument_id is None:
        instrument_id = ""
    if not (math.isfinite(delta) and delta > 0):
        raise ValueError("delta must be a positive finite number")
    if values.ndim != 1 or values.size < 2:
        raise ValueError("path must be 1-d with at least 2 samples")
    if not np.all(np.isfinite(values)):
        raise ValueError("path contains non-finite values")
    if times is None:
        times = np.arange(values.size, dtype=np.float64)
    else:
        times = np.ascontiguousarray(times, dtype=np.float64)
        if times.shape != values.shape:
            raise ValueError("times must match the path length")
    if crossing not in CROSSING_MODES:
        raise ValueError(f"unknown crossing mode {crossing!r}")

    x = values.tolist()
    t = times.tolist()
    multi = crossing == "multi"
    base = x[0]
    k = 0
    ev_times: list[float] = []
    ev_levels: list[int] = []
    ev_dirs: list[int] = []
    ev_src: list[int] = []
    for j in range(1, len(x)):
        xj = x[j]
        diff = xj - (base + k * delta)
        if diff >= delta:
            step = 1
            crossings = int(diff / delta)
        elif diff <= -delta:
            step = -1
            crossings = int(-diff / delta)
        else:
            continue
        if not multi:
            crossings = 1
        xp = x[j - 1]
        tp = t[j - 1]
        # dx is nonzero in multi mode (the previous residual was < delta);
        # in single mode the level can lag a flat stretch, so fall back to t_j
        dx = xj - xp
        dt = t[j] - tp
        for _ in range(crossings):
            k += step
            new_level = base + k * delta
            if dx == 0.0:
                ev_times.append(t[j])
            else:
                ev_times.append(tp + (new_level - xp) / dx * dt)
            ev_levels.append(k)
            ev_dirs.append(step)
            ev_src.append(j)
        if multi:
            assert abs(xj - (base + k * delta)) < delta
    return SkeletonSeries(
        instrument_id=instrument_id,
        delta=float(delta),
        base_level=base,
        times=np.asarray(ev_times),
        level_indices=np.asarray(ev_levels, dtype=np.int64),
        directions=np.asarray(ev_dirs, dtype=np.int8),
        source_indices=np.asarray(ev_src, dtype=np.int64),
        input_kind=input_kind,
    )


def skeleton_to_symbols(skeleton: SkeletonSeries) -> SymbolSequence:
    """Binary sequence of the skeleton's moves: 1 for up, 0 for down."""
    symbols = (skeleton.directions > 0).astype(np.int64)
    return SymbolSequence(
        instrument_id=skeleton.instrument_id,
        alphabet_size=2,
        symbols=symbols,
        provenance="skeleton",
    )


def write_skeleton_csv(skeletons: SkeletonSeries | list[SkeletonSeries], path: str | Path) -> None:
    """Export skeletons as instrument,delta,i,T_i,level,direction rows."""
    if isinstance(skeletons, SkeletonSeries):
        skeletons = [skeletons]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SKELETON_CSV_HEADER)
        for skel in skeletons:
            levels = skel.levels()
            for i in range(len(skel)):
                writer.writerow([
                    skel.instrument_id,
                    repr(float(skel.delta)),
                    i + 1,
                    repr(float(skel.times[i])),
                    repr(float(levels[i])),
                    int(skel.directions[i]),
                ])
