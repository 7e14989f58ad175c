"""Shared helpers for building CSV fixtures and synthetic series."""

from __future__ import annotations

import csv
from datetime import date, timedelta
from pathlib import Path

import numpy as np
import pytest

from voho.ingest import PriceSeries

BASE_DATE = date(2010, 1, 4)


def write_daily_csv(path: Path, rows: list[tuple[str, str, float]]) -> Path:
    """rows: (instrument, yyyymmdd, close); open/high/low mirror close."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["instrument", "date", "open", "high", "low", "close", "volume"])
        for instrument, day, close in rows:
            writer.writerow([instrument, day, close, close, close, close, 100])
    return path


def write_tick_csv(path: Path, rows: list[tuple[str, float, float]]) -> Path:
    """rows: (instrument, timestamp, price)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["instrument", "timestamp", "price", "volume"])
        for instrument, ts, price in rows:
            writer.writerow([instrument, ts, price, 10])
    return path


def daily_rows(instrument: str, prices: list[float], start: date = BASE_DATE):
    return [
        (instrument, (start + timedelta(days=i)).strftime("%Y%m%d"), p)
        for i, p in enumerate(prices)
    ]


def make_series(prices, times=None, instrument="T", kind="daily") -> PriceSeries:
    prices = np.asarray(prices, dtype=float)
    if times is None:
        times = np.arange(len(prices), dtype=float)
    return PriceSeries(instrument, np.asarray(times, dtype=float), prices, kind)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(20240901))
