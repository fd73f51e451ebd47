"""Datasets, simulation and the builtin prior guesses."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Dataset:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).ravel()
        y = np.asarray(self.y, dtype=float).ravel()
        if x.shape != y.shape:
            raise ValueError(f"x and y differ in length ({x.size} vs {y.size})")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("dataset contains non-finite values")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.size

    def check_domain(self, domain) -> None:
        lo, hi = domain
        if np.any((self.x < lo) | (self.x > hi)):
            raise ValueError(f"abscissae fall outside the domain [{lo}, {hi}]")


def _cos(x):
    return np.cos(2.0 * np.pi * np.asarray(x, dtype=float))


def _vee(x):
    return 4.0 * np.abs(np.asarray(x, dtype=float) - 0.5) - 1.0


def _zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def _seasonal(x):
    return 22.5 * np.cos(2.0 * np.pi * (np.asarray(x, dtype=float) + 0.1) / 0.2) + 62.5


BUILTIN_G0: dict[str, Callable] = {"cos": _cos, "vee": _vee, "zero": _zero, "seasonal": _seasonal}


def builtin_g0(name: str) -> Callable:
    try:
        return BUILTIN_G0[name]
    except KeyError:
        raise ValueError(f"unknown prior guess {name!r}; choose from {sorted(BUILTIN_G0)}") from None


def interpolated_g0(x_knots, g_knots) -> Callable:
    """Piecewise-linear prior guess through (x, g0(x)) pairs, flat beyond the ends."""
    xk = np.asarray(x_knots, dtype=float)
    gk = np.asarray(g_knots, dtype=float)
    order = np.argsort(xk)
    xk, gk = xk[order], gk[order]
    if xk.size < 2:
        raise ValueError("need at least two knots")

    def g0(x):
        return np.interp(np.asarray(x, dtype=float), xk, gk)

    return g0


def simulate(n: int, sigma2: float, seed: int, signal: str = "cos", domain=(0.0, 1.0)) -> Dataset:
    """x ~ U(domain), y = g(x) + N(0, sigma2) with g a builtin function."""
    if n < 1:
        raise ValueError("n must be positive")
    if sigma2 < 0:
        raise ValueError("sigma2 must be non-negative")
    g = builtin_g0(signal)
    rng = np.random.default_rng(seed)
    lo, hi = domain
    x = rng.uniform(lo, hi, size=n)
    y = g(x) + math.sqrt(sigma2) * rng.standard_normal(n)
    return Dataset(x, y)


def simulate_seasonal(n: int = 185, sigma2: float = 16.0, seed: int = 0) -> Dataset:
    """Stand-in for a weekly humidity series: equally spaced x in [0, 1]
    with the seasonal guess as signal plus Gaussian noise."""
    rng = np.random.default_rng(seed)
    x = np.linspace(0.0, 1.0, n)
    y = _seasonal(x) + math.sqrt(sigma2) * rng.standard_normal(n)
    return Dataset(x, y)


class DataFormatError(ValueError):
    pass


def read_xy(path, columns=("x", "y")) -> tuple[np.ndarray, np.ndarray]:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        if header != list(columns):
            raise DataFormatError(f"{path}: expected header {','.join(columns)}, got {','.join(header)}")
        a, b = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise DataFormatError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            try:
                xa, xb = float(row[0]), float(row[1])
            except ValueError:
                raise DataFormatError(f"{path}:{lineno}: non-numeric field") from None
            if not (math.isfinite(xa) and math.isfinite(xb)):
                raise DataFormatError(f"{path}:{lineno}: non-finite value")
            a.append(xa)
            b.append(xb)
    if not a:
        raise DataFormatError(f"{path}: no observations")
    return np.array(a), np.array(b)


def read_dataset(path) -> Dataset:
    x, y = read_xy(path)
    return Dataset(x, y)


def format_xy(x, y, columns=("x", "y")) -> str:
    lines = [",".join(columns)]
    lines += [f"{a!r},{b!r}" for a, b in zip(np.asarray(x, float).tolist(), np.asarray(y, float).tolist())]
    return "\n".join(lines) + "\n"
