"""Exact sampling of unit-time increments and increment file I/O.

Random streams
--------------
Every sample is drawn from ``numpy.random.Generator(Philox(seed))``; Philox
is counter based, so a stream is fully determined by the 64-bit seed.
Draw order within one sample is fixed:

    1. n standard normals (diffusion part),
    2. n Poisson(intensity) jump counts,
    3. sum(counts) jump sizes, assigned to increments in index order.

Per-replicate seeds are derived with :func:`derive_seed`, a SplitMix64
finaliser chain over ``(master_seed, n, replicate)``, so any row of a Monte
Carlo study can be regenerated in isolation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .levy_model import LevyTriplet

MASK64 = (1 << 64) - 1


class DataFormatError(ValueError):
    """An increments file could not be parsed."""


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, *parts: int) -> int:
    """Mix ``master_seed`` with further integers into a new 64-bit seed.

    seed = splitmix64(... splitmix64(splitmix64(master) ^ p1) ^ p2 ...)
    """
    h = splitmix64(int(master_seed) & MASK64)
    for p in parts:
        h = splitmix64(h ^ (int(p) & MASK64))
    return h


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed) & MASK64))


@dataclass(frozen=True)
class IncrementSample:
    values: np.ndarray
    seed: Optional[int] = None
    triplet_id: Optional[str] = None
    _moments: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size < 1:
            raise ValueError("an increment sample needs at least one value")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other):
        if not isinstance(other, IncrementSample):
            return NotImplemented
        return (
            self.seed == other.seed
            and self.triplet_id == other.triplet_id
            and np.array_equal(self.values, other.values)
        )

    def summary(self) -> dict:
        """Sample mean, variance (ddof=1) and extremes."""
        if not self._moments:
            v = self.values
            var = float(v.var(ddof=1)) if v.size > 1 else 0.0
            self._moments.update(
                n=self.n, mean=float(v.mean()), variance=var,
                min=float(v.min()), max=float(v.max()),
            )
        return dict(self._moments)


def sample_increments(triplet: LevyTriplet, n: int, seed: int) -> IncrementSample:
    """Draw n i.i.d. unit-time increments of the Levy process."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    n = int(n)
    rng = make_rng(seed)
    z = triplet.gamma + triplet.sigma * rng.standard_normal(n)
    counts = rng.poisson(triplet.intensity, n)
    total = int(counts.sum())
    if total:
        sizes = triplet.jumps.sample(rng, total)
        owner = np.repeat(np.arange(n), counts)
        # bincount adds in index order, so the per-increment sums are reproducible
        z = z + np.bincount(owner, weights=sizes, minlength=n)
    return IncrementSample(z, seed=int(seed) & MASK64, triplet_id=triplet.label)


def save_increments(sample: IncrementSample, path, fmt: str = "txt") -> Path:
    """Write one value per line (``txt``) or the ``index,z`` CSV schema."""
    path = Path(path)
    if fmt == "txt":
        text = "".join(f"{v!r}\n" for v in sample.values.tolist())
        path.write_text(text, encoding="utf-8")
    elif fmt == "csv":
        with path.open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["index", "z"])
            for i, v in enumerate(sample.values.tolist()):
                w.writerow([i, repr(v)])
    else:
        raise ValueError(f"unknown increments format {fmt!r}")
    return path


def _parse_float(token: str, lineno: int, path) -> float:
    try:
        value = float(token.strip().replace("−", "-"))
    except ValueError:
        raise DataFormatError(f"{path}:{lineno}: cannot parse {token.strip()!r} as a real") from None
    if not math.isfinite(value):
        raise DataFormatError(f"{path}:{lineno}: non-finite value {token.strip()!r}")
    return value


def load_increments(path) -> IncrementSample:
    """Read increments from a plain one-per-line file or an ``index,z`` CSV."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").split("\n")
    values: list[float] = []
    start = 0
    csv_mode = bool(lines) and lines[0].strip().replace(" ", "") == "index,z"
    if csv_mode:
        start = 1
    for lineno, line in enumerate(lines[start:], start=start + 1):
        if not line.strip():
            continue
        if csv_mode:
            cols = line.split(",")
            if len(cols) != 2:
                raise DataFormatError(f"{path}:{lineno}: expected 2 columns, got {len(cols)}")
            token = cols[1]
        else:
            token = line
        values.append(_parse_float(token, lineno, path))
    if not values:
        raise DataFormatError(f"{path}: no increments found")
    return IncrementSample(np.array(values))


def as_sample(values: Sequence[float] | np.ndarray | IncrementSample) -> IncrementSample:
    if isinstance(values, IncrementSample):
        return values
    return IncrementSample(np.asarray(values, dtype=float))
