"""Trapezoid Fourier integrals over symmetric grids.

Both the plug-in estimator and the analytic inversion evaluate

    I(x) = int_{-T}^{T} exp(-i t x) g(t) dt - c * int_{-T}^{T} exp(-i t x) dt

where g is sampled on a :class:`~levydens.ecf.FrequencyGrid` and c is a
constant.  The g part uses the composite trapezoid rule with the +t and -t
nodes added together before summation; the constant part is integrated in
closed form, 2 c sin(T x) / x.
"""

from __future__ import annotations

import math

import numpy as np

from .ecf import FrequencyGrid

MAX_NODES = 2**20


class ResolutionError(RuntimeError):
    """The quadrature grid cannot resolve exp(-i t x) within the node budget."""


def resolved_grid(half_width: float, points: int, x: float) -> FrequencyGrid:
    """Symmetric grid whose spacing satisfies spacing * |x| <= pi / 4.

    ``points`` is doubled until the condition holds.
    """
    points = int(points)
    while True:
        grid = FrequencyGrid.symmetric(half_width, points)
        if grid.spacing * abs(x) <= math.pi / 4:
            return grid
        points *= 2
        if points > MAX_NODES:
            raise ResolutionError(
                f"cannot resolve x={x} on [-{half_width}, {half_width}] with <= {MAX_NODES} nodes"
            )


def trapezoid_weights(grid: FrequencyGrid) -> np.ndarray:
    """Weights for the nonnegative half: node 0 counts once, t = T gets dt/2."""
    w = np.full(grid.half_count + 1, grid.spacing)
    w[-1] = 0.5 * grid.spacing
    return w


def paired_fourier_integral(values: np.ndarray, grid: FrequencyGrid, x: float) -> complex:
    """Trapezoid rule for int exp(-i t x) g(t) dt with g given on all grid nodes."""
    values = np.asarray(values)
    K = grid.half_count
    if values.shape != (grid.size,):
        raise ValueError(f"expected {grid.size} values, got shape {values.shape}")
    t = grid.nonnegative[1:]
    c, s = np.cos(t * x), np.sin(t * x)
    pos = values[K + 1:]
    neg = values[K - 1::-1]
    # exp(-itx) g(t) + exp(itx) g(-t)
    pair = (c - 1j * s) * pos + (c + 1j * s) * neg
    w = trapezoid_weights(grid)
    return complex(w[0] * values[K] + np.sum(w[1:] * pair))


def paired_real_integral(values: np.ndarray, grid: FrequencyGrid) -> float:
    """Trapezoid rule for int g(t) dt over the grid, g real."""
    values = np.asarray(values, dtype=float)
    K = grid.half_count
    w = trapezoid_weights(grid)
    pair = values[K + 1:] + values[K - 1::-1]
    return float(w[0] * values[K] + np.sum(w[1:] * pair))


def constant_fourier_integral(half_width: float, x: float) -> float:
    """int_{-T}^{T} exp(-i t x) dt = 2 sin(T x) / x."""
    if x == 0:
        return 2.0 * half_width
    return 2.0 * math.sin(half_width * x) / x
