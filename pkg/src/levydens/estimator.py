"""Plug-in estimators of the diffusion coefficient and the Levy density.

With phi_hat the empirical characteristic function of the increments,

    sigma2_hat = int_{-1/h}^{1/h} clip(log|phi_hat(t)|, -M_n, M_n) h^3 v(h t) dt

    rho_hat(x) = (2 pi x^2)^-1 int_{-1/h}^{1/h} exp(-i t x)
                 [ (phi_hat'^2 / phi_hat^2 - phi_hat'' / phi_hat) 1{G_t} - sigma2_hat ] dt

where G_t = {|phi_hat(t)| >= kappa_n exp(-Sigma^2 / (2 h^2))} and the
integration range is the support of the sinc kernel's Fourier transform.
Tuning sequences:

    h       = (eta log n)^(-1/2)
    kappa_n = kappa / log(3 log(3 n))
    M_n     = log log(3 n) / h^2
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .ecf import DEFAULT_GRID_POINTS, EcfEvaluation, FrequencyGrid, ecf_grid
from .levy_model import MAX_MOMENT, LevyTriplet, smoothness_integral
from .quadrature import (
    constant_fourier_integral,
    paired_fourier_integral,
    paired_real_integral,
    resolved_grid,
)
from .simulate import IncrementSample, as_sample


@dataclass(frozen=True)
class EstimatorConfig:
    """Tuning constants of the estimator and its function class.

    ``eta`` defaults to 0.9 / (2 Sigma^2), just inside the admissible range
    (0, 1 / (2 Sigma^2)).  ``Lambda``, ``Gamma``, ``L`` and ``K`` only enter
    :func:`validate_class`.
    """

    Sigma: float = 1.0
    eta: Optional[float] = None
    Lambda: float = 10.0
    Gamma: float = 10.0
    kappa: float = 1.0
    beta: float = 2.0
    L: float = 100.0
    K: float = 1e8
    quadrature_points: int = DEFAULT_GRID_POINTS
    sup_grid_points: int = DEFAULT_GRID_POINTS

    def __post_init__(self):
        for name in ("Sigma", "Lambda", "Gamma", "kappa", "beta", "L", "K"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"config.{name} must be a positive finite number, got {value}")
        if self.eta is None:
            object.__setattr__(self, "eta", 0.9 / (2.0 * self.Sigma**2))
        bound = 1.0 / (2.0 * self.Sigma**2)
        if not 0 < self.eta < bound:
            raise ValueError(f"config.eta must lie in (0, {bound:.6g}) for Sigma={self.Sigma}, got {self.eta}")
        for name in ("quadrature_points", "sup_grid_points"):
            value = getattr(self, name)
            if int(value) != value or value < 2:
                raise ValueError(f"config.{name} must be an integer >= 2, got {value}")

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _check_n(n, minimum: int) -> int:
    if int(n) != n or n < minimum:
        raise ValueError(f"sample size must be an integer >= {minimum}, got {n}")
    return int(n)


def bandwidth(n: int, config: EstimatorConfig) -> float:
    n = _check_n(n, 2)
    return (config.eta * math.log(n)) ** -0.5


def kappa_n(n: int, config: EstimatorConfig) -> float:
    n = _check_n(n, 1)
    return config.kappa / math.log(3.0 * math.log(3.0 * n))


def truncation_level(n: int, config: EstimatorConfig) -> float:
    """M_n = log log(3n) / h^2."""
    h = bandwidth(n, config)
    return math.log(math.log(3.0 * _check_n(n, 2))) / h**2


def truncation_threshold(n: int, config: EstimatorConfig) -> float:
    """Lower bound on |phi_hat| defining the frequency set G_t."""
    h = bandwidth(n, config)
    return kappa_n(n, config) * math.exp(-config.Sigma**2 / (2.0 * h * h))


@dataclass(frozen=True)
class SmoothingKernelV:
    """v(t) = a t^(2m) + b t^(2m+2) on [-1, 1], zero outside."""

    a: Fraction
    b: Fraction
    m: int

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        t2m = t ** (2 * self.m)
        val = float(self.a) * t2m + float(self.b) * t2m * t * t
        return np.where(np.abs(t) <= 1.0, val, 0.0)

    def scaled(self, t, h: float):
        """v^h(t) = h^3 v(h t)."""
        return h**3 * self(h * np.asarray(t, dtype=float))


def build_kernel_v(beta: float) -> SmoothingKernelV:
    """Lowest-degree even polynomial kernel with int v = 0, int t^2 v = -2.

    The power m = ceil(beta / 2) makes v(t) = O(t^beta) at the origin.
    Coefficients are solved exactly in rationals.
    """
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    m = math.ceil(beta / 2)
    # int_{-1}^{1} t^p dt = 2 / (p + 1) for even p
    c00 = Fraction(2, 2 * m + 1)
    c01 = Fraction(2, 2 * m + 3)
    c11 = Fraction(2, 2 * m + 5)
    # [c00 c01; c01 c11] [a; b] = [0; -2]
    det = c00 * c11 - c01 * c01
    a = (0 * c11 - c01 * -2) / det
    b = (c00 * -2 - c01 * 0) / det
    return SmoothingKernelV(a, b, m)


@dataclass(frozen=True)
class RhoEstimate:
    x: float
    value: float
    value_positive: float
    sigma2_hat: float
    h: float
    kappa_n: float
    imag_residual: float
    truncation_fraction: float


def quadrature_grid(n: int, config: EstimatorConfig, x: float = 0.0) -> FrequencyGrid:
    """Grid over [-1/h, 1/h], refined until exp(-itx) is resolved."""
    return resolved_grid(1.0 / bandwidth(n, config), config.quadrature_points, x)


def _evaluation(sample: IncrementSample, grid: FrequencyGrid, evaluation: EcfEvaluation | None):
    if evaluation is not None and evaluation.grid == grid and evaluation.n == sample.n:
        return evaluation
    return ecf_grid(sample, grid)


def estimate_sigma2(sample, config: EstimatorConfig,
                    evaluation: EcfEvaluation | None = None) -> float:
    """Spectral estimator of sigma^2; may be negative."""
    sample = as_sample(sample)
    n = _check_n(sample.n, 2)
    h = bandwidth(n, config)
    M = truncation_level(n, config)
    grid = quadrature_grid(n, config)
    ev = _evaluation(sample, grid, evaluation)
    with np.errstate(divide="ignore"):
        log_mod = np.log(np.abs(ev.phi0))
    clipped = np.clip(log_mod, -M, M)
    kernel = build_kernel_v(config.beta)
    return paired_real_integral(clipped * kernel.scaled(grid.points, h), grid)


def _truncated_integrand(ev: EcfEvaluation, threshold: float):
    keep = np.abs(ev.phi0) >= threshold
    g = np.zeros(ev.phi0.shape, dtype=complex)
    p0, p1, p2 = ev.phi0[keep], ev.phi1[keep], ev.phi2[keep]
    ratio = p1 / p0
    g[keep] = ratio * ratio - p2 / p0
    return g, keep


def estimate_rho(sample, config: EstimatorConfig, x: float, sigma2_hat: float,
                 evaluation: EcfEvaluation | None = None) -> RhoEstimate:
    """Plug-in Levy density estimate at x != 0 with a given sigma^2 estimate."""
    x = float(x)
    if x == 0.0:
        raise ValueError("the Levy density estimator is undefined at x = 0")
    sample = as_sample(sample)
    n = _check_n(sample.n, 2)
    h = bandwidth(n, config)
    kn = kappa_n(n, config)
    grid = quadrature_grid(n, config, x)
    ev = _evaluation(sample, grid, evaluation)
    g, keep = _truncated_integrand(ev, truncation_threshold(n, config))
    total = paired_fourier_integral(g, grid, x)
    total -= sigma2_hat * constant_fourier_integral(grid.half_width, x)
    scale = 2.0 * math.pi * x * x
    value = total.real / scale
    return RhoEstimate(
        x=x,
        value=value,
        value_positive=max(value, 0.0),
        sigma2_hat=float(sigma2_hat),
        h=h,
        kappa_n=kn,
        imag_residual=abs(total.imag) / scale,
        truncation_fraction=float(1.0 - np.count_nonzero(keep) / keep.size),
    )


def estimate(sample, config: EstimatorConfig, xs: Iterable[float],
             sigma2_hat: float | None = None) -> tuple[float, list[RhoEstimate]]:
    """sigma^2 and rho estimates at several points, sharing ECF evaluations.

    ``sigma2_hat`` replaces the spectral estimate when given (e.g. the true
    value for oracle comparisons).
    """
    sample = as_sample(sample)
    xs = [float(x) for x in xs]
    if any(x == 0.0 for x in xs):
        raise ValueError("the Levy density estimator is undefined at x = 0")
    n = _check_n(sample.n, 2)
    cache: dict[FrequencyGrid, EcfEvaluation] = {}

    def evaluation_for(grid):
        if grid not in cache:
            cache[grid] = ecf_grid(sample, grid)
        return cache[grid]

    if sigma2_hat is None:
        sigma2_hat = estimate_sigma2(sample, config, evaluation_for(quadrature_grid(n, config)))
    results = [
        estimate_rho(sample, config, x, sigma2_hat, evaluation_for(quadrature_grid(n, config, x)))
        for x in xs
    ]
    return sigma2_hat, results


def validate_class(triplet: LevyTriplet, config: EstimatorConfig, warn: bool = False) -> list[str]:
    """Check the triplet against the class bounds held in ``config``.

    Returns a list of violated conditions (empty when the triplet belongs to
    the class).  Advisory only: the estimators never call this.
    """
    problems = []
    if not triplet.intensity <= config.Lambda:
        problems.append(f"intensity {triplet.intensity} exceeds Lambda={config.Lambda}")
    if not abs(triplet.gamma) <= config.Gamma:
        problems.append(f"|gamma|={abs(triplet.gamma)} exceeds Gamma={config.Gamma}")
    if not 0 < triplet.sigma <= config.Sigma:
        problems.append(f"sigma={triplet.sigma} outside (0, Sigma={config.Sigma}]")
    abs_m12 = triplet.jumps.moment(MAX_MOMENT)
    if not abs_m12 <= config.K:
        problems.append(f"12th jump moment {abs_m12:.6g} exceeds K={config.K}")
    smooth = smoothness_integral(triplet.jumps, config.beta)
    if not smooth <= config.L:
        problems.append(f"int |t|^beta |phi_f(t)| dt = {smooth:.6g} exceeds L={config.L}")
    if warn:
        for p in problems:
            warnings.warn(p, stacklevel=2)
    return problems
