"""Finite-activity Levy triplets with closed-form characteristic functions.

The increment over unit time is

    Z = gamma + sigma * W + sum_{k=1}^{N} J_k,   N ~ Poisson(intensity),

so that its characteristic exponent is

    psi(t) = i gamma t - sigma^2 t^2 / 2 + intensity * (phi_f(t) - 1)

with phi_f the characteristic function of the jump size J.  All functions
accept scalars or numpy arrays for ``t`` and ``x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

ArrayLike = Union[float, np.ndarray]

MAX_MOMENT = 12


@dataclass(frozen=True)
class Gaussian:
    mean: float = 0.0
    variance: float = 1.0

    family = "gaussian"

    def __post_init__(self):
        if not self.variance > 0:
            raise ValueError(f"Gaussian variance must be > 0, got {self.variance}")

    @property
    def params(self) -> tuple[float, float]:
        return (self.mean, self.variance)

    def pdf(self, x: ArrayLike) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        return np.exp(-0.5 * (x - self.mean) ** 2 / self.variance) / math.sqrt(
            2.0 * math.pi * self.variance
        )

    def cf_derivatives(self, t: ArrayLike):
        t = np.asarray(t, dtype=float)
        d = 1j * self.mean - self.variance * t
        phi = np.exp(1j * self.mean * t - 0.5 * self.variance * t * t)
        return phi, phi * d, phi * (d * d - self.variance)

    def moment(self, k: int) -> float:
        # m_k = mu m_{k-1} + (k-1) s^2 m_{k-2}
        m_prev, m = 0.0, 1.0
        for j in range(1, k + 1):
            m_prev, m = m, self.mean * m + (j - 1) * self.variance * m_prev
        return m

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.mean + math.sqrt(self.variance) * rng.standard_normal(size)

    def support(self) -> tuple[float, float]:
        s = math.sqrt(self.variance)
        return (self.mean - 40.0 * s, self.mean + 40.0 * s)


@dataclass(frozen=True)
class Laplace:
    scale: float = 1.0
    location: float = 0.0

    family = "laplace"

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError(f"Laplace scale must be > 0, got {self.scale}")

    @property
    def params(self) -> tuple[float, float]:
        return (self.scale, self.location)

    def pdf(self, x: ArrayLike) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        return np.exp(-np.abs(x - self.location) / self.scale) / (2.0 * self.scale)

    def cf_derivatives(self, t: ArrayLike):
        t = np.asarray(t, dtype=float)
        b2 = self.scale**2
        mu = self.location
        g = 1.0 / (1.0 + b2 * t * t)
        g1 = -2.0 * b2 * t * g * g
        g2 = -2.0 * b2 * g * g + 8.0 * b2 * b2 * t * t * g**3
        shift = np.exp(1j * mu * t)
        phi = shift * g
        phi1 = shift * (1j * mu * g + g1)
        phi2 = shift * (-(mu**2) * g + 2j * mu * g1 + g2)
        return phi, phi1, phi2

    def moment(self, k: int) -> float:
        # central moments are j! b^j for even j, zero for odd j
        total = 0.0
        for j in range(0, k + 1, 2):
            total += math.comb(k, j) * math.factorial(j) * self.scale**j * self.location ** (k - j)
        return total

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.laplace(self.location, self.scale, size)

    def support(self) -> tuple[float, float]:
        return (self.location - 80.0 * self.scale, self.location + 80.0 * self.scale)


def _sinc_derivatives(y: np.ndarray):
    """sin(y)/y and its first two derivatives, stable near y = 0."""
    y = np.asarray(y, dtype=float)
    s0 = np.empty_like(y)
    s1 = np.empty_like(y)
    s2 = np.empty_like(y)
    small = np.abs(y) < 0.5
    big = ~small
    yb = y[big]
    sn, cs = np.sin(yb), np.cos(yb)
    s0[big] = sn / yb
    s1[big] = (yb * cs - sn) / yb**2
    s2[big] = ((2.0 - yb * yb) * sn - 2.0 * yb * cs) / yb**3
    # sin(y)/y = sum_k (-1)^k y^(2k) / (2k+1)!, differentiated termwise
    ys = y[small]
    a0 = np.zeros_like(ys)
    a1 = np.zeros_like(ys)
    a2 = np.zeros_like(ys)
    for k in range(12):
        c = (-1.0) ** k / math.factorial(2 * k + 1)
        p = 2 * k
        a0 += c * ys**p
        if p >= 1:
            a1 += c * p * ys ** (p - 1)
        if p >= 2:
            a2 += c * p * (p - 1) * ys ** (p - 2)
    s0[small], s1[small], s2[small] = a0, a1, a2
    return s0, s1, s2


@dataclass(frozen=True)
class Uniform:
    lower: float = -1.0
    upper: float = 1.0

    family = "uniform"

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"Uniform needs lower < upper, got ({self.lower}, {self.upper})")

    @property
    def params(self) -> tuple[float, float]:
        return (self.lower, self.upper)

    def pdf(self, x: ArrayLike) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        inside = (x >= self.lower) & (x <= self.upper)
        return np.where(inside, 1.0 / (self.upper - self.lower), 0.0)

    def cf_derivatives(self, t: ArrayLike):
        t = np.asarray(t, dtype=float)
        c = 0.5 * (self.lower + self.upper)
        a = 0.5 * (self.upper - self.lower)
        s0, s1, s2 = _sinc_derivatives(a * t)
        shift = np.exp(1j * c * t)
        phi = shift * s0
        phi1 = shift * (1j * c * s0 + a * s1)
        phi2 = shift * (-(c**2) * s0 + 2j * c * a * s1 + a * a * s2)
        return phi, phi1, phi2

    def moment(self, k: int) -> float:
        lo, hi = self.lower, self.upper
        return (hi ** (k + 1) - lo ** (k + 1)) / ((k + 1) * (hi - lo))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(self.lower, self.upper, size)

    def support(self) -> tuple[float, float]:
        return (self.lower, self.upper)


JumpFamily = Union[Gaussian, Laplace, Uniform]

FAMILIES = {"gaussian": Gaussian, "laplace": Laplace, "uniform": Uniform}


def make_jumps(family: str, params) -> JumpFamily:
    """Build a jump family from its name and positional parameters.

    Parameter order: gaussian(mean, variance), laplace(scale, location),
    uniform(lower, upper).
    """
    try:
        cls = FAMILIES[family.strip().lower()]
    except KeyError:
        raise ValueError(
            f"unknown jump family {family!r}; expected one of {sorted(FAMILIES)}"
        ) from None
    params = [float(p) for p in params]
    if len(params) != 2:
        raise ValueError(f"{family} jumps take 2 parameters, got {len(params)}")
    return cls(*params)


def jump_cf(jumps: JumpFamily, t: ArrayLike):
    return jumps.cf_derivatives(t)[0]


@dataclass(frozen=True)
class LevyTriplet:
    """Drift, diffusion standard deviation, jump intensity and jump law."""

    gamma: float
    sigma: float
    intensity: float
    jumps: JumpFamily

    def __post_init__(self):
        if not self.intensity > 0:
            raise ValueError(f"intensity must be > 0, got {self.intensity}")
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")

    @property
    def sigma2(self) -> float:
        return self.sigma * self.sigma

    @property
    def label(self) -> str:
        p = ",".join(f"{v:g}" for v in self.jumps.params)
        return (
            f"gamma={self.gamma:g};sigma={self.sigma:g};intensity={self.intensity:g};"
            f"jump={self.jumps.family}:{p}"
        )

    def mean(self) -> float:
        return self.gamma + self.intensity * self.jumps.moment(1)

    def variance(self) -> float:
        return self.sigma2 + self.intensity * self.jumps.moment(2)


def cf_exponent(triplet: LevyTriplet, t: ArrayLike):
    t = np.asarray(t, dtype=float)
    phi_f = jump_cf(triplet.jumps, t)
    return 1j * triplet.gamma * t - 0.5 * triplet.sigma2 * t * t + triplet.intensity * (phi_f - 1.0)


def cf(triplet: LevyTriplet, t: ArrayLike):
    return np.exp(cf_exponent(triplet, t))


def exponent_derivatives(triplet: LevyTriplet, t: ArrayLike):
    """(psi, psi', psi'') of the characteristic exponent."""
    t = np.asarray(t, dtype=float)
    f0, f1, f2 = triplet.jumps.cf_derivatives(t)
    lam = triplet.intensity
    psi = 1j * triplet.gamma * t - 0.5 * triplet.sigma2 * t * t + lam * (f0 - 1.0)
    psi1 = 1j * triplet.gamma - triplet.sigma2 * t + lam * f1
    psi2 = -triplet.sigma2 + lam * f2
    return psi, psi1, psi2


def cf_derivatives(triplet: LevyTriplet, t: ArrayLike):
    """Return (phi, phi', phi'') of the increment characteristic function."""
    psi, psi1, psi2 = exponent_derivatives(triplet, t)
    phi = np.exp(psi)
    return phi, phi * psi1, phi * (psi2 + psi1 * psi1)


def levy_density(triplet: LevyTriplet, x: ArrayLike) -> ArrayLike:
    return triplet.intensity * triplet.jumps.pdf(x)


def cf_modulus_lower_bound(triplet: LevyTriplet, t: ArrayLike):
    """exp(-2 intensity - sigma^2 t^2 / 2), a lower bound on |cf(t)|."""
    t = np.asarray(t, dtype=float)
    return np.exp(-2.0 * triplet.intensity - 0.5 * triplet.sigma2 * t * t)


def smoothness_integral(jumps: JumpFamily, beta: float) -> float:
    """int |t|^beta |phi_f(t)| dt, infinite when the integral diverges."""
    if isinstance(jumps, Gaussian):
        a = 0.5 * jumps.variance
        return math.gamma(0.5 * (beta + 1.0)) / a ** (0.5 * (beta + 1.0))
    if isinstance(jumps, Laplace):
        if beta >= 1.0:
            return math.inf
        b = jumps.scale
        return math.pi / (b ** (beta + 1.0) * math.cos(0.5 * math.pi * beta))
    # |sin(a t) / (a t)| decays like 1/t
    return math.inf
