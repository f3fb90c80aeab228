"""Ground truth for the estimator pipeline.

:func:`invert_from_cf` evaluates the Levy density inversion formula with the
analytic characteristic function and the true sigma^2, on the same
quadrature routine the plug-in estimator uses.  Any difference between the
two is therefore sampling error plus the effect of the G_t truncation.
"""

from __future__ import annotations

import math

import numpy as np

from .ecf import FrequencyGrid, ecf_grid
from .levy_model import LevyTriplet, cf, cf_derivatives
from .quadrature import constant_fourier_integral, paired_fourier_integral, resolved_grid


def inversion_integrand(triplet: LevyTriplet, t) -> np.ndarray:
    """(phi'^2 - phi'' phi) / phi^2 from the analytic derivatives."""
    phi, phi1, phi2 = cf_derivatives(triplet, t)
    return (phi1 * phi1 - phi2 * phi) / (phi * phi)


def invert_from_cf_full(triplet: LevyTriplet, x: float, cutoff: float,
                        quadrature_points: int = 2**15, sigma2: float | None = None):
    """Return (value, imaginary residual) of the truncated inversion at x."""
    x = float(x)
    if x == 0.0:
        raise ValueError("the inversion formula is undefined at x = 0")
    if not cutoff > 0:
        raise ValueError(f"cutoff must be > 0, got {cutoff}")
    if sigma2 is None:
        sigma2 = triplet.sigma2
    grid = resolved_grid(cutoff, quadrature_points, x)
    # the analytic integrand carries the true sigma^2 as an additive constant;
    # cancel it before quadrature and integrate any offset exactly
    g = inversion_integrand(triplet, grid.points) - triplet.sigma2
    total = paired_fourier_integral(g, grid, x)
    total -= (sigma2 - triplet.sigma2) * constant_fourier_integral(grid.half_width, x)
    scale = 2.0 * math.pi * x * x
    return total.real / scale, abs(total.imag) / scale


def invert_from_cf(triplet: LevyTriplet, x: float, cutoff: float,
                   quadrature_points: int = 2**15) -> float:
    return invert_from_cf_full(triplet, x, cutoff, quadrature_points)[0]


def tail_bound(triplet: LevyTriplet, cutoff: float, upper: float = 1e4, points: int = 2**16) -> float:
    """(intensity / pi) int_{|t| > cutoff} |phi_f(t)| dt, integrated to ``upper``.

    Used as the scale by which doubling the cutoff may move the inversion.
    """
    t = np.linspace(cutoff, upper, points)
    mod = np.abs(triplet.jumps.cf_derivatives(t)[0])
    integral = float(np.sum(0.5 * (mod[1:] + mod[:-1]) * np.diff(t)))
    return 2.0 * triplet.intensity / math.pi * integral


def fd_check(triplet: LevyTriplet, t: float, delta: float) -> tuple[float, float]:
    """Errors of cf_derivatives against central differences of cf at t."""
    if not delta > 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    _, d1, d2 = cf_derivatives(triplet, t)
    up, mid, down = cf(triplet, t + delta), cf(triplet, t), cf(triplet, t - delta)
    fd1 = (up - down) / (2.0 * delta)
    fd2 = (up - 2.0 * mid + down) / (delta * delta)
    return float(abs(d1 - fd1)), float(abs(d2 - fd2))


def naive_integrand_growth(sample, cutoffs) -> list[tuple[float, float, float]]:
    """Diagnostics for the untruncated plug-in integrand.

    For each cutoff T returns (T, min |phi_hat| on [-T, T], max of
    |phi_hat'^2 / phi_hat^2 - phi_hat'' / phi_hat| on [-T, T]).  Without the
    G_t guard the second number blows up once |phi_hat| reaches the noise
    floor n^-1/2, which is why the estimator truncates.
    """
    out = []
    for T in cutoffs:
        ev = ecf_grid(sample, FrequencyGrid.symmetric(float(T)))
        ratio = ev.phi1 / ev.phi0
        g = ratio * ratio - ev.phi2 / ev.phi0
        out.append((float(T), float(np.min(np.abs(ev.phi0))), float(np.max(np.abs(g)))))
    return out
