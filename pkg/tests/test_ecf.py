import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from levydens.ecf import FrequencyGrid, ecf, ecf_grid, ecf_points, sup_deviation
from levydens.levy_model import Gaussian, Laplace, LevyTriplet, cf, cf_derivatives
from levydens.simulate import IncrementSample, sample_increments


def brute_force(values, t, k):
    """Direct definition in exact-ish arithmetic with math.fsum."""
    terms = [(1j * z) ** k * complex(math.cos(t * z), math.sin(t * z)) for z in values]
    n = len(values)
    return complex(math.fsum(c.real for c in terms) / n, math.fsum(c.imag for c in terms) / n)


def test_ecf_examples():
    assert ecf([0.0], 3.7, 0) == 1 + 0j
    assert abs(ecf([1.0, -1.0], math.pi, 0) - (-1 + 0j)) < 1e-15
    assert ecf([2.0], 0.0, 1) == 2j


def test_ecf_bad_order():
    with pytest.raises(ValueError):
        ecf([1.0], 0.0, 3)


def test_grid_matches_pointwise(rng):
    for _ in range(50):
        n = int(rng.integers(1, 400))
        z = rng.normal(0, 3, n)
        grid = FrequencyGrid.symmetric(float(rng.uniform(0.5, 10)), int(rng.integers(8, 300)))
        ev = ecf_grid(z, grid)
        i = int(rng.integers(0, grid.size))
        k = int(rng.integers(0, 3))
        assert abs(ev.derivative(k)[i] - ecf(z, grid.points[i], k)) < 1e-12
        assert abs(ev.derivative(k)[i] - brute_force(z, grid.points[i], k)) < 1e-12


def test_phi1_matches_finite_difference_of_phi0(rng):
    z = rng.normal(0, 1.5, 2000)
    grid = FrequencyGrid.symmetric(4.0, 4000)
    ev = ecf_grid(z, grid)
    fd = (ev.phi0[2:] - ev.phi0[:-2]) / (2 * grid.spacing)
    # O(dt^2) with constant E|Z|^3 / 6
    bound = grid.spacing**2 * np.mean(np.abs(z) ** 3) / 6
    assert np.max(np.abs(fd - ev.phi1[1:-1])) <= bound * 1.01


def test_zero_sample():
    ev = ecf_grid(np.zeros(10), FrequencyGrid.symmetric(3.0, 64))
    assert np.all(ev.phi0 == 1.0)
    assert np.all(ev.phi1 == 0.0)
    assert np.all(ev.phi2 == 0.0)


@settings(max_examples=40, deadline=None)
@given(z=arrays(np.float64, st.integers(1, 200), elements=st.floats(-10, 10)),
       T=st.floats(0.1, 30), half=st.integers(1, 200))
def test_ecf_invariants(z, T, half):
    grid = FrequencyGrid.symmetric(T, 2 * half)
    ev = ecf_grid(z, grid)
    K = grid.half_count
    assert ev.phi0[K] == 1.0
    assert np.all(np.abs(ev.phi0) <= 1.0 + 1e-14)
    for k, phi in enumerate((ev.phi0, ev.phi1, ev.phi2)):
        assert np.max(np.abs(phi[::-1] - (-1) ** k * np.conj(phi))) <= 1e-12


def test_grid_contract():
    g = FrequencyGrid.symmetric(2.0, 4096)
    assert g.size == 4097
    assert g.points[g.half_count] == 0.0
    assert g.points[0] == -2.0 and g.points[-1] == 2.0
    assert np.max(np.abs(np.diff(g.points) - g.spacing)) < 1e-12
    assert FrequencyGrid.from_points(g.points) == g
    with pytest.raises(ValueError):
        FrequencyGrid.from_points([0.0, 1.0, 3.0])
    with pytest.raises(ValueError):
        FrequencyGrid.from_points([-1.0, 0.0, 1.0, 2.0])


def test_sup_deviation_single_zero():
    tr = LevyTriplet(0.0, 1.0, 1.0, Gaussian())
    grid = FrequencyGrid.symmetric(3.0, 100)
    expected = np.max(np.abs(1.0 - cf(tr, grid.points)))
    assert sup_deviation(IncrementSample(np.zeros(1)), tr, grid, 0) == pytest.approx(expected, abs=1e-15)


def test_sup_deviation_rate_at_h03():
    tr = LevyTriplet(0.0, 0.5, 1.0, Gaussian())
    h, n = 0.3, 10**5
    grid = FrequencyGrid.symmetric(1 / h, 4096)
    s = sample_increments(tr, n, 2024)
    assert sup_deviation(s, tr, grid, 0) <= 10 / (h * math.sqrt(n))


def test_sup_deviation_wrong_model_stays_away():
    truth = LevyTriplet(0.0, 0.5, 1.0, Gaussian())
    other = LevyTriplet(0.0, 0.5, 1.0, Laplace(1.0, 0.0))
    grid = FrequencyGrid.symmetric(3.0, 512)
    gap = np.max(np.abs(cf(truth, grid.points) - cf(other, grid.points)))
    devs = [sup_deviation(sample_increments(truth, n, 5), other, grid, 0) for n in (10**3, 10**4, 10**5)]
    assert min(devs) > 0.5 * gap
    assert abs(devs[-1] - gap) < 0.05


def test_derivative_deviation_uses_cf_derivatives():
    tr = LevyTriplet(0.2, 0.5, 1.0, Laplace(0.5, 0.0))
    grid = FrequencyGrid.symmetric(2.0, 256)
    s = sample_increments(tr, 5000, 1)
    ev = ecf_grid(s, grid)
    for k in range(3):
        direct = np.max(np.abs(ev.derivative(k) - cf_derivatives(tr, grid.points)[k]))
        assert sup_deviation(s, tr, grid, k) == direct


def test_ecf_points_shape():
    out = ecf_points([1.0, 2.0], [0.0, 1.0, 2.0])
    assert out.shape == (3, 3)
    assert out[0, 0] == 1.0


def test_csv_export(tmp_path):
    ev = ecf_grid(np.array([0.5, -0.25]), FrequencyGrid.symmetric(1.0, 4))
    p = ev.to_csv(tmp_path / "ecf.csv")
    lines = p.read_text().splitlines()
    assert lines[0] == "t,re_phi0,im_phi0,re_phi1,im_phi1,re_phi2,im_phi2"
    assert len(lines) == 1 + 5
    t, re0, im0 = (float(v) for v in lines[3].split(",")[:3])
    assert (t, re0, im0) == (0.0, 1.0, 0.0)
