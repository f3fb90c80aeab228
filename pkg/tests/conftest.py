import numpy as np
import pytest

from levydens.levy_model import Gaussian, Laplace, LevyTriplet, Uniform


@pytest.fixture
def std_gauss():
    return LevyTriplet(gamma=0.0, sigma=1.0, intensity=1.0, jumps=Gaussian(0.0, 1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1])):
            terminalreporter.write_line(line)


TRIPLETS = [
    LevyTriplet(0.0, 1.0, 1.0, Gaussian(0.0, 1.0)),
    LevyTriplet(1.0, 1.0, 2.0, Gaussian(0.5, 1.0)),
    LevyTriplet(-0.3, 0.3, 2.0, Laplace(1.0, 0.0)),
    LevyTriplet(0.2, 0.5, 1.5, Laplace(0.7, -0.4)),
    LevyTriplet(2.0, 0.0, 1.0, Uniform(-1.0, 1.0)),
    LevyTriplet(0.5, 0.8, 0.7, Uniform(-0.5, 2.0)),
]


# Monte Carlo scenario shared by the slow estimator tests and the acceptance
# suite: gamma=0, sigma=0.5, standard normal jumps at unit intensity.
MC_TRIPLET = LevyTriplet(0.0, 0.5, 1.0, Gaussian(0.0, 1.0))
MC_N_VALUES = (1000, 10000, 100000)
MC_REPLICATES = 100


def mc_scenario(triplet=MC_TRIPLET, n_values=MC_N_VALUES, replicates=MC_REPLICATES,
                scenario_id="mc", seed=20240601):
    from levydens.estimator import EstimatorConfig
    from levydens.harness import Scenario

    return Scenario(scenario_id, triplet, EstimatorConfig(Sigma=1.0, eta=0.45),
                    n_values, replicates, (1.0,), seed)


@pytest.fixture(scope="session")
def mc_run():
    """(report, elapsed seconds) for the shared Monte Carlo scenario."""
    import time

    from levydens.harness import run_mse_experiment

    start = time.perf_counter()
    report = run_mse_experiment(mc_scenario())
    return report, time.perf_counter() - start


# Noise-free versions of the estimators: the analytic characteristic function
# plugged into the same formulas, integrated by adaptive quadrature.  Written
# against the beta=2 kernel v(t) = 105/4 t^2 - 175/4 t^4 directly.

def _v2(s):
    return 105 / 4 * s**2 - 175 / 4 * s**4


def sigma2_functional(sigma, intensity, jump_var, h, M=np.inf):
    from scipy.integrate import quad

    def log_mod(t):
        val = -0.5 * sigma**2 * t * t + intensity * (np.exp(-0.5 * jump_var * t * t) - 1.0)
        return min(max(val, -M), M)

    # substitute s = h t: int log|phi(s/h)| v(s) ds, symmetric in s
    val, _ = quad(lambda s: 2 * log_mod(s / h) * _v2(s), 0.0, 1.0, epsabs=1e-13, limit=200)
    return h**2 * val


def rho_functional(sigma, intensity, h, x, sigma2_plug):
    """Noise-free rho_hat(x) for standard normal jumps, no truncation active."""
    from scipy.integrate import quad

    def g(t):
        # -psi''(t) = sigma^2 + intensity (1 - t^2) exp(-t^2/2)
        return np.cos(t * x) * (sigma**2 + intensity * (1 - t * t) * np.exp(-0.5 * t * t) - sigma2_plug)

    val, _ = quad(g, 0.0, 1.0 / h, epsabs=1e-13, limit=400)
    return 2 * val / (2 * np.pi * x * x)
