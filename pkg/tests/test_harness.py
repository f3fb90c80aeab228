import math
import warnings

import numpy as np
import pytest

from levydens.estimator import EstimatorConfig
from levydens.harness import (
    AGG_FIELDS,
    ROW_FIELDS,
    Scenario,
    ScenarioError,
    aggregate_rows,
    aggregates_path,
    load_scenario,
    loglog_slope,
    parse_scenario,
    read_report,
    run_mse_experiment,
    run_scaling_experiment,
    write_report,
    write_scaling_report,
    write_scenario,
)
from levydens.levy_model import Gaussian, Laplace, LevyTriplet
from levydens.simulate import derive_seed

SCENARIO_TEXT = """\
# small Gaussian scenario
id = small
master_seed = 11
replicates = 3
n_values = 200,400
x_values = 0.5,1.0
triplet.gamma = 0.0
triplet.sigma = 0.5
triplet.intensity = 1.0
triplet.jump.family = gaussian
triplet.jump.params = 0,1
config.Sigma = 1.0
config.eta = 0.45
config.quadrature_points = 512
"""


@pytest.fixture
def small():
    return parse_scenario(SCENARIO_TEXT)


def test_parse(small):
    assert small.id == "small"
    assert small.n_values == (200, 400)
    assert small.x_values == (0.5, 1.0)
    assert small.triplet == LevyTriplet(0.0, 0.5, 1.0, Gaussian(0.0, 1.0))
    assert small.config == EstimatorConfig(Sigma=1.0, eta=0.45, quadrature_points=512)
    assert small.seed(200, 2) == derive_seed(11, 200, 2)


def test_round_trip(tmp_path, small):
    path = write_scenario(small, tmp_path / "small.cfg")
    assert load_scenario(path) == small
    sc = Scenario("lap", LevyTriplet(0.1, 0.3, 2.0, Laplace(0.5, -0.25)),
                  EstimatorConfig(kappa=2.5, beta=4.0), (1000,), 7, (-1.5, 2.0), 2**63 + 5, 0.3)
    assert load_scenario(write_scenario(sc, tmp_path / "lap.cfg")) == sc


def test_missing_key_named():
    text = "\n".join(l for l in SCENARIO_TEXT.splitlines() if not l.startswith("triplet.sigma"))
    with pytest.raises(ScenarioError, match="triplet.sigma"):
        parse_scenario(text)


def test_unknown_key_warns(small):
    with pytest.warns(UserWarning, match="future.option"):
        sc = parse_scenario(SCENARIO_TEXT + "future.option = 3\n")
    assert sc == small


def test_bad_values_named():
    with pytest.raises(ScenarioError, match="replicates"):
        parse_scenario(SCENARIO_TEXT.replace("replicates = 3", "replicates = three"))
    with pytest.raises(ScenarioError, match="eta"):
        parse_scenario(SCENARIO_TEXT.replace("config.eta = 0.45", "config.eta = 0.6"))
    with pytest.raises(ScenarioError, match="line"):
        parse_scenario(SCENARIO_TEXT + "no equals sign\n")
    with pytest.raises(ScenarioError):
        parse_scenario(SCENARIO_TEXT.replace("x_values = 0.5,1.0", "x_values = 0.0"))
    with pytest.raises(ScenarioError):
        parse_scenario(SCENARIO_TEXT.replace("n_values = 200,400", "n_values = 1"))


def test_report_reproducible(small):
    a = run_mse_experiment(small)
    b = run_mse_experiment(small)
    assert a.rows == b.rows and a.aggregates == b.aggregates
    assert len(a.rows) == 2 * 3 * 2


def test_report_independent_of_order_and_threads(small, tmp_path):
    ref = run_mse_experiment(small)
    tasks = len(small.n_values) * small.replicates
    order = list(np.random.default_rng(3).permutation(tasks))
    perm = run_mse_experiment(small, order=order)
    threaded = run_mse_experiment(small, threads=3)
    paths = []
    for i, rep in enumerate((ref, perm, threaded)):
        paths.append(write_report(rep, tmp_path / f"r{i}.csv"))
    for rows, agg in paths[1:]:
        assert rows.read_bytes() == paths[0][0].read_bytes()
        assert agg.read_bytes() == paths[0][1].read_bytes()


def test_rows_sorted_and_consistent(small):
    rep = run_mse_experiment(small)
    keys = [(r.n, r.replicate, r.x) for r in rep.rows]
    assert keys == sorted(keys)
    for r in rep.rows:
        assert r.sq_err == (r.rho_hat - r.rho_true) ** 2
        assert r.sq_err_plus <= r.sq_err
        assert r.rho_plus == max(r.rho_hat, 0.0)
        assert r.rho_true == pytest.approx(math.exp(-0.5 * r.x**2) / math.sqrt(2 * math.pi), rel=1e-12)
        assert r.seed == small.seed(r.n, r.replicate)
        assert r.imag_residual <= 1e-8 * (1 + abs(r.rho_hat))
    # sigma2_hat shared by all x of one replicate
    by_rep = {}
    for r in rep.rows:
        by_rep.setdefault((r.n, r.replicate), set()).add(r.sigma2_hat)
    assert all(len(v) == 1 for v in by_rep.values())


def test_aggregates_match_rows(small):
    rep = run_mse_experiment(small)
    for a in rep.aggregates:
        grp = [r for r in rep.rows if r.n == a.n and r.x == a.x]
        sq = [r.sq_err for r in grp]
        mean = math.fsum(sq) / len(sq)
        var = math.fsum((s - mean) ** 2 for s in sq) / (len(sq) - 1)
        assert a.mean_sq_err == pytest.approx(mean, abs=1e-12)
        assert a.mean_sq_err_plus == pytest.approx(math.fsum(r.sq_err_plus for r in grp) / len(grp), abs=1e-12)
        assert a.mc_std_err == pytest.approx(math.sqrt(var / len(sq)), abs=1e-12)


def test_single_replicate_std_err_nan(small):
    rep = run_mse_experiment(Scenario("one", small.triplet, small.config, (200,), 1))
    assert math.isnan(rep.aggregates[0].mc_std_err)


def test_write_read_report(small, tmp_path):
    rep = run_mse_experiment(small)
    rows_path, agg_path = write_report(rep, tmp_path / "rep.csv", svg=tmp_path / "mse.svg")
    assert agg_path == aggregates_path(rows_path) == tmp_path / "rep.agg.csv"
    assert rows_path.read_text().splitlines()[0] == ",".join(ROW_FIELDS)
    assert agg_path.read_text().splitlines()[0] == ",".join(AGG_FIELDS)
    back = read_report(rows_path)
    assert len(back.rows) == len(rep.rows)
    for r, b in zip(rep.rows, back.rows):
        assert (b.n, b.replicate, b.x, b.seed) == (r.n, r.replicate, r.x, r.seed)
        assert b.rho_hat == pytest.approx(r.rho_hat, rel=1e-11, abs=1e-300)
    # aggregates recomputed from the 12-digit rows agree with the stored ones
    for a, b in zip(aggregate_rows(back.rows), back.aggregates):
        assert a.mean_sq_err == pytest.approx(b.mean_sq_err, rel=1e-10)
    svg = (tmp_path / "mse.svg").read_text()
    assert svg.lstrip().startswith("<?xml") and "<svg" in svg


def test_svg_deterministic(small, tmp_path):
    rep = run_mse_experiment(small)
    write_report(rep, tmp_path / "a.csv", svg=tmp_path / "a.svg")
    write_report(rep, tmp_path / "b.csv", svg=tmp_path / "b.svg")
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()


def test_experiment_error_has_context(small, monkeypatch):
    import levydens.harness as harness

    def boom(*a, **k):
        raise FloatingPointError("bad")

    monkeypatch.setattr(harness, "estimate", boom)
    with pytest.raises(harness.ExperimentError, match=r"n=200, replicate=0"):
        run_mse_experiment(small)


def test_loglog_slope_exact():
    n = [10.0, 100.0, 1000.0]
    assert loglog_slope(n, [x**-0.5 for x in n]) == pytest.approx(-0.5, abs=1e-12)


def scaling_scenario(n_values, triplet=None, reps=5):
    triplet = triplet or LevyTriplet(0.0, 0.5, 1.0, Gaussian(0.0, 1.0))
    return Scenario("sc", triplet, EstimatorConfig(sup_grid_points=512), n_values, reps, (1.0,), 3, 0.5)


def test_scaling_doubling_n_shrinks():
    # doubling n cuts the median by ~1/sqrt(2); 5 replicates are too few to
    # resolve that reliably, 20 are enough
    a = run_scaling_experiment(scaling_scenario((500, 2000), reps=20))
    b = run_scaling_experiment(scaling_scenario((1000, 4000), reps=20))
    assert all(mb < ma for ma, mb in zip(a.medians, b.medians))
    assert a.slope < 0
    assert a.h_values == [0.5, 0.5]


def test_scaling_k2_dominates_for_heavy_moments():
    heavy = LevyTriplet(0.0, 1.0, 3.0, Laplace(2.0, 0.0))
    r0 = run_scaling_experiment(scaling_scenario((1000, 4000), heavy), k=0)
    r2 = run_scaling_experiment(scaling_scenario((1000, 4000), heavy), k=2)
    assert all(m2 >= m0 for m0, m2 in zip(r0.medians, r2.medians))


def test_scaling_report_files(tmp_path):
    rep = run_scaling_experiment(scaling_scenario((300, 900), reps=3), threads=2)
    again = run_scaling_experiment(scaling_scenario((300, 900), reps=3))
    assert rep.medians == again.medians
    rows, agg = write_scaling_report(rep, tmp_path / "s.csv", svg=tmp_path / "s.svg")
    assert rows.read_text().splitlines()[0] == "scenario_id,k,n,h,median_sup_deviation"
    assert agg.read_text().splitlines() == ["scenario_id,k,slope", f"sc,0,{rep.slope:.12g}"]
    assert (tmp_path / "s.svg").stat().st_size > 0


def test_scaling_default_h_is_bandwidth():
    sc = scaling_scenario((300, 900), reps=1)
    sc = Scenario(sc.id, sc.triplet, sc.config, sc.n_values, 1)
    from levydens.estimator import bandwidth

    rep = run_scaling_experiment(sc)
    assert rep.h_values == [bandwidth(n, sc.config) for n in sc.n_values]


def test_no_warnings_on_clean_parse():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        parse_scenario(SCENARIO_TEXT)
