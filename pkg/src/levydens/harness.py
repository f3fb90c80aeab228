"""Monte Carlo studies of the estimators and their file formats.

Scenario files are flat ``key=value`` text with dotted keys and ``#``
comments::

    id=gauss_jumps
    master_seed=20240601
    replicates=100
    n_values=1000,10000,100000
    x_values=1.0
    triplet.gamma=0.0
    triplet.sigma=0.5
    triplet.intensity=1.0
    triplet.jump.family=gaussian
    triplet.jump.params=0.0,1.0
    config.Sigma=1.0
    config.kappa=1.0
    scaling.h=0.3          # optional: fixed bandwidth for sup-deviation studies

Replicate r at sample size n uses seed ``derive_seed(master_seed, n, r)``.
"""

from __future__ import annotations

import csv
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .ecf import FrequencyGrid, sup_deviation
from .estimator import EstimatorConfig, bandwidth, estimate, kappa_n
from .levy_model import LevyTriplet, levy_density, make_jumps
from .simulate import derive_seed, sample_increments

ROW_FIELDS = (
    "scenario_id", "n", "replicate", "x", "rho_hat", "rho_plus", "rho_true", "sq_err",
    "sq_err_plus", "sigma2_hat", "sigma2_true", "h", "kappa_n", "truncation_fraction", "seed",
)
AGG_FIELDS = ("scenario_id", "n", "x", "mean_sq_err", "mean_sq_err_plus", "mc_std_err")
SCALING_FIELDS = ("scenario_id", "k", "n", "h", "median_sup_deviation")
SCALING_AGG_FIELDS = ("scenario_id", "k", "slope")

_CONFIG_KEYS = {f.name for f in fields(EstimatorConfig)}
_INT_CONFIG_KEYS = {"quadrature_points", "sup_grid_points"}
_REQUIRED = (
    "master_seed", "replicates", "n_values",
    "triplet.gamma", "triplet.sigma", "triplet.intensity",
    "triplet.jump.family", "triplet.jump.params",
)
_KNOWN = set(_REQUIRED) | {"id", "x_values", "scaling.h"} | {f"config.{k}" for k in _CONFIG_KEYS}


class ScenarioError(ValueError):
    """A scenario file is malformed."""


class ExperimentError(RuntimeError):
    """An estimator failed inside a Monte Carlo run."""


def fmt(value) -> str:
    """12 significant digits for floats, plain text for everything else."""
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


@dataclass(frozen=True)
class Scenario:
    id: str
    triplet: LevyTriplet
    config: EstimatorConfig
    n_values: tuple[int, ...]
    replicates: int
    x_values: tuple[float, ...] = (1.0,)
    master_seed: int = 0
    scaling_h: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "x_values", tuple(float(x) for x in self.x_values))
        if int(self.replicates) != self.replicates or self.replicates < 1:
            raise ScenarioError(f"replicates must be >= 1, got {self.replicates}")
        if not self.n_values or any(n < 2 for n in self.n_values):
            raise ScenarioError(f"n_values must all be >= 2, got {self.n_values}")
        if any(x == 0.0 for x in self.x_values):
            raise ScenarioError("x_values must be nonzero")
        if self.scaling_h is not None and not self.scaling_h > 0:
            raise ScenarioError(f"scaling.h must be > 0, got {self.scaling_h}")

    def seed(self, n: int, replicate: int) -> int:
        return derive_seed(self.master_seed, n, replicate)


def _parse_list(key, text, kind):
    try:
        return [kind(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ScenarioError(f"{key}: cannot parse {text!r}") from None


def _parse_scalar(key, text, kind):
    try:
        return kind(text)
    except ValueError:
        raise ScenarioError(f"{key}: cannot parse {text!r}") from None


def parse_scenario(text: str, default_id: str = "scenario") -> Scenario:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KNOWN:
            warnings.warn(f"scenario: ignoring unknown key {key!r}", stacklevel=2)
            continue
        entries[key] = value
    for key in _REQUIRED:
        if key not in entries:
            raise ScenarioError(f"missing required key {key!r}")

    try:
        jumps = make_jumps(entries["triplet.jump.family"],
                           _parse_list("triplet.jump.params", entries["triplet.jump.params"], float))
        triplet = LevyTriplet(
            gamma=_parse_scalar("triplet.gamma", entries["triplet.gamma"], float),
            sigma=_parse_scalar("triplet.sigma", entries["triplet.sigma"], float),
            intensity=_parse_scalar("triplet.intensity", entries["triplet.intensity"], float),
            jumps=jumps,
        )
    except ScenarioError:
        raise
    except ValueError as exc:
        raise ScenarioError(f"triplet: {exc}") from None

    cfg = {}
    for name in _CONFIG_KEYS:
        key = f"config.{name}"
        if key in entries:
            cfg[name] = _parse_scalar(key, entries[key], int if name in _INT_CONFIG_KEYS else float)
    try:
        config = EstimatorConfig(**cfg)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None

    scaling_h = entries.get("scaling.h")
    return Scenario(
        id=entries.get("id", default_id),
        triplet=triplet,
        config=config,
        n_values=tuple(_parse_list("n_values", entries["n_values"], int)),
        replicates=_parse_scalar("replicates", entries["replicates"], int),
        x_values=tuple(_parse_list("x_values", entries.get("x_values", "1.0"), float)),
        master_seed=_parse_scalar("master_seed", entries["master_seed"], int),
        scaling_h=None if scaling_h is None else _parse_scalar("scaling.h", scaling_h, float),
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(encoding="utf-8"), default_id=path.stem)


def format_scenario(scenario: Scenario) -> str:
    tr = scenario.triplet
    lines = [
        f"id={scenario.id}",
        f"master_seed={scenario.master_seed}",
        f"replicates={scenario.replicates}",
        "n_values=" + ",".join(str(n) for n in scenario.n_values),
        "x_values=" + ",".join(repr(x) for x in scenario.x_values),
        f"triplet.gamma={tr.gamma!r}",
        f"triplet.sigma={tr.sigma!r}",
        f"triplet.intensity={tr.intensity!r}",
        f"triplet.jump.family={tr.jumps.family}",
        "triplet.jump.params=" + ",".join(repr(float(p)) for p in tr.jumps.params),
    ]
    for name, value in scenario.config.as_dict().items():
        lines.append(f"config.{name}={value!r}")
    if scenario.scaling_h is not None:
        lines.append(f"scaling.h={scenario.scaling_h!r}")
    return "\n".join(lines) + "\n"


def write_scenario(scenario: Scenario, path) -> Path:
    path = Path(path)
    path.write_text(format_scenario(scenario), encoding="utf-8")
    return path


@dataclass(frozen=True)
class MseRow:
    scenario_id: str
    n: int
    replicate: int
    x: float
    rho_hat: float
    rho_plus: float
    rho_true: float
    sq_err: float
    sq_err_plus: float
    sigma2_hat: float
    sigma2_true: float
    h: float
    kappa_n: float
    truncation_fraction: float
    seed: int
    imag_residual: float = field(default=0.0, compare=False)

    def cells(self) -> list[str]:
        return [fmt(getattr(self, f)) for f in ROW_FIELDS]


@dataclass(frozen=True)
class MseAggregate:
    scenario_id: str
    n: int
    x: float
    mean_sq_err: float
    mean_sq_err_plus: float
    mc_std_err: float

    def cells(self) -> list[str]:
        return [fmt(getattr(self, f)) for f in AGG_FIELDS]


@dataclass
class MseReport:
    rows: list[MseRow]
    aggregates: list[MseAggregate]

    def aggregate(self, n: int, x: float) -> MseAggregate:
        for a in self.aggregates:
            if a.n == n and a.x == x:
                return a
        raise KeyError((n, x))


def _mean_and_se(values: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(values))
    if values.size < 2:
        return mean, math.nan
    return mean, float(np.std(values, ddof=1) / math.sqrt(values.size))


def aggregate_rows(rows: list[MseRow]) -> list[MseAggregate]:
    groups: dict[tuple, list[MseRow]] = {}
    for r in rows:
        groups.setdefault((r.scenario_id, r.n, r.x), []).append(r)
    out = []
    for (sid, n, x), grp in sorted(groups.items(), key=lambda kv: (kv[0][1], kv[0][2])):
        sq = np.array([r.sq_err for r in grp])
        sqp = np.array([r.sq_err_plus for r in grp])
        mean, se = _mean_and_se(sq)
        out.append(MseAggregate(sid, n, x, mean, float(np.mean(sqp)), se))
    return out


def _map(func, tasks, threads: int):
    if threads <= 1:
        return [func(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, tasks))


def _replicate_rows(scenario: Scenario, n: int, replicate: int) -> list[MseRow]:
    seed = scenario.seed(n, replicate)
    sample = sample_increments(scenario.triplet, n, seed)
    try:
        sigma2_hat, estimates = estimate(sample, scenario.config, scenario.x_values)
    except Exception as exc:
        raise ExperimentError(f"scenario {scenario.id}, n={n}, replicate={replicate}: {exc}") from exc
    h = bandwidth(n, scenario.config)
    kn = kappa_n(n, scenario.config)
    rows = []
    for est in estimates:
        truth = float(levy_density(scenario.triplet, est.x))
        rows.append(MseRow(
            scenario_id=scenario.id, n=n, replicate=replicate, x=est.x,
            rho_hat=est.value, rho_plus=est.value_positive, rho_true=truth,
            sq_err=(est.value - truth) ** 2, sq_err_plus=(est.value_positive - truth) ** 2,
            sigma2_hat=sigma2_hat, sigma2_true=scenario.triplet.sigma2, h=h, kappa_n=kn,
            truncation_fraction=est.truncation_fraction, seed=seed,
            imag_residual=est.imag_residual,
        ))
    return rows


def run_mse_experiment(scenario: Scenario, threads: int = 1, order=None) -> MseReport:
    """Simulate, estimate and score every (n, replicate, x) of the scenario.

    ``order`` optionally permutes the task list (used to check that the
    report does not depend on execution order).
    """
    tasks = [(n, r) for n in scenario.n_values for r in range(scenario.replicates)]
    if order is not None:
        tasks = [tasks[i] for i in order]
    chunks = _map(lambda task: _replicate_rows(scenario, *task), tasks, threads)
    rows = sorted((row for chunk in chunks for row in chunk), key=lambda r: (r.n, r.replicate, r.x))
    return MseReport(rows, aggregate_rows(rows))


def sigma2_summary(report: MseReport) -> dict[int, dict[str, float]]:
    """Per-n mean, MSE and MSE standard error of the sigma^2 estimates."""
    seen: dict[int, dict[int, tuple[float, float]]] = {}
    for r in report.rows:
        seen.setdefault(r.n, {})[r.replicate] = (r.sigma2_hat, r.sigma2_true)
    out = {}
    for n, reps in sorted(seen.items()):
        vals = np.array([v for v, _ in reps.values()])
        truth = next(iter(reps.values()))[1]
        mse, se = _mean_and_se((vals - truth) ** 2)
        out[n] = {"mean": float(vals.mean()), "mse": mse, "mse_se": se, "replicates": vals.size}
    return out


def aggregates_path(path) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}.agg{path.suffix or '.csv'}")


def _write_csv(path: Path, header, rows) -> Path:
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def write_report(report: MseReport, path, svg=None) -> tuple[Path, Path]:
    """Write rows to ``path`` and aggregates next to it (``<stem>.agg.csv``)."""
    path = Path(path)
    rows_path = _write_csv(path, ROW_FIELDS, (r.cells() for r in report.rows))
    agg_path = _write_csv(aggregates_path(path), AGG_FIELDS, (a.cells() for a in report.aggregates))
    if svg is not None:
        from .plotting import plot_mse

        plot_mse(report.aggregates, svg)
    return rows_path, agg_path


def read_report(path) -> MseReport:
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != ROW_FIELDS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        rows = []
        for rec in reader:
            rows.append(MseRow(
                scenario_id=rec["scenario_id"], n=int(rec["n"]), replicate=int(rec["replicate"]),
                x=float(rec["x"]), rho_hat=float(rec["rho_hat"]), rho_plus=float(rec["rho_plus"]),
                rho_true=float(rec["rho_true"]), sq_err=float(rec["sq_err"]),
                sq_err_plus=float(rec["sq_err_plus"]), sigma2_hat=float(rec["sigma2_hat"]),
                sigma2_true=float(rec["sigma2_true"]), h=float(rec["h"]),
                kappa_n=float(rec["kappa_n"]), truncation_fraction=float(rec["truncation_fraction"]),
                seed=int(rec["seed"]),
            ))
    aggregates = []
    agg = aggregates_path(path)
    if agg.exists():
        with agg.open(encoding="utf-8", newline="") as fh:
            for rec in csv.DictReader(fh):
                aggregates.append(MseAggregate(
                    rec["scenario_id"], int(rec["n"]), float(rec["x"]), float(rec["mean_sq_err"]),
                    float(rec["mean_sq_err_plus"]), float(rec["mc_std_err"]),
                ))
    return MseReport(rows, aggregates)


@dataclass
class ScalingReport:
    scenario_id: str
    k: int
    n_values: list[int]
    h_values: list[float]
    medians: list[float]
    deviations: dict[int, list[float]]
    slope: float

    def rows(self) -> list[list[str]]:
        return [
            [self.scenario_id, str(self.k), str(n), fmt(h), fmt(m)]
            for n, h, m in zip(self.n_values, self.h_values, self.medians)
        ]


def loglog_slope(n_values, values) -> float:
    x = np.log(np.asarray(n_values, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    xc = x - x.mean()
    return float(np.sum(xc * (y - y.mean())) / np.sum(xc * xc))


def run_scaling_experiment(scenario: Scenario, k: int = 0, threads: int = 1,
                           h: float | None = None) -> ScalingReport:
    """Median sup-deviation of the k-th ECF derivative for each n.

    The sup runs over [-1/h, 1/h]; h is the argument, else ``scaling.h`` of
    the scenario, else the estimator bandwidth for each n.
    """
    if h is None:
        h = scenario.scaling_h

    def one(task):
        n, r = task
        hn = h if h is not None else bandwidth(n, scenario.config)
        grid = FrequencyGrid.symmetric(1.0 / hn, scenario.config.sup_grid_points)
        sample = sample_increments(scenario.triplet, n, scenario.seed(n, r))
        return sup_deviation(sample, scenario.triplet, grid, k)

    tasks = [(n, r) for n in scenario.n_values for r in range(scenario.replicates)]
    results = dict(zip(tasks, _map(one, tasks, threads)))
    deviations = {n: [results[(n, r)] for r in range(scenario.replicates)] for n in scenario.n_values}
    medians = [float(np.median(deviations[n])) for n in scenario.n_values]
    hs = [h if h is not None else bandwidth(n, scenario.config) for n in scenario.n_values]
    slope = loglog_slope(scenario.n_values, medians) if len(scenario.n_values) > 1 else math.nan
    return ScalingReport(scenario.id, k, list(scenario.n_values), hs, medians, deviations, slope)


def write_scaling_report(report: ScalingReport, path, svg=None) -> tuple[Path, Path]:
    path = Path(path)
    rows_path = _write_csv(path, SCALING_FIELDS, report.rows())
    agg_path = _write_csv(aggregates_path(path), SCALING_AGG_FIELDS,
                          [[report.scenario_id, str(report.k), fmt(report.slope)]])
    if svg is not None:
        from .plotting import plot_scaling

        plot_scaling(report, svg)
    return rows_path, agg_path
