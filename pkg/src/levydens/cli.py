"""Command-line interface.

Exit codes: 0 success, 1 runtime or computation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from .estimator import EstimatorConfig, bandwidth, estimate, estimate_sigma2, truncation_level
from .harness import (
    fmt,
    load_scenario,
    run_mse_experiment,
    run_scaling_experiment,
    write_report,
    write_scaling_report,
)
from .levy_model import LevyTriplet, levy_density, make_jumps
from .oracle import invert_from_cf_full
from .simulate import load_increments, sample_increments, save_increments

ESTIMATE_HEADER = ("x", "rho_hat", "rho_plus", "sigma2_hat", "h", "kappa_n", "truncation_fraction")


class _Formatter(argparse.ArgumentDefaultsHelpFormatter):
    pass


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _x_list(text: str) -> list[float]:
    try:
        xs = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse x list {text!r}") from None
    if not xs:
        raise argparse.ArgumentTypeError("empty x list")
    if any(x == 0.0 for x in xs):
        raise argparse.ArgumentTypeError("the estimator is undefined at x = 0")
    return xs


def _jump(text: str):
    family, _, params = text.partition(":")
    try:
        return make_jumps(family, params.split(",") if params else [])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_triplet_flags(p, sigma=0.5):
    p.add_argument("--gamma", type=float, default=0.0, help="drift")
    p.add_argument("--sigma", type=float, default=sigma, help="diffusion standard deviation")
    p.add_argument("--intensity", type=float, default=1.0, help="jump intensity (total Levy mass)")
    p.add_argument("--jump", type=_jump, default="gaussian:0,1",
                   help="jump law: gaussian:MEAN,VAR | laplace:SCALE,LOC | uniform:LO,HI")


def _add_config_flags(p):
    g = p.add_argument_group("estimator configuration")
    g.add_argument("--Sigma", type=float, default=1.0, help="upper bound on sigma")
    g.add_argument("--eta", type=float, default=None,
                   help="bandwidth constant, h = (eta log n)^-1/2; default 0.9/(2 Sigma^2)")
    g.add_argument("--Lambda", type=float, default=10.0, help="upper bound on the jump intensity")
    g.add_argument("--Gamma", type=float, default=10.0, help="upper bound on |gamma|")
    g.add_argument("--kappa", type=float, default=1.0, help="truncation constant of kappa_n")
    g.add_argument("--beta", type=float, default=2.0, help="smoothness index of the kernel v")
    g.add_argument("--L", type=float, default=100.0, help="class constant L (validation only)")
    g.add_argument("--K", type=float, default=1e8, help="class constant K (validation only)")
    g.add_argument("--quadrature-points", type=_positive_int, default=4096,
                   help="trapezoid nodes on [-1/h, 1/h]")
    g.add_argument("--sup-grid-points", type=_positive_int, default=4096,
                   help="grid nodes for sup-deviation studies")


def _config_from(args, parser) -> EstimatorConfig:
    try:
        return EstimatorConfig(
            Sigma=args.Sigma, eta=args.eta, Lambda=args.Lambda, Gamma=args.Gamma,
            kappa=args.kappa, beta=args.beta, L=args.L, K=args.K,
            quadrature_points=args.quadrature_points, sup_grid_points=args.sup_grid_points,
        )
    except ValueError as exc:
        parser.error(str(exc))


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def command_simulate(args, parser) -> int:
    try:
        triplet = LevyTriplet(args.gamma, args.sigma, args.intensity, args.jump)
    except ValueError as exc:
        parser.error(str(exc))
    sample = sample_increments(triplet, args.n, args.seed)
    try:
        save_increments(sample, args.out, fmt=args.format)
    except OSError as exc:
        return _fail(f"cannot write {args.out}: {exc}")
    s = sample.summary()
    print(_csv_text(("n", "mean", "variance", "min", "max"),
                    [[s["n"], fmt(s["mean"]), fmt(s["variance"]), fmt(s["min"]), fmt(s["max"])]]), end="")
    return 0


def _load(path):
    try:
        return load_increments(path), None
    except (OSError, ValueError) as exc:
        return None, f"cannot read increments from {path}: {exc}"


def command_estimate(args, parser) -> int:
    config = _config_from(args, parser)
    sample, err = _load(args.data)
    if err:
        return _fail(err)
    if sample.n < 2:
        return _fail("at least two increments are needed")
    try:
        sigma2_hat, results = estimate(sample, config, args.x, sigma2_hat=args.sigma2)
    except Exception as exc:  # surfaced as a computation failure
        return _fail(str(exc))
    rows = [
        [fmt(r.x), fmt(r.value), fmt(r.value_positive), fmt(sigma2_hat), fmt(r.h),
         fmt(r.kappa_n), fmt(r.truncation_fraction)]
        for r in results
    ]
    text = _csv_text(ESTIMATE_HEADER, rows)
    print(text, end="")
    if args.csv:
        Path(args.csv).write_text(text, encoding="utf-8")
    return 0


def command_sigma2(args, parser) -> int:
    config = _config_from(args, parser)
    sample, err = _load(args.data)
    if err:
        return _fail(err)
    if sample.n < 2:
        return _fail("at least two increments are needed")
    value = estimate_sigma2(sample, config)
    print(_csv_text(("sigma2_hat", "h", "M_n", "n"),
                    [[fmt(value), fmt(bandwidth(sample.n, config)),
                      fmt(truncation_level(sample.n, config)), sample.n]]), end="")
    return 0


def command_oracle_check(args, parser) -> int:
    try:
        triplet = LevyTriplet(args.gamma, args.sigma, args.intensity, args.jump)
    except ValueError as exc:
        parser.error(str(exc))
    rows = []
    worst = 0.0
    for x in args.x:
        try:
            value, imag = invert_from_cf_full(triplet, x, args.cutoff, args.nodes)
        except Exception as exc:
            return _fail(str(exc))
        truth = float(levy_density(triplet, x))
        worst = max(worst, abs(value - truth))
        rows.append([fmt(x), fmt(value), fmt(truth), fmt(abs(value - truth)), fmt(imag)])
    print(_csv_text(("x", "inversion", "truth", "abs_err", "imag_residual"), rows), end="")
    if args.tol is not None and worst > args.tol:
        return _fail(f"max abs error {worst:.3g} exceeds tolerance {args.tol:g}")
    return 0


def command_bench(args, parser) -> int:
    path = Path(args.scenario)
    if not path.is_file():
        return _fail(f"scenario file not found: {path}")
    try:
        scenario = load_scenario(path)
    except (OSError, ValueError) as exc:
        return _fail(f"{path}: {exc}")
    try:
        if args.mode == "mse":
            report = run_mse_experiment(scenario, threads=args.threads)
            rows_path, agg_path = write_report(report, args.out, svg=args.svg)
            for a in report.aggregates:
                print(f"n={a.n} x={fmt(a.x)} mean_sq_err={fmt(a.mean_sq_err)} "
                      f"mean_sq_err_plus={fmt(a.mean_sq_err_plus)} mc_std_err={fmt(a.mc_std_err)}")
        else:
            report = run_scaling_experiment(scenario, k=args.k, threads=args.threads, h=args.h)
            rows_path, agg_path = write_scaling_report(report, args.out, svg=args.svg)
            for n, m in zip(report.n_values, report.medians):
                print(f"n={n} median_sup_deviation={fmt(m)}")
            print(f"slope={fmt(report.slope)}")
    except Exception as exc:
        return _fail(str(exc))
    print(f"wrote {rows_path} and {agg_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levydens",
        description="Nonparametric Levy density estimation for discretely observed Levy processes.",
        formatter_class=_Formatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate unit-time increments", formatter_class=_Formatter)
    _add_triplet_flags(p)
    p.add_argument("--n", type=_positive_int, required=True, help="number of increments")
    p.add_argument("--seed", type=_seed, default=0, help="64-bit seed")
    p.add_argument("--out", required=True, help="output increments file")
    p.add_argument("--format", choices=("txt", "csv"), default="txt", help="output format")
    p.set_defaults(func=command_simulate, parser=p)

    p = sub.add_parser("estimate", help="estimate the Levy density at points x",
                       formatter_class=_Formatter)
    p.add_argument("--data", required=True, help="increments file")
    p.add_argument("--x", type=_x_list, required=True, help="comma-separated nonzero points")
    p.add_argument("--sigma2", type=float, default=None,
                   help="use this sigma^2 instead of the spectral estimate")
    p.add_argument("--csv", default=None, help="also write the table to this file")
    _add_config_flags(p)
    p.set_defaults(func=command_estimate, parser=p)

    p = sub.add_parser("sigma2", help="estimate the diffusion coefficient", formatter_class=_Formatter)
    p.add_argument("--data", required=True, help="increments file")
    _add_config_flags(p)
    p.set_defaults(func=command_sigma2, parser=p)

    p = sub.add_parser("oracle-check", help="invert the analytic characteristic function",
                       formatter_class=_Formatter)
    _add_triplet_flags(p, sigma=0.3)
    p.add_argument("--x", type=_x_list, default=[0.5, 1.0, 2.0], help="comma-separated nonzero points")
    p.add_argument("--cutoff", type=float, default=40.0, help="frequency cutoff")
    p.add_argument("--nodes", type=_positive_int, default=2**15, help="quadrature nodes")
    p.add_argument("--tol", type=float, default=None, help="fail if any abs error exceeds this")
    p.set_defaults(func=command_oracle_check, parser=p)

    p = sub.add_parser("bench", help="run a Monte Carlo scenario", formatter_class=_Formatter)
    p.add_argument("--scenario", required=True, help="scenario config file")
    p.add_argument("--out", required=True, help="report CSV (aggregates go to <stem>.agg.csv)")
    p.add_argument("--mode", choices=("mse", "scaling"), default="mse", help="study type")
    p.add_argument("--k", type=int, choices=(0, 1, 2), default=0, help="derivative order (scaling)")
    p.add_argument("--h", type=float, default=None, help="fixed bandwidth (scaling)")
    p.add_argument("--threads", type=_positive_int, default=1, help="worker threads")
    p.add_argument("--svg", default=None, help="also render an SVG figure here")
    p.set_defaults(func=command_bench, parser=p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args, args.parser)


if __name__ == "__main__":
    sys.exit(main())
