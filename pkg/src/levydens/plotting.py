"""SVG figures for Monte Carlo reports.

Figures are written with a fixed hash salt and no date metadata so the same
report always produces the same bytes.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.family": "serif",
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "svg.hashsalt": "levydens",
    "svg.fonttype": "none",
}


def fig_size(width_pt=345.0, fraction=1.0):
    inches_per_pt = 1 / 72.27
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    width = width_pt * fraction * inches_per_pt
    return (width, width * golden)


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_mse(aggregates, path) -> Path:
    """Mean squared error of rho_hat and rho_hat+ against n, log axes."""
    by_x: dict[float, list] = {}
    for a in aggregates:
        by_x.setdefault(a.x, []).append(a)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=fig_size())
        for x, aggs in sorted(by_x.items()):
            aggs = sorted(aggs, key=lambda a: a.n)
            ns = [a.n for a in aggs]
            ax.errorbar(ns, [a.mean_sq_err for a in aggs],
                        yerr=[0.0 if math.isnan(a.mc_std_err) else a.mc_std_err for a in aggs],
                        marker="o", capsize=2, label=f"x={x:g}")
            ax.plot(ns, [a.mean_sq_err_plus for a in aggs], ls="--", marker="x",
                    label=f"x={x:g}, positive part")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("n")
        ax.set_ylabel("mean squared error")
        ax.legend(frameon=False)
        fig.tight_layout()
        return _save(fig, path)


def plot_scaling(report, path) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=fig_size())
        ax.plot(report.n_values, report.medians, marker="o",
                label=f"k={report.k}, slope {report.slope:.3f}")
        ref = [report.medians[0] * (report.n_values[0] / n) ** 0.5 for n in report.n_values]
        ax.plot(report.n_values, ref, ls=":", color="grey", label="n^-1/2")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("n")
        ax.set_ylabel("median sup deviation")
        ax.legend(frameon=False)
        fig.tight_layout()
        return _save(fig, path)
