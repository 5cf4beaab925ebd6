"""Single-panel SVG figures for the report path."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["STYLE", "emit_svg", "lemma2_figure", "capacity_figure", "growth_figure"]

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "legend.framealpha": 0.6,
    "lines.linewidth": 1.4,
    "lines.markersize": 3.5,
    "axes.grid": True,
    "grid.alpha": 0.3,
    # fixed ids and no timestamp so identical inputs give identical files
    "svg.hashsalt": "beltrami-growth",
    "svg.fonttype": "none",
}


def emit_svg(path, x, series: dict, *, bounds: dict | None = None, logx: bool = False,
             logy: bool = False, zero_line: bool = False, hline: tuple | None = None, title: str = "",
             xlabel: str = "", ylabel: str = "") -> str:
    """Draw each entry of ``series`` (and ``bounds``, dashed) as a polyline against ``x``.

    Polylines carry SVG ids ``series-<i>`` and ``bound-<i>``; the optional zero
    line and ``hline=(y, label)`` reference line carry ``zero-line`` and
    ``reference-line``.
    """
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ValueError(f"refusing to plot {path}: empty series")
    path = os.fspath(path)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 3.4))
        for i, (label, y) in enumerate(series.items()):
            ax.plot(x, np.asarray(y, dtype=float), marker="o", label=label, gid=f"series-{i}")
        for i, (label, y) in enumerate((bounds or {}).items()):
            ax.plot(x, np.asarray(y, dtype=float), linestyle="--", label=label, gid=f"bound-{i}")
        if zero_line:
            ax.axhline(0.0, color="0.3", linewidth=0.8, gid="zero-line")
        if hline is not None:
            ax.axhline(hline[0], color="tab:red", linewidth=0.9, linestyle=":", label=hline[1],
                       gid="reference-line")
        if logx:
            ax.set_xscale("log")
        if logy:
            ax.set_yscale("log")
        ax.set_title(title)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.legend(loc="best")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path


def lemma2_figure(path, report) -> str:
    return emit_svg(path, report.radius_grid,
                    {"weighted integral": report.lhs, "margin": report.margin},
                    bounds={"C log log R": report.bound}, logx=True, zero_line=True,
                    title=f"shell-weighted integral vs bound (C = {report.constant.value:.4g})",
                    xlabel="R", ylabel="value")


def capacity_figure(path, report) -> str:
    cells = np.asarray(report.cells, dtype=float)
    bounds = {"4 pi / log(m(A)/m(C))": np.full(cells.shape, report.lower_bound)}
    hline = None if report.baseline is None else (report.baseline, "2 pi / log(r_A/r_C)")
    return emit_svg(path, cells, {"grid estimate": report.values}, bounds=bounds, logx=True,
                    hline=hline, title="grid capacity under refinement",
                    xlabel="cells per axis", ylabel="capacity")


def growth_figure(path, report) -> str:
    logR = np.log(report.radius_grid)
    spread = float(np.max(report.ratio) / max(np.min(report.ratio), 1e-300))
    return emit_svg(path, logR, {"max|f - f(z0)| / (log R)^(2 pi/C)": report.ratio},
                    hline=(report.l_f, "l_f"), logy=spread > 100,
                    title=f"growth ratio, {report.fixture} (2 pi/C = {report.C.exponent:.4g})",
                    xlabel="log R", ylabel="ratio")
