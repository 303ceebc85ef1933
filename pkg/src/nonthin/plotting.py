"""SVG line charts for profiles, slopes and circle averages (headless)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "figure.figsize": (5.0, 3.4),
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "nonthin",  # stable element ids, so reruns are byte-identical
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def profile_figure(profile, path, reference=None, title=None):
    """``R`` against ``v_R`` (log-scaled ``R``), with an optional reference curve."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        R = np.asarray(profile.radii)
        ax.plot(R, profile.values, "o-", color="k", label="extrapolated in n")
        ax.plot(R, profile.raw_values, "s--", color="0.55", ms=4, label=f"degree {profile.degree}")
        if reference is not None:
            ax.plot(R, reference, ":", color="tab:blue", label="reference")
        ax.axhline(profile.extrapolated, color="tab:red", lw=0.8, label=f"fitted limit {profile.extrapolated:.3f}")
        ax.set_xscale("log", base=2)
        ax.set_xlabel("truncation radius R")
        ax.set_ylabel("V (natural log)")
        ax.set_title(title or profile.verdict)
        ax.legend(frameon=False)
        _save(fig, path)


def slope_figure(slope, path, title=None):
    """``log R`` against ``log C(E_R)`` with the fitted line."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        x = np.log(slope.radii)
        y = -np.asarray(slope.gammas)
        ax.plot(x, y, "o", color="k")
        b = np.polyfit(x, y, 1)[1]
        ax.plot(x, slope.slope * x + b, "-", color="tab:red", label=f"slope {slope.slope:.3f}")
        ax.set_xlabel("log R")
        ax.set_ylabel("log capacity")
        ax.set_title(title or f"threshold {slope.threshold:.3f}")
        ax.legend(frameon=False)
        _save(fig, path)


def series_figure(x, series: dict, path, xlabel="n", ylabel="value", title=None):
    """Generic multi-line chart, one line per entry of ``series``."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        for label, y in series.items():
            ax.plot(x, y, "-", label=str(label))
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if len(series) > 1:
            ax.legend(frameon=False)
        _save(fig, path)
