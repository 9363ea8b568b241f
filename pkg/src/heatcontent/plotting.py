"""Figures for fits and verification reports (matplotlib, Agg backend).

matplotlib is imported lazily so the numerical modules never depend on it.
"""

import os


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:
        raise OSError("figures need matplotlib: pip install 'artifact[plot]'") from exc

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def plot_fit(samples, fit, path, title="Q(t) fit"):
    """Data and fitted series (top), relative residuals (bottom)."""
    import numpy as np

    plt = _pyplot()
    samples = sorted(samples, key=lambda s: s.t)
    t = np.array([s.t for s in samples])
    y = np.array([s.value for s in samples])
    model = fit.template.design(t) @ fit.coef
    fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(6.4, 6.0), sharex=True,
                                   gridspec_kw={"height_ratios": [2, 1]})
    ax0.plot(t, y, "o", ms=4, label="Q(t)")
    tt = np.logspace(np.log10(t[0]), np.log10(t[-1]), 200)
    ax0.plot(tt, fit.template.design(tt) @ fit.coef, "-", lw=1, label="fit")
    ax0.set_xscale("log")
    if np.all(y > 0):
        ax0.set_yscale("log")
    ax0.set_title(title)
    ax0.legend()
    rel = (y - model) / np.where(y != 0, np.abs(y), 1.0)
    ax1.plot(t, rel, "o-", ms=3)
    ax1.axhline(0.0, color="k", lw=0.5)
    ax1.set_xlabel("t")
    ax1.set_ylabel("relative residual")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_report(report, directory):
    """One figure per check that carries samples and a fit."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for i, check in enumerate(report.checks):
        if "samples" not in check.data or "fit" not in check.data:
            continue
        stem = "".join(ch if ch.isalnum() else "_" for ch in check.name).strip("_")
        path = os.path.join(directory, f"{i:02d}_{stem}.png")
        paths.append(plot_fit(check.data["samples"], check.data["fit"], path, check.name))
    return paths
