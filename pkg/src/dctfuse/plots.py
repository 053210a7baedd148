"""Benchmark report figures.

Renders the same numbers the CSV carries as PNG charts: mean SSIM per
method, SSIM against blur radius, and per-block runtime. Uses the Agg
backend so it works headless.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def _bar(ax, labels, values, ylabel, fmt):
    xs = range(len(labels))
    ax.bar(xs, values, color="#4878a8", width=0.6)
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, rotation=20, ha="right")
    ax.set_ylabel(ylabel)
    for x, v in zip(xs, values):
        ax.annotate(fmt.format(v), (x, v), ha="center", va="bottom", fontsize=8)


def save_report_figures(report, outdir):
    """Write the three report charts into outdir; returns the written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    means = report.method_means()
    methods = list(means)
    written = []

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    _bar(ax, methods, [means[m][0] for m in methods], "mean SSIM", "{:.4f}")
    ax.set_ylim(0.0, 1.05)
    ax.set_title("Mean SSIM vs ground truth")
    fig.tight_layout()
    path = outdir / "ssim_by_method.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for method in methods:
        pairs = report.radius_means(method)
        ax.plot(
            [r for r, _ in pairs],
            [s for _, s in pairs],
            marker="o",
            label=method,
        )
    ax.set_xlabel("blur radius (pixels)")
    ax.set_ylabel("mean SSIM")
    ax.set_title("SSIM by blur radius")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = outdir / "ssim_by_radius.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    _bar(
        ax,
        methods,
        [means[m][1] for m in methods],
        "microseconds per 8x8 block",
        "{:.2f}",
    )
    ax.set_title("Method stage runtime")
    fig.tight_layout()
    path = outdir / "runtime_per_block.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    return written
