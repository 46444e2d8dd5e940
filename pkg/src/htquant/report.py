"""Matplotlib figures written next to the CSV outputs of the CLI."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "figure.figsize": (6.4, 4.0),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.fontsize": 8,
    "legend.frameon": False,
}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def _mean_by(rows, key_fields, value):
    acc = defaultdict(list)
    for r in rows:
        v = r[value]
        if v is None or not np.isfinite(v):
            continue
        acc[tuple(r[k] for k in key_fields)].append(v)
    return {k: float(np.mean(v)) for k, v in acc.items()}


def sweep_figures(rows, out_dir) -> list:
    """Mean PSNR/SSIM against BPP, one curve per size for the proposed method.

    Baseline rows are drawn as a single dashed curve (averaged over sizes).
    """
    out = []
    with plt.rc_context(STYLE):
        for metric, label in (("psnr", "PSNR (dB)"), ("ssim", "SSIM")):
            fig, ax = plt.subplots()
            prop = _mean_by([r for r in rows if r["method"] == "proposed"], ("size", "bpp"), metric)
            for size in sorted({k[0] for k in prop}):
                pts = sorted((b, v) for (s, b), v in prop.items() if s == size)
                ax.plot(*zip(*pts), marker="o", label=f"proposed {size}x{size}")
            base = _mean_by([r for r in rows if r["method"] == "baseline"], ("bpp",), metric)
            if base:
                pts = sorted((k[0], v) for k, v in base.items())
                ax.plot(*zip(*pts), "k--", marker="s", label="baseline")
            ax.set_xlabel("bits per pixel")
            ax.set_ylabel(label)
            ax.legend()
            out.append(_save(fig, Path(out_dir) / f"sweep_{metric}_vs_bpp.png"))

        means = _mean_by(rows, ("config", "method"), "ssim")
        if means:
            fig, ax = plt.subplots()
            keys = sorted(means, key=lambda k: (k[1] != "baseline", k[0]))
            colors = ["0.5" if m == "baseline" else "C0" for _, m in keys]
            ax.bar([c for c, _ in keys], [means[k] for k in keys], color=colors)
            ax.set_ylabel("mean SSIM")
            ax.set_xlabel("bits per channel")
            out.append(_save(fig, Path(out_dir) / "sweep_ssim_by_config.png"))
    return out


def power_figure(tables: dict, out_path) -> Path:
    """Grouped bars of normalized power against resolution, one group per ADC kind."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        kinds = list(tables)
        bits = list(next(iter(tables.values())))
        width = 0.8 / max(len(kinds), 1)
        for i, kind in enumerate(kinds):
            xs = np.arange(len(bits)) + i * width
            ax.bar(xs, [tables[kind][b] for b in bits], width, label=kind)
        ax.set_xticks(np.arange(len(bits)) + width * (len(kinds) - 1) / 2)
        ax.set_xticklabels([str(b) for b in bits])
        ax.set_xlabel("ADC resolution N")
        ax.set_ylabel("power / power at 8 bits")
        ax.legend()
        return _save(fig, out_path)


def histogram_figure(report, out_path, bins: int = 20) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.hist(report.psnr_samples, bins=bins, color="C0", edgecolor="white")
        ax.axvline(report.ideal_psnr, color="k", linestyle="--", label="ideal circuit")
        ax.set_xlabel("PSNR (dB)")
        ax.set_ylabel("trials")
        ax.set_title(f"{report.trials} trials, {100 * report.mismatch_sigma:g}% mismatch, "
                     f"{report.opamp_gain_db:g} dB op-amp")
        ax.legend()
        return _save(fig, out_path)
