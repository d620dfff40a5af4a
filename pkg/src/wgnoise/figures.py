"""Figure rendering for the command-line report paths.

Every command that writes a delimited table can render a PNG next to it.
Rendering is deterministic given the data (no timestamps), so figure files
participate in byte-identical golden comparisons.  CSV remains the canonical
data interface; figures are a convenience view.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_study_figure(cosines, result, path) -> None:
    """Histogram of per-sample projection cosines with min/p01 markers."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.hist(cosines, bins=min(200, max(10, len(cosines) // 50 + 10)), color="#1f77b4")
    ax.axvline(result.min_cos, color="#d62728", linestyle="--", linewidth=1.2,
               label=f"min = {result.min_cos:.4f}")
    ax.axvline(result.p01_cos, color="#ff7f0e", linestyle=":", linewidth=1.2,
               label=f"p01 = {result.p01_cos:.4f}")
    ax.set_xlabel("cosine similarity to input")
    ax.set_ylabel("samples")
    ax.set_title(f"projection cosines, {result.sample_count} draws")
    ax.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def render_trajectory_figure(trajectories, path, cap: float | None = None) -> None:
    """Objective value and feasibility residual per iteration, one line per mode."""
    fig, (ax_val, ax_res) = plt.subplots(1, 2, figsize=(10.0, 4.2))
    for mode in sorted(trajectories):
        trajectory = trajectories[mode]
        iters = [p.iteration for p in trajectory.points]
        ax_val.plot(iters, [p.value for p in trajectory.points], label=mode)
        ax_res.semilogy(
            iters,
            np.maximum([p.max_residual for p in trajectory.points], 1e-18),
            label=mode,
        )
    if cap is not None:
        ax_val.axhline(cap, color="black", linestyle="--", linewidth=1.0,
                       label=f"feasible cap {cap:.3f}")
    ax_val.set_xlabel("iteration")
    ax_val.set_ylabel("objective value")
    ax_val.set_yscale("log")
    ax_val.legend()
    ax_res.set_xlabel("iteration")
    ax_res.set_ylabel("max feasibility residual")
    ax_res.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def render_bench_figure(report, path) -> None:
    """Median projection time against size, with an n log n reference line."""
    ns = np.array([p.n for p in report.points], dtype=float)
    totals = np.array([p.median_total_s for p in report.points])
    ffts = np.array([p.median_fft_s for p in report.points])
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.loglog(ns, totals, "o-", label="projection total")
    ax.loglog(ns, ffts, "s--", label="transform stages")
    ref = totals[0] * (ns * np.log(ns)) / (ns[0] * np.log(ns[0]))
    ax.loglog(ns, ref, ":", color="gray", label="n log n reference")
    ax.set_xlabel("latent length n")
    ax.set_ylabel("median seconds")
    ax.set_title(f"projection scaling, block size {report.block_size}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
