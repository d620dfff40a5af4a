"""Projection timing harness: medians per size, FFT share, doubling ratios.

The projection splits into two transforms (O(n log n)) and the blockwise
solve (O(n log B)); both stages are timed separately so the report can show
how much of the cost the transforms carry.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .blocks import BlockLayout, project_block_array
from .errors import ValidationError
from .feasible import project_to_feasible
from .spectral import from_compact, to_compact


@dataclass(frozen=True)
class BenchPoint:
    n: int
    median_total_s: float
    median_fft_s: float
    median_blocks_s: float
    fft_fraction: float


@dataclass(frozen=True)
class BenchReport:
    block_size: int
    repeats: int
    points: list[BenchPoint]

    def doubling_ratios(self) -> list[tuple[int, float]]:
        """(n, time(2n)/time(n)) for consecutive sizes that double."""
        ratios = []
        for a, b in zip(self.points, self.points[1:]):
            if b.n == 2 * a.n and a.median_total_s > 0:
                ratios.append((a.n, b.median_total_s / a.median_total_s))
        return ratios


def run_bench(n_list, block_size: int = 16, repeats: int = 9, seed: int = 0) -> BenchReport:
    """Time the full projection and its stages for each size in ``n_list``."""
    if repeats < 1:
        raise ValidationError(f"repeats must be >= 1, got {repeats}")
    sizes = sorted(int(n) for n in n_list)
    if not sizes:
        raise ValidationError("n_list must not be empty")
    rng = np.random.default_rng(seed)
    points = []
    for n in sizes:
        layout = BlockLayout.for_dimension(n, block_size)
        x = rng.standard_normal(n)
        project_to_feasible(x, layout, seed=seed)  # warm caches before timing

        totals, ffts, blocks = [], [], []
        for _ in range(repeats):
            t0 = time.perf_counter()
            project_to_feasible(x, layout, seed=seed)
            totals.append(time.perf_counter() - t0)

            t0 = time.perf_counter()
            y = to_compact(x)
            t1 = time.perf_counter()
            projected, _, _, _ = project_block_array(
                y.reshape(layout.block_count, block_size), layout, row_seed=seed
            )
            t2 = time.perf_counter()
            from_compact(projected.reshape(-1))
            t3 = time.perf_counter()
            ffts.append((t1 - t0) + (t3 - t2))
            blocks.append(t2 - t1)

        med_total = float(np.median(totals))
        med_fft = float(np.median(ffts))
        med_blocks = float(np.median(blocks))
        points.append(
            BenchPoint(
                n=n,
                median_total_s=med_total,
                median_fft_s=med_fft,
                median_blocks_s=med_blocks,
                fft_fraction=med_fft / (med_fft + med_blocks),
            )
        )
    return BenchReport(block_size=block_size, repeats=repeats, points=points)
