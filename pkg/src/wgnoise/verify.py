"""Named verification suites with measured values against fixed thresholds.

Each suite returns a list of checks; a check records what was measured and
the threshold it must beat.  Thresholds are fixed here, not configurable:
they are the contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blocks import (
    BlockLayout,
    magnitude_bounds,
    oracle_project_block,
    project_block,
)
from .errors import ValidationError
from .feasible import project_latent_batch
from .harness import wiener_khinchin_check
from .spectral import check_hermitian, dft_unitary, from_compact, to_compact


@dataclass(frozen=True)
class CheckResult:
    name: str
    measured: float
    threshold: float
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: measured={self.measured:.6g} threshold={self.threshold:.6g}"


def _check(name: str, measured: float, threshold: float) -> CheckResult:
    return CheckResult(name, float(measured), float(threshold), bool(measured < threshold))


def suite_roundtrip(seed: int = 0) -> list[CheckResult]:
    """Pack/unpack bijection, Parseval, R-linearity, and the norm relation."""
    rng = np.random.default_rng(seed)
    checks = []
    for n in (2, 8, 1024, 65536):
        x = rng.standard_normal(n)
        err = np.abs(from_compact(to_compact(x)) - x).max()
        checks.append(_check(f"roundtrip_abs_error_n{n}", err, 1e-10))

    x = rng.standard_normal(1024)
    parseval = abs(np.linalg.norm(dft_unitary(x)) ** 2 - np.linalg.norm(x) ** 2)
    checks.append(_check("parseval_rel_error", parseval / np.linalg.norm(x) ** 2, 1e-10))

    a, b = rng.standard_normal(2)
    x1, x2 = rng.standard_normal(64), rng.standard_normal(64)
    lin = np.abs(
        to_compact(a * x1 + b * x2) - (a * to_compact(x1) + b * to_compact(x2))
    ).max()
    scale = np.abs(to_compact(a * x1 + b * x2)).max()
    checks.append(_check("packing_linearity_rel_error", lin / scale, 1e-12))

    z = (rng.standard_normal(512) + 1j * rng.standard_normal(512)) / math.sqrt(2)
    norm_gap = abs(
        np.linalg.norm(from_compact(z)) ** 2 - 2.0 * np.linalg.norm(z) ** 2
    ) / (2.0 * np.linalg.norm(z) ** 2)
    checks.append(_check("norm_relation_rel_error", norm_gap, 1e-10))

    x = rng.standard_normal(65536)
    herm = check_hermitian(dft_unitary(x), tol=1e-9)
    checks.append(
        _check(
            "hermitian_max_deviation_n65536",
            max(herm.max_pair_deviation, herm.dc_imag, herm.nyquist_imag),
            1e-9,
        )
    )
    return checks


def suite_gaussian(seed: int = 0, draws: int = 1_000_000) -> list[CheckResult]:
    """Unpacking standard complex Gaussians yields standard real Gaussians (n = 8)."""
    n = 8
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((draws, n // 2)) + 1j * rng.standard_normal((draws, n // 2)))
    z /= math.sqrt(2.0)
    x = from_compact(z)
    second_moment = x.T @ x / draws
    cov_dev = np.abs(second_moment - np.eye(n)).max()
    mean_dev = np.abs(x.mean(axis=0)).max()
    var_dev = np.abs(x.var(axis=0) - 1.0).max()
    return [
        _check("covariance_max_abs_deviation", cov_dev, 0.01),
        _check("mean_max_abs_deviation", mean_dev, 0.005),
        _check("variance_max_abs_deviation", var_dev, 0.01),
    ]


def suite_oracle(seed: int = 0, blocks_per_size: int = 1000) -> list[CheckResult]:
    """Closed-form projection against the dense-scan reference solver."""
    rng = np.random.default_rng(seed)
    checks = []
    for b in (2, 4, 8):
        layout = BlockLayout(block_size=b, block_count=1)
        max_gap = 0.0
        max_excess = -math.inf
        for _ in range(blocks_per_size):
            block = (rng.standard_normal(b) + 1j * rng.standard_normal(b)) / math.sqrt(2)
            closed = project_block(block, layout, rng).projected
            reference = oracle_project_block(block, layout)
            max_gap = max(max_gap, float(np.abs(closed - reference).max()))
            excess = np.linalg.norm(block - closed) - np.linalg.norm(block - reference)
            max_excess = max(max_excess, float(excess))
        checks.append(_check(f"oracle_elementwise_gap_B{b}", max_gap, 1e-6))
        checks.append(_check(f"optimality_distance_excess_B{b}", max_excess, 1e-6))

    # two-entry worked case: magnitudes (3, 1) map to the unique solution of
    # a + b = sqrt(pi), a^2 + b^2 = 2 with the order preserved
    layout2 = BlockLayout(block_size=2, block_count=1)
    result = project_block(np.array([3.0 + 0j, 1.0 + 0j]), layout2, rng)
    a = (math.sqrt(math.pi) + math.sqrt(4.0 - math.pi)) / 2.0
    b = (math.sqrt(math.pi) - math.sqrt(4.0 - math.pi)) / 2.0
    gap = np.abs(np.abs(result.projected) - np.array([a, b])).max()
    checks.append(_check("worked_two_entry_case_gap", gap, 1e-9))
    return checks


def suite_wk(seed: int = 0) -> list[CheckResult]:
    """Direct circular autocorrelation against the periodogram inverse DFT."""
    rng = np.random.default_rng(seed)
    checks = [
        _check("wk_deviation_n64", wiener_khinchin_check(rng.standard_normal(64)), 1e-10),
        _check(
            "wk_deviation_n65536",
            wiener_khinchin_check(rng.standard_normal(65536)),
            1e-8,
        ),
    ]
    return checks


def suite_bounds(seed: int = 0) -> list[CheckResult]:
    """Analytic magnitude bounds and the cap on projected coefficients."""
    checks = []
    for b, expected in ((8, 2.11), (16, 2.68), (32768, 84.74)):
        hi = magnitude_bounds(BlockLayout(block_size=b, block_count=1)).max
        checks.append(_check(f"magnitude_bound_gap_B{b}", abs(hi - expected), 0.01))
    layout16 = BlockLayout(block_size=16, block_count=1)
    checks.append(
        _check(
            "magnitude_bound_sq_gap_B16",
            abs(magnitude_bounds(layout16).max ** 2 - 7.18),
            0.01,
        )
    )

    rng = np.random.default_rng(seed)
    layout = BlockLayout.for_dimension(4096, 16)
    latents = rng.standard_normal((64, 4096))
    _, stats = project_latent_batch(latents, layout, row_seed=seed)
    cap = magnitude_bounds(layout).max + 1e-9
    checks.append(_check("projected_magnitude_cap_excess", stats.max_magnitude - cap, 0.0))
    return checks


SUITES = {
    "roundtrip": suite_roundtrip,
    "gaussian": suite_gaussian,
    "oracle": suite_oracle,
    "wk": suite_wk,
    "bounds": suite_bounds,
}


def run_suite(name: str, seed: int = 0) -> list[CheckResult]:
    if name not in SUITES:
        raise ValidationError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](seed)
