"""Desk-scale synthetic objectives and signal diagnostics.

The spike reward ``|y_t|^2`` reads a single compact-spectrum coefficient.
Unconstrained ascent drives it without bound; on the feasible set it is
capped by the squared blockwise magnitude bound, which makes reward hacking
versus constrained optimization directly measurable on a desk machine.

The autocorrelation utilities check the discrete Wiener-Khinchin pair: with
the unitary DFT, the circular autocorrelation

    ``r[l] = (1/n) * sum_j x[j] * x[(j - l) mod n]``

equals the inverse DFT of the periodogram, ``(1/n) * sum_k |xhat_k|^2 *
exp(2*pi*i*k*l/n)``, exactly.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .blocks import BlockLayout
from .errors import DivergenceError, ValidationError
from .optimize import (
    Objective,
    OptimizerConfig,
    Trajectory,
    projected_ascent,
    regularized_ascent,
)
from .feasible import feasibility_residuals, project_to_feasible
from .regularizers import WEIGHTINGS, RegularizerSpec
from .spectral import dft_unitary, from_compact, to_compact


@dataclass(frozen=True)
class AutocorrelationProfile:
    """Circular autocorrelation per lag; ``values[0] == norm(x)^2 / n``."""

    values: np.ndarray


def autocorrelation(x) -> AutocorrelationProfile:
    """Circular autocorrelation via the periodogram (O(n log n))."""
    spectrum = dft_unitary(x)
    values = np.fft.ifft(np.abs(spectrum) ** 2).real
    return AutocorrelationProfile(values=values)


def autocorrelation_direct(x) -> np.ndarray:
    """Circular autocorrelation by direct summation (O(n^2); testing aid)."""
    arr = np.asarray(x, dtype=np.float64)
    n = arr.shape[0]
    doubled = np.concatenate([arr, arr])
    values = np.empty(n)
    for lag in range(n):
        values[lag] = arr @ doubled[lag : lag + n]
    return values / n


def wiener_khinchin_check(x) -> float:
    """Max gap between the direct autocorrelation and the periodogram route."""
    direct = autocorrelation_direct(x)
    via_fft = autocorrelation(x).values
    return float(np.abs(direct - via_fft).max())


def spike_reward(x, target_bin: int) -> tuple[float, np.ndarray]:
    """Squared magnitude of one compact-spectrum coefficient, with gradient.

    The packing is R-linear with adjoint ``unpack/2``, so the exact gradient
    of ``|y_t|^2`` is ``from_compact(y_t * e_t)``: linear in ``x``.
    """
    y = to_compact(x)
    half = y.shape[-1]
    if not 0 <= target_bin < half:
        raise ValidationError(f"target_bin {target_bin} outside [0, {half})")
    value = float(np.abs(y[target_bin]) ** 2)
    picked = np.zeros_like(y)
    picked[target_bin] = y[target_bin]
    return value, from_compact(picked)


def make_spike_objective(target_bin: int) -> Objective:
    def objective(x):
        return spike_reward(x, target_bin)

    return objective


SCENARIO_MODES = ("unconstrained", "norm_chi", "power_spectral", "projected")

_SCENARIO_KEYS = {
    "n",
    "block_size",
    "target_bin",
    "modes",
    "iterations",
    "step_size",
    "clip",
    "lambda",
    "weighting",
    "seed",
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Declarative description of one spike-reward comparison run."""

    n: int = 1024
    block_size: int = 16
    target_bin: int = 0
    modes: tuple[str, ...] = SCENARIO_MODES
    iterations: int = 500
    step_size: float = 0.02
    clip: float = 0.03
    lam: float = 2.0
    weighting: str = "fixed"
    seed: int = 0

    def __post_init__(self):
        BlockLayout.for_dimension(self.n, self.block_size)
        if not self.modes:
            raise ValidationError("scenario needs at least one mode")
        for mode in self.modes:
            if mode not in SCENARIO_MODES:
                raise ValidationError(f"unknown scenario mode {mode!r}")
        if not 0 <= self.target_bin < self.n // 2:
            raise ValidationError(f"target_bin {self.target_bin} outside [0, {self.n // 2})")
        if self.weighting not in WEIGHTINGS:
            raise ValidationError(f"unknown weighting {self.weighting!r}")

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "block_size": self.block_size,
            "target_bin": self.target_bin,
            "modes": list(self.modes),
            "iterations": self.iterations,
            "step_size": self.step_size,
            "clip": self.clip,
            "lambda": self.lam,
            "weighting": self.weighting,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ScenarioConfig":
        if not isinstance(data, dict):
            raise ValidationError("scenario must be a JSON object")
        unknown = set(data) - _SCENARIO_KEYS
        if unknown:
            raise ValidationError(f"unknown scenario keys: {sorted(unknown)}")
        kwargs = {}
        for key, value in data.items():
            if key == "lambda":
                kwargs["lam"] = float(value)
            elif key == "modes":
                kwargs["modes"] = tuple(value)
            elif key in ("step_size", "clip"):
                kwargs[key] = float(value)
            elif key == "weighting":
                kwargs[key] = str(value)
            else:
                kwargs[key] = int(value)
        return cls(**kwargs)


def load_scenario(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"scenario file is not valid JSON: {exc}") from exc
    return ScenarioConfig.from_json_dict(data)


@dataclass
class ComparisonRow:
    """Final-state summary for one mode of a comparison run."""

    mode: str
    final_value: float
    max_magnitude: float
    max_residual: float
    cos_to_init: float
    wall_time_s: float


@dataclass
class ComparisonResult:
    config: ScenarioConfig
    rows: list[ComparisonRow] = field(default_factory=list)
    trajectories: dict[str, Trajectory] = field(default_factory=dict)


def _optimizer_config(scenario: ScenarioConfig, mode: str) -> OptimizerConfig:
    opt_mode = {
        "projected": "projected",
        "unconstrained": "unconstrained",
    }.get(mode, "regularized")
    return OptimizerConfig(
        step_size=scenario.step_size,
        iterations=scenario.iterations,
        clip_threshold=scenario.clip,
        mode=opt_mode,
        seed=scenario.seed,
    )


def run_comparison(scenario: ScenarioConfig) -> ComparisonResult:
    """Run every requested mode from one shared feasible start point.

    The start latent is a projected standard Gaussian draw, so all modes
    begin at the same point and the same objective value.  Wall times are
    measured per mode and kept out of any serialized table so identical
    invocations stay byte-identical.
    """
    layout = BlockLayout.for_dimension(scenario.n, scenario.block_size)
    draw = np.random.default_rng(
        np.random.SeedSequence(entropy=scenario.seed, spawn_key=(0,))
    ).standard_normal(scenario.n)
    x0 = project_to_feasible(draw, layout, seed=scenario.seed).output
    objective = make_spike_objective(scenario.target_bin)

    result = ComparisonResult(config=scenario)
    for mode in scenario.modes:
        config = _optimizer_config(scenario, mode)
        start = time.perf_counter()
        try:
            if mode == "projected":
                trajectory = projected_ascent(objective, x0, layout, config)
            elif mode == "unconstrained":
                trajectory = regularized_ascent(objective, None, x0, layout, config)
            else:
                spec = RegularizerSpec(
                    kind=mode, coefficient=scenario.lam, weighting=scenario.weighting
                )
                trajectory = regularized_ascent(objective, spec, x0, layout, config)
        except DivergenceError as exc:
            # keep whatever completed plus the failing mode's partial trace
            if exc.trajectory is not None:
                result.trajectories[mode] = exc.trajectory
            exc.partial_result = result
            raise
        elapsed = time.perf_counter() - start

        final = trajectory.final_latent
        l1, l2 = feasibility_residuals(final, layout)
        result.rows.append(
            ComparisonRow(
                mode=mode,
                final_value=trajectory.points[-1].value,
                max_magnitude=float(np.abs(to_compact(final)).max()),
                max_residual=float(max(l1.max(), l2.max())),
                cos_to_init=trajectory.points[-1].cos_to_init,
                wall_time_s=elapsed,
            )
        )
        result.trajectories[mode] = trajectory
    return result
