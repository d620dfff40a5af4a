"""Gradient-ascent drivers over a caller-supplied differentiable objective.

An objective is any callable mapping a latent vector to ``(value, gradient)``.
Two drivers share one loop:

* :func:`projected_ascent` clips the gradient elementwise, optionally
  projects it onto the feasible set, takes an Adam step, and projects the
  iterate back onto the feasible set, so every recorded iterate is feasible
  (the start point is projected before iteration 0);
* :func:`regularized_ascent` replaces the hard constraint with a soft
  penalty folded into the gradient, records feasibility residuals without
  enforcing them, and with no penalty reduces to unconstrained ascent.

The fixed order of operations is clip, then gradient projection, then Adam,
then iterate projection; Adam's moment buffers are never projected.  Runs
are bit-reproducible: randomness enters only through the projection's
degenerate-input perturbation, seeded per iteration from the config seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .blocks import BlockLayout
from .errors import DivergenceError, ValidationError
from .feasible import feasibility_residuals, project_to_feasible
from .fileio import write_csv
from .regularizers import RegularizerSpec, combined_gradient

Objective = Callable[[np.ndarray], tuple[float, np.ndarray]]

MODES = ("projected", "regularized", "unconstrained")

# Objective magnitude beyond which a run is declared divergent.
DIVERGENCE_CAP = 1e12

TRAJECTORY_COLUMNS = ("iteration", "value", "norm_sq", "max_residual", "cos_to_init")


@dataclass(frozen=True)
class OptimizerConfig:
    """Step-size, clipping, Adam, and projection settings for one run."""

    step_size: float = 0.02
    iterations: int = 200
    clip_threshold: float = 0.03
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    project_gradient: bool = True
    mode: str = "projected"
    seed: int = 0

    def __post_init__(self):
        if self.step_size <= 0 or not math.isfinite(self.step_size):
            raise ValidationError("step_size must be positive")
        if self.iterations < 1:
            raise ValidationError("iterations must be >= 1")
        if self.clip_threshold <= 0:
            raise ValidationError("clip_threshold must be positive")
        if not 0.0 <= self.adam_beta1 < 1.0 or not 0.0 <= self.adam_beta2 < 1.0:
            raise ValidationError("adam betas must lie in [0, 1)")
        if self.adam_epsilon <= 0:
            raise ValidationError("adam_epsilon must be positive")
        if self.mode not in MODES:
            raise ValidationError(f"unknown mode {self.mode!r}")


@dataclass
class AdamState:
    """First/second moment buffers and the step counter."""

    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n: int) -> "AdamState":
        return cls(m=np.zeros(n), v=np.zeros(n))


def adam_step(
    state: AdamState,
    gradient: np.ndarray,
    step_size: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    epsilon: float = 1e-8,
) -> np.ndarray:
    """Advance the moment buffers and return the (ascent) increment.

    Standard bias-corrected update:
    ``step_size * mhat / (sqrt(vhat) + epsilon)``.
    """
    if state.m.shape != gradient.shape:
        raise ValidationError("adam state does not match gradient shape")
    state.t += 1
    state.m = beta1 * state.m + (1.0 - beta1) * gradient
    state.v = beta2 * state.v + (1.0 - beta2) * gradient * gradient
    mhat = state.m / (1.0 - beta1**state.t)
    vhat = state.v / (1.0 - beta2**state.t)
    return step_size * mhat / (np.sqrt(vhat) + epsilon)


@dataclass(frozen=True)
class TrajectoryPoint:
    iteration: int
    value: float
    norm_sq: float
    max_residual: float
    cos_to_init: float


@dataclass
class Trajectory:
    """Per-iteration record of an optimization run (iterations + 1 points)."""

    label: str
    points: list[TrajectoryPoint] = field(default_factory=list)
    final_latent: np.ndarray | None = None

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.points])

    def write_csv(self, path) -> None:
        write_csv(
            path,
            TRAJECTORY_COLUMNS,
            (
                (p.iteration, p.value, p.norm_sq, p.max_residual, p.cos_to_init)
                for p in self.points
            ),
        )


def _projection_seed(seed: int, iteration: int, slot: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=seed, spawn_key=(iteration, slot))


def _ascend(
    objective: Objective,
    x0,
    layout: BlockLayout,
    config: OptimizerConfig,
    transform_gradient,
    project_iterate: bool,
    label: str,
) -> Trajectory:
    x = np.array(x0, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != layout.n:
        raise ValidationError(
            f"start point of shape {x.shape} does not match layout n = {layout.n}"
        )
    if project_iterate:
        x = project_to_feasible(x, layout, seed=_projection_seed(config.seed, 0, 1)).output
    init = x.copy()
    init_norm = float(np.linalg.norm(init))

    trajectory = Trajectory(label=label)

    def snapshot(iteration: int, value: float) -> None:
        l1, l2 = feasibility_residuals(x, layout)
        norm = float(np.linalg.norm(x))
        cos = float(x @ init / (norm * init_norm)) if norm > 0 and init_norm > 0 else 0.0
        trajectory.points.append(
            TrajectoryPoint(
                iteration=iteration,
                value=value,
                norm_sq=norm * norm,
                max_residual=float(max(l1.max(), l2.max())),
                cos_to_init=cos,
            )
        )

    def evaluate() -> tuple[float, np.ndarray]:
        value, gradient = objective(x)
        value = float(value)
        gradient = np.asarray(gradient, dtype=np.float64)
        if gradient.shape != x.shape:
            raise ValidationError("objective returned a gradient of mismatched shape")
        bad = not math.isfinite(value) or abs(value) > DIVERGENCE_CAP
        if not bad and not np.isfinite(gradient).all():
            bad = True
        if bad:
            trajectory.final_latent = x.copy()
            raise DivergenceError(
                f"objective diverged at iteration {state.t}", trajectory=trajectory
            )
        return value, gradient

    state = AdamState.zeros(x.shape[0])
    for iteration in range(1, config.iterations + 1):
        value, gradient = evaluate()
        snapshot(iteration - 1, value)
        gradient = transform_gradient(x, gradient, iteration)
        increment = adam_step(
            state,
            gradient,
            config.step_size,
            beta1=config.adam_beta1,
            beta2=config.adam_beta2,
            epsilon=config.adam_epsilon,
        )
        x = x + increment
        if project_iterate:
            x = project_to_feasible(
                x, layout, seed=_projection_seed(config.seed, iteration, 1)
            ).output
    value, _ = evaluate()
    snapshot(config.iterations, value)
    trajectory.final_latent = x
    return trajectory


def projected_ascent(
    objective: Objective, x0, layout: BlockLayout, config: OptimizerConfig
) -> Trajectory:
    """Feasible-set ascent: every recorded iterate satisfies the constraints."""

    clip = config.clip_threshold

    def transform(x, gradient, iteration):
        gradient = np.clip(gradient, -clip, clip)
        if config.project_gradient and gradient.any():
            # The zero gradient has no meaningful projection (every feasible
            # point is equidistant from it); leave it alone so stationary
            # objectives stay put.
            gradient = project_to_feasible(
                gradient, layout, seed=_projection_seed(config.seed, iteration, 0)
            ).output
        return gradient

    return _ascend(objective, x0, layout, config, transform, True, label="projected")


def regularized_ascent(
    objective: Objective,
    spec: RegularizerSpec | None,
    x0,
    layout: BlockLayout,
    config: OptimizerConfig,
) -> Trajectory:
    """Soft-penalty ascent; with ``spec=None`` plain unconstrained ascent.

    Residuals are recorded for comparison but never enforced.
    """

    clip = config.clip_threshold
    label = "unconstrained" if spec is None else f"regularized:{spec.kind}"

    def transform(x, gradient, iteration):
        if spec is not None:
            gradient = combined_gradient(gradient, x, spec, layout)
        return np.clip(gradient, -clip, clip)

    return _ascend(objective, x0, layout, config, transform, False, label=label)
