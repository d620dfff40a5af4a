"""Soft regularizers that pull a latent toward Gaussian statistics.

These are the baselines the hard feasible-set constraint is compared
against: a radial chi likelihood on the Euclidean norm, and a blockwise l1
pull on the magnitudes of the full DFT.

Note the structural difference from the feasible set: the spectral penalty
here runs over all ``2 * P`` blocks of the full length-``n`` DFT (whose
halves are conjugate mirrors of each other), not over the ``P`` blocks of
the redundancy-free compact spectrum, and it pulls the blockwise l1 norms
toward ``0.875 * B`` rather than pinning them at ``(sqrt(pi)/2) * B``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blocks import BlockLayout
from .errors import DimensionError, SingularInputError, ValidationError
from .spectral import dft_unitary, idft_unitary

# Blockwise l1 pull target per coefficient for the spectral penalty;
# sqrt(pi)/2 ~ 0.886 is the exact complex-Gaussian expectation.
MU_POWER = 0.875

REGULARIZER_KINDS = ("norm_chi", "power_spectral")
WEIGHTINGS = ("fixed", "gradient_normalized")

# Below this regularizer-gradient norm the gradient-normalized rescale is
# skipped (the ratio would blow up at the regularizer's stationary points).
_RESCALE_FLOOR = 1e-12


@dataclass(frozen=True)
class RegularizerSpec:
    """Choice of penalty, coefficient, and weighting scheme.

    ``fixed`` subtracts ``coefficient * grad_reg`` from the reward gradient;
    ``gradient_normalized`` first rescales ``grad_reg`` to the reward
    gradient's norm so both terms contribute at comparable magnitude.
    """

    kind: str
    coefficient: float = 2.0
    weighting: str = "fixed"

    def __post_init__(self):
        if self.kind not in REGULARIZER_KINDS:
            raise ValidationError(f"unknown regularizer kind {self.kind!r}")
        if self.weighting not in WEIGHTINGS:
            raise ValidationError(f"unknown weighting {self.weighting!r}")
        if not math.isfinite(self.coefficient) or self.coefficient < 0.0:
            raise ValidationError("coefficient must be finite and >= 0")


def l_norm_loss(x) -> tuple[float, np.ndarray]:
    """Negative log likelihood of ``norm(x)`` under the chi_n distribution.

    With ``r = norm(x)`` and density
    ``p(r) = r^(n-1) * exp(-r^2/2) / (2^(n/2-1) * Gamma(n/2))`` the loss is
    ``-log p(r)``; ``math.lgamma`` keeps the normalizing constant finite for
    large ``n``.  The gradient is radial, ``x * (1 - (n-1)/r^2)``, vanishing
    exactly on the sphere ``r^2 = n - 1``.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 2:
        raise DimensionError(f"expected a 1-d latent of length >= 2, got {arr.shape}")
    n = arr.size
    rsq = float(arr @ arr)
    if rsq == 0.0:
        raise SingularInputError("chi log likelihood is undefined for the zero vector")
    log_const = (n / 2.0 - 1.0) * math.log(2.0) + math.lgamma(n / 2.0)
    value = log_const - (n - 1) * 0.5 * math.log(rsq) + 0.5 * rsq
    gradient = arr * (1.0 - (n - 1) / rsq)
    return value, gradient


def l_power_loss(x, layout: BlockLayout) -> tuple[float, np.ndarray]:
    """Mean absolute deviation of full-DFT blockwise l1 norms from ``0.875 * B``.

    ``(1/n) * sum_p | ||xhat_p||_1 - 0.875*B |`` over the ``2 * P`` size-``B``
    blocks of the full unitary DFT.  The subgradient uses ``sign`` for the
    outer absolute value and the unit phase for the inner magnitudes, with 0
    at exact zeros of either.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != layout.n:
        raise DimensionError(
            f"latent of shape {arr.shape} does not match layout n = {layout.n}"
        )
    n = layout.n
    b = layout.block_size
    spectrum = dft_unitary(arr)
    mag = np.abs(spectrum)
    deviations = mag.reshape(-1, b).sum(axis=1) - MU_POWER * b
    value = float(np.abs(deviations).sum() / n)

    phases = np.zeros_like(spectrum)
    nonzero = mag > 0.0
    phases[nonzero] = spectrum[nonzero] / mag[nonzero]
    weighted = (np.sign(deviations)[:, None] * phases.reshape(-1, b)).reshape(-1)
    gradient = idft_unitary(weighted).real / n
    return value, gradient


def regularizer_loss(x, spec: RegularizerSpec, layout: BlockLayout):
    """Dispatch to the penalty named by ``spec.kind``."""
    if spec.kind == "norm_chi":
        return l_norm_loss(x)
    return l_power_loss(x, layout)


def combined_gradient(
    reward_gradient, x, spec: RegularizerSpec, layout: BlockLayout
) -> np.ndarray:
    """Ascent direction for a reward minus a weighted penalty.

    ``fixed``: ``g = reward_gradient - coefficient * grad_reg``.
    ``gradient_normalized``: the penalty gradient is rescaled to the reward
    gradient's norm first; the rescale is skipped when the penalty gradient
    is numerically zero.
    """
    reward = np.asarray(reward_gradient, dtype=np.float64)
    arr = np.asarray(x, dtype=np.float64)
    if reward.shape != arr.shape:
        raise DimensionError(
            f"gradient shape {reward.shape} does not match latent shape {arr.shape}"
        )
    if spec.coefficient == 0.0:
        return reward.copy()
    _, grad_reg = regularizer_loss(arr, spec, layout)
    if spec.weighting == "gradient_normalized":
        reg_norm = float(np.linalg.norm(grad_reg))
        if reg_norm >= _RESCALE_FLOOR:
            scale = float(np.linalg.norm(reward)) / reg_norm
            return reward - spec.coefficient * scale * grad_reg
    return reward - spec.coefficient * grad_reg
