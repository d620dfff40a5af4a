"""Closed-form projection of complex blocks onto paired l1/l2 sphere constraints.

For ``z ~ CN(0, 1)``, ``E|z| = sqrt(pi)/2`` and ``E|z|^2 = 1``, so a block of
``B`` i.i.d. standard complex Gaussian coefficients has expected l1 norm
``(sqrt(pi)/2) * B`` and expected squared l2 norm ``B``.  The feasible set
pins both blockwise norms at exactly those expectations.

The Euclidean projection onto that set preserves the input phases and the
magnitude ordering, and in magnitude space reduces to soft-thresholding at a
threshold ``lam`` followed by a positive rescale:

    ``s_j = l1_target * relu(|y_j| - lam) / p1(lam)``,
    ``p1(lam) = sum_j relu(|y_j| - lam)``,

where ``lam`` solves ``p1(lam)^2 / p2(lam) = gamma * B`` with
``gamma = pi/4`` and ``p2(lam) = sum_j relu(|y_j| - lam)^2``.  Sorting the
magnitudes in descending order ``w`` with prefix sums ``S1, S2`` turns the
root into a closed form: among indices ``k`` with ``k + 1 >= gamma * B``
there is a unique ``k*`` whose candidate

    ``lam_k = S1_k/(k+1) - sqrt(gamma*B)/(k+1)
              * sqrt(((k+1)*S2_k - S1_k^2) / (k+1 - gamma*B))``

falls in the bracket ``w_{k+1} <= lam_k < w_k`` (with ``w_B = -inf``), and
``lam = lam_{k*}``.

Inputs with exact zero magnitudes, or with at least ``ceil(gamma*B)`` entries
exactly tied at the block maximum, make the projection non-unique.  Those
entries are perturbed by ``1e-6 * eps`` with ``eps ~ CN(0, 1)`` drawn from a
caller-seeded stream, and the solve is retried (bounded retry budget).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Union

import numpy as np

from .errors import (
    DegenerateInputError,
    DimensionError,
    OracleFailureError,
    ValidationError,
)

GAMMA = math.pi / 4.0
MEAN_ABS_CN = math.sqrt(math.pi) / 2.0
PERTURB_DELTA = 1e-6
RETRY_BUDGET = 8
# Bracket-edge rounding slack, relative to the largest magnitude: a candidate
# threshold missing its half-open bracket by less than this is still accepted.
BRACKET_SLACK = 1e-12

SeedLike = Union[int, np.random.SeedSequence, Callable[[int], np.random.SeedSequence]]


@dataclass(frozen=True)
class BlockLayout:
    """Block structure of a compact spectrum: ``block_count`` blocks of size
    ``block_size`` covering a latent vector of length ``n = 2 * P * B``."""

    block_size: int
    block_count: int

    def __post_init__(self):
        if self.block_size < 2:
            # B = 1 would demand |y|^2 = 1 and |y| = sqrt(pi)/2 simultaneously.
            raise ValidationError(f"block_size must be >= 2, got {self.block_size}")
        if self.block_count < 1:
            raise ValidationError(f"block_count must be >= 1, got {self.block_count}")

    @property
    def n(self) -> int:
        return 2 * self.block_count * self.block_size

    @property
    def gamma(self) -> float:
        return GAMMA

    @property
    def l1_target(self) -> float:
        return MEAN_ABS_CN * self.block_size

    @property
    def l2sq_target(self) -> float:
        return float(self.block_size)

    @classmethod
    def for_dimension(cls, n: int, block_size: int = 16) -> "BlockLayout":
        """Layout for a latent of length ``n``; requires ``n % (2*B) == 0``."""
        if block_size < 2:
            raise ValidationError(f"block_size must be >= 2, got {block_size}")
        if n <= 0 or n % (2 * block_size) != 0:
            raise DimensionError(
                f"latent length {n} is not divisible by 2*block_size = {2 * block_size}"
            )
        return cls(block_size=block_size, block_count=n // (2 * block_size))


class MagnitudeBounds(NamedTuple):
    min: float
    max: float


def magnitude_bounds(layout: BlockLayout) -> MagnitudeBounds:
    """Attainable range of a single coefficient magnitude within a feasible block.

    The extremes occur when one entry differs and the other ``B - 1`` are
    equal: ``max = sqrt(gamma) + sqrt((1-gamma)*(B-1))`` and the analytic
    minimum ``sqrt(gamma) - sqrt((1-gamma)*(B-1))``, floored at 0 where it
    goes negative (B >= 5).
    """
    b = layout.block_size
    root = math.sqrt((1.0 - GAMMA) * (b - 1))
    hi = math.sqrt(GAMMA) + root
    lo = max(0.0, math.sqrt(GAMMA) - root)
    return MagnitudeBounds(min=lo, max=hi)


@dataclass
class BlockProjectionResult:
    """Outcome of projecting one block.

    ``threshold_lambda`` is the selected soft threshold, ``active_count`` the
    number of nonzero output magnitudes (``k* + 1``), ``perturbed`` whether
    the degenerate-input perturbation fired, and ``distance_sq`` the squared
    Euclidean move from the caller's input.
    """

    projected: np.ndarray
    threshold_lambda: float
    active_count: int
    perturbed: bool
    distance_sq: float


def _min_active(block_size: int) -> int:
    # smallest k with k + 1 >= gamma * B (gamma*B is irrational, never integral)
    return math.ceil(GAMMA * block_size) - 1


def _complex_gaussian(rng: np.random.Generator, count: int) -> np.ndarray:
    # CN(0,1): real and imaginary parts i.i.d. N(0, 1/2)
    return (rng.standard_normal(count) + 1j * rng.standard_normal(count)) / math.sqrt(2.0)


def _degenerate_entries(mag: np.ndarray, block_size: int) -> np.ndarray | None:
    """Mask of entries that make the projection non-unique, or None."""
    bad = mag == 0.0
    ties = mag == mag.max()
    if int(np.count_nonzero(ties)) >= math.ceil(GAMMA * block_size):
        bad = bad | ties
    return bad if bad.any() else None


def _threshold_scan(
    w: np.ndarray, s1: np.ndarray, s2: np.ndarray, block_size: int, slack_scale: float
):
    """Linear scan for the unique bracketed threshold.

    ``w`` is the descending-sorted (possibly shifted) magnitudes with prefix
    sums ``s1``/``s2``; the candidate formula is shift-invariant apart from
    the mean term, so callers may pass mean-centered values and shift the
    returned threshold back.  Returns ``(k, lam)`` or None when no candidate
    falls within ``BRACKET_SLACK * slack_scale`` of its bracket.
    """
    g_b = GAMMA * block_size
    best_violation = math.inf
    best = None
    for k in range(_min_active(block_size), block_size):
        kk = k + 1
        num = max(kk * s2[k] - s1[k] * s1[k], 0.0)
        lam = s1[k] / kk - math.sqrt(g_b * num / (kk - g_b)) / kk
        upper = w[k]
        lower = w[k + 1] if kk < block_size else -math.inf
        if lower <= lam < upper:
            return k, lam
        violation = max(lower - lam, 0.0) + max(lam - upper, 0.0)
        if violation < best_violation:
            best_violation = violation
            best = (k, lam)
    if best is not None and best_violation < BRACKET_SLACK * slack_scale:
        return best
    return None


def _solve_magnitudes(mag: np.ndarray, layout: BlockLayout):
    """Output magnitudes, threshold, and k* for one non-degenerate block.

    The solve runs in mean-centered coordinates: ``(k+1)*S2 - S1^2`` is a
    scaled variance, and centering keeps it accurate for blocks whose
    magnitudes differ only at the perturbation scale.
    """
    b = layout.block_size
    center = float(mag.mean())
    centered = mag - center
    w = np.sort(centered)[::-1]
    found = _threshold_scan(w, np.cumsum(w), np.cumsum(w * w), b, float(mag.max()))
    if found is None:
        raise DegenerateInputError("no bracketed threshold exists for this block")
    k, t = found
    shifted = np.maximum(centered - t, 0.0)
    magnitudes = layout.l1_target * shifted / shifted.sum()
    return magnitudes, center + t, k


def project_block(
    block, layout: BlockLayout, rng: np.random.Generator
) -> BlockProjectionResult:
    """Project one complex block of length ``layout.block_size``.

    ``rng`` seeds the degenerate-input perturbation only; non-degenerate
    inputs never consume randomness.
    """
    b = layout.block_size
    arr = np.asarray(block, dtype=np.complex128)
    if arr.shape != (b,):
        raise DimensionError(f"expected block of shape ({b},), got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValidationError("block contains non-finite entries")

    original = arr
    work = arr.copy()
    mag = np.abs(work)
    perturbed = False
    for attempt in range(RETRY_BUDGET + 1):
        bad = _degenerate_entries(mag, b)
        if bad is None:
            break
        if attempt == RETRY_BUDGET:
            raise DegenerateInputError(
                "exact magnitude ties or zeros persisted through the retry budget"
            )
        work[bad] += PERTURB_DELTA * _complex_gaussian(rng, int(bad.sum()))
        mag = np.abs(work)
        perturbed = True

    magnitudes, lam, k = _solve_magnitudes(mag, layout)
    out = magnitudes * (work / mag)
    moved = original - out
    dist = float(np.vdot(moved, moved).real)
    return BlockProjectionResult(
        projected=out,
        threshold_lambda=float(lam),
        active_count=k + 1,
        perturbed=perturbed,
        distance_sq=dist,
    )


def _row_seeder(seed: SeedLike) -> Callable[[int], np.random.SeedSequence]:
    if callable(seed):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        base = seed
        return lambda row: np.random.SeedSequence(
            entropy=base.entropy, spawn_key=(*base.spawn_key, row)
        )
    return lambda row: np.random.SeedSequence(entropy=seed, spawn_key=(row,))


def project_block_array(blocks, layout: BlockLayout, row_seed: SeedLike = 0):
    """Project many independent blocks at once.

    ``blocks`` has shape ``(rows, block_size)``.  Each row that needs the
    degenerate perturbation draws from its own stream derived from
    ``row_seed`` and the row index, so results do not depend on how rows are
    batched or parallelized.

    Returns ``(projected, thresholds, threshold_indices, perturbed)`` where
    ``threshold_indices`` holds each row's ``k*`` and ``perturbed`` flags the
    rows whose entries were perturbed.
    """
    b = layout.block_size
    arr = np.asarray(blocks, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[1] != b:
        raise DimensionError(f"expected (rows, {b}) blocks, got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValidationError("blocks contain non-finite entries")
    rows = arr.shape[0]
    seeder = _row_seeder(row_seed)

    work = arr  # copied lazily, only if degenerate entries must be edited
    mag = np.abs(work)
    perturbed = np.zeros(rows, dtype=bool)
    streams: dict[int, np.random.Generator] = {}
    min_ties = math.ceil(GAMMA * b)
    row_sum = None
    for attempt in range(RETRY_BUDGET + 1):
        row_sum = mag.sum(axis=1)
        zero_rows = mag.min(axis=1) == 0.0
        # a row can only hold min_ties max-magnitude ties if its sum is at
        # least min_ties times its max; refine that cheap filter exactly
        row_max = mag.max(axis=1)
        tie_rows = np.zeros(rows, dtype=bool)
        suspects = np.nonzero(row_sum >= (min_ties * (1.0 - 1e-12)) * row_max)[0]
        if suspects.size:
            counts = (mag[suspects] == row_max[suspects, None]).sum(axis=1)
            tie_rows[suspects[counts >= min_ties]] = True
        bad_rows = np.nonzero(zero_rows | tie_rows)[0]
        if bad_rows.size == 0:
            break
        if attempt == RETRY_BUDGET:
            raise DegenerateInputError(
                f"{bad_rows.size} block(s) stayed degenerate through the retry budget"
            )
        if work is arr:
            work = arr.copy()
        for r in bad_rows:
            gen = streams.get(r)
            if gen is None:
                gen = streams[r] = np.random.default_rng(seeder(int(r)))
            mask = mag[r] == 0.0
            if tie_rows[r]:
                mask |= mag[r] == row_max[r]
            work[r, mask] += PERTURB_DELTA * _complex_gaussian(gen, int(mask.sum()))
            mag[r] = np.abs(work[r])
        perturbed[bad_rows] = True

    center = row_sum / b
    centered = mag - center[:, None]
    t_sel, kstar, ok = _threshold_array(centered, b)
    if ok.all():
        coef = centered
        coef -= t_sel[:, None]
        np.maximum(coef, 0.0, out=coef)
        coef *= (layout.l1_target / coef.sum(axis=1))[:, None]
        coef /= mag
        return work * coef, center + t_sel, kstar, perturbed

    out = np.empty_like(arr)
    lam = center + t_sel
    good = np.nonzero(ok)[0]
    if good.size:
        shifted = np.maximum(centered[good] - t_sel[good, None], 0.0)
        scale = layout.l1_target / shifted.sum(axis=1)
        out[good] = work[good] * ((scale[:, None] * shifted) / mag[good])
    for r in np.nonzero(~ok)[0]:
        magnitudes, lam_r, k_r = _solve_magnitudes(mag[r], layout)
        out[r] = magnitudes * (work[r] / mag[r])
        lam[r], kstar[r] = lam_r, k_r
    return out, lam, kstar, perturbed


def _threshold_array(centered: np.ndarray, block_size: int):
    """Vectorized threshold selection across rows of mean-centered magnitudes.

    Only the ``q = B - ceil(gamma*B) + 1`` smallest magnitudes of a row can
    carry the bracket, so a bottom-q partition replaces the full sort.
    Returns ``(t, kstar, ok)`` in centered coordinates; rows with
    ``ok == False`` (bracket missed at floating-point edges, or degenerate)
    are left for the scalar fallback.
    """
    rows, b = centered.shape
    g_b = GAMMA * block_size
    kmin = _min_active(block_size)
    q = b - kmin

    total1 = centered.sum(axis=1)
    total2 = np.einsum("ij,ij->i", centered, centered)
    if q < b:
        bottom = np.sort(np.partition(centered, q - 1, axis=1)[:, :q], axis=1)
    else:
        bottom = np.sort(centered, axis=1)
    w_desc = bottom[:, ::-1]  # centered magnitudes at sorted positions kmin .. B-1
    c1 = np.cumsum(bottom, axis=1)
    c2 = np.cumsum(bottom * bottom, axis=1)
    zeros = np.zeros((rows, 1))
    if q > 1:
        drop1 = np.concatenate([c1[:, q - 2 :: -1], zeros], axis=1)
        drop2 = np.concatenate([c2[:, q - 2 :: -1], zeros], axis=1)
    else:
        drop1 = zeros
        drop2 = zeros
    s1 = total1[:, None] - drop1  # prefix sums at k = kmin .. B-1
    s2 = total2[:, None] - drop2

    kk = np.arange(kmin, b) + 1.0
    num = np.maximum(kk * s2 - s1 * s1, 0.0)
    t_k = s1 / kk - np.sqrt(g_b * num / (kk - g_b)) / kk
    upper = w_desc
    lower = np.concatenate([w_desc[:, 1:], np.full((rows, 1), -np.inf)], axis=1)
    cond = (lower <= t_k) & (t_k < upper)
    ok = cond.any(axis=1)
    sel = np.argmax(cond, axis=1)
    idx = np.arange(rows)
    t = t_k[idx, sel]
    kstar = sel + kmin
    return t, kstar, ok


def oracle_project_block(block, layout: BlockLayout, grid_resolution: int = 4000) -> np.ndarray:
    """Reference solver: dense threshold scan plus bisection, no closed form.

    Scans the normalized-ReLU family over a threshold grid, brackets the sign
    change of ``p1(lam)^2/p2(lam) - gamma*B`` (extending the grid below zero
    when the root is negative), bisects the bracket to width 1e-12, and
    rescales to meet the l1 target.  Testing aid for small blocks only.
    """
    b = layout.block_size
    if b > 16:
        raise ValidationError("reference solver is limited to block_size <= 16")
    if grid_resolution < 1000:
        raise ValidationError("grid_resolution must be >= 1000")
    arr = np.asarray(block, dtype=np.complex128)
    if arr.shape != (b,):
        raise DimensionError(f"expected block of shape ({b},), got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValidationError("block contains non-finite entries")
    mag = np.abs(arr)
    if (mag == 0.0).any():
        raise ValidationError("reference solver requires nonzero magnitudes")

    g_b = GAMMA * b

    def ratio_gap(lam: float) -> float:
        r = np.maximum(mag - lam, 0.0)
        p1 = r.sum()
        p2 = r @ r
        return p1 * p1 / p2 - g_b

    hi = float(mag.max())
    # the gap is monotone non-increasing and must go negative just below the
    # max magnitude (it tends to 1 - gamma*B < 0 there); if it does not, the
    # top magnitudes are tied and no crossing exists
    probe = hi - 1e-13 * max(hi, 1.0)
    if ratio_gap(probe) >= 0.0:
        raise OracleFailureError("no sign change of the ratio gap below the max magnitude")
    lo = 0.0
    if ratio_gap(lo) < 0.0:
        lo = -hi - 1.0
        for _ in range(64):
            if ratio_gap(lo) >= 0.0:
                break
            lo *= 2.0
        else:
            raise OracleFailureError("could not find a nonnegative ratio gap")

    grid = np.linspace(lo, hi, grid_resolution, endpoint=False)
    shifted = np.maximum(mag[None, :] - grid[:, None], 0.0)
    p1 = shifted.sum(axis=1)
    p2 = np.einsum("ij,ij->i", shifted, shifted)
    gaps = p1 * p1 / p2 - g_b
    nonneg = np.nonzero(gaps >= 0.0)[0]
    if nonneg.size == 0:
        raise OracleFailureError("no nonnegative ratio gap on the grid")
    last = int(nonneg[-1])
    a = float(grid[last])
    c = float(grid[last + 1]) if last + 1 < grid_resolution else probe
    while c - a > 1e-12:
        mid = 0.5 * (a + c)
        if ratio_gap(mid) >= 0.0:
            a = mid
        else:
            c = mid
    lam = 0.5 * (a + c)
    r = np.maximum(mag - lam, 0.0)
    s = layout.l1_target * r / r.sum()
    return s * (arr / mag)
