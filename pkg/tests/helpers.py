"""Shared test utilities: finite differences and random block factories."""

import numpy as np


def central_difference(func, x, step=1e-6):
    """Central finite-difference gradient of a scalar function of a vector."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.empty_like(x)
    for i in range(x.size):
        bumped = x.copy()
        bumped[i] = x[i] + step
        hi = func(bumped)
        bumped[i] = x[i] - step
        lo = func(bumped)
        grad[i] = (hi - lo) / (2.0 * step)
    return grad


def relative_gap(candidate, reference):
    """Max elementwise gap, relative to the reference scale (floored at 1)."""
    candidate = np.asarray(candidate)
    reference = np.asarray(reference)
    scale = max(1.0, float(np.abs(reference).max()))
    return float(np.abs(candidate - reference).max()) / scale


def random_complex_block(rng, size):
    """Standard complex Gaussian block (unit variance per coefficient)."""
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0)
