"""Unitary DFT and the compact half-spectrum packing of real vectors.

The DFT of a real vector of even length ``n`` is Hermitian-symmetric: bins 0
and ``n/2`` are real and bin ``k`` is the conjugate of bin ``n - k``.  Only
``n/2`` complex degrees of freedom are independent.  :func:`to_compact` packs
the two real bins into one complex slot,

    ``y[0] = (xhat[0] + i * xhat[n/2]) / sqrt(2)``,   ``y[k] = xhat[k]``

for ``k = 1 .. n/2 - 1``, giving a redundancy-free vector in ``C^{n/2}``.
The packing is a bijection, it maps i.i.d. standard Gaussian vectors to
i.i.d. standard complex Gaussian vectors, it is R-linear, and it satisfies
``norm(x)^2 == 2 * norm(to_compact(x))^2``.

Conventions fixed here and assumed by every consumer of this module:

* unitary DFT normalization, ``1/sqrt(n)`` in both directions, so Parseval
  holds with no extra factors;
* forward kernel ``exp(-2*pi*i*j*k/n)`` for bin ``k``;
* double precision throughout;
* all operations act along the last axis and are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError

_SQRT2 = math.sqrt(2.0)


def _require_real_even(x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    n = arr.shape[-1] if arr.ndim else 0
    if n < 2 or n % 2 != 0:
        raise DimensionError(f"vector length must be even and >= 2, got {n}")
    if not np.isfinite(arr).all():
        raise ValidationError("vector contains non-finite entries")
    return arr


def dft_unitary(x) -> np.ndarray:
    """Unitary DFT of a real vector (complex output of the same length)."""
    return np.fft.fft(_require_real_even(x), norm="ortho")


def idft_unitary(spectrum) -> np.ndarray:
    """Inverse unitary DFT (complex output; callers take the real part)."""
    return np.fft.ifft(np.asarray(spectrum, dtype=np.complex128), norm="ortho")


def to_compact(x) -> np.ndarray:
    """Pack a real vector's half spectrum into ``C^{n/2}``.

    The real DC and Nyquist bins share slot 0 as real and imaginary part,
    scaled by ``1/sqrt(2)`` so the norm relation ``norm(x)^2 == 2*norm(y)^2``
    holds exactly.
    """
    arr = _require_real_even(x)
    n = arr.shape[-1]
    half = np.fft.rfft(arr, norm="ortho")
    y = np.empty(arr.shape[:-1] + (n // 2,), dtype=np.complex128)
    y[..., 0] = (half[..., 0].real + 1j * half[..., n // 2].real) / _SQRT2
    y[..., 1:] = half[..., 1 : n // 2]
    return y


def from_compact(y) -> np.ndarray:
    """Invert :func:`to_compact`; the result is real of length ``2 * len(y)``.

    The half spectrum is rebuilt as ``xhat[0] = sqrt(2)*Re(y[0])``,
    ``xhat[n/2] = sqrt(2)*Im(y[0])``, ``xhat[k] = y[k]``, and the inverse
    transform enforces the Hermitian extension ``xhat[n-k] = conj(y[k])``
    structurally, so the output carries no imaginary residue by construction.
    """
    arr = np.asarray(y, dtype=np.complex128)
    half = arr.shape[-1] if arr.ndim else 0
    if half < 1:
        raise DimensionError("compact spectrum must have length >= 1")
    if not np.isfinite(arr).all():
        raise ValidationError("compact spectrum contains non-finite entries")
    n = 2 * half
    spec = np.empty(arr.shape[:-1] + (half + 1,), dtype=np.complex128)
    spec[..., 0] = _SQRT2 * arr[..., 0].real
    spec[..., half] = _SQRT2 * arr[..., 0].imag
    spec[..., 1:half] = arr[..., 1:]
    return np.fft.irfft(spec, n=n, norm="ortho")


@dataclass(frozen=True)
class HermitianCheck:
    """Measured deviations of a spectrum from Hermitian symmetry."""

    max_pair_deviation: float
    dc_imag: float
    nyquist_imag: float
    tolerance: float
    passed: bool


def check_hermitian(spectrum, tol: float) -> HermitianCheck:
    """Measure ``max_k |s[k] - conj(s[n-k])|`` plus the DC/Nyquist imaginary parts.

    Passes iff every deviation is below ``tol``.
    """
    if tol <= 0:
        raise ValidationError("tolerance must be positive")
    s = np.asarray(spectrum, dtype=np.complex128)
    n = s.shape[-1]
    if n < 2 or n % 2 != 0:
        raise DimensionError(f"spectrum length must be even and >= 2, got {n}")
    pair_dev = 0.0
    if n > 2:
        upper = s[..., 1 : n // 2]
        mirrored = np.conj(s[..., n // 2 + 1 :])[..., ::-1]
        pair_dev = float(np.abs(upper - mirrored).max())
    dc = float(np.abs(s[..., 0].imag).max())
    nyq = float(np.abs(s[..., n // 2].imag).max())
    return HermitianCheck(
        max_pair_deviation=pair_dev,
        dc_imag=dc,
        nyquist_imag=nyq,
        tolerance=tol,
        passed=max(pair_dev, dc, nyq) < tol,
    )
