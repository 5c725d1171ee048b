"""Fractional Gaussian noise at unit spacing.

The anti-persistent regime (Hurst < 0.5) is what drives rough volatility;
samples here are zero-mean, unit-variance, with autocovariance

    rho_H(k) = 0.5 * (|k+1|^{2H} + |k-1|^{2H} - 2|k|^{2H}).

The production generator uses circulant embedding (O(n log n)); a dense
Cholesky factorization of the Toeplitz covariance is kept as a small-n
oracle for testing.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import EmbeddingNotNonnegative, SizeExceeded
from .rng import substream

_EIG_TOL = 1e-10
_CHOLESKY_MAX_N = 2048


def _check_hurst(h: float) -> float:
    h = float(h)
    if not 0.0 < h < 1.0:
        raise ValueError(f"Hurst parameter must lie in (0, 1), got {h}")
    return h


@dataclass(frozen=True)
class NoiseBlock:
    """A block of unit-spacing fGn samples plus its provenance."""

    increments: np.ndarray
    length: int
    seed: int

    def __post_init__(self):
        if len(self.increments) != self.length:
            raise ValueError("increment count does not match declared length")


def autocovariance(h: float, k) -> float:
    """Closed-form fGn autocovariance at integer lag ``k`` (vectorized)."""
    h = _check_hurst(h)
    k = np.abs(np.asarray(k, dtype=float))
    out = 0.5 * ((k + 1) ** (2 * h) + np.abs(k - 1) ** (2 * h) - 2 * k ** (2 * h))
    return out if out.ndim else float(out)


def sample_fgn(h: float, n: int, seed: int) -> NoiseBlock:
    """Draw ``n`` fGn samples by circulant embedding.

    The covariance sequence c_0..c_{n-1} is embedded into a circulant of
    size 2(n-1); its eigenvalues must be nonnegative (they are for any
    Hurst in (0,1), so a negative eigenvalue flags an implementation bug).
    """
    h = _check_hurst(h)
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    rng = substream(seed)
    if n == 1:
        return NoiseBlock(rng.standard_normal(1), 1, seed)

    cov = autocovariance(h, np.arange(n))
    row = np.concatenate([cov, cov[-2:0:-1]])  # length 2(n-1)
    m = len(row)
    lam = np.fft.fft(row).real
    if lam.min() < -_EIG_TOL:
        raise EmbeddingNotNonnegative(
            f"negative circulant eigenvalue {lam.min():.3e} at h={h}, n={n}"
        )
    lam = np.clip(lam, 0.0, None)

    half = m // 2  # == n - 1
    a = rng.standard_normal(half + 1)
    b = rng.standard_normal(half + 1)
    w = np.empty(m, dtype=complex)
    w[0] = a[0]
    w[half] = a[half]
    w[1:half] = (a[1:half] + 1j * b[1:half]) / np.sqrt(2.0)
    w[half + 1:] = np.conj(w[half - 1:0:-1])

    x = np.fft.ifft(np.sqrt(lam) * w) * np.sqrt(m)
    return NoiseBlock(np.ascontiguousarray(x.real[:n]), n, seed)


def sample_fgn_cholesky(h: float, n: int, seed: int) -> NoiseBlock:
    """Exact-covariance fGn oracle via dense Toeplitz factorization."""
    h = _check_hurst(h)
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if n > _CHOLESKY_MAX_N:
        raise SizeExceeded(f"dense oracle limited to n <= {_CHOLESKY_MAX_N}, got {n}")
    cov = scipy.linalg.toeplitz(autocovariance(h, np.arange(n)))
    lower = scipy.linalg.cholesky(cov, lower=True)
    z = substream(seed).standard_normal(n)
    return NoiseBlock(lower @ z, n, seed)
