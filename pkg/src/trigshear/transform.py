"""Fourier coefficients of sampled periodic functions and shearlet coefficients.

The shearlet coefficient of ``f`` at ``(cone, j, l, y)`` is defined as

    2^{-3j/4} sum_k c_k(f) Psi_{j,l}(k) exp(2 pi i k.y)

with ``c_k`` the torus Fourier coefficients (normalised by ``(2 pi)^{-2}``).
:func:`analysis_single` evaluates this sum directly; :func:`analysis_all`
evaluates it on the whole pattern at once by folding the frequencies modulo
the pattern periods and applying one small inverse FFT.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
import scipy.fft

from .admissible import AdmissibleProfile
from .shearlets import (
    DEFAULT_PROFILE,
    check_index,
    pattern,
    pattern_periods,
    shears,
    support_points,
)

__all__ = [
    "ResolutionError",
    "SpectrumGrid",
    "CoefficientGrid",
    "fourier_coefficients",
    "spectrum_from_function",
    "analysis_single",
    "analysis_all",
    "coefficient_pyramid",
    "resolution_for",
    "required_kmax",
]


class ResolutionError(ValueError):
    """A window support reaches beyond the stored spectrum."""


def _default_workers() -> int:
    return int(os.environ.get("TRIGSHEAR_THREADS", "0")) or (os.cpu_count() or 1)


@dataclass(frozen=True)
class SpectrumGrid:
    """Fourier coefficients ``c_k`` for ``k`` in ``[-kmax, kmax)^2``.

    ``N`` is the sampling grid the coefficients were computed from; the
    stored block may be a centred crop of the full ``[-N/2, N/2)^2`` range.
    ``coeffs[k1 + kmax, k2 + kmax] = c_(k1, k2)``.
    """

    N: int
    kmax: int
    coeffs: np.ndarray
    normalization: str = "torus"

    def at(self, k1, k2) -> np.ndarray:
        k1 = np.asarray(k1)
        k2 = np.asarray(k2)
        K = self.kmax
        if k1.size and (k1.min() < -K or k1.max() >= K or k2.min() < -K or k2.max() >= K):
            raise ResolutionError(
                f"frequencies up to |k|={max(abs(int(k1.min())), int(k1.max()), abs(int(k2.min())), int(k2.max()))}"
                f" requested but the spectrum only holds [-{K}, {K})"
            )
        return self.coeffs[k1 + K, k2 + K]


def _check_pow2(N: int) -> None:
    if N < 2 or N & (N - 1):
        raise ValueError(f"grid size must be a power of two, got {N}")


def fourier_coefficients(samples: np.ndarray, kmax: int | None = None, workers: int | None = None) -> SpectrumGrid:
    """``c_k ~ N^-2 sum_m f(x_m) exp(-i k.x_m)`` with ``x_m = -pi + 2 pi m / N``.

    ``samples`` must be real, square and of power-of-two size; axis 0 is
    ``x1``. ``kmax`` crops the result to ``[-kmax, kmax)^2`` (default
    ``N/2``). The input array is not modified.
    """
    samples = np.asarray(samples)
    if samples.ndim != 2 or samples.shape[0] != samples.shape[1]:
        raise ValueError("samples must be a square 2-D array")
    N = samples.shape[0]
    _check_pow2(N)
    K = N // 2 if kmax is None else int(kmax)
    if not 0 < K <= N // 2:
        raise ValueError(f"kmax must lie in (0, {N // 2}]")
    workers = workers or _default_workers()
    half = scipy.fft.rfft2(samples, workers=workers)  # k2 >= 0 only
    k = np.arange(-K, K)
    sign = np.where(k % 2, -1.0, 1.0)  # exp(i k pi) for x_m starting at -pi
    rows = half[k % N]
    out = np.empty((2 * K, 2 * K), dtype=complex)
    out[:, K:] = rows[:, :K]
    # c_(k1, -k2) = conj(c_(-k1, k2)) for real input
    neg = np.arange(K, 0, -1)
    out[:, :K] = np.conj(half[(-k) % N][:, neg])
    del half, rows
    out *= sign[:, None] * sign[None, :] / float(N) ** 2
    return SpectrumGrid(N, K, out)


def spectrum_from_function(f: Callable, N: int, kmax: int | None = None, workers: int | None = None) -> SpectrumGrid:
    """Sample ``f`` on the ``N x N`` torus grid and transform it."""
    from .cartoon import periodize_sample

    samples = periodize_sample(f, N)
    return fourier_coefficients(samples, kmax=kmax, workers=workers)


@dataclass(frozen=True)
class CoefficientGrid:
    """Coefficients of one shearlet family over its full pattern.

    ``values[i]`` belongs to ``points[i]``; ordering follows
    :func:`trigshear.shearlets.pattern`.
    """

    cone: str
    j: int
    l: int
    points: np.ndarray
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    def as_array(self) -> np.ndarray:
        """Values reshaped to ``(n_z2, n_z1)``."""
        p1, p2 = pattern_periods(self.cone, self.j)
        return self.values.reshape(p2, p1)

    def nearest(self, y) -> int:
        """Index of the pattern point closest to ``y`` on the unit torus."""
        d = np.mod(self.points - np.asarray(y, dtype=float) + 0.5, 1.0) - 0.5
        return int(np.argmin(np.einsum("ij,ij->i", d, d)))


def required_kmax(j: int, l_max: int | None = None) -> int:
    """Smallest crop half-size that holds every window at scale ``j``."""
    m = 2 ** (j // 2)
    l_max = m if l_max is None else l_max
    hi = math.ceil(4 * 2**j / 3)
    return max(hi, math.ceil(l_max * hi / m + 2.0 / 3 * m)) + 2


def resolution_for(j: int, oversample: int = 8) -> int:
    """Sampling grid size ``N(j) = oversample * 2^j``."""
    N = oversample * 2**j
    _check_pow2(N)
    return N


def _support(cone, j, l, profile):
    k1, k2, w = support_points(cone, j, l, profile)
    keep = w != 0
    return k1[keep], k2[keep], w[keep]


def analysis_single(spec: SpectrumGrid, cone: str, j: int, l: int, y,
                    profile: AdmissibleProfile = DEFAULT_PROFILE) -> complex:
    """Direct evaluation of one coefficient at translation ``y``."""
    check_index(cone, j, l)
    k1, k2, w = _support(cone, j, l, profile)
    c = spec.at(k1, k2)
    y = np.asarray(y, dtype=float)
    phase = np.exp(2j * np.pi * (k1 * y[0] + k2 * y[1]))
    return complex(2.0 ** (-0.75 * j) * np.sum(c * w * phase))


def analysis_all(spec: SpectrumGrid, cone: str, j: int, l: int,
                 profile: AdmissibleProfile = DEFAULT_PROFILE) -> CoefficientGrid:
    """All coefficients of the family ``(cone, j, l)`` via folding + inverse FFT."""
    check_index(cone, j, l)
    k1, k2, w = support_points(cone, j, l, profile)
    c = spec.at(k1, k2) * w
    p1, p2 = pattern_periods(cone, j)
    idx = ((k1 % p1) * p2 + (k2 % p2)).ravel()
    flat = c.ravel()
    folded = (np.bincount(idx, flat.real, p1 * p2) + 1j * np.bincount(idx, flat.imag, p1 * p2))
    G = np.fft.ifft2(folded.reshape(p1, p2)) * (p1 * p2 * 2.0 ** (-0.75 * j))
    pts = pattern(cone, j, l)
    z1 = np.rint(pts[:, 0] * p1).astype(np.int64) % p1
    z2 = np.rint(pts[:, 1] * p2).astype(np.int64) % p2
    return CoefficientGrid(cone, j, l, pts, G[z1, z2])


def coefficient_pyramid(
    f: Callable,
    scales: Iterable[int],
    cones: Iterable[str] = ("h", "v"),
    shear_policy: str | Iterable[int] | Callable[[int], Iterable[int]] = "all",
    oversample: int = 8,
    profile: AdmissibleProfile = DEFAULT_PROFILE,
    workers: int | None = None,
) -> dict[tuple[str, int, int], CoefficientGrid]:
    """Coefficient grids for every requested ``(cone, j, l)``.

    Each scale samples ``f`` on its own grid ``N(j) = oversample * 2^j``.
    ``shear_policy`` is ``"all"`` (``|l| < 2^(j/2)``), an explicit list, or
    a callable mapping ``j`` to a list.
    """
    scales = list(scales)
    if not scales:
        raise ValueError("at least one scale is required")
    cones = list(cones)
    workers = workers or _default_workers()
    out: dict[tuple[str, int, int], CoefficientGrid] = {}
    for j in scales:
        if j % 2:
            raise ValueError(f"scale must be even, got {j}")
        if shear_policy == "all":
            ls = shears(j)
        elif callable(shear_policy):
            ls = list(shear_policy(j))
        else:
            ls = list(shear_policy)
        N = resolution_for(j, oversample)
        K = min(N // 2, required_kmax(j, max((abs(l) for l in ls), default=0)))
        spec = spectrum_from_function(f, N, kmax=K, workers=workers)
        tasks = [(cone, l) for cone in cones for l in ls]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            grids = list(pool.map(lambda t: analysis_all(spec, t[0], j, t[1], profile), tasks))
        for (cone, l), g in zip(tasks, grids):
            out[(cone, j, l)] = g
        del spec
    return out
