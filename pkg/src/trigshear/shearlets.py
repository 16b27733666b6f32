"""Discrete trigonometric shearlet system on the 2-torus.

Indices are ``(cone, j, l)`` with ``cone`` in ``{"h", "v"}``, ``j`` even and
``|l| <= 2**(j//2)``. Translations live on the pattern lattice returned by
:func:`pattern`; the torus point belonging to ``y`` is ``2*pi*y``.

The v-cone window is the h-cone window with the two frequency axes swapped,
and the v-cone pattern is the h-cone pattern with coordinates swapped. The
code exploits this throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .admissible import AdmissibleProfile

__all__ = [
    "ShearletIndex",
    "FrequencySupport",
    "check_index",
    "shear_matrix",
    "orientation_angle",
    "pattern",
    "pattern_periods",
    "window_scaled_eval",
    "frequency_support",
    "support_points",
    "shearlet_space_eval",
    "shears",
    "polar_derivative_maxima",
]

DEFAULT_PROFILE = AdmissibleProfile()


def check_index(cone: str, j: int, l: int) -> None:
    if cone not in ("h", "v"):
        raise ValueError(f"cone must be 'h' or 'v', got {cone!r}")
    if j < 0 or j % 2:
        raise ValueError(f"scale j must be even and non-negative, got {j}")
    if abs(l) > 2 ** (j // 2):
        raise ValueError(f"shear |l|={abs(l)} exceeds 2^(j/2)={2 ** (j // 2)}")


def shears(j: int, include_seam: bool = False) -> list[int]:
    """Shear parameters at scale ``j``: ``|l| < 2^(j/2)`` (or ``<=`` with the seam)."""
    m = 2 ** (j // 2)
    top = m if include_seam else m - 1
    return list(range(-top, top + 1))


@dataclass(frozen=True)
class ShearletIndex:
    cone: str
    j: int
    l: int
    y: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        check_index(self.cone, self.j, self.l)


def shear_matrix(cone: str, j: int, l: int) -> np.ndarray:
    """Integer matrix ``N^(cone)_{j,l}``; determinant ``2^(3j/2)``."""
    check_index(cone, j, l)
    a, b = 2**j, 2 ** (j // 2)
    if cone == "h":
        return np.array([[a, l * b], [0, b]], dtype=np.int64)
    return np.array([[b, 0], [l * b, a]], dtype=np.int64)


def orientation_angle(cone: str, j: int, l: float) -> float:
    """Central frequency direction: ``arctan(l 2^{-j/2})`` (h) or ``arccot`` (v).

    ``arccot`` takes values in ``(0, pi)``. ``l`` may lie outside the valid
    shear range, which is needed for the neighbouring angles ``l +- 2``.
    """
    s = l * 2.0 ** (-j / 2)
    if cone == "h":
        return math.atan(s)
    if cone == "v":
        return math.pi / 2 - math.atan(s)
    raise ValueError(f"cone must be 'h' or 'v', got {cone!r}")


def pattern_periods(cone: str, j: int) -> tuple[int, int]:
    """Lattice denominators ``(p1, p2)``: ``y = (z1/p1, z2/p2)``."""
    fine, coarse = 2**j, 2 ** (j // 2)
    return (fine, coarse) if cone == "h" else (coarse, fine)


def pattern(cone: str, j: int, l: int = 0) -> np.ndarray:
    """Pattern points ``y`` as an array of shape ``(2^(3j/2), 2)``.

    Row-major with ``z1`` varying fastest. The set does not depend on ``l``.
    """
    check_index(cone, j, l)
    p1, p2 = pattern_periods(cone, j)
    z1 = np.arange(-p1 // 2, p1 // 2) if p1 > 1 else np.zeros(1, dtype=int)
    z2 = np.arange(-p2 // 2, p2 // 2) if p2 > 1 else np.zeros(1, dtype=int)
    Z2, Z1 = np.meshgrid(z2, z1, indexing="ij")
    return np.column_stack([Z1.ravel() / p1, Z2.ravel() / p2])


def _window_h(profile, j, l, xi1, xi2):
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    a = xi1 * 2.0**-j
    return profile.g_tilde(a) * profile.g(xi2 * 2.0 ** (-j / 2) - l * a)


def window_scaled_eval(cone: str, j: int, l: int, xi, profile: AdmissibleProfile = DEFAULT_PROFILE):
    """``Psi^(cone)((N^(cone)_{j,l})^{-T} xi)`` for ``xi`` of shape ``(..., 2)``."""
    check_index(cone, j, l)
    xi = np.asarray(xi, dtype=float)
    if cone == "h":
        return _window_h(profile, j, l, xi[..., 0], xi[..., 1])
    return _window_h(profile, j, l, xi[..., 1], xi[..., 0])


@dataclass(frozen=True)
class FrequencySupport:
    """Integer bounding box plus the sheared band predicate of one window.

    For the h-cone the predicate is ``2^j/3 < |k1| < (4/3) 2^j`` and
    ``|2^{-j/2} k2 - l 2^{-j} k1| < 2/3``; the v-cone swaps ``k1`` and ``k2``.
    """

    cone: str
    j: int
    l: int
    k1_range: tuple[int, int]
    k2_range: tuple[int, int]

    def contains(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        a, b = (k[..., 0], k[..., 1]) if self.cone == "h" else (k[..., 1], k[..., 0])
        j, l = self.j, self.l
        radial = (np.abs(a) > 2.0**j / 3) & (np.abs(a) < 4.0 * 2.0**j / 3)
        band = np.abs(b * 2.0 ** (-j / 2) - l * a * 2.0**-j) < 2.0 / 3
        return radial & band


def _h_extent(j: int, l: int):
    hi = math.ceil(4 * 2**j / 3) - 1
    half = 2.0 / 3 * 2 ** (j / 2)
    reach = abs(l) * 2 ** (-j / 2) * hi + half
    return hi, math.ceil(reach)


def frequency_support(cone: str, j: int, l: int) -> FrequencySupport:
    check_index(cone, j, l)
    hi, reach = _h_extent(j, l)
    r1, r2 = (-hi, hi), (-reach, reach)
    if cone == "v":
        r1, r2 = r2, r1
    return FrequencySupport(cone, j, l, r1, r2)


def support_points(cone: str, j: int, l: int, profile: AdmissibleProfile = DEFAULT_PROFILE):
    """Integer frequencies and window values covering the window support.

    Returns ``(k1, k2, w)`` as 2-D integer/float arrays of equal shape; rows
    run over the fine (radial) frequency and columns over the sheared band.
    Entries outside the support carry ``w == 0``.
    """
    check_index(cone, j, l)
    lo = math.floor(2**j / 3) + 1
    hi = math.ceil(4 * 2**j / 3) - 1
    a = np.concatenate([np.arange(-hi, -lo + 1), np.arange(lo, hi + 1)]).astype(np.int64)
    half = 2.0 / 3 * 2 ** (j / 2)
    centre = l * 2 ** (-j / 2) * a
    start = np.floor(centre - half).astype(np.int64) + 1
    width = int(math.ceil(2 * half)) + 1
    b = start[:, None] + np.arange(width)[None, :]
    A = np.broadcast_to(a[:, None], b.shape)
    w = _window_h(profile, j, l, A, b)
    if cone == "h":
        return A.copy(), b, w
    return b, A.copy(), w


def shearlet_space_eval(index: ShearletIndex, x, profile: AdmissibleProfile = DEFAULT_PROFILE):
    """Trigonometric shearlet ``psi_{j,l,y}`` at points ``x`` of shape ``(..., 2)``."""
    k1, k2, w = support_points(index.cone, index.j, index.l, profile)
    keep = w != 0
    k1, k2, w = k1[keep].astype(float), k2[keep].astype(float), w[keep]
    x = np.asarray(x, dtype=float)
    shift = 2 * np.pi * np.asarray(index.y, dtype=float)
    pts = x.reshape(-1, 2) - shift
    out = np.empty(pts.shape[0], dtype=complex)
    step = max(1, 2**20 // max(1, k1.size))
    for s in range(0, pts.shape[0], step):
        p = pts[s : s + step]
        phase = np.outer(p[:, 0], k1) + np.outer(p[:, 1], k2)
        out[s : s + step] = np.exp(1j * phase) @ w
    return (2.0 ** (-0.75 * index.j) * out).reshape(x.shape[:-1])


def polar_derivative_maxima(cone: str, j: int, l: int, profile: AdmissibleProfile = DEFAULT_PROFILE,
                            n: int = 1201, width: float = 3.0) -> dict[str, float]:
    """Largest finite-difference derivatives of ``rho, theta -> Psi_{j,l}(2^j rho Theta(theta))``.

    ``theta`` covers ``width * 2^{-j/2}`` on either side of the central
    direction and ``rho`` covers ``[0.3, 1.5]``; both with ``n`` points.
    Returns maxima of the first and second ``theta`` derivatives and the
    first ``rho`` derivative.
    """
    check_index(cone, j, l)
    half = width * 2.0 ** (-j / 2)
    th0 = orientation_angle(cone, j, l)
    th = np.linspace(th0 - half, th0 + half, n)
    rho = np.linspace(0.3, 1.5, n)
    R, TH = np.meshgrid(rho, th, indexing="ij")
    xi = 2.0**j * np.stack([R * np.cos(TH), R * np.sin(TH)], -1)
    P = window_scaled_eval(cone, j, l, xi, profile)
    d1 = np.gradient(P, th[1] - th[0], axis=1)
    d2 = np.gradient(d1, th[1] - th[0], axis=1)
    dr = np.gradient(P, rho[1] - rho[0], axis=0)
    return {"theta1": float(np.abs(d1).max()), "theta2": float(np.abs(d2).max()),
            "rho1": float(np.abs(dr).max())}
