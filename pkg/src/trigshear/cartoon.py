"""Star-shaped domains and cartoon-like functions with graded edge singularities.

A cartoon function is ``f = f0 + f1 * chi_T``. The interior factor ``f1`` is
built from powers of the radial defect ``d(x) = r(angle) - |x - x0|``, which
vanishes exactly on the boundary: on a boundary arc carrying order ``n`` the
factor behaves like ``a * d^n``, so all directional derivatives of order
``< n`` vanish on the edge and the ``n``-th does not (except along the
tangent). Neighbouring arcs are blended by a smooth angular partition of
unity, and a smooth cutoff restricts ``f1`` to a tube around the edge.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .admissible import AdmissibleProfile

__all__ = [
    "StarSet",
    "BoundaryPoint",
    "Arc",
    "CartoonFunction",
    "boundary_point",
    "boundary_samples",
    "contains",
    "signed_radial_defect",
    "build_graded_cartoon",
    "directional_derivative",
    "periodize_sample",
    "dyadic_square_census",
    "intersecting_squares",
    "fig1_cartoon",
    "chi_cartoon",
    "single_order_cartoon",
    "bump_f0",
]

TWO_PI = 2.0 * np.pi
_STEP = AdmissibleProfile()  # C-infinity transition used for all cutoffs


@dataclass(frozen=True)
class StarSet:
    """Star-shaped set with boundary ``x0 + r(t) (cos t, sin t)``.

    ``r(t) = const + sum_k cos[k-1] cos(k t) + sin[k-1] sin(k t)``.
    """

    origin: tuple[float, float] = (0.0, 0.0)
    const: float = 1.0
    cos: tuple[float, ...] = ()
    sin: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        object.__setattr__(self, "cos", tuple(float(v) for v in self.cos))
        object.__setattr__(self, "sin", tuple(float(v) for v in self.sin))
        t = np.linspace(0, TWO_PI, 4096, endpoint=False)
        r = self.radius(t)
        if np.any(r <= 0):
            raise ValueError("radius function must be positive")
        g = self.gamma(t)
        if np.any(np.abs(g) >= np.pi):
            raise ValueError("star set must lie inside (-pi, pi)^2")

    @classmethod
    def circle(cls, radius: float, origin=(0.0, 0.0)) -> "StarSet":
        return cls(origin=origin, const=radius)

    def radius(self, t, deriv: int = 0):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, self.const if deriv == 0 else 0.0)
        for k, a in enumerate(self.cos, start=1):
            # d^m/dt^m cos(kt) = k^m cos(kt + m pi/2)
            out = out + a * k**deriv * np.cos(k * t + deriv * np.pi / 2)
        for k, b in enumerate(self.sin, start=1):
            out = out + b * k**deriv * np.sin(k * t + deriv * np.pi / 2)
        return out

    def gamma(self, t):
        t = np.asarray(t, dtype=float)
        r = self.radius(t)
        return np.stack([self.origin[0] + r * np.cos(t), self.origin[1] + r * np.sin(t)], axis=-1)

    def gamma_prime(self, t):
        t = np.asarray(t, dtype=float)
        r, dr = self.radius(t), self.radius(t, 1)
        c, s = np.cos(t), np.sin(t)
        return np.stack([dr * c - r * s, dr * s + r * c], axis=-1)

    @property
    def tau(self) -> float:
        """Bound on ``max(|r|, |r'|, |r''|)`` from the series coefficients."""
        ks = [k for k in range(1, len(self.cos) + 1)] + [k for k in range(1, len(self.sin) + 1)]
        coeffs = [abs(a) for a in self.cos + self.sin]
        bounds = [abs(self.const) * (m == 0) + sum(k**m * a for k, a in zip(ks, coeffs)) for m in range(3)]
        return max(bounds)

    @property
    def inradius(self) -> float:
        t = np.linspace(0, TWO_PI, 4096, endpoint=False)
        return float(self.radius(t).min())

    @property
    def perimeter(self) -> float:
        t = np.linspace(0, TWO_PI, 4096, endpoint=False)
        return float(np.linalg.norm(self.gamma_prime(t), axis=-1).mean() * TWO_PI)

    def to_dict(self) -> dict:
        return {
            "origin": list(self.origin),
            "radius_series": {"const": self.const, "cos": list(self.cos), "sin": list(self.sin)},
        }


@dataclass(frozen=True)
class BoundaryPoint:
    t: float
    position: np.ndarray
    normal_angle: float
    weight: float

    @property
    def normal(self) -> np.ndarray:
        return np.array([math.cos(self.normal_angle), math.sin(self.normal_angle)])


def boundary_samples(T: StarSet, t):
    """Vectorised boundary geometry: ``(position, normal_angle, weight)``.

    Normal angles are in ``[0, 2 pi)``; ``weight = |gamma'(t)|``.
    """
    t = np.asarray(t, dtype=float)
    if np.any(T.radius(t) <= 0):
        raise ValueError("radius function is not positive")
    pos = T.gamma(t)
    dg = T.gamma_prime(t)
    # counter-clockwise parametrisation: rotate the tangent clockwise
    ang = np.mod(np.arctan2(-dg[..., 0], dg[..., 1]), TWO_PI)
    return pos, ang, np.linalg.norm(dg, axis=-1)


def boundary_point(T: StarSet, t: float) -> BoundaryPoint:
    pos, ang, w = boundary_samples(T, t)
    return BoundaryPoint(float(t), pos, float(ang), float(w))


def _polar(T: StarSet, x1, x2):
    dx = np.asarray(x1, dtype=float) - T.origin[0]
    dy = np.asarray(x2, dtype=float) - T.origin[1]
    return np.hypot(dx, dy), np.arctan2(dy, dx)


def contains(T: StarSet, x) -> np.ndarray:
    """Strict interior membership; boundary points count as outside."""
    x = np.asarray(x, dtype=float)
    rho, phi = _polar(T, x[..., 0], x[..., 1])
    return rho < T.radius(phi)


def signed_radial_defect(T: StarSet, x, cap: float | None = None):
    """``r(angle(x - x0)) - |x - x0|``: positive inside, zero on the boundary.

    At ``x == x0`` the angle is undefined and ``cap`` (default ``T.const``)
    is returned instead.
    """
    x = np.asarray(x, dtype=float)
    rho, phi = _polar(T, x[..., 0], x[..., 1])
    d = T.radius(phi) - rho
    if np.any(rho == 0):
        d = np.where(rho == 0, T.const if cap is None else cap, d)
    return d


@dataclass(frozen=True)
class Arc:
    """Boundary arc ``[start, stop)`` in the curve parameter (radians)."""

    start: float
    stop: float
    order: int
    amplitude: float = 1.0


def _wrap(a):
    """Wrap angle differences to ``[-pi, pi)``."""
    return np.mod(np.asarray(a) + np.pi, TWO_PI) - np.pi


def bump_f0(amplitude: float, centre, width: float) -> Callable:
    """Smooth compactly supported background ``a * (1 - h(|x - c| / w))``."""
    cx, cy = (float(v) for v in centre)

    def f0(x1, x2):
        s = np.hypot(np.asarray(x1) - cx, np.asarray(x2) - cy) / width
        return amplitude * (1.0 - _STEP.step(s))

    f0.spec = {"preset": "bump", "amplitude": amplitude, "centre": [cx, cy], "width": width}
    return f0


def _zero_f0(x1, x2):
    return np.zeros(np.broadcast(np.asarray(x1), np.asarray(x2)).shape)


_zero_f0.spec = {"preset": "zero"}


@dataclass(frozen=True)
class CartoonFunction:
    """``f = f0 + f1 chi_T`` with an arc-wise singularity order profile.

    Parameters
    ----------
    star : StarSet
    arcs : tuple of Arc
        Partition of the parameter circle, ordered counter-clockwise.
    blend : float
        Full width (radians) of the angular transitions between arcs.
    f0 : callable
        Smooth background ``f0(x1, x2)``.
    tube : float or None
        Half-width of the cutoff tube around the edge (``|d| <= tube/2``
        is untouched, ``|d| >= tube`` is zeroed). ``None`` disables the cutoff.
    smoothness : int
        Nominal smoothness ``u`` of ``f0`` and ``f1`` (metadata).
    """

    star: StarSet
    arcs: tuple[Arc, ...]
    blend: float = 0.1
    f0: Callable = field(default=_zero_f0, compare=False)
    tube: float | None = None
    smoothness: int = 16

    @property
    def breakpoints(self) -> np.ndarray:
        return np.array([a.start for a in self.arcs])

    def arc_index(self, phi) -> np.ndarray:
        """Index of the arc containing each parameter value."""
        phi = np.mod(np.asarray(phi, dtype=float), TWO_PI)
        if len(self.arcs) == 1:
            return np.zeros(phi.shape, dtype=int)
        rel = np.mod(phi - self.arcs[0].start, TWO_PI)
        ends = np.cumsum([np.mod(a.stop - a.start, TWO_PI) or TWO_PI for a in self.arcs])
        return np.minimum(np.searchsorted(ends, rel, side="right"), len(self.arcs) - 1)

    def arc_weights(self, phi) -> np.ndarray:
        """Smooth angular partition of unity, shape ``(len(arcs),) + phi.shape``."""
        phi = np.asarray(phi, dtype=float)
        S = len(self.arcs)
        if S == 1:
            return np.ones((1,) + phi.shape)
        idx = self.arc_index(phi)
        w = np.stack([(idx == s).astype(float) for s in range(S)])
        half = 0.5 * self.blend
        for s, arc in enumerate(self.arcs):
            prev = (s - 1) % S
            delta = _wrap(phi - arc.start)
            near = np.abs(delta) < half
            if np.any(near):
                up = _STEP.step(delta[near] / self.blend + 0.5)
                w[s][near] = up
                w[prev][near] = 1.0 - up
        return w

    def f1(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        rho, phi = _polar(self.star, x1, x2)
        d = self.star.radius(phi) - rho
        weights = self.arc_weights(phi)
        out = np.zeros(np.broadcast(x1, x2).shape)
        for wgt, arc in zip(weights, self.arcs):
            out = out + wgt * arc.amplitude * d**arc.order
        if self.tube is not None:
            out = out * self.cutoff(d)
        return out

    def cutoff(self, d):
        """Tube cutoff in terms of the radial defect."""
        w = self.tube
        return 1.0 - _STEP.step((np.abs(d) - 0.5 * w) / (0.5 * w))

    def __call__(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        rho, phi = _polar(self.star, x1, x2)
        inside = rho < self.star.radius(phi)
        out = np.asarray(self.f0(x1, x2), dtype=float) * np.ones(inside.shape)
        if np.any(inside):
            out[inside] += self.f1(np.broadcast_to(x1, inside.shape)[inside],
                                   np.broadcast_to(x2, inside.shape)[inside])
        return out

    def order_at(self, t) -> np.ndarray:
        """Singularity order at boundary parameters ``t``, or -1 inside a blend zone."""
        t = np.asarray(t, dtype=float)
        orders = np.array([a.order for a in self.arcs])
        out = orders[self.arc_index(t)]
        if len(self.arcs) > 1:
            for arc in self.arcs:
                out = np.where(np.abs(_wrap(t - arc.start)) < 0.5 * self.blend, -1, out)
        return out

    def to_dict(self) -> dict:
        d = self.star.to_dict()
        d.update(
            arcs=[{"from": a.start, "to": a.stop, "order": a.order, "amplitude": a.amplitude}
                  for a in self.arcs],
            blend=self.blend,
            tube=self.tube,
            f0=getattr(self.f0, "spec", {"preset": "custom"}),
            smoothness=self.smoothness,
        )
        return d


def _normalise_arcs(arcs) -> tuple[Arc, ...]:
    out = [a if isinstance(a, Arc) else Arc(*a) for a in arcs]
    if not out:
        raise ValueError("at least one arc is required")
    if len(out) == 1:
        a = out[0]
        if not math.isclose(np.mod(a.stop - a.start, TWO_PI), 0.0, abs_tol=1e-12):
            raise ValueError("a single arc must cover the whole boundary")
        return (Arc(float(np.mod(a.start, TWO_PI)), float(np.mod(a.start, TWO_PI)), a.order, a.amplitude),)
    for a, b in zip(out, out[1:] + out[:1]):
        if not math.isclose(np.mod(a.stop - b.start + np.pi, TWO_PI) - np.pi, 0.0, abs_tol=1e-12):
            raise ValueError("arcs must be contiguous and partition [0, 2 pi)")
    total = sum(np.mod(a.stop - a.start, TWO_PI) for a in out)
    if not math.isclose(total, TWO_PI, rel_tol=1e-12):
        raise ValueError("arcs overlap or leave gaps")
    for a in out:
        if a.order < 0:
            raise ValueError("singularity orders must be non-negative")
    return tuple(Arc(float(np.mod(a.start, TWO_PI)), float(np.mod(a.stop, TWO_PI)), int(a.order),
                     float(a.amplitude)) for a in out)


def build_graded_cartoon(
    T: StarSet,
    arcs: Sequence,
    f0: Callable | None = None,
    blend: float = 0.1,
    tube: float | str | None = "auto",
    smoothness: int = 16,
) -> CartoonFunction:
    """Cartoon function whose interior factor has the given order profile.

    ``arcs`` is a sequence of :class:`Arc` (or ``(start, stop, order,
    amplitude)`` tuples) partitioning the boundary parameter. ``tube="auto"``
    uses ``min(0.5, inradius / 2)``.
    """
    arcs = _normalise_arcs(arcs)
    if len(arcs) > 1:
        shortest = min(np.mod(a.stop - a.start, TWO_PI) for a in arcs)
        if blend >= 0.5 * shortest:
            raise ValueError("blend width must be below half the shortest arc")
    if blend <= 0:
        raise ValueError("blend width must be positive")
    if tube == "auto":
        tube = min(0.5, 0.5 * T.inradius)
    if tube is not None:
        t = np.linspace(0, TWO_PI, 4096, endpoint=False)
        outer = T.gamma(t) + tube * np.stack([np.cos(t), np.sin(t)], -1)
        if np.any(np.abs(outer) >= np.pi):
            raise ValueError("edge tube leaves (-pi, pi)^2")
    if 4 * (max(a.order for a in arcs) + 1) >= smoothness:
        raise ValueError("smoothness u must exceed 4 (max order + 1)")
    return CartoonFunction(T, arcs, blend, f0 if f0 is not None else _zero_f0, tube, smoothness)


def fig1_cartoon(radius: float = 2.0, blend: float = 0.1) -> CartoonFunction:
    """Circle with orders 0, 1, 2 on the arcs split at pi/3, pi, 5 pi/3."""
    b = (np.pi / 3, np.pi, 5 * np.pi / 3)
    arcs = [Arc(b[0], b[1], 0), Arc(b[1], b[2], 1), Arc(b[2], b[0], 2)]
    return build_graded_cartoon(StarSet.circle(radius), arcs, blend=blend)


def chi_cartoon(T: StarSet | None = None) -> CartoonFunction:
    """Characteristic function of ``T`` (default: circle of radius 2)."""
    T = StarSet.circle(2.0) if T is None else T
    return build_graded_cartoon(T, [Arc(0.0, 0.0, 0)], tube=None)


def single_order_cartoon(order: int, radius: float = 2.0, amplitude: float = 1.0) -> CartoonFunction:
    """Circle cartoon with the same singularity order on the whole edge."""
    return build_graded_cartoon(StarSet.circle(radius), [Arc(0.0, 0.0, order, amplitude)])


# -- derivatives -----------------------------------------------------------

_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_OFFS = np.arange(-2, 3)


def directional_derivative(f, v, m: int, x, h: float | None = None):
    """``m``-th order directional derivative of ``f`` along unit ``v`` at ``x``.

    If ``f`` offers ``partial((r1, r2))`` (e.g. a polynomial field) the
    multinomial formula is evaluated exactly; otherwise a fourth-order
    central difference is applied ``m`` times along ``v`` with step
    ``h = 1e-5 (1 + |x|)``.
    """
    v = np.asarray(v, dtype=float)
    if not math.isclose(float(np.hypot(*v)), 1.0, rel_tol=0, abs_tol=1e-12):
        raise ValueError("direction must be a unit vector")
    x = np.asarray(x, dtype=float)
    if m < 0:
        raise ValueError("order must be non-negative")
    if hasattr(f, "partial"):
        total = 0.0
        for r1 in range(m + 1):
            r2 = m - r1
            total = total + math.comb(m, r1) * v[0] ** r1 * v[1] ** r2 * f.partial((r1, r2))(x[..., 0], x[..., 1])
        return total
    if h is None:
        h = 1e-5 * (1.0 + float(np.max(np.linalg.norm(x.reshape(-1, 2), axis=-1))))
    # m-fold convolution of the first-derivative stencil
    stencil = np.array([1.0])
    for _ in range(m):
        stencil = np.convolve(stencil, _D1)
    offs = np.arange(len(stencil)) - (len(stencil) - 1) // 2
    acc = 0.0
    for c, o in zip(stencil, offs):
        if c == 0.0:
            continue
        p = x + o * h * v
        acc = acc + c * f(p[..., 0], p[..., 1])
    return acc / h**m


# -- sampling and dyadic squares -------------------------------------------

def periodize_sample(f: Callable, N: int, chunk: int = 2**21) -> np.ndarray:
    """Samples ``f(x_m)`` on ``x_m = -pi + 2 pi m / N``; axis 0 is ``x1``."""
    if N < 1 or N & (N - 1):
        raise ValueError(f"grid size must be a power of two, got {N}")
    x = -np.pi + TWO_PI * np.arange(N) / N
    out = np.empty((N, N))
    rows = max(1, chunk // N)
    for s in range(0, N, rows):
        X1 = np.broadcast_to(x[s : s + rows, None], (min(rows, N - s), N))
        X2 = np.broadcast_to(x[None, :], X1.shape)
        out[s : s + rows] = f(X1, X2)
    return out


def intersecting_squares(T: StarSet, j: int, samples_per_side: int = 64):
    """Dyadic squares met by the boundary, with one boundary point each.

    Returns ``(keys, x0, normal_angle)`` where ``keys`` are ``(k1, k2)``
    square indices. Squares are found from ``samples_per_side * 2^(j/2)``
    boundary samples plus a corner-containment parity test.
    """
    if j % 2:
        raise ValueError("j must be even")
    m = 2 ** (j // 2)
    side = TWO_PI / m
    t = np.linspace(0, TWO_PI, samples_per_side * m, endpoint=False)
    pos, ang, _ = boundary_samples(T, t)
    k = np.floor((pos + np.pi) / side).astype(np.int64) % m
    keys = k[:, 0] * m + k[:, 1]
    uniq, first = np.unique(keys, return_index=True)
    found = {int(u): (pos[i], ang[i]) for u, i in zip(uniq, first)}
    # corner parity: squares whose corners disagree on membership
    c = -np.pi + side * np.arange(m + 1)
    C1, C2 = np.meshgrid(c, c, indexing="ij")
    inside = contains(T, np.stack([C1, C2], -1))
    mixed = (
        (inside[:-1, :-1] != inside[1:, :-1])
        | (inside[:-1, :-1] != inside[:-1, 1:])
        | (inside[:-1, :-1] != inside[1:, 1:])
    )
    extra = [int(a * m + b) for a, b in zip(*np.nonzero(mixed)) if int(a * m + b) not in found]
    for key in extra:
        centre = -np.pi + side * (np.array([key // m, key % m]) + 0.5)
        i = int(np.argmin(np.linalg.norm(pos - centre, axis=-1)))
        found[key] = (pos[i], ang[i])
    keys = np.array(sorted(found), dtype=np.int64)
    x0 = np.array([found[int(key)][0] for key in keys]).reshape(-1, 2)
    th = np.array([found[int(key)][1] for key in keys])
    return np.column_stack([keys // m, keys % m]), x0, th


def dyadic_square_census(T: StarSet, j: int) -> tuple[int, int]:
    """``(non-intersecting, intersecting)`` counts among the ``2^j`` dyadic squares."""
    keys, _, _ = intersecting_squares(T, j)
    n1 = len(keys)
    return 2**j - n1, n1
