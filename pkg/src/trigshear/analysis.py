"""Edge-aware statistics of shearlet coefficients.

Orientation sets collect the pattern points lying within ``eps0 2^{-j/2}``
of the edge at a place where the outer normal is in the angular band of
shear ``l``. The sweep reports the extreme coefficient magnitudes over
these sets, and decay fits turn magnitudes over several scales into an
estimated singularity order ``n`` from the exponent ``3/4 + n``.

Normal directions are compared modulo ``pi`` by default because the
windows are even in frequency. ``directed="+"`` / ``"-"`` restricts to the
normal ``theta`` or ``theta + pi`` respectively, which splits each shear into
the two opposite edge orientations it sees.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .cartoon import (
    BoundaryPoint,
    CartoonFunction,
    StarSet,
    boundary_samples,
    intersecting_squares,
)
from .shearlets import orientation_angle, pattern
from .transform import CoefficientGrid

__all__ = [
    "OrientationSet",
    "SweepRow",
    "DecayFit",
    "DecayReport",
    "neighborhood_hits",
    "orientation_set",
    "orientation_sets",
    "arcs_seen",
    "square_representatives",
    "shear_band",
    "angle_in_band",
    "sweep",
    "decay_fit",
    "classify_order",
    "probe_label",
    "bound_profile",
    "aligned_shear",
    "INDETERMINATE_MARGIN",
    "DecayProbe",
    "default_probes",
    "probe_magnitude",
    "run_decay",
    "band_medians",
]

TWO_PI = 2 * np.pi
BOUNDARY_SAMPLES = 2**14
INDETERMINATE_MARGIN = 0.35


def _torus_delta(a, b):
    return np.mod(np.asarray(a) - np.asarray(b) + np.pi, TWO_PI) - np.pi


def _refine(T: StarSet, t, target, iters: int = 8):
    """Newton steps on the squared distance ``|gamma(t) - target|^2``."""
    t = np.array(t, dtype=float)
    for _ in range(iters):
        g = T.gamma(t)
        dg = T.gamma_prime(t)
        r, dr, ddr = T.radius(t), T.radius(t, 1), T.radius(t, 2)
        c, s = np.cos(t), np.sin(t)
        ddg = np.stack([ddr * c - 2 * dr * s - r * c, ddr * s + 2 * dr * c - r * s], -1)
        diff = _torus_delta(g, target)
        f1 = np.einsum("...i,...i", diff, dg)
        f2 = np.einsum("...i,...i", dg, dg) + np.einsum("...i,...i", diff, ddg)
        step = np.where(f2 > 0, f1 / np.where(f2 > 0, f2, 1.0), 0.0)
        t = t - np.clip(step, -0.05, 0.05)
    return t


def neighborhood_hits(T: StarSet, y, eps: float, samples: int = BOUNDARY_SAMPLES) -> list[BoundaryPoint]:
    """Boundary points within distance ``eps`` of the torus point ``2 pi y``.

    Returns every boundary sample inside the ball together with the refined
    local distance minima; ordered by curve parameter.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    target = TWO_PI * np.asarray(y, dtype=float)
    t = np.linspace(0, TWO_PI, samples, endpoint=False)
    dist = np.linalg.norm(_torus_delta(T.gamma(t), target), axis=-1)
    # local minima of the sampled distance, refined by Newton
    is_min = (dist <= np.roll(dist, 1)) & (dist <= np.roll(dist, -1))
    tmin = np.mod(_refine(T, t[is_min], target), TWO_PI)
    dmin = np.linalg.norm(_torus_delta(T.gamma(tmin), target), axis=-1)
    ts = np.concatenate([t[dist < eps], tmin[dmin < eps]])
    ts = np.unique(np.round(ts, 15))
    if ts.size == 0:
        return []
    pos, ang, w = boundary_samples(T, ts)
    return [BoundaryPoint(float(a), p, float(b), float(c)) for a, p, b, c in zip(ts, pos, ang, w)]


def angle_in_band(normal, lo: float, hi: float, directed: str | None = None):
    """Is the normal angle inside the open band ``(lo, hi)``?

    Undirected comparison works modulo ``pi``; ``directed="+"`` compares
    modulo ``2 pi`` and ``"-"`` tests the opposite normal.
    """
    lo, hi = min(lo, hi), max(lo, hi)
    normal = np.asarray(normal, dtype=float)
    if directed is None:
        rel = np.mod(normal - lo, np.pi)
    elif directed == "+":
        rel = np.mod(normal - lo, TWO_PI)
    elif directed == "-":
        rel = np.mod(normal + np.pi - lo, TWO_PI)
    else:
        raise ValueError("directed must be None, '+' or '-'")
    return (rel > 0) & (rel < hi - lo)


def shear_band(cone: str, j: int, l: int) -> tuple[float, float]:
    a, b = orientation_angle(cone, j, l - 2), orientation_angle(cone, j, l + 2)
    return min(a, b), max(a, b)


@dataclass(frozen=True)
class OrientationSet:
    """Pattern points near the edge whose local normal matches shear ``l``.

    ``hit_t[i]`` is the curve parameter of the closest qualifying edge point
    for ``points[i]``, and ``hit_span[i]`` the range of all qualifying
    parameters (used to tell which boundary arcs a point sees).
    """

    cone: str
    j: int
    l: int
    eps0: float
    directed: str | None
    indices: np.ndarray
    points: np.ndarray
    hit_t: np.ndarray
    hit_ts: tuple = field(default=(), repr=False)

    @property
    def eps(self) -> float:
        return self.eps0 * 2.0 ** (-self.j / 2)

    @property
    def theta(self) -> float:
        th = orientation_angle(self.cone, self.j, self.l)
        return th + np.pi if self.directed == "-" else th

    def __len__(self) -> int:
        return len(self.indices)


class _BoundaryCache:
    """Dense boundary samples and a periodic KD-tree of the pattern."""

    def __init__(self, T: StarSet, samples: int):
        self.T = T
        self.t = np.linspace(0, TWO_PI, samples, endpoint=False)
        self.pos, self.ang, self.w = boundary_samples(T, self.t)
        self.spacing = float(self.w.max() * TWO_PI / samples)


def orientation_set(T: StarSet, cone: str, j: int, l: int, eps0: float,
                    directed: str | None = None, samples: int = BOUNDARY_SAMPLES,
                    _cache: _BoundaryCache | None = None) -> OrientationSet:
    """Filter ``pattern(cone, j, l)`` by the edge-distance and normal-angle condition."""
    if j % 2:
        raise ValueError("j must be even")
    pts = pattern(cone, j, l)
    empty = OrientationSet(cone, j, l, eps0, directed, np.zeros(0, int), np.zeros((0, 2)), np.zeros(0))
    if eps0 <= 0:
        return empty
    eps = eps0 * 2.0 ** (-j / 2)
    cache = _cache or _BoundaryCache(T, samples)
    lo, hi = shear_band(cone, j, l)
    ok = angle_in_band(cache.ang, lo, hi, directed)
    if not np.any(ok):
        return empty
    bt = cache.t[ok]
    bpos = np.mod(cache.pos[ok] + np.pi, TWO_PI)
    tree = cKDTree(np.mod(TWO_PI * pts + np.pi, TWO_PI), boxsize=TWO_PI)
    near = tree.query_ball_point(bpos, eps + cache.spacing)
    pair_y = np.fromiter((i for lst in near for i in lst), dtype=np.int64)
    if pair_y.size == 0:
        return empty
    pair_t = np.repeat(bt, [len(lst) for lst in near])
    # refine each candidate pair to the true local closest point
    target = TWO_PI * pts[pair_y]
    tr = _refine(T, pair_t, target)
    tr = np.where(np.abs(tr - pair_t) <= 2 * TWO_PI / samples, tr, pair_t)
    _, ang_r, _ = boundary_samples(T, tr)
    dist_s = np.linalg.norm(_torus_delta(T.gamma(pair_t), target), axis=-1)
    dist_r = np.linalg.norm(_torus_delta(T.gamma(tr), target), axis=-1)
    good_s = dist_s < eps
    good_r = (dist_r < eps) & angle_in_band(ang_r, lo, hi, directed)
    good = good_s | good_r
    if not np.any(good):
        return empty
    best_d = np.where(good_r, dist_r, dist_s)
    best_t = np.where(good_r, tr, pair_t)
    pair_y, best_d, best_t = pair_y[good], best_d[good], best_t[good]
    order = np.lexsort((best_d, pair_y))
    pair_y, best_t = pair_y[order], best_t[order]
    members, first = np.unique(pair_y, return_index=True)
    ts = tuple(np.split(best_t, first[1:]))
    return OrientationSet(cone, j, l, eps0, directed, members, pts[members], best_t[first],
                          tuple(np.mod(x, TWO_PI) for x in ts))


def orientation_sets(T: StarSet, j: int, eps0: float, cones=("h", "v"), ls=None,
                     directed: Sequence[str | None] = (None,), samples: int = BOUNDARY_SAMPLES):
    """Orientation sets for every ``(cone, l, directed)`` combination."""
    from .shearlets import shears

    cache = _BoundaryCache(T, samples)
    ls = shears(j) if ls is None else ls
    return {
        (cone, l, d): orientation_set(T, cone, j, l, eps0, d, samples, cache)
        for cone in cones for l in ls for d in directed
    }


@dataclass(frozen=True)
class SweepRow:
    cone: str
    l: int
    theta: float
    L_max: float
    L_min: float
    count: int
    directed: str | None = None
    skipped: bool = False


def sweep(grids: Mapping, sets: Mapping) -> list[SweepRow]:
    """Extreme coefficient magnitudes over each orientation set.

    ``grids`` maps ``(cone, l)`` (or ``(cone, j, l)``) to a
    :class:`CoefficientGrid`; ``sets`` maps ``(cone, l[, directed])`` to an
    :class:`OrientationSet`. Empty sets yield rows flagged ``skipped`` with
    NaN magnitudes. Rows are sorted by angle.
    """
    by_cl = {}
    for key, g in grids.items():
        by_cl[(g.cone, g.l)] = g
    rows = []
    for key, s in sets.items():
        g = by_cl[(s.cone, s.l)]
        if len(s) == 0:
            rows.append(SweepRow(s.cone, s.l, s.theta, math.nan, math.nan, 0, s.directed, True))
            continue
        mag = np.abs(g.values[s.indices])
        rows.append(SweepRow(s.cone, s.l, s.theta, float(mag.max()), float(mag.min()), len(s), s.directed))
    return sorted(rows, key=lambda r: (r.theta, r.cone))


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    residual: float
    scales: tuple[int, ...]


def decay_fit(series: Sequence[tuple[int, float]]) -> DecayFit:
    """Least-squares line through ``(j, log2 |magnitude|)``.

    Non-positive magnitudes are dropped with a warning; fewer than three
    remaining points raise ``ValueError``.
    """
    js, mags = [], []
    for j, m in series:
        if not m > 0:
            warnings.warn(f"dropping non-positive magnitude at j={j}", RuntimeWarning, stacklevel=2)
            continue
        js.append(j)
        mags.append(m)
    if len(js) < 3:
        raise ValueError("decay fit needs at least three positive magnitudes")
    x = np.asarray(js, dtype=float)
    yv = np.log2(np.asarray(mags, dtype=float))
    slope, intercept = np.polyfit(x, yv, 1)
    resid = float(np.sqrt(np.mean((yv - (slope * x + intercept)) ** 2)))
    return DecayFit(float(slope), float(intercept), resid, tuple(js))


def classify_order(slope: float) -> tuple[int, float]:
    """Order estimate ``round(-slope - 3/4)`` (clamped at 0) and its margin."""
    x = -slope - 0.75
    n = max(0, int(round(x)))
    return n, abs(x - n)


def probe_label(slope: float, kind: str = "edge") -> str:
    """Human label for a decay probe: ``n=<k>``, ``indeterminate`` or ``smooth``."""
    if kind == "off-edge" and slope <= -3:
        return "smooth"
    n, margin = classify_order(slope)
    if margin > INDETERMINATE_MARGIN:
        return "indeterminate"
    return f"n={n}"


@dataclass
class DecayReport:
    """Magnitudes over scales for one probe, with fit and classification."""

    tag: str
    kind: str
    cone: str
    shear_policy: str
    series: list[tuple[int, float]]
    fit: DecayFit | None = None
    order: int | None = None
    margin: float | None = None
    label: str | None = None

    def finish(self) -> "DecayReport":
        self.fit = decay_fit(self.series)
        self.order, self.margin = classify_order(self.fit.slope)
        self.label = probe_label(self.fit.slope, self.kind)
        return self

    def to_dict(self) -> dict:
        return {
            "tag": self.tag,
            "kind": self.kind,
            "cone": self.cone,
            "shear_policy": self.shear_policy,
            "series": [[int(j), float(m)] for j, m in self.series],
            "slope": None if self.fit is None else self.fit.slope,
            "intercept": None if self.fit is None else self.fit.intercept,
            "residual": None if self.fit is None else self.fit.residual,
            "order": self.order,
            "margin": self.margin,
            "label": self.label,
        }


def aligned_shear(normal_angle: float, j: int) -> tuple[str, int]:
    """Cone and shear whose central direction best matches a normal angle."""
    m = 2 ** (j // 2)
    c, s = math.cos(normal_angle), math.sin(normal_angle)
    if abs(c) >= abs(s):
        return "h", int(np.clip(round(s / c * m), -(m - 1), m - 1))
    return "v", int(np.clip(round(c / s * m), -(m - 1), m - 1))


def bound_profile(x0: np.ndarray, normal_angles: np.ndarray, cone: str, j: int, l: int,
                  y, n: int, q: int) -> float:
    """Upper-bound shape summed over one edge point per intersecting square.

    ``2^{-3j/4} sum (1 + 2^{j/2}|sin(theta_jl - vartheta)|)^{-5/2}
    / (2^{jn} (1 + 2^j |2 pi y - x0|^2)^q)``, without the unknown constant.
    """
    if q < 3:
        raise ValueError("q must be at least 3")
    x0 = np.asarray(x0, dtype=float).reshape(-1, 2)
    th = orientation_angle(cone, j, l)
    ang = (1.0 + 2.0 ** (j / 2) * np.abs(np.sin(th - np.asarray(normal_angles)))) ** -2.5
    d2 = np.sum(_torus_delta(TWO_PI * np.asarray(y, dtype=float), x0) ** 2, axis=-1)
    loc = (1.0 + 2.0**j * d2) ** -q
    return float(2.0 ** (-0.75 * j) * 2.0 ** (-j * n) * np.sum(ang * loc))


def square_representatives(T: StarSet, j: int):
    """One edge point and its normal angle per edge-intersecting dyadic square."""
    _, x0, th = intersecting_squares(T, j)
    return x0, th


def arcs_seen(f: CartoonFunction, s: OrientationSet) -> list[set[int]]:
    """Singularity orders touched by each member's qualifying edge points.

    Blend zones are reported as ``-1``.
    """
    return [set(int(o) for o in f.order_at(ts)) for ts in s.hit_ts]


# -- decay probes ----------------------------------------------------------------

@dataclass(frozen=True)
class DecayProbe:
    """A place to follow across scales.

    Edge probes sit on the boundary with a known outer normal and read the
    largest magnitude at the best-aligned shear within ``eps0 2^{-j/2}``.
    Off-edge probes read the largest magnitude over all shears at the
    pattern point nearest to ``x``.
    """

    tag: str
    kind: str
    x: tuple[float, float]
    normal_angle: float | None = None
    order: int | None = None


def default_probes(f: CartoonFunction, off_edge_distance: float = 0.5) -> list[DecayProbe]:
    """One edge probe per arc midpoint plus an off-edge probe at the star centre."""
    out = []
    for s, arc in enumerate(f.arcs):
        span = np.mod(arc.stop - arc.start, TWO_PI) or TWO_PI
        t = float(np.mod(arc.start + 0.5 * span, TWO_PI))
        pos, ang, _ = boundary_samples(f.star, np.array([t]))
        out.append(DecayProbe(f"arc{s}", "edge", (float(pos[0, 0]), float(pos[0, 1])), float(ang[0]), arc.order))
    centre = np.asarray(f.star.origin, dtype=float)
    gap = np.linalg.norm(_torus_delta(f.star.gamma(np.linspace(0, TWO_PI, 4096, endpoint=False)), centre), axis=-1)
    if gap.min() >= off_edge_distance:
        out.append(DecayProbe("centre", "off-edge", (float(centre[0]), float(centre[1]))))
    return out


def probe_magnitude(spec, j: int, probe: DecayProbe, eps0: float = 0.5, profile=None) -> tuple[float, str, int]:
    """Magnitude read by ``probe`` from a spectrum at scale ``j``; also returns the shear used."""
    from .shearlets import DEFAULT_PROFILE, shears
    from .transform import analysis_all, analysis_single

    profile = profile or DEFAULT_PROFILE
    x = np.asarray(probe.x, dtype=float)
    if probe.kind == "edge":
        cone, l = aligned_shear(probe.normal_angle, j)
        g = analysis_all(spec, cone, j, l, profile)
        d = np.linalg.norm(_torus_delta(TWO_PI * g.points, x), axis=-1)
        near = d < eps0 * 2.0 ** (-j / 2)
        mag = g.magnitude[near] if np.any(near) else g.magnitude[[int(np.argmin(d))]]
        return float(mag.max()), cone, l
    best = (-1.0, "h", 0)
    for cone in ("h", "v"):
        pts = pattern(cone, j)
        y = pts[int(np.argmin(np.linalg.norm(_torus_delta(TWO_PI * pts, x), axis=-1)))]
        for l in shears(j):
            m = abs(analysis_single(spec, cone, j, l, y, profile))
            if m > best[0]:
                best = (m, cone, l)
    return best


def run_decay(f: CartoonFunction, scales: Sequence[int], probes: Sequence[DecayProbe] | None = None,
              eps0: float = 0.5, oversample: int = 8, workers: int | None = None) -> list[DecayReport]:
    """Decay reports for every probe; one spectrum per scale is held at a time."""
    from .transform import required_kmax, resolution_for, spectrum_from_function

    scales = sorted(scales)
    if len(scales) < 3:
        raise ValueError("decay fits need at least three scales")
    probes = default_probes(f) if probes is None else list(probes)
    series: dict[str, list] = {p.tag: [] for p in probes}
    policy: dict[str, list] = {p.tag: [] for p in probes}
    for j in scales:
        N = resolution_for(j, oversample)
        spec = spectrum_from_function(f, N, kmax=min(N // 2, required_kmax(j)), workers=workers)
        for p in probes:
            m, cone, l = probe_magnitude(spec, j, p, eps0)
            series[p.tag].append((j, m))
            policy[p.tag].append(f"{cone}{l:+d}")
        del spec
    return [DecayReport(p.tag, p.kind, "/".join(sorted({s[0] for s in policy[p.tag]})),
                        ",".join(policy[p.tag]), series[p.tag]).finish() for p in probes]


def band_medians(f: CartoonFunction, rows: Sequence[SweepRow], sets: Mapping) -> dict[int, float]:
    """Median ``L_max`` over orientation sets whose edge points all lie on arcs of one order.

    ``sets`` must be keyed like ``rows`` (``(cone, l, directed)``); sets that
    touch blend zones or several orders are left out.
    """
    by_order: dict[int, list[float]] = {}
    for r in rows:
        if r.skipped:
            continue
        seen = set().union(*arcs_seen(f, sets[(r.cone, r.l, r.directed)]))
        if len(seen) == 1 and -1 not in seen:
            by_order.setdefault(seen.pop(), []).append(r.L_max)
    return {n: float(np.median(v)) for n, v in sorted(by_order.items())}
