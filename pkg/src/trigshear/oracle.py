"""Independent verification paths for Fourier transforms of cartoon pieces.

Everything here uses the continuous transform with the torus normalisation

    F[f](xi) = (2 pi)^{-2} int f(x) exp(-i xi.x) dx

and is evaluated by quadrature, never by the FFT machinery of
:mod:`trigshear.transform`. Two routes for ``F[p chi_T]`` are provided: a
polar area quadrature and a boundary-integral expansion in directional
derivatives of ``p``. Agreement between them is the oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import mpmath
import numpy as np
from numpy.polynomial.hermite_e import hermeval

from .cartoon import StarSet

__all__ = [
    "PolynomialField",
    "GaussianField",
    "QuadratureError",
    "OracleCase",
    "OracleResult",
    "boundary_constant",
    "ft_region_quadrature",
    "ft_region_boundary",
    "bessel_j1_series",
    "disc_ft",
    "ft_box_quadrature",
    "directional_fourier_identity_check",
    "default_polynomials",
    "default_star_sets",
    "default_probes",
    "default_cases",
    "run_cross_checks",
    "IdentityProbe",
    "default_identity_probes",
    "run_identity_checks",
    "MAX_DEGREE",
    "QUADRATURE_FLOOR",
]

TWO_PI = 2 * np.pi
NORM = TWO_PI**-2
MAX_DEGREE = 3
# successive-estimate differences stall near this level in double precision
QUADRATURE_FLOOR = 1e-13


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach its target."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error estimate {achieved:.3e})")
        self.achieved = achieved


@dataclass(frozen=True)
class PolynomialField:
    """Bivariate polynomial ``sum a[r1, r2] x1^r1 x2^r2`` of total degree ``<= u``.

    ``coeffs`` is a square array; entries with ``r1 + r2 > u`` must be zero.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        a = np.array(self.coeffs, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValueError("coefficient table must be a non-empty square array")
        r1, r2 = np.indices(a.shape)
        if np.any(a[r1 + r2 >= a.shape[0]] != 0):
            raise ValueError("coefficients beyond the total-degree bound must vanish")
        a.setflags(write=False)
        object.__setattr__(self, "coeffs", a)

    @classmethod
    def from_terms(cls, terms: dict, degree: int | None = None) -> "PolynomialField":
        """Build from ``{(r1, r2): value}``."""
        u = max((r1 + r2 for r1, r2 in terms), default=0) if degree is None else degree
        a = np.zeros((u + 1, u + 1))
        for (r1, r2), val in terms.items():
            if r1 + r2 > u:
                raise ValueError(f"term x1^{r1} x2^{r2} exceeds degree {u}")
            a[r1, r2] = val
        return cls(a)

    @property
    def bound(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def degree(self) -> int:
        """Exact total degree; ``-1`` for the zero polynomial."""
        r1, r2 = np.nonzero(self.coeffs)
        return int((r1 + r2).max()) if r1.size else -1

    def __call__(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        return np.polynomial.polynomial.polyval2d(x1, x2, self.coeffs)

    def partial(self, r) -> "PolynomialField":
        r1, r2 = r
        a = self.coeffs
        u = self.bound
        if r1 + r2 > u:
            return PolynomialField(np.zeros((1, 1)))
        out = np.zeros((u + 1 - r1 - r2, u + 1 - r1 - r2))
        for i in range(r1, u + 1):
            for k in range(r2, u + 1 - i):
                if a[i, k]:
                    c = math.perm(i, r1) * math.perm(k, r2)
                    out[i - r1, k - r2] = c * a[i, k]
        return PolynomialField(out)

    def _padded(self, u: int) -> np.ndarray:
        out = np.zeros((u + 1, u + 1))
        n = self.coeffs.shape[0]
        out[:n, :n] = self.coeffs
        return out

    def __add__(self, other: "PolynomialField") -> "PolynomialField":
        u = max(self.bound, other.bound)
        return PolynomialField(self._padded(u) + other._padded(u))

    def scale(self, c: float) -> "PolynomialField":
        return PolynomialField(c * self.coeffs)

    def directional(self, v, m: int) -> "PolynomialField":
        """``d^m_v p = sum_{|r|=m} binom(m, r1) v1^r1 v2^r2 d^r p`` (multinomial form)."""
        if m < 0:
            raise ValueError("order must be non-negative")
        v = np.asarray(v, dtype=float)
        out = PolynomialField(np.zeros((1, 1)))
        for r1 in range(m + 1):
            c = math.comb(m, r1) * v[0] ** r1 * v[1] ** (m - r1)
            out = out + self.partial((r1, m - r1)).scale(c)
        return out

    def directional_nested(self, v, m: int) -> "PolynomialField":
        """Same as :meth:`directional` by ``m`` successive first derivatives."""
        v = np.asarray(v, dtype=float)
        p = self
        for _ in range(m):
            p = p.partial((1, 0)).scale(v[0]) + p.partial((0, 1)).scale(v[1])
        return p


@dataclass(frozen=True)
class GaussianField:
    """``amplitude * exp(-|x - centre|^2 / (2 sigma^2))`` with analytic derivatives."""

    centre: tuple[float, float] = (0.0, 0.0)
    sigma: float = 0.5
    amplitude: float = 1.0

    def __call__(self, x1, x2):
        d1 = np.asarray(x1, dtype=float) - self.centre[0]
        d2 = np.asarray(x2, dtype=float) - self.centre[1]
        return self.amplitude * np.exp(-(d1**2 + d2**2) / (2 * self.sigma**2))

    def directional(self, v, m: int):
        """Callable for ``d^m_v f``; the Gaussian factorises along ``v`` and ``v^perp``."""
        v = np.asarray(v, dtype=float)
        s = self.sigma
        herm = np.zeros(m + 1)
        herm[m] = 1.0

        def deriv(x1, x2):
            d1 = np.asarray(x1, dtype=float) - self.centre[0]
            d2 = np.asarray(x2, dtype=float) - self.centre[1]
            t = (v[0] * d1 + v[1] * d2) / s
            return (-1.0 / s) ** m * hermeval(t, herm) * self(x1, x2)

        return deriv

    def support_radius(self, floor: float = 1e-18) -> float:
        return self.sigma * math.sqrt(2 * math.log(max(abs(self.amplitude), 1.0) / floor))

    def ft(self, xi) -> complex:
        """Closed-form transform (used only in tests)."""
        xi = np.asarray(xi, dtype=float)
        c = np.asarray(self.centre, dtype=float)
        s2 = self.sigma**2
        return complex(NORM * self.amplitude * TWO_PI * s2 * np.exp(-s2 * xi @ xi / 2) * np.exp(-1j * xi @ c))


# -- area quadrature ---------------------------------------------------------

def _polar_sum(p, T: StarSet, xi, n_phi: int, n_s: int) -> complex:
    phi = np.arange(n_phi) * (TWO_PI / n_phi)
    node, wts = np.polynomial.legendre.leggauss(n_s)
    r = T.radius(phi)
    # s in [0, r(phi)] mapped from [-1, 1]
    s = 0.5 * (node[None, :] + 1.0) * r[:, None]
    c, sn = np.cos(phi)[:, None], np.sin(phi)[:, None]
    x1 = T.origin[0] + s * c
    x2 = T.origin[1] + s * sn
    integrand = p(x1, x2) * np.exp(-1j * (xi[0] * x1 + xi[1] * x2)) * s
    inner = 0.5 * r * (integrand @ wts)
    return complex(NORM * inner.sum() * (TWO_PI / n_phi))


def ft_region_quadrature(p, T: StarSet, xi, tol: float = 1e-10,
                         max_phi: int = 2**14, max_s: int = 512) -> complex:
    """``(2 pi)^{-2} int_T p(x) exp(-i xi.x) dx`` in polar coordinates about the star centre.

    The angular direction uses the periodic trapezoid rule and the radial
    direction Gauss-Legendre; both are doubled until successive estimates
    differ by less than ``tol``. Raises :class:`QuadratureError` otherwise.
    """
    xi = np.asarray(xi, dtype=float)
    reach = float(np.hypot(*xi)) * T.tau
    n_phi = max(64, 2 ** math.ceil(math.log2(4 * reach + 16)))
    n_s = max(16, 2 ** math.ceil(math.log2(reach + 8)))
    prev = _polar_sum(p, T, xi, n_phi, n_s)
    err = math.inf
    while n_phi <= max_phi and n_s <= max_s:
        n_phi, n_s = 2 * n_phi, 2 * n_s
        cur = _polar_sum(p, T, xi, n_phi, n_s)
        err = abs(cur - prev)
        if err < tol:
            return cur
        prev = cur
    raise QuadratureError("area quadrature did not converge", err)


# -- boundary integral -------------------------------------------------------

def boundary_constant(m: int) -> complex:
    """Weight ``(2 pi)^{-2} i (-i)^m`` of the ``m``-th boundary term."""
    return NORM * 1j * (-1j) ** m


def _panel_rule(n_panels: int, order: int = 16):
    node, wts = np.polynomial.legendre.leggauss(order)
    h = TWO_PI / n_panels
    starts = np.arange(n_panels) * h
    t = (starts[:, None] + 0.5 * h * (node[None, :] + 1.0)).ravel()
    w = np.tile(0.5 * h * wts, n_panels)
    return t, w


def ft_region_boundary(p: PolynomialField, T: StarSet, rho: float, theta: float,
                       points_per_wave: int = 10, order: int = 16) -> complex:
    """``F[p chi_T](rho Theta)`` as a finite sum of boundary line integrals.

    ``sum_m C_m rho^{-(m+1)} int_dT d^m_Theta p(x) exp(-i rho Theta.x) Theta.n dsigma``
    with ``C_m`` from :func:`boundary_constant`; the sum stops at the degree of ``p``.
    Composite Gauss panels carry at least ``points_per_wave`` nodes per
    boundary oscillation.
    """
    if not rho > 0:
        raise ValueError("rho must be positive")
    u = p.degree
    if u < 0:
        return 0j
    Th = np.array([math.cos(theta), math.sin(theta)])
    L = T.perimeter
    waves = 1.0 + rho * L / TWO_PI
    n_panels = max(8, math.ceil(2 * points_per_wave * waves / order))
    t, w = _panel_rule(n_panels, order)
    g = T.gamma(t)
    dg = T.gamma_prime(t)
    # outward normal times arclength element for a counter-clockwise curve
    flux = Th[0] * dg[:, 1] - Th[1] * dg[:, 0]
    phase = np.exp(-1j * rho * (g @ Th))
    base = w * flux * phase
    total = 0j
    for m in range(u + 1):
        pm = p.directional(Th, m)
        total += boundary_constant(m) / rho ** (m + 1) * np.sum(pm(g[:, 0], g[:, 1]) * base)
    return complex(total)


# -- disc closed form ----------------------------------------------------------

def bessel_j1_series(x: float, dps: int = 60) -> float:
    """``J_1(x)`` from its power series in high-precision arithmetic."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        half = x / 2
        term = half
        total = term
        k = 0
        tiny = mpmath.mpf(10) ** (-dps + 5)
        while True:
            k += 1
            term = -term * half * half / (k * (k + 1))
            total += term
            if abs(term) < tiny * max(1, abs(total)) and k > abs(x):
                break
        return float(total)


def disc_ft(radius: float, xi, origin=(0.0, 0.0)) -> complex:
    """Transform of the indicator of a disc: ``(2 pi)^{-2} 2 pi R J_1(R|xi|) / |xi|``."""
    xi = np.asarray(xi, dtype=float)
    rho = float(np.hypot(*xi))
    shift = np.exp(-1j * (xi[0] * origin[0] + xi[1] * origin[1]))
    if rho == 0:
        return complex(NORM * np.pi * radius**2)
    return complex(NORM * TWO_PI * radius * bessel_j1_series(radius * rho) / rho * shift)


# -- directional derivative identity ------------------------------------------

def ft_box_quadrature(func, centre, half_width: float, xi, h: float) -> complex:
    """Trapezoid transform of a rapidly decaying ``func`` over a square box."""
    n = 2 * math.ceil(half_width / h) + 1
    a = np.linspace(-half_width, half_width, n)
    step = a[1] - a[0]
    x1 = centre[0] + a[:, None]
    x2 = centre[1] + a[None, :]
    vals = func(x1, x2) * np.exp(-1j * (xi[0] * x1 + xi[1] * x2))
    return complex(NORM * vals.sum() * step**2)


def directional_fourier_identity_check(f: GaussianField, v, m: int, xi, h: float | None = None) -> float:
    """``|F[d^m_v f](xi) - i^m (v.xi)^m F[f](xi)|`` with both transforms by quadrature."""
    v = np.asarray(v, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if m == 0:
        return 0.0
    R = f.support_radius()
    if h is None:
        # Nyquist margin well above the Gaussian's spectral width and |xi|
        h = min(f.sigma / 4, math.pi / (float(np.hypot(*xi)) + 12 / f.sigma))
    lhs = ft_box_quadrature(f.directional(v, m), f.centre, R, xi, h)
    rhs = (1j) ** m * float(v @ xi) ** m * ft_box_quadrature(f, f.centre, R, xi, h)
    return abs(lhs - rhs)


# -- default cross-check suite ---------------------------------------------------

def default_polynomials() -> list[PolynomialField]:
    """One polynomial of each exact degree ``0..3`` with fixed coefficients."""
    out = []
    for u in range(MAX_DEGREE + 1):
        terms = {(r1, r2): (-1) ** r1 / (1.0 + r1 + 2 * r2)
                 for r1 in range(u + 1) for r2 in range(u + 1 - r1)}
        out.append(PolynomialField.from_terms(terms, u))
    return out


def default_star_sets() -> dict[str, StarSet]:
    return {
        "circle": StarSet.circle(2.0),
        "three-lobe": StarSet(origin=(0.2, -0.1), const=1.5, cos=(0.0, 0.0, 0.3)),
    }


def default_probes(count: int = 20, rho_max: float = 20.0) -> list[tuple[float, float]]:
    """Deterministic ``(rho, theta)`` sample: even radii, golden-angle directions."""
    golden = math.pi * (3 - math.sqrt(5))
    return [(rho_max * (k + 1) / count, (k * golden) % TWO_PI) for k in range(count)]


@dataclass(frozen=True)
class OracleCase:
    star: str
    degree: int
    rho: float
    theta: float


@dataclass(frozen=True)
class OracleResult:
    case: OracleCase
    boundary: complex
    reference: complex
    error: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.error <= self.tol


def default_cases(degrees: Sequence[int] = range(MAX_DEGREE + 1), count: int = 20) -> list[OracleCase]:
    bad = [u for u in degrees if not 0 <= u <= MAX_DEGREE]
    if bad:
        raise ValueError(f"polynomial degree must lie in 0..{MAX_DEGREE}, got {bad}")
    return [OracleCase(name, u, rho, th)
            for name in default_star_sets() for u in degrees for rho, th in default_probes(count)]


def run_cross_checks(cases: Sequence[OracleCase] | None = None, tol: float = 1e-8) -> list[OracleResult]:
    """Boundary expansion against area quadrature (and the disc closed form for ``p = 1``)."""
    cases = default_cases() if cases is None else cases
    polys = default_polynomials()
    stars = default_star_sets()
    out = []
    for c in cases:
        T = stars[c.star]
        p = polys[c.degree]
        xi = c.rho * np.array([math.cos(c.theta), math.sin(c.theta)])
        b = ft_region_boundary(p, T, c.rho, c.theta)
        try:
            q = ft_region_quadrature(p, T, xi, tol=min(1e-10, max(tol / 10, QUADRATURE_FLOOR)))
        except QuadratureError as exc:
            out.append(OracleResult(c, b, complex("nan"), exc.achieved, tol))
            continue
        out.append(OracleResult(c, b, q, abs(b - q), tol))
        if c.star == "circle" and c.degree == 0:
            d = disc_ft(T.const, xi, T.origin) * p.coeffs[0, 0]
            out.append(OracleResult(OracleCase("disc-series", 0, c.rho, c.theta), b, d, abs(b - d), tol))
    return out


@dataclass(frozen=True)
class IdentityProbe:
    v: tuple[float, float]
    m: int
    xi: tuple[float, float]


def default_identity_probes(count: int = 12, xi_max: float = 10.0) -> list[IdentityProbe]:
    """Fixed probe set for the directional-derivative identity.

    For each order ``m = 1, 2, 3``: ``count`` frequencies with ``|xi| <= xi_max``
    on golden-angle directions, plus one frequency perpendicular to ``v``.
    """
    golden = math.pi * (3 - math.sqrt(5))
    out = []
    for m in (1, 2, 3):
        for k in range(count):
            a = 0.4 + 1.7 * k + m
            v = (math.cos(a), math.sin(a))
            r = xi_max * (k + 1) / count
            b = k * golden + 0.3 * m
            out.append(IdentityProbe(v, m, (r * math.cos(b), r * math.sin(b))))
        a = 0.9 * m
        out.append(IdentityProbe((math.cos(a), math.sin(a)), m, (-0.6 * xi_max * math.sin(a), 0.6 * xi_max * math.cos(a))))
    return out


def run_identity_checks(f: GaussianField | None = None,
                        probes: Sequence[IdentityProbe] | None = None) -> list[tuple[IdentityProbe, float]]:
    """Residual of the directional-derivative identity at every probe."""
    f = f or GaussianField((0.3, -0.2), sigma=0.5)
    probes = default_identity_probes() if probes is None else probes
    return [(p, directional_fourier_identity_check(f, p.v, p.m, p.xi)) for p in probes]
