"""One-dimensional admissible window ``g`` and the derived 2-D cone windows.

``g`` is even, equals one on ``[-1/3, 1/3]``, vanishes outside ``(-2/3, 2/3)``
and its integer shifts form a partition of unity. It is assembled from a
monotone transition ``h`` on ``[0, 1]`` with ``h(t) + h(1 - t) = 1``::

    g(x) = 1 - h(3|x| - 1)

Two transitions are available:

* ``"exp"``: the C-infinity quotient ``e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)})``,
* ``"poly:q"``: the odd-degree polynomial smoothstep that is exactly ``C^q``.

Derivatives are exact for both generators. For ``"exp"`` they are obtained
by truncated Taylor arithmetic (jets) so any order is available without
finite differences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial

__all__ = [
    "AdmissibleProfile",
    "WindowFunction",
    "smooth_step",
    "g_eval",
    "g_tilde_eval",
    "g_derivative_eval",
    "window_eval",
]

# |exponent| beyond which the exp transition is clamped to 0 or 1
_EXP_CLAMP = 700.0


def _poly_step(q: int) -> Polynomial:
    """Smoothstep of degree 2q+1 with q vanishing derivatives at both ends."""
    t = Polynomial([0.0, 1.0])
    acc = Polynomial([0.0])
    for k in range(q + 1):
        acc = acc + math.comb(q + k, k) * math.comb(2 * q + 1, q - k) * (-t) ** k
    return t ** (q + 1) * acc


# -- jet (truncated Taylor series) helpers; axis 0 holds the coefficients --

def _jet_mul(a, b):
    out = np.zeros_like(a)
    for k in range(a.shape[0]):
        for i in range(k + 1):
            out[k] += a[i] * b[k - i]
    return out


def _jet_exp(a):
    out = np.zeros_like(a)
    out[0] = np.exp(a[0])
    for k in range(1, a.shape[0]):
        s = np.zeros_like(a[0])
        for i in range(1, k + 1):
            s += i * a[i] * out[k - i]
        out[k] = s / k
    return out


def _jet_recip(a):
    out = np.zeros_like(a)
    out[0] = 1.0 / a[0]
    for k in range(1, a.shape[0]):
        s = np.zeros_like(a[0])
        for i in range(1, k + 1):
            s += a[i] * out[k - i]
        out[k] = -s * out[0]
    return out


def _exp_step_jet(t, order):
    """Taylor coefficients of the exp transition at ``t``, shape (order+1, ...).

    Coefficient k equals ``h^{(k)}(t) / k!``.
    """
    t = np.asarray(t, dtype=float)
    out = np.zeros((order + 1,) + t.shape)
    out[0] = np.where(t >= 1.0, 1.0, 0.0)
    inner = (t > 0.0) & (t < 1.0)
    if not np.any(inner):
        return out
    ti = t[inner]
    # s(t) = 1/t - 1/(1-t); h = 1 / (1 + e^{s})
    s0 = 1.0 / ti - 1.0 / (1.0 - ti)
    ok = np.abs(s0) <= _EXP_CLAMP
    res = np.zeros((order + 1,) + ti.shape)
    res[0] = np.where(s0 < 0.0, 1.0, 0.0)
    if np.any(ok):
        tk = ti[ok]
        ks = np.arange(order + 1).reshape((-1,) + (1,) * tk.ndim)
        # series of 1/(t+e) and 1/(1-t-e) in powers of e
        s = (-1.0) ** ks / tk ** (ks + 1) - 1.0 / (1.0 - tk) ** (ks + 1)
        pos = s[0] > 0.0
        val = np.empty_like(s)
        if np.any(pos):
            # h = E / (1 + E) with E = e^{-s}; stable for s > 0
            e = _jet_exp(-s[:, pos])
            one_plus = e.copy()
            one_plus[0] += 1.0
            val[:, pos] = _jet_mul(e, _jet_recip(one_plus))
        if np.any(~pos):
            e = _jet_exp(s[:, ~pos])
            e[0] += 1.0
            val[:, ~pos] = _jet_recip(e)
        res[:, ok] = val
    out[:, inner] = res
    return out


@dataclass(frozen=True)
class AdmissibleProfile:
    """Admissible function ``g`` with a selectable transition generator.

    Parameters
    ----------
    generator : {"exp", "poly"}
        Transition family.
    order : int or None
        Smoothness order ``q`` for ``"poly"``; ``None`` means C-infinity
        and is only valid for ``"exp"``.
    """

    generator: str = "exp"
    order: int | None = None
    _poly: tuple = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.generator == "exp":
            if self.order is not None:
                raise ValueError("the exp generator is C-infinity; order must be None")
        elif self.generator == "poly":
            if self.order is None or self.order < 0:
                raise ValueError("poly generator needs a non-negative integer order")
            base = _poly_step(self.order)
            derivs = [base]
            for _ in range(self.order + 1):
                derivs.append(derivs[-1].deriv())
            object.__setattr__(self, "_poly", tuple(derivs))
        else:
            raise ValueError(f"unknown generator {self.generator!r}")

    @classmethod
    def from_name(cls, name: str) -> "AdmissibleProfile":
        """Parse ``"exp"`` or ``"poly:q"``."""
        if name == "exp":
            return cls("exp")
        if name.startswith("poly:"):
            return cls("poly", int(name.split(":", 1)[1]))
        raise ValueError(f"unknown window generator {name!r}")

    @property
    def name(self) -> str:
        return "exp" if self.generator == "exp" else f"poly:{self.order}"

    @property
    def smoothness(self) -> float:
        return math.inf if self.order is None else self.order

    def step(self, t, deriv: int = 0):
        """Transition ``h`` (or its ``deriv``-th derivative) at ``t``."""
        t = np.asarray(t, dtype=float)
        if deriv > self.smoothness:
            raise ValueError(f"derivative order {deriv} exceeds smoothness {self.smoothness}")
        if self.generator == "exp":
            jet = _exp_step_jet(t, deriv)
            return jet[deriv] * math.factorial(deriv)
        inner = (t > 0.0) & (t < 1.0)
        base = np.where(t >= 1.0, 1.0, 0.0) if deriv == 0 else np.zeros_like(t)
        # evaluate on the half nearer to zero and reflect: h(t) = 1 - h(1 - t)
        upper = t > 0.5
        u = np.clip(np.where(upper, 1.0 - t, t), 0.0, 0.5)
        low = self._poly[deriv](u)
        if deriv == 0:
            val = np.where(upper, 1.0 - low, low)
        else:
            val = np.where(upper, -((-1.0) ** deriv) * low, low)
        return np.where(inner, val, base)

    def g(self, x, deriv: int = 0):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        val = self.step(3.0 * ax - 1.0, deriv)
        if deriv == 0:
            return 1.0 - val
        # derivative of 1 - h(3|x| - 1); h is flat at both ends so |x| is harmless
        return -(3.0 ** deriv) * np.sign(x) ** deriv * val

    def g_tilde(self, x):
        x = np.asarray(x, dtype=float)
        return self.g(0.5 * x) - self.g(x)


def smooth_step(x, q: int | None = None):
    """Monotone transition: 0 for ``x <= 0``, 1 for ``x >= 1``.

    ``q=None`` selects the C-infinity exponential generator, an integer
    selects the ``C^q`` polynomial smoothstep.
    """
    prof = AdmissibleProfile() if q is None else AdmissibleProfile("poly", q)
    return prof.step(x)


def g_eval(profile: AdmissibleProfile, x):
    return profile.g(x)


def g_tilde_eval(profile: AdmissibleProfile, x):
    """``g(x/2) - g(x)``; supported in ``1/3 < |x| < 4/3``."""
    return profile.g_tilde(x)


def g_derivative_eval(profile: AdmissibleProfile, x, r: int):
    """Exact ``r``-th derivative of ``g``; raises if ``r`` exceeds the smoothness."""
    if r < 0:
        raise ValueError("derivative order must be non-negative")
    return profile.g(x, r)


@dataclass(frozen=True)
class WindowFunction:
    """Cone window ``Psi^(h)(x) = g~(x1) g(x2)`` or ``Psi^(v)(x) = g(x1) g~(x2)``."""

    cone: str
    profile: AdmissibleProfile = AdmissibleProfile()

    def __post_init__(self):
        if self.cone not in ("h", "v"):
            raise ValueError(f"cone must be 'h' or 'v', got {self.cone!r}")

    def __call__(self, x1, x2):
        p = self.profile
        if self.cone == "h":
            return p.g_tilde(x1) * p.g(x2)
        return p.g(x1) * p.g_tilde(x2)


def window_eval(w: WindowFunction, x):
    x = np.asarray(x, dtype=float)
    return w(x[..., 0], x[..., 1])
