"""The Riemann-Siegel remainder kernel

    Psi(p) = cos(2*pi*(p**2 - p - 1/16)) / cos(2*pi*p),   0 <= p < 1,

and the correction coefficients built from it.

Psi itself is evaluated in closed form, switching to an exact sinc
quotient around the removable singularities p = 1/4 and p = 3/4.  Higher derivatives
(needed for the C1/C2 terms and for d/dt of the remainder) come from
Chebyshev interpolants whose node values are produced once, lazily, at
elevated precision with mpmath.
"""

from __future__ import annotations

import functools
import math

import numpy as np
from numpy.polynomial import chebyshev as C

TWO_PI = 2.0 * math.pi

# |cos 2 pi p| below this switches to the sinc form
_SINGULAR_BAND = 1e-3

_CHEB_DEGREE = 56
_MAX_DERIV = 7


def _near_root(p0: float, h: np.ndarray) -> np.ndarray:
    """Psi(p0 + h) for p0 in {1/4, 3/4}, with the common zero cancelled.

    Around 1/4:  Psi = sin(pi (h - 2h^2)) / sin(2 pi h);  around 3/4 the sign
    of the h^2 term flips.  Written with sinc there is no 0/0 anywhere.
    """
    s = -1.0 if p0 < 0.5 else 1.0
    x = h + s * 2.0 * h * h
    return 0.5 * (1.0 + s * 2.0 * h) * np.sinc(x) / np.sinc(2.0 * h)


def psi(p):
    """Psi(p), vectorised; safe at p = 1/4 and p = 3/4."""
    p = np.asarray(p, dtype=float)
    scalar = p.ndim == 0
    p = np.atleast_1d(p)
    den = np.cos(TWO_PI * p)
    near = np.abs(den) < _SINGULAR_BAND
    safe = np.where(near, 1.0, den)
    out = np.cos(TWO_PI * (p * p - p - 1.0 / 16.0)) / safe
    if np.any(near):
        pn = p[near]
        p0 = np.where(pn < 0.5, 0.25, 0.75)
        vals = np.empty_like(pn)
        for root in (0.25, 0.75):
            sel = p0 == root
            if np.any(sel):
                vals[sel] = _near_root(root, pn[sel] - root)
        out[near] = vals
    return out[0] if scalar else out


@functools.lru_cache(maxsize=None)
def _derivative_series() -> tuple[np.ndarray, ...]:
    import mpmath

    ctx = mpmath.mp.clone()
    ctx.dps = 40

    def f(p):
        return ctx.cos(2 * ctx.pi * (p * p - p - ctx.mpf(1) / 16)) / ctx.cos(2 * ctx.pi * p)

    m = _CHEB_DEGREE + 1
    # Chebyshev points of the first kind never land on 1/4 or 3/4
    x = np.cos(np.pi * (np.arange(m) + 0.5) / m)
    p_nodes = [ctx.mpf(xi) / 2 + ctx.mpf(1) / 2 for xi in x]
    series = []
    for k in range(1, _MAX_DERIV + 1):
        vals = np.array([float(ctx.diff(f, pn, k)) for pn in p_nodes])
        series.append(C.chebfit(x, vals, _CHEB_DEGREE))
    return tuple(series)


def psi_derivative(p, order: int):
    """d^order Psi / dp^order on [0, 1]."""
    if order == 0:
        return psi(p)
    if not 1 <= order <= _MAX_DERIV:
        raise ValueError(f"derivative order {order} not tabulated")
    p = np.asarray(p, dtype=float)
    return C.chebval(2.0 * p - 1.0, _derivative_series()[order - 1])


def remainder_coefficients(p, order: int, derivative: bool = False) -> list[np.ndarray]:
    """[C_k(p) for k < order], or [C_k'(p)] when `derivative` is set.

    The Riemann-Siegel remainder is (-1)**(N-1) * s**(-1/4) * sum_k C_k(p) * s**(-k/2),
    s = t/2pi.
    """
    p = np.asarray(p, dtype=float)
    pi2 = math.pi**2
    j = 1 if derivative else 0

    def d(k):
        return psi_derivative(p, k + j)

    out = []
    if order >= 1:
        out.append(d(0))
    if order >= 2:
        out.append(-d(3) / (96.0 * pi2))
    if order >= 3:
        out.append(d(2) / (64.0 * pi2) + d(6) / (18432.0 * pi2 * pi2))
    return out
