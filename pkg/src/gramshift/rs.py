"""Riemann-Siegel evaluation of theta(t), Z(t), Z'(t) and short-interval integrals.

Phases theta(t) - t*ln(n) reach ~1e9 radians at t = 1e8, so they are reduced
modulo 2*pi in x87 extended precision (numpy.longdouble) before the
trigonometric calls.  Points are processed in blocks that share one anchor
abscissa; only the anchor phases need extended precision, the offsets from it
are small enough for float64.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._psi import remainder_coefficients
from .config import DEFAULT_CONFIG, DomainError, RSConfig

LD = np.longdouble
PI_LD = np.arctan(LD(1)) * 4
TWO_PI_LD = 2 * PI_LD
TWO_PI = 2.0 * math.pi

# block layout for the vectorised sums
_ANCHOR_SPAN = 4096.0
_BLOCK_ELEMENTS = 1 << 20


@dataclass(frozen=True)
class PhaseValue:
    theta: float
    theta_prime: float


def _check_domain(t: np.ndarray, config: RSConfig) -> None:
    if t.size and not np.all(t >= config.min_t):
        bad = t[~(t >= config.min_t)]
        raise DomainError(f"t={bad.flat[0]!r} below min_t={config.min_t}")


def theta_ld(t) -> np.ndarray:
    """theta(t) in extended precision, asymptotic series through the t**-3 term."""
    t = np.asarray(t, dtype=LD)
    return t / 2 * np.log(t / TWO_PI_LD) - t / 2 - PI_LD / 8 + 1 / (48 * t) + LD(7) / (5760 * t**3)


def theta_prime_ld(t) -> np.ndarray:
    t = np.asarray(t, dtype=LD)
    return np.log(t / TWO_PI_LD) / 2 - 1 / (48 * t * t) - LD(7) / (1920 * t**4)


def theta(t: float, config: RSConfig = DEFAULT_CONFIG) -> PhaseValue:
    """Riemann-Siegel theta function and its derivative at t."""
    _check_domain(np.asarray(t, dtype=float), config)
    return PhaseValue(float(theta_ld(t)), float(theta_prime_ld(t)))


@functools.lru_cache(maxsize=32)
def _log_table(nmax: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = np.arange(1, nmax + 1)
    ln_ld = np.log(n.astype(LD))
    return ln_ld, ln_ld.astype(float), 1.0 / np.sqrt(n)


def _blocks(t_sorted: np.ndarray, nmax_of: np.ndarray):
    """Yield (start, stop) runs of sorted points sharing an anchor."""
    start = 0
    size = t_sorted.size
    while start < size:
        stop = start + 1
        while (
            stop < size
            and t_sorted[stop] - t_sorted[start] <= _ANCHOR_SPAN
            and (stop - start + 1) * nmax_of[stop] <= _BLOCK_ELEMENTS
        ):
            stop += 1
        yield start, stop
        start = stop


def _rs_sums(t: np.ndarray, config: RSConfig, want_z: bool, want_dz: bool):
    """Main sums plus remainder for Z and/or Z' at every point of a flat array."""
    order = np.argsort(t, kind="stable")
    ts = t[order]
    rho = np.sqrt(ts / TWO_PI)
    N = np.floor(rho).astype(np.int64)
    z_out = np.empty_like(ts) if want_z else None
    dz_out = np.empty_like(ts) if want_dz else None
    theta_red = np.fmod(theta_ld(ts), TWO_PI_LD).astype(float)

    for lo, hi in _blocks(ts, N):
        nmax = int(N[hi - 1])
        ln_ld, ln_d, inv_sqrt = _log_table(nmax)
        anchor = ts[lo]
        base = np.fmod(-LD(anchor) * ln_ld, TWO_PI_LD).astype(float)
        offs = ts[lo:hi] - anchor
        phase = theta_red[lo:hi, None] + base[None, :] - offs[:, None] * ln_d[None, :]
        w = np.where(np.arange(1, nmax + 1)[None, :] <= N[lo:hi, None], inv_sqrt[None, :], 0.0)
        if want_z:
            z_out[lo:hi] = 2.0 * (w * np.cos(phase)).sum(axis=1)
        if want_dz:
            ws = w * np.sin(phase)
            lnrho = np.log(rho[lo:hi])
            dz_out[lo:hi] = -2.0 * (lnrho * ws.sum(axis=1) - (ws * ln_d[None, :]).sum(axis=1))

    if config.correction_order:
        scale = ts / TWO_PI
        p = rho - N
        sign = np.where(N % 2 == 1, 1.0, -1.0)
        if want_z:
            acc = np.zeros_like(ts)
            for k, ck in enumerate(remainder_coefficients(p, config.correction_order)):
                acc += ck * scale ** (-0.25 - 0.5 * k)
            z_out += sign * acc
        if want_dz:
            # d/dt of the remainder; dp/dt = drho/dt = rho / (2t)
            dp_dt = rho / (2.0 * ts)
            cks = remainder_coefficients(p, config.correction_order)
            dcks = remainder_coefficients(p, config.correction_order, derivative=True)
            acc = np.zeros_like(ts)
            for k, (ck, dck) in enumerate(zip(cks, dcks)):
                power = -0.25 - 0.5 * k
                acc += scale**power * (dck * dp_dt + ck * power / ts)
            dz_out += sign * acc

    inv = np.empty_like(order)
    inv[order] = np.arange(order.size)
    return (z_out[inv] if want_z else None), (dz_out[inv] if want_dz else None)


def _evaluate(t, config: RSConfig, derivative: bool):
    arr = np.asarray(t, dtype=float)
    _check_domain(arr, config)
    flat = arr.ravel()
    zv, dzv = _rs_sums(flat, config, not derivative, derivative)
    out = (dzv if derivative else zv).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def z(t, config: RSConfig = DEFAULT_CONFIG):
    """Hardy's Z(t) by the Riemann-Siegel formula; accepts a scalar or an array."""
    return _evaluate(t, config, derivative=False)


def z_prime(t, config: RSConfig = DEFAULT_CONFIG):
    """Z'(t): the main sum -2 sum n^(-1/2) ln(rho/n) sin(theta - t ln n).

    With correction_order >= 1 the t-derivative of the same remainder terms
    that `z` adds is included, so that z_prime is the derivative of z.
    """
    return _evaluate(t, config, derivative=True)


@functools.lru_cache(maxsize=8)
def _gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def quadrature_nodes(a: float, b: float, config: RSConfig = DEFAULT_CONFIG) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre abscissae and weights on [a, b].

    Panel count ceil((b - a) * ln(b / 2pi)) + 1 keeps several panels per
    oscillation of the slowest mode of the main sum.
    """
    panels = math.ceil((b - a) * math.log(b / TWO_PI)) + 1
    x, w = _gauss_legendre(config.quad_order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _resolve_integrand(f) -> bool:
    if f is z or f == "z" or f == "Z":
        return False
    if f is z_prime or f in ("z_prime", "Z'", "dz"):
        return True
    raise ValueError(f"integrand must be z or z_prime, got {f!r}")


def integrate(f: Callable | str, a: float, b: float, config: RSConfig = DEFAULT_CONFIG) -> float:
    """Integral of Z or Z' over a short interval [a, b] (b - a <= 10)."""
    derivative = _resolve_integrand(f)
    if not config.min_t <= a:
        raise DomainError(f"a={a} below min_t={config.min_t}")
    if not a <= b:
        raise DomainError(f"reversed interval [{a}, {b}]")
    if b - a > 10.0:
        raise DomainError(f"interval length {b - a} exceeds 10")
    if a == b:
        return 0.0
    nodes, weights = quadrature_nodes(a, b, config)
    vals = _evaluate(nodes, config, derivative)
    return math.fsum(weights * vals)


def integrate_many(intervals: np.ndarray, config: RSConfig = DEFAULT_CONFIG, derivative: bool = False) -> np.ndarray:
    """Vectorised `integrate` over rows (a, b) of an (m, 2) array.

    All nodes go through one batched evaluation; each row's sum is fsum'd
    on its own so results match per-interval calls bit for bit.
    """
    intervals = np.asarray(intervals, dtype=float).reshape(-1, 2)
    if intervals.size == 0:
        return np.zeros(0)
    a, b = intervals[:, 0], intervals[:, 1]
    if np.any(a < config.min_t) or np.any(b < a) or np.any(b - a > 10.0):
        raise DomainError("intervals must satisfy min_t <= a <= b <= a + 10")
    parts = [quadrature_nodes(lo, hi, config) if hi > lo else (np.zeros(0), np.zeros(0)) for lo, hi in zip(a, b)]
    nodes = np.concatenate([p[0] for p in parts])
    vals = _evaluate(nodes, config, derivative) if nodes.size else nodes
    out = np.empty(len(parts))
    pos = 0
    for i, (xs, ws) in enumerate(parts):
        out[i] = math.fsum(ws * vals[pos : pos + xs.size])
        pos += xs.size
    return out
