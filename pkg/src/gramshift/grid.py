"""Shifted Gram points t_nu(tau), windows of them, and the segment sets G1/G2.

t_nu(tau) solves theta(t) = pi*nu + tau.  tau = 0 gives the Gram points.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.special import lambertw

from .config import DEFAULT_CONFIG, RSConfig
from .rs import LD, PI_LD, theta_ld, theta_prime_ld

Parity = Literal["all", "even", "odd"]

MIN_WINDOW_T = 1e3
DEFAULT_EPSILON = 0.05
MAX_NEWTON_ITER = 50


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class Node:
    nu: int
    tau: float
    t: float

    def phase_residual(self) -> float:
        """theta(t) - (pi*nu + tau), evaluated in extended precision."""
        return float(theta_ld(self.t) - (PI_LD * self.nu + LD(self.tau)))


@dataclass(frozen=True)
class Window:
    """The range T <= t_nu <= T + H that the sums run over."""

    T: float
    H: float
    epsilon: float = field(default=DEFAULT_EPSILON, compare=False)

    def __post_init__(self) -> None:
        if not self.T >= MIN_WINDOW_T:
            raise ValueError(f"window start T={self.T} below {MIN_WINDOW_T:g}")
        if not self.H > 0:
            raise ValueError(f"window length H={self.H} must be positive")
        if self.H > self.h_max:
            warnings.warn(
                f"H={self.H:.6g} exceeds T^(1/6+eps)={self.h_max:.6g} (eps={self.epsilon})",
                stacklevel=2,
            )

    @property
    def h_max(self) -> float:
        return self.T ** (1.0 / 6.0 + self.epsilon)

    @property
    def log_p0(self) -> float:
        """ln sqrt(T / 2pi)."""
        return 0.5 * math.log(self.T / (2.0 * math.pi))


@dataclass(frozen=True)
class SegmentSet:
    segments: tuple[tuple[float, float], ...]
    measure: float

    @classmethod
    def from_bounds(cls, lo, hi) -> SegmentSet:
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if np.any(hi <= lo) or np.any(lo[1:] < hi[:-1]):
            raise ValueError("segments must be non-empty, disjoint and increasing")
        segs = tuple(zip(lo.tolist(), hi.tolist()))
        return cls(segs, math.fsum((hi - lo).tolist()))

    def __len__(self) -> int:
        return len(self.segments)


def nu_min(config: RSConfig = DEFAULT_CONFIG) -> int:
    """Smallest index whose Gram point clears the validity floor min_t."""
    return math.ceil(float(theta_ld(config.min_t) / PI_LD))


def _check_tau(tau: float) -> None:
    if not -math.pi <= tau <= math.pi:
        raise ValueError(f"tau={tau} outside [-pi, pi]")


def _initial_guess(a: np.ndarray) -> np.ndarray:
    # theta(t) ~ (t/2) ln(t/(2 pi e)) - pi/8  =>  t = 2 pi a / W(a/e),  a = nu + tau/pi + 1/8
    return 2.0 * math.pi * a / lambertw(a / math.e).real


def _accept_tol(t: np.ndarray, config: RSConfig) -> np.ndarray:
    # a float64 abscissa cannot pin the phase closer than theta' * ulp(t)
    return np.maximum(config.newton_tol, np.asarray(theta_prime_ld(t), dtype=float) * np.spacing(t))


def _bisect(target: LD, lo: float, hi: float) -> float:
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if theta_ld(mid) < target:
            lo = mid
        else:
            hi = mid
    return lo if abs(theta_ld(lo) - target) <= abs(theta_ld(hi) - target) else hi


def solve_nodes(nus, tau: float, config: RSConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Vectorised Newton solve of theta(t) = pi*nu + tau; returns float64 abscissae."""
    _check_tau(tau)
    nus = np.asarray(nus, dtype=np.int64)
    if nus.size == 0:
        return np.zeros(0)
    lowest = nu_min(config)
    if nus.min() < lowest:
        raise ValueError(f"nu={int(nus.min())} below nu0={lowest} implied by min_t={config.min_t}")
    target = PI_LD * nus.astype(LD) + LD(tau)
    t = _initial_guess(nus + tau / math.pi + 0.125).astype(LD)
    done = np.zeros(nus.shape, dtype=bool)
    for _ in range(MAX_NEWTON_ITER):
        step = (theta_ld(t) - target) / theta_prime_ld(t)
        t = t - step
        done = np.abs(step) <= 1e-17 * t
        if done.all():
            break
    out = t.astype(float)
    resid = np.abs(np.asarray(theta_ld(out) - target, dtype=float))
    bad = ~done | ~(resid <= _accept_tol(out, config))
    for i in np.flatnonzero(bad):
        # fall back to bisection on [t_{nu-1}, t_nu + 10] using the guess grid
        guess = float(_initial_guess(np.array([nus[i] + tau / math.pi + 0.125]))[0])
        prev = float(_initial_guess(np.array([nus[i] - 1 + tau / math.pi + 0.125]))[0])
        out[i] = _bisect(target[i], max(config.min_t, prev - 10.0), guess + 10.0)
        resid_i = abs(float(theta_ld(out[i]) - target[i]))
        if not resid_i <= _accept_tol(np.array([out[i]]), config)[0]:
            raise ConvergenceError(f"no convergence for nu={int(nus[i])}, tau={tau}: residual {resid_i:.3g}")
    if out.min() < config.min_t:
        raise ValueError(f"solved abscissa {out.min()} below min_t={config.min_t}")
    return out


def solve_node(nu: int, tau: float, config: RSConfig = DEFAULT_CONFIG) -> Node:
    """The shifted Gram point t_nu(tau)."""
    return Node(int(nu), float(tau), float(solve_nodes([nu], tau, config)[0]))


def index_range(w: Window) -> range:
    """Indices nu with T <= t_nu <= T + H, judged at tau = 0."""
    first = math.ceil(float(theta_ld(w.T) / PI_LD))
    last = math.floor(float(theta_ld(w.T + w.H) / PI_LD))
    return range(first, last + 1)


def _parity_filter(nus: range, parity: Parity) -> np.ndarray:
    arr = np.arange(nus.start, nus.stop, dtype=np.int64)
    if parity == "all":
        return arr
    if parity == "even":
        return arr[arr % 2 == 0]
    if parity == "odd":
        return arr[arr % 2 == 1]
    raise ValueError(f"unknown parity {parity!r}")


@functools.lru_cache(maxsize=256)
def _window_abscissae(T: float, H: float, tau: float, parity: str, config: RSConfig):
    nus = _parity_filter(index_range(Window(T, H, epsilon=math.inf)), parity)
    t = solve_nodes(nus, tau, config)
    nus.flags.writeable = False
    t.flags.writeable = False
    return nus, t


def window_abscissae(w: Window, tau: float, parity: Parity = "all", config: RSConfig = DEFAULT_CONFIG):
    """(nu array, t array) for the window, ascending in nu; cached, read-only."""
    _check_tau(tau)
    return _window_abscissae(float(w.T), float(w.H), float(tau), parity, config)


def enumerate_nodes(w: Window, tau: float, parity: Parity = "all", config: RSConfig = DEFAULT_CONFIG) -> list[Node]:
    nus, t = window_abscissae(w, tau, parity, config)
    return [Node(int(n), float(tau), float(x)) for n, x in zip(nus, t)]


def build_set(kind: Literal["G1", "G2"], offset: float, w: Window, config: RSConfig = DEFAULT_CONFIG) -> SegmentSet:
    """Union of (t_nu(-offset), t_nu(offset)) over even (G1) or odd (G2) nu in the window."""
    if not 0 < offset <= math.pi / 2:
        raise ValueError(f"offset={offset} outside (0, pi/2]")
    parity = {"G1": "even", "G2": "odd"}.get(kind)
    if parity is None:
        raise ValueError(f"unknown set kind {kind!r}")
    _, lo = window_abscissae(w, -offset, parity, config)
    _, hi = window_abscissae(w, offset, parity, config)
    return SegmentSet.from_bounds(lo, hi)
