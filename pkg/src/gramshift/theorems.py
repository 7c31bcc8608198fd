"""Sums of Z over shifted Gram points, their predicted leading terms, and residuals.

Every verifier returns a VerificationReport.  Reductions run over per-node
values in ascending nu with math.fsum, so a report is a deterministic
function of (window, parameter, config).
"""

from __future__ import annotations

import functools
import math
from dataclasses import asdict, dataclass
from typing import Literal

import numpy as np

from .config import DEFAULT_CONFIG, RSConfig
from .grid import Node, Window, _window_abscissae, build_set, solve_node, window_abscissae
from .rs import TWO_PI_LD, integrate, integrate_many, z, z_prime

CLAIM_IDS = ("T1", "T2_even", "T2_odd", "T3_even", "T3_odd", "MV_G1", "MV_G2", "ALT31", "ALT32", "ALT33", "NL73", "WNU")
DEFAULT_DELTA = 1.0 / 6.0
W_NU_THRESHOLD = 1e-8


@dataclass
class VerificationReport:
    claim_id: str
    T: float
    H: float
    parameter: float
    lhs: float
    main_term: float
    residual: float
    normalizer: float
    node_count: int
    elapsed_ms: float = 0.0
    in_w_nu: bool | None = None
    error: str | None = None

    @property
    def normalized_residual(self) -> float:
        return self.residual / self.normalizer

    @property
    def ratio(self) -> float:
        """lhs / main_term; nan when the claim has no leading term."""
        return self.lhs / self.main_term if self.main_term else math.nan

    def as_dict(self) -> dict:
        d = asdict(self)
        d["normalized_residual"] = self.normalized_residual
        return d

    @classmethod
    def failed(cls, claim_id: str, T: float, H: float, parameter: float, error: str) -> VerificationReport:
        nan = math.nan
        return cls(claim_id, T, H, parameter, nan, nan, nan, nan, 0, error=error)


def _report(claim_id, w: Window, parameter, lhs, main_term, normalizer, node_count, **extra) -> VerificationReport:
    return VerificationReport(
        claim_id=claim_id,
        T=float(w.T),
        H=float(w.H),
        parameter=float(parameter),
        lhs=float(lhs),
        main_term=float(main_term),
        residual=float(lhs) - float(main_term),
        normalizer=float(normalizer),
        node_count=int(node_count),
        **extra,
    )


def _check_delta(delta: float) -> None:
    if not 0 < delta <= 1.0 / 6.0:
        raise ValueError(f"delta={delta} outside (0, 1/6]")


def _check_tau(tau: float) -> None:
    if not -math.pi <= tau <= math.pi:
        raise ValueError(f"tau={tau} outside [-pi, pi]")


def _check_offset(offset: float) -> None:
    if not 0 < offset <= math.pi / 2:
        raise ValueError(f"offset={offset} outside (0, pi/2]")


def error_scale(T: float, delta: float) -> float:
    """T**delta * ln T."""
    return T**delta * math.log(T)


def leading_scale(w: Window) -> float:
    """(1/pi) H ln(T/2pi): twice the expected node count of the window."""
    return w.H * math.log(w.T / (2.0 * math.pi)) / math.pi


@functools.lru_cache(maxsize=512)
def _window_z(T: float, H: float, tau: float, parity: str, config: RSConfig) -> np.ndarray:
    _, t = window_abscissae(Window(T, H, epsilon=math.inf), tau, parity, config)
    vals = np.asarray(z(t, config), dtype=float) if t.size else np.zeros(0)
    vals.flags.writeable = False
    return vals


def window_values(w: Window, tau: float, parity: str = "all", config: RSConfig = DEFAULT_CONFIG):
    """(nu, Z[t_nu(tau)]) over the window, ascending nu."""
    nus, _ = window_abscissae(w, tau, parity, config)
    return nus, _window_z(float(w.T), float(w.H), float(tau), parity, config)


def _cos(x: float) -> float:
    # cos(pi/2) in floating point is 6e-17, not 0
    c = math.cos(x)
    return 0.0 if abs(c) < 1e-15 else c


def clear_caches() -> None:
    """Drop memoised node sets, Z values and segment integrals."""
    _window_z.cache_clear()
    _segment_integrals.cache_clear()
    _window_abscissae.cache_clear()


def _signs(nus: np.ndarray) -> np.ndarray:
    return np.where(nus % 2 == 0, 1.0, -1.0)


# -- T1: shifted sums ---------------------------------------------------------


def sum_F(tau: float, w: Window, config: RSConfig = DEFAULT_CONFIG) -> float:
    """F(tau, T, H): sum of Z[t_nu(tau)] over T <= t_nu <= T + H."""
    _check_tau(tau)
    _, vals = window_values(w, tau, "all", config)
    return math.fsum(vals.tolist())


def verify_theorem1(tau: float, w: Window, delta: float = DEFAULT_DELTA, config: RSConfig = DEFAULT_CONFIG) -> VerificationReport:
    _check_delta(delta)
    lhs = sum_F(tau, w, config) - sum_F(0.0, w, config)
    nus, _ = window_abscissae(w, tau, "all", config)
    return _report("T1", w, tau, lhs, 0.0, error_scale(w.T, delta), nus.size)


# -- alternating sums ---------------------------------------------------------


def _alternating_sum(tau: float, w: Window, config: RSConfig) -> tuple[float, int]:
    nus, vals = window_values(w, tau, "all", config)
    return math.fsum((_signs(nus) * vals).tolist()), nus.size


def verify_alternating(
    variant: Literal["ALT31", "ALT32", "ALT33"],
    tau: float,
    w: Window,
    delta: float = DEFAULT_DELTA,
    config: RSConfig = DEFAULT_CONFIG,
) -> VerificationReport:
    """Sum of (-1)^nu Z over Gram points (ALT31), shifted points (ALT32), or their difference (ALT33)."""
    _check_delta(delta)
    _check_tau(tau)
    scale = leading_scale(w)
    norm = error_scale(w.T, delta)
    plain, count = _alternating_sum(0.0, w, config)
    if variant == "ALT31":
        return _report("ALT31", w, tau, plain, scale, norm, count)
    shifted, count = _alternating_sum(tau, w, config)
    if variant == "ALT32":
        return _report("ALT32", w, tau, shifted, scale * _cos(tau), norm, count)
    if variant == "ALT33":
        return _report("ALT33", w, tau, shifted - plain, -2.0 * scale * math.sin(tau / 2) ** 2, norm, count)
    raise ValueError(f"unknown variant {variant!r}")


# -- T2: sums by parity -------------------------------------------------------


def theorem2_terms(
    parity: Literal["even", "odd"], tau: float, w: Window, config: RSConfig = DEFAULT_CONFIG, alternate: bool = False
) -> np.ndarray:
    """Per-node Z[t_m(tau)] - Z(t_m) over even or odd m, ascending.

    With `alternate` each term m = 2k or 2k+1 is multiplied by (-1)^k.
    """
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    nus, shifted = window_values(w, tau, parity, config)
    _, plain = window_values(w, 0.0, parity, config)
    diff = shifted - plain
    if alternate:
        diff = diff * _signs(nus // 2)
    return diff


def verify_theorem2(
    parity: Literal["even", "odd"],
    tau: float,
    w: Window,
    delta: float = DEFAULT_DELTA,
    config: RSConfig = DEFAULT_CONFIG,
    alternate: bool = False,
) -> VerificationReport:
    """Sum of Z[t_m(tau)] - Z(t_m) over even (odd) m against -(+)(1/pi) H ln(T/2pi) sin^2(tau/2)."""
    _check_delta(delta)
    _check_tau(tau)
    terms = theorem2_terms(parity, tau, w, config, alternate)
    sign = -1.0 if parity == "even" else 1.0
    main = sign * leading_scale(w) * math.sin(tau / 2) ** 2
    return _report(f"T2_{parity}", w, tau, math.fsum(terms.tolist()), main, error_scale(w.T, delta), terms.size)


# -- T3 and the mean-value formulas -------------------------------------


def xi_mean(parity: Literal["even", "odd"], offset: float, node: Node, config: RSConfig = DEFAULT_CONFIG) -> float:
    """Mean of Z over (t_nu(-offset), t_nu(offset)) for the node's index nu."""
    _check_offset(offset)
    if parity not in ("even", "odd") or (node.nu % 2 == 0) != (parity == "even"):
        raise ValueError(f"node nu={node.nu} does not have parity {parity!r}")
    lo = solve_node(node.nu, -offset, config).t
    hi = solve_node(node.nu, offset, config).t
    return integrate(z, lo, hi, config) / (hi - lo)


@functools.lru_cache(maxsize=256)
def _segment_integrals(T: float, H: float, parity: str, offset: float, config: RSConfig):
    w = Window(T, H, epsilon=math.inf)
    _, lo = window_abscissae(w, -offset, parity, config)
    _, hi = window_abscissae(w, offset, parity, config)
    vals = integrate_many(np.column_stack([lo, hi]), config)
    vals.flags.writeable = False
    return lo, hi, vals


def segment_means(parity: Literal["even", "odd"], offset: float, w: Window, config: RSConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Mean of Z over each segment (t_m(-offset), t_m(offset)) for m of the given parity."""
    _check_offset(offset)
    lo, hi, vals = _segment_integrals(float(w.T), float(w.H), parity, float(offset), config)
    return vals / (hi - lo)


def verify_theorem3(
    parity: Literal["even", "odd"],
    offset: float,
    w: Window,
    delta: float = DEFAULT_DELTA,
    config: RSConfig = DEFAULT_CONFIG,
) -> VerificationReport:
    """Sum of (segment mean of Z) - Z(t_m) against -(+)(1/2pi)(1 - sin x/x) H ln(T/2pi)."""
    _check_delta(delta)
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    means = segment_means(parity, offset, w, config)
    _, plain = window_values(w, 0.0, parity, config)
    lhs = math.fsum((means - plain).tolist())
    sign = -1.0 if parity == "even" else 1.0
    main = sign * 0.5 * (1.0 - math.sin(offset) / offset) * leading_scale(w)
    return _report(f"T3_{parity}", w, offset, lhs, main, error_scale(w.T, delta), means.size)


def verify_mean_value(kind: Literal["G1", "G2"], offset: float, w: Window, config: RSConfig = DEFAULT_CONFIG) -> VerificationReport:
    """(1/m(G)) * integral of Z over G1 (G2) against +(-) 2 sin(x)/x."""
    _check_offset(offset)
    parity = {"G1": "even", "G2": "odd"}.get(kind)
    if parity is None:
        raise ValueError(f"unknown set kind {kind!r}")
    segs = build_set(kind, offset, w, config)
    _, _, vals = _segment_integrals(float(w.T), float(w.H), parity, float(offset), config)
    lhs = math.fsum(vals.tolist()) / segs.measure if len(segs) else math.nan
    sign = 1.0 if kind == "G1" else -1.0
    return _report(f"MV_{kind}", w, offset, lhs, sign * 2.0 * math.sin(offset) / offset, 1.0, len(segs))


# -- trigonometric sums -------------------------------------------------------


@dataclass(frozen=True)
class TrigSumEstimate:
    a: int
    b: int
    t: float
    modulus: float
    delta_hat: float


def trig_sum(a: int, b: int, t: float) -> TrigSumEstimate:
    """|sum_{a <= n < b} n^{it}| and the exponent it implies over sqrt(a)."""
    if not (1 <= a <= b <= 2 * a and b <= math.sqrt(t / (2.0 * math.pi))):
        raise ValueError(f"need 1 <= a <= b <= 2a and b <= sqrt(t/2pi); got a={a}, b={b}, t={t}")
    n = np.arange(a, b)
    ln = np.log(n.astype(np.longdouble))
    phase = np.fmod(np.longdouble(t) * ln, TWO_PI_LD).astype(float)
    modulus = float(abs(np.sum(np.exp(1j * phase)))) if n.size else 0.0
    root = math.sqrt(a)
    delta_hat = math.log(modulus / root) / math.log(t) if modulus > root else 0.0
    return TrigSumEstimate(a, b, float(t), modulus, delta_hat)


def dyadic_sweep(t: float) -> list[TrigSumEstimate]:
    """trig_sum(a, 2a, t) for every a with 2a <= sqrt(t/2pi)."""
    top = math.floor(math.sqrt(t / (2.0 * math.pi)))
    return [trig_sum(a, 2 * a, t) for a in range(1, top // 2 + 1)]


# -- Newton-Leibniz and the sets w_nu ------------------------------------------


def newton_leibniz_check(
    nu: int, tau: float, config: RSConfig = DEFAULT_CONFIG, threshold: float = W_NU_THRESHOLD
) -> VerificationReport:
    """|integral of Z' over [t_nu, t_nu(tau)]| against |Z[t_nu(tau)] - Z(t_nu)|."""
    if not 0 < tau <= math.pi:
        raise ValueError(f"tau={tau} outside (0, pi]")
    a = solve_node(nu, 0.0, config).t
    b = solve_node(nu, tau, config).t
    lhs = abs(integrate(z_prime, a, b, config))
    jump = abs(z(b, config) - z(a, config))
    return VerificationReport(
        claim_id="NL73",
        T=a,
        H=b - a,
        parameter=float(tau),
        lhs=lhs,
        main_term=jump,
        residual=lhs - jump,
        normalizer=max(1e-12, jump),
        node_count=1,
        in_w_nu=jump > threshold,
    )


def verify_w_nu(tau: float, w: Window, config: RSConfig = DEFAULT_CONFIG, threshold: float = W_NU_THRESHOLD) -> VerificationReport:
    """Count of window nodes whose set w_nu contains tau, against the node count."""
    if not 0 < tau <= math.pi:
        raise ValueError(f"tau={tau} outside (0, pi]")
    _, shifted = window_values(w, tau, "all", config)
    _, plain = window_values(w, 0.0, "all", config)
    members = int(np.count_nonzero(np.abs(shifted - plain) > threshold))
    count = shifted.size
    return _report("WNU", w, tau, members, count, max(1, count), count, in_w_nu=members == count)
