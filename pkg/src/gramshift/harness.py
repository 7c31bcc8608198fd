"""Run configured claims over a T-ladder and serialise the reports."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .config import RSConfig
from .grid import Window, index_range
from .theorems import (
    CLAIM_IDS,
    DEFAULT_DELTA,
    VerificationReport,
    newton_leibniz_check,
    verify_alternating,
    verify_mean_value,
    verify_theorem1,
    verify_theorem2,
    verify_theorem3,
    verify_w_nu,
)

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "claim_id",
    "T",
    "H",
    "parameter",
    "lhs",
    "main_term",
    "residual",
    "normalizer",
    "normalized_residual",
    "node_count",
    "elapsed_ms",
)
H_RULES = ("fixed", "delta_ln", "sixth_eps")
DEFAULT_CLAIMS = ("T1", "T2_even", "T2_odd", "T3_even", "T3_odd", "MV_G1", "MV_G2", "ALT31", "ALT32", "ALT33", "NL73")
DEFAULT_TAUS = (0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi)
DEFAULT_OFFSETS = (0.3, 0.8, math.pi / 2)

_TAU_CLAIMS = {"T1", "T2_even", "T2_odd", "ALT32", "ALT33"}
_OFFSET_CLAIMS = {"T3_even", "T3_odd", "MV_G1", "MV_G2"}
_POSITIVE_TAU_CLAIMS = {"NL73", "WNU"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    claims: tuple[str, ...] = DEFAULT_CLAIMS
    T_ladder: tuple[float, ...] = (1e6, 1e7, 1e8)
    h_rule: str = "delta_ln"
    H: float | None = None
    tau_grid: tuple[float, ...] = DEFAULT_TAUS
    offset_grid: tuple[float, ...] = DEFAULT_OFFSETS
    delta: float = DEFAULT_DELTA
    epsilon: float = 0.05
    lindelof: bool = False
    rs: RSConfig = field(default_factory=RSConfig)
    threads: int = 1
    output: str = "csv"
    out_path: str | None = None

    def __post_init__(self) -> None:
        self.claims = tuple(self.claims)
        self.T_ladder = tuple(float(t) for t in self.T_ladder)
        self.tau_grid = tuple(float(t) for t in self.tau_grid)
        self.offset_grid = tuple(float(x) for x in self.offset_grid)
        self.validate()

    def validate(self) -> None:
        unknown = [c for c in self.claims if c not in CLAIM_IDS]
        if unknown:
            raise ConfigError(f"unknown claims {unknown}; choose from {list(CLAIM_IDS)}")
        if any(t < 1e3 for t in self.T_ladder):
            raise ConfigError("every ladder value must be >= 1e3")
        if any(b <= a for a, b in zip(self.T_ladder, self.T_ladder[1:])):
            raise ConfigError("T_ladder must be strictly increasing")
        if self.h_rule not in H_RULES:
            raise ConfigError(f"h_rule must be one of {H_RULES}")
        if self.h_rule == "fixed" and not (self.H and self.H > 0):
            raise ConfigError("h_rule 'fixed' needs a positive H")
        if not 0 < self.delta <= 1 / 6:
            raise ConfigError("delta must lie in (0, 1/6]")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")
        if any(not -math.pi <= t <= math.pi for t in self.tau_grid):
            raise ConfigError("tau grid must lie in [-pi, pi]")
        if any(not 0 < x <= math.pi / 2 for x in self.offset_grid):
            raise ConfigError("offset grid must lie in (0, pi/2]")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.output not in ("csv", "json"):
            raise ConfigError("output must be 'csv' or 'json'")

    @property
    def normalizer_delta(self) -> float:
        """Exponent used in T^delta ln T; epsilon/2 under the Lindelof mode."""
        return self.epsilon / 2 if self.lindelof else self.delta

    def window_length(self, T: float) -> float:
        if self.h_rule == "fixed":
            return float(self.H)
        if self.h_rule == "delta_ln":
            return T**self.delta * math.log(T)
        return T ** (1 / 6 + self.epsilon)

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        data = dict(data)
        allowed = {f.name for f in fields(cls)}
        extra = set(data) - allowed
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        if "rs" in data and isinstance(data["rs"], dict):
            try:
                data["rs"] = RSConfig(**data["rs"])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad rs section: {exc}") from exc
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path: str | Path) -> RunConfig:
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["claims"] = list(self.claims)
        return d


def cells(config: RunConfig) -> list[tuple[str, float, float]]:
    """(claim_id, T, parameter) for every cell, in output order."""
    out = []
    for claim in config.claims:
        if claim in _TAU_CLAIMS:
            params = config.tau_grid
        elif claim in _OFFSET_CLAIMS:
            params = config.offset_grid
        elif claim in _POSITIVE_TAU_CLAIMS:
            params = tuple(t for t in config.tau_grid if t > 0)
        else:  # ALT31 does not depend on tau
            params = (0.0,)
        out.extend((claim, T, p) for T in config.T_ladder for p in params)
    rank = {c: i for i, c in enumerate(CLAIM_IDS)}
    return sorted(set(out), key=lambda c: (rank[c[0]], c[1], c[2]))


def run_cell(claim: str, T: float, param: float, config: RunConfig) -> VerificationReport:
    H = config.window_length(T)
    start = time.perf_counter()
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            w = Window(T, H, epsilon=config.epsilon)
        delta = config.normalizer_delta
        rs = config.rs
        if claim == "T1":
            report = verify_theorem1(param, w, delta, rs)
        elif claim.startswith("T2_"):
            report = verify_theorem2(claim[3:], param, w, delta, rs)
        elif claim.startswith("T3_"):
            report = verify_theorem3(claim[3:], param, w, delta, rs)
        elif claim.startswith("MV_"):
            report = verify_mean_value(claim[3:], param, w, rs)
        elif claim.startswith("ALT"):
            report = verify_alternating(claim, param, w, delta, rs)
        elif claim == "NL73":
            # first node of the window; the row is keyed by the ladder T, H like every other
            report = replace(newton_leibniz_check(index_range(w).start, param, rs), T=float(T), H=float(H))
        elif claim == "WNU":
            report = verify_w_nu(param, w, rs)
        else:
            raise ConfigError(f"unknown claim {claim!r}")
    except ConfigError:
        raise
    except Exception as exc:  # one bad cell must not abort the run
        log.error("cell %s T=%g parameter=%g failed: %s", claim, T, param, exc)
        report = VerificationReport.failed(claim, T, H, param, f"{type(exc).__name__}: {exc}")
    report.elapsed_ms = 1e3 * (time.perf_counter() - start)
    return report


def run(config: RunConfig) -> list[VerificationReport]:
    """Execute every cell; output order is (claim_id, T, parameter) regardless of threads."""
    todo = cells(config)
    for T in config.T_ladder:
        H = config.window_length(T)
        if H > T ** (1 / 6 + config.epsilon):
            log.warning("T=%g: H=%.6g exceeds T^(1/6+eps)", T, H)
    if config.threads == 1:
        reports = [run_cell(c, T, p, config) for c, T, p in todo]
    else:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            reports = list(pool.map(lambda cell: run_cell(*cell, config), todo))
    if config.out_path:
        emit(reports, config.output, config.out_path)
    return reports


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "NaN"
        if math.isinf(value):
            return "Infinity" if value > 0 else "-Infinity"
        return format(value, ".17g")
    raise TypeError(type(value))


def _row(report: VerificationReport) -> dict:
    d = report.as_dict()
    return {k: d[k] for k in CSV_COLUMNS}


def to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in reports:
        row = _row(r)
        writer.writerow([row[c] if isinstance(row[c], str) else _fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def to_json(reports) -> str:
    # hand-written so every float carries 17 significant digits
    records = []
    for r in reports:
        d = r.as_dict()
        items = []
        for key in (*CSV_COLUMNS, "in_w_nu", "error"):
            val = d[key]
            text = "null" if val is None else json.dumps(val) if isinstance(val, str) else _fmt(val)
            items.append(f"{json.dumps(key)}: {text}")
        records.append("  {" + ", ".join(items) + "}")
    return "[\n" + ",\n".join(records) + "\n]\n" if records else "[]\n"


def emit(reports, fmt: str, path: str | Path) -> Path:
    """Write reports as CSV or JSON; raises OSError on unwritable paths."""
    if fmt == "csv":
        text = to_csv(reports)
    elif fmt == "json":
        text = to_json(reports)
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    return path


def read_json(path: str | Path) -> list[VerificationReport]:
    """Inverse of the JSON emitter."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    out = []
    for d in data:
        kwargs = {f.name: d.get(f.name) for f in fields(VerificationReport)}
        out.append(VerificationReport(**kwargs))
    return out
