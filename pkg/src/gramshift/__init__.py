"""Hardy's Z function on shifted Gram grids, with numeric checks of sum formulas over them."""

from .config import DomainError, RSConfig
from .grid import ConvergenceError, Node, SegmentSet, Window, build_set, enumerate_nodes, solve_node
from .rs import PhaseValue, integrate, theta, z, z_prime
from .theorems import (
    TrigSumEstimate,
    VerificationReport,
    newton_leibniz_check,
    sum_F,
    trig_sum,
    verify_alternating,
    verify_mean_value,
    verify_theorem1,
    verify_theorem2,
    verify_theorem3,
    verify_w_nu,
    xi_mean,
)

__all__ = [
    "ConvergenceError",
    "DomainError",
    "Node",
    "PhaseValue",
    "RSConfig",
    "SegmentSet",
    "TrigSumEstimate",
    "VerificationReport",
    "Window",
    "build_set",
    "enumerate_nodes",
    "integrate",
    "newton_leibniz_check",
    "solve_node",
    "sum_F",
    "theta",
    "trig_sum",
    "verify_alternating",
    "verify_mean_value",
    "verify_theorem1",
    "verify_theorem2",
    "verify_theorem3",
    "verify_w_nu",
    "xi_mean",
    "z",
    "z_prime",
]
