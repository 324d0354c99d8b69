"""Dynamic programs for two-device multiple access with a Markov channel."""

from ._macdp import (
    ContractViolation,
    CentralizedSolution,
    CoordinatedSolution,
    ModelParams,
    RecursionMode,
    ValidationError,
    audit_beliefs,
    independence_gap,
    pbp,
    q_value,
    simulate,
    solve_centralized,
    solve_coordinated,
    threshold_reference,
    z_value,
)

__all__ = [
    "ContractViolation",
    "CentralizedSolution",
    "CoordinatedSolution",
    "ModelParams",
    "RecursionMode",
    "ValidationError",
    "audit_beliefs",
    "independence_gap",
    "pbp",
    "q_value",
    "simulate",
    "solve_centralized",
    "solve_coordinated",
    "threshold_reference",
    "z_value",
]
