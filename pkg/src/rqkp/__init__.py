"""Two-phase solver for continuous rank-one quadratic knapsack problems."""

from .bounded import solve_bounded
from .config import ScalarMaxConfig, SolverConfig, Tolerances
from .driver import solve
from .dual import eval_phi
from .generate import GenSpec, InstanceType, generate
from .model import (GeneralInstance, ReducedInstance, SolveReport, Status, back_transform,
                    feasibility_check, reduce)
from .serialize import parse_instance, serialize_instance, serialize_report

__all__ = [
    "GeneralInstance", "ReducedInstance", "SolveReport", "Status", "reduce", "back_transform",
    "feasibility_check", "solve_bounded", "eval_phi", "solve", "GenSpec", "InstanceType",
    "generate", "parse_instance", "serialize_instance", "serialize_report", "Tolerances",
    "SolverConfig", "ScalarMaxConfig",
]
