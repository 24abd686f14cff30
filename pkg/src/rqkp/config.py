"""Tolerances shared by the solver, the oracles and the CLI."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Relative tolerances; each is scaled by ``1 + |reference value|``."""

    feasibility: float = 1e-9
    gap: float = 1e-6
    bound: float = 1e-12

    def feas_tol(self, b: float) -> float:
        return self.feasibility * (1.0 + abs(b))

    def gap_tol(self, phi: float) -> float:
        return self.gap * (1.0 + abs(phi))


@dataclass(frozen=True)
class ScalarMaxConfig:
    """Settings for the bracketed scalar maximizer.

    ``tolerance`` is relative: the target interval width at ``lam`` is
    ``tolerance * (1 + |lam|)``.
    """

    tolerance: float = 1e-10
    max_iter: int = 200

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iter < 3:
            raise ValueError("max_iter must be at least 3")


@dataclass(frozen=True)
class SolverConfig:
    tol: Tolerances = Tolerances()
    scalar: ScalarMaxConfig = ScalarMaxConfig()
    # Distance to either side of lam* used when recovering a primal point.
    recovery_eps: float = 1e-7
    # Full rebuild of the incremental sweep sums every this many events.
    refresh_every: int = 4096
    # Cap on the number of step doublings in the outward expansion.
    max_doublings: int = 200


DEFAULT = SolverConfig()
