"""Problem data, the rank-one reduction and its inverse.

The user-facing problem is

    minimize    1/2 (q^T x)^2 - c^T x
    subject to  a^T x = b,  l <= x <= u

Substituting ``y_i = q_i x_i`` turns the quadratic term into ``1/2 (1^T y)^2``;
shifting ``y`` by its lower bound then gives the canonical form with zero
lower bounds that the solver works on.
"""

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import BadBounds, ZeroRankFactor


def _vec(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GeneralInstance:
    q: np.ndarray
    a: np.ndarray
    b: float
    c: np.ndarray
    l: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        for name in ("q", "a", "c", "l", "u"):
            object.__setattr__(self, name, _vec(getattr(self, name)))
        object.__setattr__(self, "b", float(self.b))
        n = len(self.q)
        if n < 1:
            raise ValueError("an instance needs at least one variable")
        for name in ("a", "c", "l", "u"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} has length {len(getattr(self, name))}, expected {n}")

    @property
    def n(self) -> int:
        return len(self.q)

    def objective(self, x) -> float:
        x = np.asarray(x, dtype=float)
        s = float(self.q @ x)
        return 0.5 * s * s - float(self.c @ x)

    def validate(self):
        """Raise on inputs the reduction cannot handle."""
        zero = np.flatnonzero(self.q == 0)
        if len(zero):
            raise ZeroRankFactor(int(zero[0]))
        bad = np.flatnonzero(self.l > self.u)
        if len(bad):
            raise BadBounds(int(bad[0]))


@dataclass(frozen=True, eq=False)
class ReducedInstance:
    """Canonical form ``min 1/2 (1^T y)^2 - c^T y, a^T y = b, 0 <= y <= u``.

    ``scale``, ``shift`` and ``keep`` record how to get back to the original
    variables: ``x[keep] = (y + shift[keep]) / scale[keep]`` and every other
    original variable sits at ``shift / scale`` (its bounds coincide).
    ``offset`` is the constant dropped from the objective.
    """

    a: np.ndarray
    b: float
    c: np.ndarray
    u: np.ndarray
    offset: float = 0.0
    scale: Optional[np.ndarray] = None
    shift: Optional[np.ndarray] = None
    keep: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ("a", "c", "u"):
            object.__setattr__(self, name, _vec(getattr(self, name)))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "offset", float(self.offset))
        n = len(self.a)
        if len(self.c) != n or len(self.u) != n:
            raise ValueError("a, c and u must have equal length")
        if np.any(self.u < 0):
            raise BadBounds(int(np.flatnonzero(self.u < 0)[0]))
        if self.keep is None:
            object.__setattr__(self, "keep", np.arange(n))
        else:
            keep = np.array(self.keep, dtype=np.int64)
            keep.setflags(write=False)
            object.__setattr__(self, "keep", keep)
        n_full = int(self.keep.max()) + 1 if len(self.keep) else 0
        if self.scale is None:
            object.__setattr__(self, "scale", _vec(np.ones(n_full)))
        else:
            object.__setattr__(self, "scale", _vec(self.scale))
        if self.shift is None:
            object.__setattr__(self, "shift", _vec(np.zeros(len(self.scale))))
        else:
            object.__setattr__(self, "shift", _vec(self.shift))

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def n_full(self) -> int:
        return len(self.scale)

    @property
    def is_plain(self) -> bool:
        """True when no transformation is attached (parsed directly as reduced)."""
        return (
            self.offset == 0.0
            and self.n_full == self.n
            and np.all(self.scale == 1.0)
            and np.all(self.shift == 0.0)
        )

    def objective(self, y) -> float:
        y = np.asarray(y, dtype=float)
        s = float(np.sum(y))
        return 0.5 * s * s - float(self.c @ y)


@dataclass(frozen=True, eq=False)
class BoxSolution:
    x: np.ndarray
    objective: float


class Status(str, enum.Enum):
    OPTIMAL = "OPTIMAL"
    NEAR_OPTIMAL = "NEAR_OPTIMAL"
    INFEASIBLE = "INFEASIBLE"


@dataclass(eq=False)
class SolveReport:
    status: Status
    x: np.ndarray
    objective: float
    lam: float
    gap: float
    phase: int
    events_processed: int
    time_ms: float
    # Reduced-coordinate diagnostics; not serialized.
    residual: float = field(default=float("nan"), repr=False)
    phi: float = field(default=float("nan"), repr=False)

    def same_result(self, other: "SolveReport") -> bool:
        """Equality on everything except the wall-clock time."""
        return (
            self.status == other.status
            and np.array_equal(self.x, other.x)
            and self.objective == other.objective
            and self.lam == other.lam
            and self.gap == other.gap
            and self.phase == other.phase
            and self.events_processed == other.events_processed
        )


def reduce(g: GeneralInstance) -> ReducedInstance:
    """Map a general instance onto the canonical zero-lower-bound form.

    Variables whose box collapses to a point are dropped; ``back_transform``
    pins them at that point.
    """
    g.validate()
    q = g.q
    a1 = g.a / q
    c1 = g.c / q
    lo = np.minimum(q * g.l, q * g.u)
    hi = np.maximum(q * g.l, q * g.u)
    width = hi - lo
    total_lo = float(np.sum(lo))
    # 1/2 (1^T y + L)^2 - c1^T (y + lo) = 1/2 (1^T y)^2 - (c1 - L)^T y + [1/2 L^2 - c1^T lo]
    c2 = c1 - total_lo
    b2 = g.b - float(a1 @ lo)
    offset = 0.5 * total_lo * total_lo - float(c1 @ lo)
    keep = np.flatnonzero(width > 0)
    return ReducedInstance(
        a=a1[keep], b=b2, c=c2[keep], u=width[keep],
        offset=offset, scale=q, shift=lo, keep=keep,
    )


def compact(r: ReducedInstance) -> ReducedInstance:
    """Drop zero-width variables from a reduced instance."""
    mask = r.u > 0
    if mask.all():
        return r
    return ReducedInstance(
        a=r.a[mask], b=r.b, c=r.c[mask], u=r.u[mask],
        offset=r.offset, scale=r.scale, shift=r.shift, keep=r.keep[mask],
    )


def map_point(r: ReducedInstance, x) -> np.ndarray:
    """Image of an original-coordinate point in the reduced variables."""
    x = np.asarray(x, dtype=float)
    return (r.scale * x - r.shift)[r.keep]


def back_transform(r: ReducedInstance, y) -> np.ndarray:
    """Original-coordinate point for a reduced point ``y``."""
    full = np.array(r.shift, dtype=float)
    full[r.keep] += np.asarray(y, dtype=float)
    return full / r.scale


def constraint_range(r: ReducedInstance):
    """Smallest and largest value of ``a^T y`` over the box."""
    au = r.a * r.u
    return float(np.sum(au[au < 0])), float(np.sum(au[au > 0]))


def feasibility_check(r: ReducedInstance, tol: float = 0.0) -> bool:
    """Whether the hyperplane ``a^T y = b`` meets the box ``[0, u]``."""
    lo, hi = constraint_range(r)
    return lo - tol <= r.b <= hi + tol


def is_feasible_general(g: GeneralInstance) -> bool:
    au_lo = np.minimum(g.a * g.l, g.a * g.u)
    au_hi = np.maximum(g.a * g.l, g.a * g.u)
    return float(np.sum(au_lo)) <= g.b <= float(np.sum(au_hi))
