"""Closed-form minimizer of ``f(x) = 1/2 (1^T x)^2 - c^T x`` over ``0 <= x <= u``.

Sort the positive costs in non-increasing order and let ``U_k`` be the sum of
the first ``k`` capacities. With ``G_k = U_{k-1} + u_k / 2 - c_k`` (strictly
increasing) the first index ``nbar`` with ``G_nbar >= 0`` pins the optimum to
one of two candidates that fill a prefix of the sorted order and put a
single partial amount on the next coordinate. Indices called ``nbar`` here
are 1-based positions in the sorted order, as in the usual statement of the
result; everything else is 0-based.
"""

import enum
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

G_TOL = 1e-12


class Candidate(str, enum.Enum):
    XBAR = "XBAR"
    XTILDE = "XTILDE"


@dataclass(frozen=True, eq=False)
class SortedView:
    order: np.ndarray  # active indices, costs non-increasing, ties by index
    prefix_u: np.ndarray  # prefix_u[k] = sum of the first k sorted capacities

    @property
    def m(self) -> int:
        return len(self.order)


@dataclass(frozen=True, eq=False)
class BoundedSolution:
    x: np.ndarray
    objective: float
    nbar: Optional[int]
    deltas: Tuple[float, ...]
    candidate: Candidate
    view: SortedView
    # Objectives of both candidates when nbar > 1, else (objective, objective).
    f_xbar: float = float("nan")
    f_xtilde: float = float("nan")

    @property
    def support(self) -> np.ndarray:
        """Indices strictly inside their box."""
        u = self._u
        return np.flatnonzero((self.x > 0) & (self.x < u))

    _u: np.ndarray = None


def f_eval(x, c) -> float:
    x = np.asarray(x, dtype=float)
    s = float(np.sum(x))
    return 0.5 * s * s - float(np.dot(c, x))


def sorted_view(c, u) -> SortedView:
    c = np.asarray(c, dtype=float)
    u = np.asarray(u, dtype=float)
    active = np.flatnonzero((c > 0) & (u > 0))
    # stable sort on -c keeps ascending index among equal costs
    order = active[np.argsort(-c[active], kind="stable")]
    prefix = np.concatenate(([0.0], np.cumsum(u[order])))
    return SortedView(order=order, prefix_u=prefix)


def compute_G(cs, us) -> np.ndarray:
    """``G_k = U_{k-1} + u_k/2 - c_k`` for costs and capacities in sorted order."""
    cs = np.asarray(cs, dtype=float)
    us = np.asarray(us, dtype=float)
    prev = np.concatenate(([0.0], np.cumsum(us)[:-1]))
    return prev + 0.5 * us - cs


def find_nbar(G, cs=None) -> Optional[int]:
    """1-based index of the first entry of ``G`` that is nonnegative, or None.

    With ``cs`` given, an entry counts as nonnegative down to
    ``-G_TOL * (1 + |c_k|)``.
    """
    G = np.asarray(G, dtype=float)
    m = len(G)

    def ok(k):
        slack = 0.0 if cs is None else G_TOL * (1.0 + abs(cs[k]))
        return G[k] >= -slack

    lo, hi = 0, m
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo + 1 if lo < m else None


def solve_sorted(cs, us, U=None, CU=None):
    """Core selection on already sorted positive costs.

    Returns ``(nbar, p, delta, deltas, candidate, f_bar, f_tilde)``: the
    optimum fills sorted positions ``0..p-1`` to capacity and puts ``delta``
    on position ``p``.
    """
    m = len(cs)
    if U is None:
        U = np.concatenate(([0.0], np.cumsum(us)))
    if CU is None:
        CU = np.concatenate(([0.0], np.cumsum(cs * us)))
    G = U[:-1] + 0.5 * us - cs
    nbar = find_nbar(G, cs)

    def f_at(p, d):
        s = U[p] + d
        return 0.5 * s * s - CU[p] - cs[p] * d

    if nbar is None:
        d = min(cs[m - 1] - U[m - 1], us[m - 1])
        f = f_at(m - 1, d)
        return None, m - 1, d, (d,), Candidate.XTILDE, f, f
    if nbar == 1:
        d = min(cs[0], us[0])
        f = f_at(0, d)
        return 1, 0, d, (d,), Candidate.XTILDE, f, f
    k = nbar - 1  # 0-based position of nbar
    d1 = min(cs[k - 1] - U[k - 1], us[k - 1])
    d2 = max(cs[k] - U[k], 0.0)
    f_bar = f_at(k - 1, d1)
    f_til = f_at(k, d2)
    if f_til <= f_bar:
        return nbar, k, d2, (d1, d2), Candidate.XTILDE, f_bar, f_til
    return nbar, k - 1, d1, (d1, d2), Candidate.XBAR, f_bar, f_til


def solve_bounded(c, u) -> BoundedSolution:
    """Minimize ``1/2 (1^T x)^2 - c^T x`` over ``0 <= x <= u``.

    Coordinates with ``c_i <= 0`` or ``u_i = 0`` stay at zero: raising them
    never lowers the objective.
    """
    c = np.asarray(c, dtype=float)
    u = np.asarray(u, dtype=float)
    view = sorted_view(c, u)
    x = np.zeros(len(c))
    if view.m == 0:
        return BoundedSolution(x=x, objective=0.0, nbar=None, deltas=(),
                               candidate=Candidate.XTILDE, view=view,
                               f_xbar=0.0, f_xtilde=0.0, _u=u)
    cs = c[view.order]
    us = u[view.order]
    nbar, p, d, deltas, cand, f_bar, f_til = solve_sorted(cs, us, U=view.prefix_u)
    x[view.order[:p]] = us[:p]
    x[view.order[p]] = d
    return BoundedSolution(x=x, objective=f_eval(x, c), nbar=nbar, deltas=deltas,
                           candidate=cand, view=view, f_xbar=f_bar, f_xtilde=f_til, _u=u)


def prefix_point(view: SortedView, u, n, k) -> np.ndarray:
    """The vector that fills the first ``k`` sorted coordinates to capacity."""
    x = np.zeros(n)
    idx = view.order[:k]
    x[idx] = np.asarray(u, dtype=float)[idx]
    return x
