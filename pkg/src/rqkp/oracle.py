"""Brute-force reference solvers for tests and ``rqkp verify``.

Nothing here calls into the solver path: sorting, objective evaluation and
the dual grid are all done locally.
"""

import functools
import itertools
import math

import numpy as np

from .exceptions import Infeasible, TooLarge
from .model import BoxSolution, ReducedInstance

KKT_MAX_N = 12

AT_LOWER, AT_UPPER, FREE = 0, 1, 2


def _objective(x, c):
    s = x.sum(axis=-1)
    return 0.5 * s * s - (x * c).sum(axis=-1)


@functools.lru_cache(maxsize=None)
def _patterns(n):
    """All 3**n tag rows, split by number of FREE tags (0, 1, 2)."""
    tags = np.array(list(itertools.product((AT_LOWER, AT_UPPER, FREE), repeat=n)),
                    dtype=np.int8).reshape(-1, n)
    nfree = (tags == FREE).sum(axis=1)
    return tuple(tags[nfree == k] for k in range(3)), int((nfree > 2).sum())


def kkt_enumerate(r: ReducedInstance) -> BoxSolution:
    """Exact optimum of the reduced problem by pattern enumeration.

    A pattern tags each variable at lower bound, at upper bound or free.
    For the free variables stationarity says ``1^T x = c_i + lam a_i``; with
    ``a^T x = b`` this fixes the free values. Patterns with three or more
    free variables are skipped: the optimal ``s = 1^T x`` is unique, and the
    linear program ``max c^T x`` over ``{1^T x = s, a^T x = b, 0 <= x <= u}``
    has an optimal vertex with at most two variables off their bounds, so
    an optimum always shows up among the smaller patterns. Singular pattern
    systems are skipped for the same reason. Every surviving candidate is
    feasible, so the smallest objective among them is the optimum.
    """
    n = r.n
    if n > KKT_MAX_N:
        raise TooLarge(n, KKT_MAX_N)
    a, b, c, u = r.a, r.b, r.c, r.u
    if n == 0:
        if abs(b) > 1e-9:
            raise Infeasible("no variables and nonzero right-hand side")
        return BoxSolution(x=np.zeros(0), objective=0.0)
    btol = 1e-9 * (1.0 + np.abs(u))
    etol = 1e-9 * (1.0 + abs(b))
    groups, _ = _patterns(n)
    xs = []

    # no free variable: the corner itself must satisfy the constraint
    t0 = groups[0]
    x0 = np.where(t0 == AT_UPPER, u, 0.0)
    ok = np.abs(x0 @ a - b) <= etol
    xs.append(x0[ok])

    # one free variable i: a_i x_i = b - a^T x_fixed
    t1 = groups[1]
    if len(t1):
        i = np.argmax(t1 == FREE, axis=1)
        xf = np.where(t1 == AT_UPPER, u, 0.0)
        rest_b = b - xf @ a
        ai = a[i]
        with np.errstate(divide="ignore", invalid="ignore"):
            xi = np.where(ai != 0, rest_b / ai, c[i] - xf.sum(axis=1))
        ok = np.where(ai != 0, True, np.abs(rest_b) <= etol)
        ok &= (xi >= -btol[i]) & (xi <= u[i] + btol[i])
        x1 = xf.copy()
        x1[np.arange(len(t1)), i] = np.clip(xi, 0.0, u[i])
        xs.append(x1[ok])

    # two free variables i < j with a_i != a_j: (s, lam) from stationarity,
    # then x_i + x_j and a_i x_i + a_j x_j from the two equalities
    t2 = groups[2]
    if len(t2):
        free = np.argwhere(t2 == FREE)[:, 1].reshape(-1, 2)
        i, j = free[:, 0], free[:, 1]
        xf = np.where(t2 == AT_UPPER, u, 0.0)
        ai, aj, ci, cj = a[i], a[j], c[i], c[j]
        da = aj - ai
        ok = da != 0
        with np.errstate(divide="ignore", invalid="ignore"):
            lam = (ci - cj) / da
            s = ci + lam * ai
            tot = s - xf.sum(axis=1)
            rb = b - xf @ a
            xi = (rb - aj * tot) / (ai - aj)
            xj = tot - xi
        ok &= np.isfinite(xi) & np.isfinite(xj)
        ok &= (xi >= -btol[i]) & (xi <= u[i] + btol[i])
        ok &= (xj >= -btol[j]) & (xj <= u[j] + btol[j])
        x2 = xf.copy()
        rows = np.arange(len(t2))
        x2[rows, i] = np.clip(np.nan_to_num(xi), 0.0, u[i])
        x2[rows, j] = np.clip(np.nan_to_num(xj), 0.0, u[j])
        xs.append(x2[ok])

    cand = np.concatenate(xs, axis=0)
    if len(cand) == 0:
        raise Infeasible("no pattern yields a feasible point")
    vals = _objective(cand, c)
    k = int(np.argmin(vals))
    return BoxSolution(x=cand[k].copy(), objective=float(vals[k]))


def greedy_s_oracle(c, u) -> BoxSolution:
    """Minimize ``1/2 (1^T x)^2 - c^T x`` on ``[0, u]`` by scanning ``s = 1^T x``.

    For fixed ``s`` the best ``x`` fills coordinates greedily by decreasing
    cost, so ``h(s) = s^2/2 - greedy(s)`` is convex and piecewise quadratic
    with breaks at the cumulative capacities. Minimize on each segment and
    keep the best.
    """
    c = [float(v) for v in c]
    u = [float(v) for v in u]
    n = len(c)
    order = sorted(range(n), key=lambda i: (-c[i], i))
    best_val = 0.0
    best = (0, 0.0)  # (filled prefix length, amount on next)
    filled = 0.0
    value = 0.0
    for k, i in enumerate(order):
        if u[i] <= 0:
            continue
        # segment s in [filled, filled + u_i], item i partially filled
        s = min(max(c[i], filled), filled + u[i])
        t = s - filled
        h = 0.5 * s * s - (value + c[i] * t)
        if h < best_val:
            best_val = h
            best = (k, t)
        filled += u[i]
        value += c[i] * u[i]
    x = [0.0] * n
    k, t = best
    for i in order[:k]:
        x[i] = u[i]
    if k < n:
        x[order[k]] = t
    xv = np.array(x)
    s = math.fsum(x)
    obj = 0.5 * s * s - math.fsum(ci * xi for ci, xi in zip(c, x))
    return BoxSolution(x=xv, objective=obj)


def _phi_brute(r: ReducedInstance, lam: float) -> float:
    inner = greedy_s_oracle(r.c + lam * r.a, r.u)
    return lam * r.b + inner.objective


def grid_dual(r: ReducedInstance, lo: float, hi: float, points: int = 1001):
    """Best dual value on a uniform grid, refined by golden section.

    The dual is evaluated with ``greedy_s_oracle`` rather than the solver's
    bounded routine.
    """
    if points < 3:
        raise ValueError("need at least 3 grid points")
    if hi <= lo:
        return float(lo), _phi_brute(r, lo)
    grid = np.linspace(lo, hi, points)
    vals = np.array([_phi_brute(r, t) for t in grid])
    k = int(np.argmax(vals))
    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, points - 1)]
    best_t, best_v = float(grid[k]), float(vals[k])
    g = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - g * (b - a)
    x2 = a + g * (b - a)
    f1, f2 = _phi_brute(r, x1), _phi_brute(r, x2)
    for _ in range(200):
        if b - a <= 1e-13 * (1.0 + abs(a) + abs(b)):
            break
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - g * (b - a)
            f1 = _phi_brute(r, x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + g * (b - a)
            f2 = _phi_brute(r, x2)
    for t, v in ((x1, f1), (x2, f2)):
        if v > best_v:
            best_t, best_v = float(t), float(v)
    return best_t, best_v
