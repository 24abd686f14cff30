"""Two-phase solve: sweep for a bracket, otherwise expand outward, then
maximize the dual on the chosen interval and recover a primal point."""

import dataclasses
import math
import time
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from . import sweep as _sweep
from .bounded import solve_bounded
from .config import DEFAULT, ScalarMaxConfig, SolverConfig
from .dual import eval_phi
from .exceptions import UnboundedDual
from .model import (GeneralInstance, ReducedInstance, SolveReport, Status, back_transform,
                    compact, constraint_range, feasibility_check, reduce)

_GOLD = 0.5 * (3.0 - math.sqrt(5.0))


@dataclass(frozen=True)
class ScalarMax:
    lam: float
    phi: float
    iterations: int
    converged: bool


def maximize_scalar(phi: Callable[[float], float], lo: float, hi: float,
                    cfg: ScalarMaxConfig = ScalarMaxConfig()) -> ScalarMax:
    """Maximize a unimodal ``phi`` on ``[lo, hi]``.

    Golden section steps with parabolic interpolation when the fit is
    trustworthy (Brent's scheme). The endpoints are compared at the end, so a
    monotone ``phi`` returns the better endpoint.
    """
    lo, hi = float(lo), float(hi)
    if hi < lo:
        lo, hi = hi, lo
    if hi == lo:
        return ScalarMax(lo, float(phi(lo)), 0, True)

    def f(t):
        return -float(phi(t))

    a, b = lo, hi
    x = w = v = a + _GOLD * (b - a)
    fx = fw = fv = f(x)
    d = e = 0.0
    it = 0
    converged = False
    while it < cfg.max_iter:
        it += 1
        m = 0.5 * (a + b)
        tol1 = cfg.tolerance * (1.0 + abs(x)) / 3.0
        tol2 = 2.0 * tol1
        if abs(x - m) <= tol2 - 0.5 * (b - a):
            converged = True
            break
        golden = True
        if abs(e) > tol1:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0:
                p = -p
            q = abs(q)
            if abs(p) < abs(0.5 * q * e) and q * (a - x) < p < q * (b - x):
                e, d = d, p / q
                u = x + d
                if (u - a) < tol2 or (b - u) < tol2:
                    d = tol1 if x < m else -tol1
                golden = False
        if golden:
            e = (b - x) if x < m else (a - x)
            d = _GOLD * e
        u = x + (d if abs(d) >= tol1 else (tol1 if d > 0 else -tol1))
        fu = f(u)
        if fu <= fx:
            if u < x:
                b = x
            else:
                a = x
            v, fv, w, fw, x, fx = w, fw, x, fx, u, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, fv, w, fw = w, fw, u, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
    best_lam, best_val = x, -fx
    for t in (lo, hi):
        val = float(phi(t))
        if val > best_val:
            best_lam, best_val = t, val
    return ScalarMax(best_lam, best_val, it, converged)


def expand(phi: Callable[[float], float], edge: float, direction: int,
           max_doublings: int = 200) -> Tuple[float, float]:
    """Outward doubling from ``edge`` until ``phi`` stops increasing.

    Returns the interval between ``edge`` and the first sample that is no
    better than its predecessor; by concavity the maximum of ``phi`` over the
    half-line beyond ``edge`` lies in it.
    """
    step = max(1.0, abs(edge))
    prev = float(phi(edge))
    for k in range(max_doublings + 1):
        t = edge + direction * step * 2.0 ** k
        val = float(phi(t))
        if not val > prev:
            return (t, edge) if direction < 0 else (edge, t)
        prev = val
    raise UnboundedDual(f"dual still increasing at lam={t:.6g}")


def phase2_brackets(r: ReducedInstance, br: _sweep.Bracket, max_doublings: int = 200,
                    phi=None):
    """Intervals to search when the sweep found no strict interior peak.

    Left and right outward expansions from the extreme abscissas, plus the
    span between the events adjacent to the best event value.
    """
    if phi is None:
        phi = lambda t: eval_phi(r, t).phi  # noqa: E731
    if br.events == 0 or not np.isfinite(br.lam_lb):
        left = expand(phi, 0.0, -1, max_doublings)
        right = expand(phi, 0.0, +1, max_doublings)
        return [left, right]
    left = expand(phi, br.lam_lb, -1, max_doublings)
    right = expand(phi, br.lam_ub, +1, max_doublings)
    lo = br.before_best if np.isfinite(br.before_best) else br.lam_lb
    hi = br.after_best if np.isfinite(br.after_best) else br.lam_ub
    return [left, right, (lo, hi)]


@dataclass(frozen=True, eq=False)
class PrimalRecovery:
    x: np.ndarray
    residual: float
    gap: float
    method: str


def _limit_minimizer(r: ReducedInstance, lam: float, eps: float) -> np.ndarray:
    """Inner minimizer at ``lam`` selected by the order just beside it.

    Solve at ``lam + eps`` to fix which coordinates are full and which one is
    partial, then recompute the partial amount at ``lam`` itself.
    """
    x = solve_bounded(r.c + (lam + eps) * r.a, r.u).x
    frac = np.flatnonzero((x > 0) & (x < r.u))
    if len(frac) == 1:
        k = frac[0]
        rest = float(np.sum(x)) - x[k]
        ck = r.c[k] + lam * r.a[k]
        x[k] = min(max(ck - rest, 0.0), r.u[k])
    return x


def _absorb(r, x, target_tol):
    """Shift the single partial coordinate so that ``a^T x = b`` if it fits."""
    res = float(r.a @ x) - r.b
    if abs(res) <= target_tol:
        return x
    frac = np.flatnonzero((x > 0) & (x < r.u))
    for k in frac:
        if r.a[k] == 0:
            continue
        xk = x[k] - res / r.a[k]
        if 0.0 <= xk <= r.u[k]:
            y = x.copy()
            y[k] = xk
            return y
    return None


def recover_primal(r: ReducedInstance, lam: float, phi_star: float,
                   cfg: SolverConfig = DEFAULT) -> PrimalRecovery:
    """Feasible point for the reduced problem from a dual maximizer."""
    ftol = cfg.tol.feas_tol(r.b)
    gtol = cfg.tol.gap_tol(phi_star)
    cands = []

    def add(x, method):
        if x is None:
            return
        x = np.clip(x, 0.0, r.u)
        res = float(r.a @ x) - r.b
        cands.append(PrimalRecovery(x, res, r.objective(x) - phi_star, method))

    x0 = eval_phi(r, lam).x
    if abs(float(r.a @ x0) - r.b) <= ftol:
        add(x0, "direct")
    else:
        add(_absorb(r, x0, ftol), "absorb")
    done = [c for c in cands if abs(c.residual) <= ftol and c.gap <= gtol]
    if not done:
        eps = cfg.recovery_eps * (1.0 + abs(lam))
        xm = _limit_minimizer(r, lam, -eps)
        xp = _limit_minimizer(r, lam, +eps)
        am, ap = float(r.a @ xm), float(r.a @ xp)
        if am != ap:
            theta = min(max((r.b - ap) / (am - ap), 0.0), 1.0)
            xc = theta * xm + (1.0 - theta) * xp
        else:
            xc = xm
        add(xc, "combine")
        add(_absorb(r, np.clip(xc, 0.0, r.u), ftol), "combine+absorb")
        for x in (xm, xp):
            add(_absorb(r, x, ftol), "side+absorb")
    if not cands:
        add(x0, "unrecovered")

    def rank(c):
        feasible = abs(c.residual) <= ftol
        return (not feasible, c.gap if feasible else abs(c.residual))

    best = min(cands, key=rank)
    if best.residual != 0.0:
        # polish: let the partial coordinate take up the remaining residual
        y = _absorb(r, best.x, 0.0)
        if y is not None:
            y = np.clip(y, 0.0, r.u)
            res = float(r.a @ y) - r.b
            if abs(res) < abs(best.residual):
                best = PrimalRecovery(y, res, r.objective(y) - phi_star, best.method)
    return best


def _accept(r, rec, best, cfg):
    return (abs(rec.residual) <= cfg.tol.feas_tol(r.b)
            and rec.gap <= cfg.tol.gap_tol(best.phi) and best.converged)


def solve_reduced(r: ReducedInstance, cfg: SolverConfig = DEFAULT, trace=False):
    """Solve a compacted reduced instance; returns a dict of raw results."""
    phi = lambda t: eval_phi(r, t).phi  # noqa: E731
    res = _sweep.run_phase1(r, trace=trace, refresh_every=cfg.refresh_every)
    br = res.bracket
    if br.kind == _sweep.BracketKind.BRACKET:
        phase = 1
        best = maximize_scalar(phi, br.lo, br.hi, cfg.scalar)
        converged = best.converged
    else:
        phase = 2
        best = None
        converged = True
        for lo, hi in phase2_brackets(r, br, cfg.max_doublings, phi):
            cand = maximize_scalar(phi, lo, hi, cfg.scalar)
            if best is None or cand.phi > best.phi:
                best = cand
                converged = cand.converged
    rec = recover_primal(r, best.lam, best.phi, cfg)
    if phase == 1 and not _accept(r, rec, best, cfg):
        # a bracket built on near-ties can be wrong; search the rest as well
        for lo, hi in phase2_brackets(r, br, cfg.max_doublings, phi):
            cand = maximize_scalar(phi, lo, hi, cfg.scalar)
            if cand.phi > best.phi:
                best = cand
                converged = cand.converged
                phase = 2
        if phase == 2:
            rec = recover_primal(r, best.lam, best.phi, cfg)
    return dict(lam=best.lam, phi=best.phi, recovery=rec, phase=phase,
                events=br.events, converged=converged, bracket=br, trace=res.trace)


def solve(inst, cfg: SolverConfig = DEFAULT, trace_events=None) -> SolveReport:
    """Solve a general or reduced instance.

    ``trace_events`` may be a list; it receives ``(lam, id_low, id_high, phi)``
    rows for every sweep event.
    """
    t0 = time.perf_counter()
    if isinstance(inst, GeneralInstance):
        inst.validate()
        r = reduce(inst)
        n_out = inst.n
    else:
        r = compact(inst)
        n_out = inst.n_full

    def finish(status, y, lam, phi, phase, events, gap, residual):
        x = back_transform(r, y)
        obj = r.objective(y) + r.offset
        ms = (time.perf_counter() - t0) * 1000.0
        return SolveReport(status=status, x=x, objective=obj, lam=float(lam),
                           gap=float(max(gap, 0.0)), phase=phase, events_processed=events,
                           time_ms=ms, residual=residual, phi=phi)

    ftol = cfg.tol.feas_tol(r.b)
    if feasibility_check(r, ftol):
        # rounding in the reduction can leave a boundary b a few ulps outside
        lo, hi = constraint_range(r)
        if not lo <= r.b <= hi:
            r = dataclasses.replace(r, b=min(max(r.b, lo), hi))
    else:
        return SolveReport(status=Status.INFEASIBLE, x=np.full(n_out, np.nan),
                           objective=np.nan, lam=np.nan, gap=np.nan, phase=0,
                           events_processed=0,
                           time_ms=(time.perf_counter() - t0) * 1000.0)
    try:
        out = solve_reduced(r, cfg, trace=trace_events is not None)
    except UnboundedDual:
        return SolveReport(status=Status.INFEASIBLE, x=np.full(n_out, np.nan),
                           objective=np.nan, lam=np.nan, gap=np.nan, phase=2,
                           events_processed=0,
                           time_ms=(time.perf_counter() - t0) * 1000.0)
    if trace_events is not None and out["trace"] is not None:
        trace_events.extend(tuple(row) for row in out["trace"])
    rec = out["recovery"]
    ok = (abs(rec.residual) <= cfg.tol.feas_tol(r.b)
          and rec.gap <= cfg.tol.gap_tol(out["phi"]) and out["converged"])
    if ok and isinstance(inst, GeneralInstance):
        x = back_transform(r, rec.x)
        ok = abs(float(inst.a @ x) - inst.b) <= cfg.tol.feas_tol(inst.b)
    status = Status.OPTIMAL if ok else Status.NEAR_OPTIMAL
    return finish(status, rec.x, out["lam"], out["phi"], out["phase"], out["events"],
                  rec.gap, rec.residual)
