"""Plane sweep over the cost lines ``c_i(lam) = c_i + lam a_i``.

The sweep moves ``lam`` from ``-inf`` to ``+inf`` through every crossing of
two cost lines, including the constant zero line (id 0) whose crossings mark
cost sign changes. The status array keeps the lines ordered by current value,
largest first, so the lines above the zero line are exactly the coordinates
that can be positive in the inner minimizer. Prefix sums over the status
give ``phi`` at any event in ``O(log n)``.

Variables with identical ``(a_i, c_i)`` lie on the same line; they are merged
into one line whose capacity is the sum of theirs. Line ``k >= 1`` stands for
the group ``groups[k - 1]`` of reduced indices.

Event queue: an indexed binary heap holding, for every line, the abscissa at
which it crosses the line just below it (``inf`` if never). A swap changes
the lower neighbour of at most three lines, so each event costs three heap
updates. Equal abscissas are processed as one batch and ``phi`` is evaluated
once per distinct abscissa.
"""

import enum
from dataclasses import dataclass, field
from typing import List, Optional

import numba
import numpy as np

from .exceptions import QueueEmpty
from .model import ReducedInstance

INF = np.inf
# Relative rounding allowance on dual values; differences below
# NOISE * (size of the summed terms) are treated as ties.
NOISE = 1e-13


class BracketKind(enum.IntEnum):
    BRACKET = 0
    EXHAUSTED = 1


@dataclass(frozen=True)
class Bracket:
    """Outcome of the sweep.

    For ``BRACKET``: ``lo < mid < hi`` with ``phi(mid)`` above both ends by
    more than the rounding allowance ``NOISE``. For ``EXHAUSTED``: ``lam_lb``/``lam_ub`` are the first and last event
    abscissas (``nan`` when there were no events) and ``best_*`` locate the
    largest ``phi`` seen at an event together with its neighbouring events.
    """

    kind: BracketKind
    lo: float = np.nan
    mid: float = np.nan
    hi: float = np.nan
    phi_lo: float = np.nan
    phi_mid: float = np.nan
    phi_hi: float = np.nan
    lam_lb: float = np.nan
    lam_ub: float = np.nan
    best_phi: float = -np.inf
    best_first: float = np.nan
    best_last: float = np.nan
    before_best: float = np.nan
    after_best: float = np.nan
    events: int = 0
    abscissas: int = 0


@dataclass(frozen=True, eq=False)
class LineSet:
    slope: np.ndarray  # index 0 is the zero line
    icpt: np.ndarray
    cap: np.ndarray
    groups: List[np.ndarray]

    @property
    def m(self) -> int:
        return len(self.slope) - 1


def build_lines(r: ReducedInstance) -> LineSet:
    """Zero line plus one line per distinct ``(a_i, c_i)`` among ``u_i > 0``."""
    idx = np.flatnonzero(r.u > 0)
    if len(idx):
        keys = np.stack([r.a[idx], r.c[idx]], axis=1)
        uniq, inv = np.unique(keys, axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        order = np.argsort(inv, kind="stable")
        splits = np.flatnonzero(np.diff(inv[order])) + 1
        groups = [idx[g] for g in np.split(order, splits)]
        # number lines by the smallest member index for determinism
        first = np.array([g[0] for g in groups])
        rank = np.argsort(first, kind="stable")
        groups = [groups[k] for k in rank]
        uniq = uniq[rank]
        cap = np.array([r.u[g].sum() for g in groups])
        slope = np.concatenate(([0.0], uniq[:, 0]))
        icpt = np.concatenate(([0.0], uniq[:, 1]))
        cap = np.concatenate(([0.0], cap))
    else:
        groups = []
        slope = icpt = cap = np.zeros(1)
    return LineSet(slope=slope, icpt=icpt, cap=cap, groups=groups)


@dataclass(eq=False)
class SweepState:
    """Mutable sweep workspace.

    ``status[p]`` is the line at position ``p`` (largest value first), ``pos``
    its inverse. ``key[i]``/``below[i]`` hold the pending crossing of line
    ``i`` with ``below[i]``; ``heap``/``hpos`` index the queue.
    """

    lines: LineSet
    b: float
    status: np.ndarray
    pos: np.ndarray
    key: np.ndarray
    below: np.ndarray
    heap: np.ndarray
    hpos: np.ndarray
    pu: np.ndarray
    pc: np.ndarray
    pa: np.ndarray
    lam: float = -np.inf
    lam_prev: float = -np.inf
    lam_prev_prev: float = -np.inf
    processed: int = 0
    trace: list = field(default_factory=list)

    @property
    def zero_fixed(self) -> set:
        """Lines currently below the zero line (their coordinates vanish)."""
        return set(int(i) for i in self.status[self.pos[0] + 1:])

    @property
    def queue_empty(self) -> bool:
        return not self.key[self.heap[0]] < INF


# --------------------------------------------------------------------------
# compiled kernels


@numba.njit(cache=True, inline="always")
def _less(key, i, j):
    return key[i] < key[j] or (key[i] == key[j] and i < j)


@numba.njit(cache=True, inline="always")
def _sift_up(heap, hpos, key, h):
    i = heap[h]
    while h > 0:
        parent = (h - 1) >> 1
        j = heap[parent]
        if _less(key, i, j):
            heap[h] = j
            hpos[j] = h
            h = parent
        else:
            break
    heap[h] = i
    hpos[i] = h


@numba.njit(cache=True, inline="always")
def _sift_down(heap, hpos, key, h):
    size = heap.shape[0]
    i = heap[h]
    while True:
        child = 2 * h + 1
        if child >= size:
            break
        if child + 1 < size and _less(key, heap[child + 1], heap[child]):
            child += 1
        j = heap[child]
        if _less(key, j, i):
            heap[h] = j
            hpos[j] = h
            h = child
        else:
            break
    heap[h] = i
    hpos[i] = h


@numba.njit(cache=True, inline="always")
def _set_key(heap, hpos, key, i, value):
    old = key[i]
    key[i] = value
    h = hpos[i]
    if value < old:
        _sift_up(heap, hpos, key, h)
    elif value > old:
        _sift_down(heap, hpos, key, h)


@numba.njit(cache=True, inline="always")
def _schedule(slope, icpt, status, pos, key, below, heap, hpos, i, cur):
    """Queue the crossing of line ``i`` with the line right below it."""
    p = pos[i]
    value = INF
    j = -1
    if p + 1 < status.shape[0]:
        j = status[p + 1]
        if slope[j] > slope[i]:
            value = (icpt[i] - icpt[j]) / (slope[j] - slope[i])
            if value < cur:
                value = cur
    below[i] = j
    _set_key(heap, hpos, key, i, value)


@numba.njit(cache=True)
def _rebuild_prefix(status, slope, icpt, cap, pu, pc, pa):
    su = 0.0
    sc = 0.0
    sa = 0.0
    pu[0] = 0.0
    pc[0] = 0.0
    pa[0] = 0.0
    for p in range(status.shape[0]):
        i = status[p]
        su += cap[i]
        sc += icpt[i] * cap[i]
        sa += slope[i] * cap[i]
        pu[p + 1] = su
        pc[p + 1] = sc
        pa[p + 1] = sa


@numba.njit(cache=True)
def _phi_mag(lam, b, status, pos, slope, icpt, cap, pu, pc, pa):
    """Dual value from the prefix sums, with the size of the terms summed.

    The status must be sorted at ``lam``. The second value bounds the
    magnitude of the partial sums, so ``~eps * mag`` is the rounding noise.
    """
    m = pos[0]  # lines above the zero line
    lb = lam * b
    if m == 0:
        return lb, abs(lb)
    lo = 0
    hi = m
    while lo < hi:
        mid = (lo + hi) >> 1
        i = status[mid]
        ci = icpt[i] + lam * slope[i]
        g = pu[mid] + 0.5 * cap[i] - ci
        if g >= -1e-12 * (1.0 + abs(ci)):
            hi = mid
        else:
            lo = mid + 1
    if lo == m:
        # every G negative: partial amount on the last active line
        p = m - 1
        i = status[p]
        ci = icpt[i] + lam * slope[i]
        d = min(ci - pu[p], cap[i])
        s = pu[p] + d
        lin = pc[p] + lam * pa[p]
        return lb + 0.5 * s * s - lin - ci * d, abs(lb) + 0.5 * s * s + abs(lin) + abs(ci * d)
    if lo == 0:
        i = status[0]
        ci = icpt[i] + lam * slope[i]
        d = min(ci, cap[i])
        return lb + 0.5 * d * d - ci * d, abs(lb) + 1.5 * abs(ci * d)
    k = lo
    i1 = status[k - 1]
    c1 = icpt[i1] + lam * slope[i1]
    d1 = min(c1 - pu[k - 1], cap[i1])
    s1 = pu[k - 1] + d1
    lin1 = pc[k - 1] + lam * pa[k - 1]
    f_bar = 0.5 * s1 * s1 - lin1 - c1 * d1
    i2 = status[k]
    c2 = icpt[i2] + lam * slope[i2]
    d2 = max(c2 - pu[k], 0.0)
    s2 = pu[k] + d2
    lin2 = pc[k] + lam * pa[k]
    f_til = 0.5 * s2 * s2 - lin2 - c2 * d2
    if f_bar < f_til:
        return lb + f_bar, abs(lb) + 0.5 * s1 * s1 + abs(lin1) + abs(c1 * d1)
    return lb + f_til, abs(lb) + 0.5 * s2 * s2 + abs(lin2) + abs(c2 * d2)


@numba.njit(cache=True)
def _phi_at(lam, b, status, pos, slope, icpt, cap, pu, pc, pa):
    return _phi_mag(lam, b, status, pos, slope, icpt, cap, pu, pc, pa)[0]


@numba.njit(cache=True)
def _pop_swap(slope, icpt, cap, status, pos, key, below, heap, hpos, pu, pc, pa):
    """Process the queue head. Returns (lam, upper, lower, swapped)."""
    i = heap[0]
    lam = key[i]
    j = below[i]
    p = pos[i]
    if j < 0 or p + 1 >= status.shape[0] or status[p + 1] != j or not slope[j] > slope[i]:
        # stale: the pair is no longer adjacent; recompute this line's event
        _schedule(slope, icpt, status, pos, key, below, heap, hpos, i, lam)
        return lam, i, j, False
    status[p] = j
    status[p + 1] = i
    pos[j] = p
    pos[i] = p + 1
    pu[p + 1] = pu[p] + cap[j]
    pc[p + 1] = pc[p] + icpt[j] * cap[j]
    pa[p + 1] = pa[p] + slope[j] * cap[j]
    if p > 0:
        _schedule(slope, icpt, status, pos, key, below, heap, hpos, status[p - 1], lam)
    _schedule(slope, icpt, status, pos, key, below, heap, hpos, j, lam)
    _schedule(slope, icpt, status, pos, key, below, heap, hpos, i, lam)
    return lam, j, i, True


@numba.njit(cache=True)
def _run(slope, icpt, cap, b, status, pos, key, below, heap, hpos, pu, pc, pa,
         stop_at_bracket, refresh_every, trace):
    nan = np.nan
    processed = 0
    n_abs = 0
    lam_lb = nan
    lam_ub = nan
    prev = -INF
    prev_prev = -INF
    phi_prev = -INF
    phi_prev_prev = -INF
    best = -INF
    best_first = nan
    best_last = nan
    before_best = nan
    after_best = nan
    cur = -INF
    since_refresh = 0
    n_trace = 0
    tr_lam = np.empty(16 if trace else 0)
    tr_lo = np.empty(16 if trace else 0, dtype=np.int64)
    tr_hi = np.empty(16 if trace else 0, dtype=np.int64)
    tr_phi = np.empty(16 if trace else 0)
    found = False
    out = np.full(6, nan)
    while True:
        top = key[heap[0]]
        if top > cur and cur > -INF:
            # batch at `cur` complete
            phi, mag = _phi_mag(cur, b, status, pos, slope, icpt, cap, pu, pc, pa)
            slack = NOISE * (1.0 + mag)
            n_abs += 1
            if phi > best + slack:
                best = phi
                before_best = prev if prev > -INF else nan
                best_first = cur
                best_last = cur
                after_best = nan
            elif phi >= best - slack:
                # indistinguishable from the best value: widen the best span
                if phi > best:
                    best = phi
                best_last = cur
                after_best = nan
            elif after_best != after_best:
                after_best = cur
            if (stop_at_bracket and prev_prev > -INF and phi_prev - phi_prev_prev > slack
                    and phi_prev - phi > slack):
                out[0] = prev_prev
                out[1] = prev
                out[2] = cur
                out[3] = phi_prev_prev
                out[4] = phi_prev
                out[5] = phi
                found = True
                break
            prev_prev = prev
            phi_prev_prev = phi_prev
            prev = cur
            phi_prev = phi
        if not top < INF:
            break
        if top > cur:
            cur = top
            if lam_lb != lam_lb:
                lam_lb = cur
            lam_ub = cur
        lam, lo_id, hi_id, swapped = _pop_swap(slope, icpt, cap, status, pos, key, below,
                                               heap, hpos, pu, pc, pa)
        if not swapped:
            continue
        processed += 1
        since_refresh += 1
        if since_refresh >= refresh_every:
            _rebuild_prefix(status, slope, icpt, cap, pu, pc, pa)
            since_refresh = 0
        if trace:
            if n_trace == tr_lam.shape[0]:
                tr_lam = np.concatenate((tr_lam, np.empty(n_trace)))
                tr_lo = np.concatenate((tr_lo, np.empty(n_trace, dtype=np.int64)))
                tr_hi = np.concatenate((tr_hi, np.empty(n_trace, dtype=np.int64)))
                tr_phi = np.concatenate((tr_phi, np.empty(n_trace)))
            tr_lam[n_trace] = lam
            tr_lo[n_trace] = lo_id
            tr_hi[n_trace] = hi_id
            tr_phi[n_trace] = _phi_at(lam, b, status, pos, slope, icpt, cap, pu, pc, pa)
            n_trace += 1
    stats = np.array([lam_lb, lam_ub, best, best_first, best_last, before_best, after_best])
    counts = np.array([processed, n_abs, 1 if found else 0], dtype=np.int64)
    return (out, stats, counts, tr_lam[:n_trace], tr_lo[:n_trace], tr_hi[:n_trace],
            tr_phi[:n_trace])


# --------------------------------------------------------------------------
# Python-level API


def init_sweep(r: ReducedInstance, lines: Optional[LineSet] = None) -> SweepState:
    """Status at ``lam -> -inf``: ascending slope, then descending intercept.

    Position 0 holds the largest value. Lines with equal slope keep their
    intercept order for the whole sweep; exact duplicates were merged.
    """
    if lines is None:
        lines = build_lines(r)
    nl = len(lines.slope)
    ids = np.arange(nl)
    status = np.lexsort((ids, -lines.icpt, lines.slope)).astype(np.int64)
    pos = np.empty(nl, dtype=np.int64)
    pos[status] = ids
    key = np.full(nl, INF)
    below = np.full(nl, -1, dtype=np.int64)
    heap = ids.astype(np.int64).copy()
    hpos = ids.astype(np.int64).copy()
    pu = np.zeros(nl + 1)
    pc = np.zeros(nl + 1)
    pa = np.zeros(nl + 1)
    _rebuild_prefix(status, lines.slope, lines.icpt, lines.cap, pu, pc, pa)
    for i in range(nl):
        _schedule(lines.slope, lines.icpt, status, pos, key, below, heap, hpos, i, -INF)
    return SweepState(lines=lines, b=float(r.b), status=status, pos=pos, key=key,
                      below=below, heap=heap, hpos=hpos, pu=pu, pc=pc, pa=pa)


def pending_events(state: SweepState):
    """Queued ``(lam, upper, lower)`` triples in processing order."""
    ids = [i for i in range(len(state.key)) if state.key[i] < INF]
    ids.sort(key=lambda i: (state.key[i], i))
    return [(float(state.key[i]), i, int(state.below[i])) for i in ids]


def schedule_pair(state: SweepState, upper: int, lower: int, lam: float):
    """Force a queue entry for ``(upper, lower)`` at ``lam``, replacing
    ``upper``'s pending event. Used to exercise the stale-event check."""
    state.below[upper] = lower
    _set_key(state.heap, state.hpos, state.key, upper, float(lam))


def step(state: SweepState):
    """Pop one queued crossing and apply it.

    Returns ``(lam, upper_after, lower_after, phi)`` for a swap, or ``None``
    when the entry was stale and got discarded.
    """
    if state.queue_empty:
        raise QueueEmpty("no pending crossings")
    L = state.lines
    lam, up, lo, swapped = _pop_swap(L.slope, L.icpt, L.cap, state.status, state.pos,
                                     state.key, state.below, state.heap, state.hpos,
                                     state.pu, state.pc, state.pa)
    if not swapped:
        return None
    if lam > state.lam:
        state.lam_prev_prev, state.lam_prev = state.lam_prev, state.lam
        state.lam = lam
    state.processed += 1
    phi = phi_incremental(state, lam)
    state.trace.append((lam, lo, up, phi))
    return lam, up, lo, phi


def phi_incremental(state: SweepState, lam: float) -> float:
    L = state.lines
    return float(_phi_at(float(lam), state.b, state.status, state.pos, L.slope, L.icpt,
                         L.cap, state.pu, state.pc, state.pa))


@dataclass(frozen=True, eq=False)
class SweepResult:
    bracket: Bracket
    lines: LineSet
    trace: Optional[np.ndarray] = None  # columns lam, id_low, id_high, phi


def run_phase1(r: ReducedInstance, stop_at_bracket: bool = True, trace: bool = False,
               refresh_every: int = 4096) -> SweepResult:
    """Sweep all crossings in order, stopping at the first strict interior peak.

    ``phi`` is evaluated once per distinct abscissa; when the middle of three
    consecutive abscissas has the strictly largest value the sweep returns
    them as a bracket for the dual maximizer.
    """
    state = init_sweep(r)
    L = state.lines
    out, stats, counts, tl, tlo, thi, tphi = _run(
        L.slope, L.icpt, L.cap, float(r.b), state.status, state.pos, state.key,
        state.below, state.heap, state.hpos, state.pu, state.pc, state.pa,
        stop_at_bracket, refresh_every, trace)
    processed, n_abs, found = (int(v) for v in counts)
    stats = [float(v) for v in stats]
    out = [float(v) for v in out]
    common = dict(lam_lb=stats[0], lam_ub=stats[1], best_phi=stats[2], best_first=stats[3],
                  best_last=stats[4], before_best=stats[5], after_best=stats[6],
                  events=processed, abscissas=n_abs)
    if found:
        br = Bracket(BracketKind.BRACKET, lo=out[0], mid=out[1], hi=out[2],
                     phi_lo=out[3], phi_mid=out[4], phi_hi=out[5], **common)
    else:
        br = Bracket(BracketKind.EXHAUSTED, **common)
    tr = None
    if trace:
        tr = np.column_stack([tl, tlo.astype(float), thi.astype(float), tphi])
    return SweepResult(bracket=br, lines=L, trace=tr)
