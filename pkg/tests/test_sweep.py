import numpy as np
import pytest

from conftest import random_reduced
from rqkp.dual import eval_phi
from rqkp.exceptions import QueueEmpty
from rqkp.model import ReducedInstance
from rqkp.sweep import (BracketKind, build_lines, init_sweep, pending_events, phi_incremental,
                        run_phase1, schedule_pair, step)


def _drain(state):
    out = []
    while not state.queue_empty:
        ev = step(state)
        if ev is not None:
            out.append(ev)
    return out


def test_initial_events_and_full_set():
    r = ReducedInstance(a=[1, -1], b=0, c=[1, 1], u=[1, 1])
    state = init_sweep(r)
    # order at -inf is 1-lam, 0, 1+lam; only neighbours are queued
    assert sorted(lam for lam, _, _ in pending_events(state)) == [-1.0, 1.0]
    events = _drain(state)
    assert sorted({ev[0] for ev in events}) == [-1.0, 0.0, 1.0]


def test_small_bracket():
    r = ReducedInstance(a=[1, -1], b=0, c=[1, 1], u=[1, 1])
    phis = {lam: eval_phi(r, lam).phi for lam in (-1.0, 0.0, 1.0)}
    assert phis[0.0] == -0.5 and phis[-1.0] < -0.5 and phis[1.0] < -0.5
    br = run_phase1(r).bracket
    assert br.kind == BracketKind.BRACKET
    assert (br.lo, br.mid, br.hi) == (-1.0, 0.0, 1.0)


def test_parallel_lines_only_cross_zero():
    r = ReducedInstance(a=[2, 2, 2], b=3, c=[1, -4, 6], u=[1, 1, 1])
    events = _drain(init_sweep(r))
    assert len(events) == 3
    assert all(0 in ev[1:3] for ev in events)


def test_single_flat_line_has_no_events():
    r = ReducedInstance(a=[0], b=0.5, c=[1], u=[1])
    state = init_sweep(r)
    assert state.queue_empty
    with pytest.raises(QueueEmpty):
        step(state)
    br = run_phase1(r).bracket
    assert br.kind == BracketKind.EXHAUSTED and br.events == 0
    assert np.isnan(br.lam_lb) and np.isnan(br.lam_ub)


def test_identical_lines_have_no_events():
    r = ReducedInstance(a=[1, 1, 1], b=1, c=[2, 2, 2], u=[1, 2, 3])
    lines = build_lines(r)
    assert lines.m == 1 and lines.cap[1] == 6
    br = run_phase1(r).bracket
    assert br.kind == BracketKind.EXHAUSTED and br.events == 1
    assert br.lam_lb == br.lam_ub == -2.0


def test_zero_line_toggles_membership():
    r = ReducedInstance(a=[1, -1], b=0, c=[1, 1], u=[1, 1])
    state = init_sweep(r)
    assert state.zero_fixed == {1}
    lam, up, lo, _ = step(state)
    assert lam == -1.0 and {up, lo} == {0, 1}
    assert state.zero_fixed == set()
    before = state.zero_fixed
    while not state.queue_empty:
        ev = step(state)
        if ev is None:
            continue
        after = state.zero_fixed
        if 0 in ev[1:3]:
            assert len(after ^ before) == 1
        else:
            assert after == before
        before = after
    assert state.zero_fixed == {2}


def test_stale_event_is_discarded():
    r = ReducedInstance(a=[1, -1, 0.5], b=0, c=[1, 1, 0], u=[1, 1, 1])
    state = init_sweep(r)
    # lines 1 and 2 are not neighbours at the start
    p1, p2 = state.pos[1], state.pos[2]
    assert abs(p1 - p2) > 1
    first = min(lam for lam, _, _ in pending_events(state))
    upper, lower = (1, 2) if p1 < p2 else (2, 1)
    schedule_pair(state, upper, lower, first - 1.0)
    assert step(state) is None
    assert state.processed == 0


def test_duplicate_request_processed_once():
    r = ReducedInstance(a=[1, -1], b=0, c=[1, 1], u=[1, 1])
    state = init_sweep(r)
    lam, up, lo = pending_events(state)[0]
    schedule_pair(state, up, lo, lam)
    schedule_pair(state, up, lo, lam)
    assert sum(1 for e in pending_events(state) if e[1:] == (up, lo)) == 1


def test_event_count_generic():
    rng = np.random.default_rng(5)
    for n in (5, 20, 50):
        r = ReducedInstance(a=rng.normal(size=n), b=0.0, c=rng.normal(size=n),
                            u=np.ones(n))
        state = init_sweep(r)
        start = state.status.copy()
        events = _drain(state)
        assert len(events) == n * (n + 1) // 2
        lams = [e[0] for e in events]
        assert lams == sorted(lams)
        np.testing.assert_array_equal(state.status, start[::-1])
        assert run_phase1(r, stop_at_bracket=False).bracket.events == n * (n + 1) // 2


def test_incremental_phi_matches_direct(rng):
    r = random_reduced(rng, 50)
    state = init_sweep(r)
    for lam, _, _, phi in _drain(state):
        ref = eval_phi(r, lam).phi
        assert abs(phi - ref) <= 1e-8 * (1 + abs(ref))


def test_order_valid_after_each_swap(rng):
    r = random_reduced(rng, 15)
    state = init_sweep(r)
    L = state.lines
    events = _drain(state)
    assert events
    state = init_sweep(r)
    for lam, _, _, _ in events:
        step_out = None
        while step_out is None:
            step_out = step(state)
        vals = L.icpt[state.status] + (lam + 1e-9) * L.slope[state.status]
        assert np.all(np.diff(vals) <= 1e-7)


def test_bracket_is_valid(rng):
    found = 0
    for _ in range(200):
        r = random_reduced(rng, int(rng.integers(2, 30)))
        br = run_phase1(r).bracket
        if br.kind != BracketKind.BRACKET:
            continue
        found += 1
        assert br.lo < br.mid < br.hi
        mid = eval_phi(r, br.mid).phi
        assert mid > eval_phi(r, br.lo).phi and mid > eval_phi(r, br.hi).phi
    assert found > 50


def test_exhausted_range(rng):
    r = ReducedInstance(a=[1, 2], b=100.0, c=[0, 0], u=[1, 1])
    br = run_phase1(r).bracket
    assert br.kind == BracketKind.EXHAUSTED
    assert br.lam_lb == 0.0 and br.lam_ub == 0.0


def test_trace_columns(rng):
    r = random_reduced(rng, 10)
    res = run_phase1(r, stop_at_bracket=False, trace=True)
    assert res.trace.shape == (res.bracket.events, 4)
    assert np.all(np.diff(res.trace[:, 0]) >= 0)


def test_refresh_does_not_change_result(rng):
    r = random_reduced(rng, 40)
    a = run_phase1(r, stop_at_bracket=False, trace=True, refresh_every=4096).trace
    b = run_phase1(r, stop_at_bracket=False, trace=True, refresh_every=7).trace
    np.testing.assert_array_equal(a[:, :3], b[:, :3])
    np.testing.assert_allclose(a[:, 3], b[:, 3], rtol=1e-9, atol=1e-9)
