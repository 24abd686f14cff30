import itertools

import numpy as np
import pytest

from rqkp.bounded import sorted_view
from rqkp.driver import _absorb
from rqkp.dual import Piece, eval_phi, piece_poly
from conftest import random_reduced
from rqkp.model import ReducedInstance

EX1 = dict(a=[-7, -5, 7, -5, 7], c=[54, 44, 15, -8, -70], u=[62, 48, 36, 84, 59])


def _ex1(b=0.0):
    return ReducedInstance(b=b, **EX1)


def _event_abscissas(r):
    A = np.append(r.a, 0.0)
    C = np.append(r.c, 0.0)
    ev = set()
    for i, j in itertools.combinations(range(len(A)), 2):
        if A[i] != A[j]:
            ev.add((C[j] - C[i]) / (A[i] - A[j]))
    return sorted(ev)


def example_runs(lo=-8.36, hi=7.0):
    """Maximal runs of equal piece type between consecutive events."""
    r = _ex1()
    pts = [lo] + [e for e in _event_abscissas(r) if lo < e < hi] + [hi]
    kinds = [eval_phi(r, 0.5 * (s + t)).piece for s, t in zip(pts, pts[1:])]
    return [k for k, _ in itertools.groupby(kinds)]


def test_small_example():
    r = ReducedInstance(a=[1, -1], b=0, c=[1, 1], u=[1, 1])
    e = eval_phi(r, 0.0)
    assert e.nbar == 2
    np.testing.assert_array_equal(e.x, [1, 0])
    assert e.phi == -0.5


def test_example_at_zero():
    for b in (0.0, 17.0):
        e = eval_phi(_ex1(b), 0.0)
        assert abs(e.inner - (-1458)) <= 1e-9
        assert abs(e.phi - (-1458)) <= 1e-9
        assert e.piece == Piece.TYPE_III and e.nbar == 2
        np.testing.assert_array_equal(e.x, [54, 0, 0, 0, 0])


def test_example_four_runs():
    assert len(example_runs()) == 4


def test_example_piece_polynomial():
    r = _ex1()
    e = eval_phi(r, 0.0)
    p = piece_poly(r, 1, e.view)
    np.testing.assert_allclose(p.d, [54, 0, 0, 0, 0])
    assert p(0.0) == pytest.approx(-1458, abs=1e-9)


def test_piece_poly_out_of_range():
    r = _ex1()
    with pytest.raises(IndexError):
        piece_poly(r, 99, eval_phi(r, 0.0).view)


def test_zero_slope_pivot_is_linear():
    r = ReducedInstance(a=[0, 1], b=0, c=[5, 1], u=[10, 10])
    p = piece_poly(r, 1, sorted_view(r.c, r.u))
    assert p.A == 0


def test_empty_active_set():
    r = ReducedInstance(a=[1, 2], b=3, c=[1, 1], u=[1, 1])
    e = eval_phi(r, -10.0)
    np.testing.assert_array_equal(e.x, 0)
    assert e.phi == -30


def test_type_one_slope(rng):
    checked = 0
    for _ in range(400):
        n = int(rng.integers(2, 8))
        r = ReducedInstance(a=rng.normal(size=n), b=rng.normal(), c=rng.normal(size=n) * 10,
                            u=rng.uniform(0.5, 5, n))
        lam = rng.normal()
        e = eval_phi(r, lam)
        if e.piece != Piece.TYPE_I:
            continue
        h = 1e-6
        if eval_phi(r, lam - h).piece != Piece.TYPE_I or eval_phi(r, lam + h).piece != Piece.TYPE_I:
            continue
        fd = (eval_phi(r, lam + h).phi - eval_phi(r, lam - h).phi) / (2 * h)
        assert fd == pytest.approx(r.b - float(r.a @ e.x), abs=1e-5)
        checked += 1
    assert checked > 10


def test_concavity(rng):

    for _ in range(300):
        r = random_reduced(rng, int(rng.integers(1, 10)))
        l1, l2 = sorted(rng.normal(size=2) * 5)
        th = rng.random()
        mid = eval_phi(r, th * l1 + (1 - th) * l2).phi
        chord = th * eval_phi(r, l1).phi + (1 - th) * eval_phi(r, l2).phi
        assert mid >= chord - 1e-8 * (1 + abs(mid))


def test_weak_duality(rng):


    for _ in range(200):
        r = random_reduced(rng, int(rng.integers(1, 8)))
        x = rng.uniform(0, r.u)
        # move one coordinate so that the point satisfies the constraint
        x = _absorb(r, x, 0.0) if r.n > 0 else x
        if x is None:
            continue
        f = r.objective(x)
        for lam in rng.normal(size=5) * 5:
            assert eval_phi(r, lam).phi <= f + 1e-9 * (1 + abs(f))


def test_piece_agreement(rng):

    checked = 0
    for _ in range(100):
        r = random_reduced(rng, int(rng.integers(2, 7)))
        ev = [e for e in _event_abscissas(r) if abs(e) < 50]
        for s, t in zip(ev, ev[1:]):
            if t - s < 1e-6:
                continue
            # n-bar can move inside the interval, so anchor each sample's polynomial
            # at a neighbouring sample with the same classification
            evals = [eval_phi(r, lam) for lam in np.linspace(s, t, 7)[1:-1]]
            for e0, e1 in zip(evals, evals[1:]):
                if e0.piece == Piece.TYPE_I or (e0.piece, e0.pivot) != (e1.piece, e1.pivot):
                    continue
                if not np.array_equal(e0.view.order, e1.view.order):
                    continue
                p = piece_poly(r, e0.pivot, e0.view)
                for e in (e0, e1):
                    assert p(e.lam) + e.lam * r.b == pytest.approx(e.phi, rel=1e-9, abs=1e-9)
                checked += 1
    assert checked > 100
