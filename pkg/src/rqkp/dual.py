"""Lagrangian dual of the reduced problem.

    phi(lam) = lam * b + min { 1/2 (1^T x)^2 - (c + lam a)^T x : 0 <= x <= u }

``phi`` is concave and piecewise quadratic. Locally it follows one of three
shapes, depending on where the prefix sum ``U_{nbar-1}`` falls relative to
the two costs around ``nbar``:

* TYPE_I   -- both candidates sit on bounds, ``phi`` is affine in ``lam``;
* TYPE_II  -- the ``nbar``-th coordinate is partial;
* TYPE_III -- the ``(nbar-1)``-th coordinate is partial.
"""

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bounded import SortedView, solve_bounded, sorted_view
from .model import ReducedInstance


class Piece(str, enum.Enum):
    TYPE_I = "TYPE_I"
    TYPE_II = "TYPE_II"
    TYPE_III = "TYPE_III"


@dataclass(frozen=True, eq=False)
class DualEval:
    lam: float
    phi: float
    x: np.ndarray
    piece: Piece
    nbar: Optional[int]
    c_lambda: np.ndarray
    # sorted position (1-based) of the pivot coordinate for TYPE_II/III
    pivot: Optional[int] = None
    view: Optional[SortedView] = None

    @property
    def inner(self) -> float:
        """Value of the inner minimization, ``phi - lam * b``."""
        s = float(np.sum(self.x))
        return 0.5 * s * s - float(self.c_lambda @ self.x)


@dataclass(frozen=True)
class QuadPiece:
    """``p_k(lam) = A lam^2 + B lam + C``; ``phi = p_k + lam b`` where active."""

    k: int
    A: float
    B: float
    C: float
    d: np.ndarray

    def __call__(self, lam):
        return (self.A * lam + self.B) * lam + self.C


def classify(cs, us, nbar):
    """Piece type and 1-based pivot for sorted costs ``cs`` at a fixed ``lam``.

    Equalities are resolved in the order I, II, III; at a tie the competing
    formulas give the same value.
    """
    m = len(cs)
    if m == 0:
        return Piece.TYPE_I, None
    U = np.concatenate(([0.0], np.cumsum(us)))
    if nbar is None:
        # every G_k < 0: fully filled prefix, or a partial last coordinate
        if cs[m - 1] - U[m - 1] >= us[m - 1]:
            return Piece.TYPE_I, None
        return Piece.TYPE_II, m
    if nbar == 1:
        return Piece.TYPE_II, 1
    k = nbar - 1
    Uk = U[k]
    if cs[k - 1] >= Uk >= cs[k]:
        return Piece.TYPE_I, None
    if Uk <= cs[k]:
        return Piece.TYPE_II, nbar
    return Piece.TYPE_III, nbar - 1


def eval_phi(r: ReducedInstance, lam: float) -> DualEval:
    """Exact dual value at ``lam``, with the inner minimizer and its piece type."""
    lam = float(lam)
    cl = r.c + lam * r.a
    sol = solve_bounded(cl, r.u)
    view = sol.view
    piece, pivot = classify(cl[view.order], r.u[view.order], sol.nbar)
    s = float(np.sum(sol.x))
    inner = 0.5 * s * s - float(cl @ sol.x)
    return DualEval(lam=lam, phi=lam * r.b + inner, x=sol.x, piece=piece,
                    nbar=sol.nbar, c_lambda=cl, pivot=pivot, view=view)


def piece_poly(r: ReducedInstance, k: int, view: SortedView) -> QuadPiece:
    """Quadratic piece ``p_k`` for the sorted order ``view`` (``k`` is 1-based).

    ``d_k`` fills the first ``k-1`` sorted coordinates and puts
    ``c_k - U_{k-1}`` on the ``k``-th; ``a`` and ``c`` are the unshifted
    instance data, so ``p_k`` is exact wherever that order and pivot hold.
    """
    if not 1 <= k <= view.m:
        raise IndexError(f"pivot {k} outside 1..{view.m}")
    idx = view.order
    d = np.zeros(r.n)
    d[idx[: k - 1]] = r.u[idx[: k - 1]]
    piv = idx[k - 1]
    d[piv] = r.c[piv] - view.prefix_u[k - 1]
    ak = r.a[piv]
    ck = r.c[piv]
    # The partial amount moves with lam: d_k(lam) = d_k + lam a_k e_k. Expanding
    # 1/2 (1^T d)^2 - c(lam)^T d(lam) gives the coefficients below.
    return QuadPiece(k=k, A=-0.5 * ak * ak, B=-float(r.a @ d), C=0.5 * ck * ck - float(r.c @ d), d=d)


def phi_scan(r: ReducedInstance, lams):
    """Rows ``(lam, phi, piece)`` for plotting."""
    return [(float(l), e.phi, e.piece) for l, e in ((l, eval_phi(r, l)) for l in lams)]
