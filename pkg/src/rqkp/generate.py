"""Seeded random instances in two families.

============  ===============  ===============  ===========  ============
family        a                c                l            u - l
============  ===============  ===============  ===========  ============
TYPE_I        U{-50..50} != 0  U{-50..50}       U{0..20}     U{1..100}
TYPE_II       U{1..50}         U{-50..-1}       U{0..20}     U{1..100}
============  ===============  ===============  ===========  ============

All draws are integers, inclusive at both ends. The bit stream is NumPy's
PCG64 seeded with the given integer; draws are taken in the order a, c, l,
u - l, theta, each as one block in ascending index, and zero draws of ``a``
(TYPE_I only) are redrawn afterwards in ascending index. ``q`` is all ones and
``b = round(a^T (l + theta * (u - l)))`` with ``theta ~ U(0, 1)``, so the
instance is always feasible.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .model import GeneralInstance


class InstanceType(enum.IntEnum):
    TYPE_I = 1
    TYPE_II = 2


_RANGES = {
    InstanceType.TYPE_I: ((-50, 50), (-50, 50)),
    InstanceType.TYPE_II: ((1, 50), (-50, -1)),
}


@dataclass(frozen=True)
class GenSpec:
    type: InstanceType
    n: int
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "type", InstanceType(self.type))
        if self.n < 1:
            raise ValueError("n must be positive")


def generate(spec: GenSpec) -> GeneralInstance:
    rng = np.random.Generator(np.random.PCG64(spec.seed & 0xFFFFFFFFFFFFFFFF))
    (alo, ahi), (clo, chi) = _RANGES[spec.type]
    n = spec.n
    a = rng.integers(alo, ahi, size=n, endpoint=True)
    c = rng.integers(clo, chi, size=n, endpoint=True)
    l = rng.integers(0, 20, size=n, endpoint=True)
    width = rng.integers(1, 100, size=n, endpoint=True)
    theta = rng.random(n)
    for i in np.flatnonzero(a == 0):
        while a[i] == 0:
            a[i] = rng.integers(alo, ahi, endpoint=True)
    a = a.astype(float)
    l = l.astype(float)
    u = l + width
    b = float(np.round(a @ (l + theta * width)))
    return GeneralInstance(q=np.ones(n), a=a, b=b, c=c.astype(float), l=l, u=u)
