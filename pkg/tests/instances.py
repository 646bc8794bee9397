"""Shared catalog instances and random generators for the tests."""

from __future__ import annotations

import numpy as np

from cbtrace.algebra import AlgebraElement, CoulombData
from cbtrace.poly import Poly
from cbtrace.scalars import GaussianRational as G
from cbtrace.scalars import Q

TRIPLE = [(1, 0), (0, 1), (1, 1)]


def sech():
    return CoulombData.build([(1,)], [0], [Q("1/2")])


def triple(zeta=("1", "1")):
    return CoulombData.build(TRIPLE, [0, 0, 0], [Q(z) for z in zeta])


def five_imaginary():
    bs = [G(0, 1), G(0, 2), G(0, -1), G(0, Q("1/3")), G(0, -3)]
    return CoulombData.build([(1,)] * 5, bs, [Q("5/2")])


def rand_q(rng, den=4, span=3):
    return Q(int(rng.integers(-span * den, span * den + 1))) / int(rng.integers(1, den + 1))


def rand_weights(rng, d, nmax, entry=1):
    while True:
        n = int(rng.integers(d, nmax + 1))
        ws = [tuple(int(x) for x in rng.integers(-entry, entry + 1, size=d)) for _ in range(n)]
        if any(not any(w) for w in ws):
            continue
        if np.linalg.matrix_rank(np.array(ws, dtype=float)) == d:
            return ws


def rand_data(rng, dmax=2, nmax=4):
    """Random instance on which the antilinear automorphism exists."""
    d = int(rng.integers(1, dmax + 1))
    ws = rand_weights(rng, d, nmax)
    bs = []
    i = 0
    while i < len(ws):
        if i + 1 < len(ws) and ws[i + 1] == ws[i] and rng.random() < 0.5:
            b = G(rand_q(rng), rand_q(rng))
            bs += [b, -b.conj()]
            i += 2
        else:
            bs.append(G(0, rand_q(rng)))
            i += 1
    zeta = [rand_q(rng, 6) for _ in range(d)]
    return CoulombData.build(ws, bs, zeta, normalize=False)


def rand_poly(rng, d, deg=2):
    terms = {}
    for _ in range(int(rng.integers(1, 4))):
        e = tuple(int(x) for x in rng.integers(0, deg + 1, size=d))
        if sum(e) <= deg:
            terms[e] = G(rand_q(rng), rand_q(rng))
    return Poly(d, terms)


def rand_lam(rng, d, radius=3):
    return tuple(int(x) for x in rng.integers(-radius, radius + 1, size=d))


def rand_elem(rng, data, k=2):
    a = AlgebraElement(data, {})
    for _ in range(int(rng.integers(1, k + 1))):
        a = a + AlgebraElement.r(data, rand_lam(rng, data.d), rand_poly(rng, data.d))
    return a
