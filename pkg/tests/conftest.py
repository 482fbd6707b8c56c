"""Shared test helpers.

random_free_complex builds complexes with exact d ∘ d = 0 by construction:
direct sums of elementary pieces (zero differentials, contractible pairs,
single homogeneous maps, Koszul complexes on variables) scrambled by random
unipotent changes of basis. Change of basis preserves homology on the nose,
which the minimalization tests rely on.
"""

from __future__ import annotations

import random

from qpdlab.complexes import ChainComplex, koszul
from qpdlab.poly import Polynomial


def random_homogeneous(ring, d, rng, allow_zero=True):
    basis = ring.basis(d)
    if not basis:
        return Polynomial.zero(ring.field, ring.nvars)
    out = Polynomial.zero(ring.field, ring.nvars)
    for m in basis:
        lo = 0 if allow_zero else 1
        c = rng.randrange(lo, ring.field.p) if rng.random() < 0.7 else 0
        if c:
            out = out + Polynomial.term(ring.field, ring.nvars, m, c)
    if out.is_zero() and not allow_zero:
        out = Polynomial.term(ring.field, ring.nvars, basis[0], 1)
    return out


def _elementary_piece(ring, rng):
    kind = rng.randrange(4)
    s = rng.randrange(0, 3)
    n = rng.randrange(-1, 2)
    if kind == 0:
        return ChainComplex.free(ring, {n: (s,)}, {})
    if kind == 1:
        return ChainComplex.free(ring, {n: (s,), n + 1: (s,)}, {n + 1: [["1"]]})
    if kind == 2:
        e = rng.randrange(1, 3)
        f = random_homogeneous(ring, e, rng, allow_zero=False)
        if ring.nf(f).is_zero():
            return ChainComplex.free(ring, {n: (s,)}, {})
        return ChainComplex.free(ring, {n: (s,), n + 1: (s + e,)},
                                 {n + 1: [[f]]})
    v = ring.names[rng.randrange(ring.nvars)]
    return koszul(ChainComplex.free(ring, {n: (s,)}, {}), [v])


def _change_of_basis(ring, shifts, mats, rng):
    """e_a += h * e_b in term n: column op on d_n, inverse row op on d_{n+1}."""
    candidates = [n for n, s in shifts.items() if len(s) >= 2]
    if not candidates:
        return
    n = rng.choice(candidates)
    idx = list(range(len(shifts[n])))
    a, b = rng.sample(idx, 2)
    need = shifts[n][a] - shifts[n][b]
    if need < 0:
        a, b = b, a
        need = -need
    h = random_homogeneous(ring, need, rng)
    if h.is_zero():
        return
    if n in mats:
        m = mats[n]
        for i in range(len(m)):
            m[i][a] = ring.nf(m[i][a] + h * m[i][b])
    if (n + 1) in mats:
        m = mats[n + 1]
        if m:
            for j in range(len(m[0])):
                m[b][j] = ring.nf(m[b][j] - h * m[a][j])


def random_free_complex(ring, seed, pieces=3, moves=6) -> ChainComplex:
    rng = random.Random(seed)
    c = _elementary_piece(ring, rng)
    for _ in range(pieces - 1):
        c = c.direct_sum(_elementary_piece(ring, rng))
    shifts = {n: list(s) for n, s in c.shifts.items()}
    mats = {n: [list(r) for r in m] for n, m in c.mats.items()}
    for _ in range(moves):
        _change_of_basis(ring, shifts, mats, rng)
    return ChainComplex.free(ring, {n: tuple(s) for n, s in shifts.items()},
                             mats, check=True)
