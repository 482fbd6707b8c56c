"""Minimal free resolutions, projective dimension, Ext, and depth.

Resolutions are built stepwise: a minimal free cover of the module (one
generator per basis vector of M/mM), then the kernel as a subquotient of the
cover, repeated up to the homological cap. Kernel-zero gives a finite pd
verdict only when it can be certified beyond the truncation window: over an
artinian ring a generator-degree bound does it, over a polynomial ring a
full-rank random evaluation of the last differential does (a kernel of
generic rank zero inside a free module over a domain is zero). Everything
else stays an ``at_least`` verdict.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .complexes import (NEG_INF, POS_INF, ChainComplex, ComplexBuildError,
                        minimalize)
from .gmod import (
    FreeModule,
    GradedModule,
    ModuleMap,
    direct_sum_list,
    expand,
    free_module,
    subquotient_data,
    zero_map,
)
from .linalg import Matrix, pivot_split
from .poly import Polynomial
from .ring import monomial_regular


class ResolutionError(ValueError):
    """Input outside what the resolver supports."""


def default_h_max(ring, amp=0) -> int:
    return ring.nvars + amp + 4


def residue_field(ring) -> GradedModule:
    """k = R/m as a graded module concentrated in degree 0."""
    return expand(ring, [0], [list(ring.names)])


# -- minimal covers ----------------------------------------------------------


def minimal_generators(m: GradedModule):
    """Degrees and coordinate vectors of a homogeneous minimal generating set."""
    gens = []
    for d in sorted(m.dims):
        nd = m.dim(d)
        cols = [m.action(i, d - m.ring.weights[i]) for i in range(m.ring.nvars)]
        cols = [c for c in cols if c.cols]
        span = Matrix.zeros(m.ring.field, nd, 0)
        for c in cols:
            span = span.hstack(c)
        _, extra = pivot_split(span, Matrix.identity(m.ring.field, nd))
        for j in extra:
            e = np.zeros((nd, 1), dtype=np.int64)
            e[j, 0] = 1
            gens.append((d, Matrix(m.ring.field, e)))
    return gens


def free_cover(m: GradedModule):
    """Minimal free cover P -> M; returns (P, covering map, generators)."""
    gens = minimal_generators(m)
    shifts = tuple(d for d, _ in gens)
    p = FreeModule(m.ring, shifts, hi=m.hi)
    if not gens:
        return p, zero_map(p, m), gens
    blocks = {}
    for d in range(p.lo, p.hi + 1):
        if p.dim(d) == 0:
            continue
        big = Matrix.zeros(m.ring.field, m.dim(d), 0)
        for (dg, vec) in gens:
            for mono in m.ring.basis(d - dg):
                big = big.hstack(m.action_mono(mono, dg) @ vec)
        blocks[d] = big
    return p, ModuleMap(p, m, blocks, check=False), gens


def kernel_module(f: ModuleMap):
    """ker f as a subquotient of the source, with ambient representatives."""
    src = f.source
    hi = min(src.hi, f.target.hi)
    sub = {}
    for d in range(src.lo, hi + 1):
        if src.dim(d) == 0:
            continue
        sub[d] = f.block(d).kernel_basis()
    return subquotient_data(
        src.ring, src.lo, hi, dict(src.dims),
        {k: v for k, v in src.actions.items()
         if k[1] + src.ring.weights[k[0]] <= hi},
        sub, {},
    )


def vector_to_polys(p: FreeModule, d: int, col: Matrix):
    """Split a degree-d coordinate column of P into one polynomial per generator."""
    out = [Polynomial.zero(p.ring.field, p.ring.nvars) for _ in p.shifts]
    for idx, (g, mono) in enumerate(p.tags(d)):
        c = int(col.a[idx, 0])
        if c:
            out[g] = out[g] + Polynomial.term(p.ring.field, p.ring.nvars, mono, c)
    return out


# -- certification helpers ---------------------------------------------------


def _eval_poly(f: Polynomial, point, p: int) -> int:
    total = 0
    for mono, c in f.coeffs.items():
        v = c
        for i, e in enumerate(mono):
            if e:
                v = v * pow(point[i], e, p) % p
        total = (total + v) % p
    return total


def full_rank_at_random_points(ring, entries, seed=0, tries=8) -> bool:
    """Certifies ker = 0 for a free-module map over a polynomial ring."""
    rows = len(entries)
    cols = len(entries[0]) if rows else 0
    if cols == 0:
        return True
    if rows < cols:
        return False
    rng = random.Random(seed)
    p = ring.field.p
    for _ in range(tries):
        point = [rng.randrange(p) for _ in range(ring.nvars)]
        a = np.zeros((rows, cols), dtype=np.int64)
        for i in range(rows):
            for j in range(cols):
                a[i, j] = _eval_poly(entries[i][j], point, p)
        if Matrix(ring.field, a).rank() == cols:
            return True
    return False


# -- the resolver --------------------------------------------------------------


@dataclass
class ResolutionReport:
    complex: ChainComplex
    verdict: str                 # "finite" | "at_least"
    pd: object                   # int, or NEG_INF for the zero module
    betti: dict = field(default_factory=dict)
    note: str = ""

    @property
    def is_finite(self) -> bool:
        return self.verdict == "finite"


def resolve_module(m: GradedModule, h_max=None, seed=0,
                   embedding=None) -> ResolutionReport:
    """Minimal free resolution of m.

    embedding, when given, is a pair (ambient free module, reps dict mapping
    degree -> coordinate matrix) realizing m as a submodule of a free module;
    over a polynomial ring it unlocks a kernel-zero certificate at step 0.
    """
    ring = m.ring
    if h_max is None:
        h_max = default_h_max(ring)
    if m.is_zero():
        c = ChainComplex.free(ring, {}, {})
        return ResolutionReport(c, "finite", NEG_INF, {}, "zero module")
    if isinstance(m, FreeModule):
        c = ChainComplex.free(ring, {0: m.shifts}, {})
        return ResolutionReport(c, "finite", 0, c.betti(), "already free")
    shifts, mats = {}, {}
    current = m
    prev_free = None
    prev_reps = None
    s = 0
    while True:
        p, cover, gens = free_cover(current)
        # a nonzero module always has a generator at its lowest degree
        shifts[s] = tuple(d for d, _ in gens)
        if s > 0:
            entries = [[None] * len(gens) for _ in prev_free.shifts]
            for j, (dg, vec) in enumerate(gens):
                amb = prev_reps[dg] @ vec
                polys = vector_to_polys(prev_free, dg, amb)
                for i in range(len(prev_free.shifts)):
                    entries[i][j] = polys[i]
            mats[s] = entries
        ker, ker_reps = kernel_module(cover)
        if ker.is_zero():
            certified, note = _certify_zero_kernel(ring, p, mats.get(s), s, seed)
            if not certified and s == 0 and embedding is not None:
                certified, note = _certify_embedded_cover(
                    ring, gens, embedding, seed)
            c = ChainComplex.free(ring, shifts, mats, check=True)
            if certified:
                return ResolutionReport(c, "finite", s, c.betti(), note)
            return ResolutionReport(
                c, "at_least", s, c.betti(),
                "kernel vanishes inside the window but cannot be certified: "
                + note,
            )
        if s >= h_max:
            c = ChainComplex.free(ring, shifts, mats, check=True)
            return ResolutionReport(c, "at_least", h_max, c.betti(),
                                    f"cap {h_max} reached with nonzero kernel")
        prev_free = p
        prev_reps = ker_reps
        current = ker
        s += 1


def _certify_zero_kernel(ring, p: FreeModule, last_entries, s: int, seed):
    if not p.shifts:
        return True, "cover is zero"
    if ring.is_artinian:
        bound = max(p.shifts) + ring.top_degree
        if p.hi >= bound:
            return True, f"artinian generator bound {bound} inside window"
        return False, f"artinian generator bound {bound} exceeds window {p.hi}"
    if last_entries is not None and all(len(row) == 1 for row in last_entries):
        # one source generator: the kernel dies if any entry is regular
        for row in last_entries:
            if not row[0].is_zero() and monomial_regular(ring, row[0]):
                return True, ("single-column differential with a regular "
                              "monomial entry")
    if not ring.gb.generators and s > 0:
        if full_rank_at_random_points(ring, last_entries, seed=seed):
            return True, "differential has full column rank at a random point"
        return False, "random evaluations stayed rank deficient"
    return False, "no certification route for this ring"


def _certify_embedded_cover(ring, gens, embedding, seed):
    """Kernel-zero certificate for a cover of a submodule of a free module.

    The composite cover -> ambient free module is a polynomial matrix; full
    column rank at one point makes its kernel torsion, hence zero inside a
    free module over a domain.
    """
    if ring.gb.generators:
        return False, "embedding certificate needs a polynomial ring"
    amb, reps = embedding
    entries = [[Polynomial.zero(ring.field, ring.nvars)] * len(gens)
               for _ in amb.shifts]
    for j, (dg, vec) in enumerate(gens):
        rep = reps.get(dg)
        if rep is None:
            return False, f"embedding has no representatives in degree {dg}"
        polys = vector_to_polys(amb, dg, rep @ vec)
        for i in range(len(amb.shifts)):
            entries[i][j] = polys[i]
    if full_rank_at_random_points(ring, entries, seed=seed):
        return True, ("embedded cover has full column rank at a random point")
    return False, "embedded cover evaluations stayed rank deficient"


def resolve(obj, h_max=None, seed=0) -> ResolutionReport:
    """Minimal free resolution of a module, or minimal model of a complex."""
    if isinstance(obj, GradedModule):
        return resolve_module(obj, h_max=h_max, seed=seed)
    if isinstance(obj, ChainComplex):
        if obj.is_free:
            m = minimalize(obj)
            val = m.sup if not m.is_zero() else NEG_INF
            return ResolutionReport(m, "finite", val, m.betti(),
                                    "perfect complex, minimal model")
        h = obj.homology()
        if not h:
            return ResolutionReport(ChainComplex.free(obj.ring, {}, {}),
                                    "finite", NEG_INF, {}, "acyclic complex")
        if len(h) == 1:
            (n, mod), = h.items()
            rep = resolve_module(mod, h_max=h_max, seed=seed)
            shifted = rep.complex.shift(n)
            pd_val = rep.pd if rep.pd == NEG_INF else rep.pd + n
            return ResolutionReport(shifted, rep.verdict, pd_val,
                                    shifted.betti(), rep.note)
        raise ResolutionError(
            "semifree models are implemented for free complexes and for "
            "complexes with homology in a single index"
        )
    raise ResolutionError(f"cannot resolve {type(obj).__name__}")


def cokernel_module(c: ChainComplex, s: int) -> GradedModule:
    """Brutal cokernel C_s = coker(d_{s+1}) of a free complex."""
    if not c.is_free:
        raise ResolutionError("cokernel_module needs a free complex")
    if s not in c.shifts:
        return expand(c.ring, (), [])
    rel = c.mats.get(s + 1)
    if rel is None or all(e.is_zero() for row in rel for e in row):
        return free_module(c.ring, c.shifts[s])
    return expand(c.ring, c.shifts[s], [list(r) for r in rel])


# -- Ext and depth --------------------------------------------------------------


def hom_complex(p: ChainComplex, b: GradedModule) -> ChainComplex:
    """Hom(P, B) for a free complex P; the term at index -s is Hom(P_s, B)."""
    if not p.is_free:
        raise ResolutionError("hom_complex needs a free source complex")
    ring = p.ring
    terms, diffs = {}, {}
    for s, sh in p.shifts.items():
        terms[-s] = direct_sum_list(ring, [b.twist(-a) for a in sh])
    for s, entries in p.mats.items():
        # precomposition with d_s: Hom(P_{s-1}, B) -> Hom(P_s, B)
        src, tgt = terms[-(s - 1)], terms[-s]
        a_sh = p.shifts[s - 1]
        b_sh = p.shifts[s]
        blocks = {}
        for d in src.dims:
            if d > tgt.hi:
                continue
            big = Matrix.zeros(ring.field, tgt.dim(d), 0)
            for i, a in enumerate(a_sh):
                col = Matrix.zeros(ring.field, 0, b.dim(d + a))
                for j, bb in enumerate(b_sh):
                    f = entries[i][j]
                    if f.is_zero():
                        blk = Matrix.zeros(ring.field, b.dim(d + bb),
                                           b.dim(d + a))
                    else:
                        blk = b.action_poly(f, d + a)
                    col = col.vstack(blk)
                big = big.hstack(col)
            blocks[d] = big
        diffs[-(s - 1)] = ModuleMap(src, tgt, blocks, check=False)
    return ChainComplex(ring, terms, diffs, check=False)


def _block_diag_list(field, blocks):
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    a = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for b in blocks:
        a[r:r + b.rows, c:c + b.cols] = b.a
        r += b.rows
        c += b.cols
    return Matrix(field, a)


def hom_total_complex(p: ChainComplex, c: ChainComplex) -> ChainComplex:
    """Total Hom complex Hom(P, C) for a free P.

    Index n collects Hom(P_i, C_{n+i}) over all i; the differential
    postcomposes with d_C and precomposes with d_P, the latter with an
    alternating sign so the square vanishes.
    """
    if not p.is_free:
        raise ResolutionError("hom_total_complex needs a free source complex")
    ring = p.ring
    comps, mods = {}, {}
    for i, sh in sorted(p.shifts.items()):
        for j in sorted(c.terms):
            n = j - i
            mods[(n, i)] = direct_sum_list(
                ring, [c.term(j).twist(-a) for a in sh])
            comps.setdefault(n, []).append(i)
    terms = {}
    for n, idx in comps.items():
        idx.sort()
        terms[n] = direct_sum_list(ring, [mods[(n, i)] for i in idx])
    diffs = {}
    for n in sorted(comps):
        if (n - 1) not in comps:
            continue
        src, tgt = terms[n], terms[n - 1]
        sgn = -1 if n % 2 == 0 else 1
        blocks = {}
        for d in sorted(src.dims):
            if d > tgt.hi:
                continue
            grid = {}
            for si in comps[n]:
                j = n + si
                sh_i = p.shifts[si]
                cj = c.term(j)
                if si in comps[n - 1] and j in c.diffs:
                    dj = c.diffs[j]
                    grid[(si, si)] = _block_diag_list(
                        ring.field, [dj.block(d + a) for a in sh_i])
                ti = si + 1
                entries = p.mats.get(ti)
                if ti in comps[n - 1] and entries is not None:
                    sh_t = p.shifts[ti]
                    rowblocks = []
                    for h, b in enumerate(sh_t):
                        rb = Matrix.zeros(ring.field, cj.dim(d + b), 0)
                        for g, a in enumerate(sh_i):
                            f = entries[g][h]
                            if f.is_zero():
                                blk = Matrix.zeros(ring.field, cj.dim(d + b),
                                                   cj.dim(d + a))
                            else:
                                blk = cj.action_poly(f, d + a)
                            rb = rb.hstack(blk)
                        rowblocks.append(rb)
                    pre = rowblocks[0]
                    for rb in rowblocks[1:]:
                        pre = pre.vstack(rb)
                    if sgn == -1:
                        pre = pre.scale(-1)
                    grid[(ti, si)] = pre
            cols_list = []
            for si in comps[n]:
                parts = []
                for ti in comps[n - 1]:
                    blk = grid.get((ti, si))
                    if blk is None:
                        blk = Matrix.zeros(ring.field,
                                           mods[(n - 1, ti)].dim(d),
                                           mods[(n, si)].dim(d))
                    parts.append(blk)
                col = parts[0]
                for q in parts[1:]:
                    col = col.vstack(q)
                cols_list.append(col)
            big = cols_list[0]
            for q in cols_list[1:]:
                big = big.hstack(q)
            blocks[d] = big
        diffs[n] = ModuleMap(src, tgt, blocks, check=False)
    return ChainComplex(ring, terms, diffs, check=True)


def ext_modules(a: GradedModule, b: GradedModule, i_max: int, seed=0,
                resolution=None):
    """Ext^i(A, B) for the i where the resolution of A pins them down.

    Returns (dict i -> GradedModule, resolution report). With a finite
    resolution every i <= i_max appears; a truncated resolution only
    vouches for i below its top index.
    """
    rep = resolution if resolution is not None else \
        resolve_module(a, h_max=i_max + 1, seed=seed)
    hc = hom_complex(rep.complex, b)
    top = max(rep.complex.shifts) if rep.complex.shifts else -1
    valid_top = i_max if rep.is_finite else min(i_max, top - 1)
    exts = {}
    for i in range(valid_top + 1):
        exts[i] = hc.homology_module(-i)
    return exts, rep


_KRES_CACHE: dict = {}


def residue_resolution(ring, h_max: int, seed=0) -> ResolutionReport:
    """Cached minimal resolution of k; depth and Ext(k, -) reuse it heavily."""
    key = (ring, h_max)
    if key not in _KRES_CACHE:
        _KRES_CACHE[key] = resolve_module(residue_field(ring), h_max=h_max,
                                          seed=seed)
    return _KRES_CACHE[key]


@dataclass
class DepthReport:
    value: object          # int, or POS_INF for the zero module
    exact: bool
    witness_index: object  # first i with Ext^i(k, M) != 0, or None
    note: str = ""


def depth(m: GradedModule, bound=None, seed=0) -> DepthReport:
    """depth = inf{ i : Ext^i(k, M) != 0 }, scanned up to a cap."""
    ring = m.ring
    if m.is_zero():
        return DepthReport(POS_INF, True, None, "zero module")
    if bound is None:
        bound = ring.nvars + 1
    rep = residue_resolution(ring, bound + 1, seed=seed)
    exts, _ = ext_modules(residue_field(ring), m, bound, seed=seed,
                          resolution=rep)
    for i in range(bound + 1):
        e = exts.get(i)
        if e is not None and not e.is_zero():
            return DepthReport(i, True, i, "")
    note = f"Ext^i(k, M) = 0 inside the window for all computed i <= {bound}"
    if rep.is_finite and rep.pd != NEG_INF and rep.pd <= bound:
        return DepthReport(POS_INF, False, None,
                           note + "; resolution of k already stopped")
    return DepthReport(bound + 1, False, None, note)


def complex_depth(c: ChainComplex, bound=None, seed=0) -> DepthReport:
    """Derived depth of a complex: minus the top nonzero index of RHom(k, C).

    With a truncated resolution of k only indices at or above
    sup C - top + 1 have complete terms; a nonzero answer found there is
    exact, silence below the cutoff is reported as a non-exact bound.
    """
    ring = c.ring
    if not c.homology():
        return DepthReport(POS_INF, True, None, "complex is acyclic")
    if bound is None:
        bound = ring.nvars + 1
    h_max = bound + 1 + max(0, int(c.sup - c.inf))
    rep = residue_resolution(ring, h_max, seed=seed)
    try:
        hc = hom_total_complex(rep.complex, c)
        h = hc.homology()
    except ComplexBuildError as e:
        return DepthReport(None, False, None, f"window too small for RHom: {e}")
    if rep.is_finite:
        low_valid = None
    else:
        low_valid = int(c.sup) - max(rep.complex.shifts) + 1
    if h:
        n = max(h)
        if low_valid is None or n >= low_valid:
            return DepthReport(-n, True, -n, "top nonzero index of RHom(k, -)")
    if low_valid is None:
        return DepthReport(POS_INF, False, None,
                           "RHom(k, -) vanished inside the window")
    return DepthReport(1 - low_valid, False, None,
                       "no nonzero RHom homology above the truncation cutoff")


def depth_of(obj, bound=None, seed=0) -> DepthReport:
    """Depth of a module or a complex, whichever is handed over."""
    if isinstance(obj, GradedModule):
        return depth(obj, bound=bound, seed=seed)
    if isinstance(obj, ChainComplex):
        h = obj.homology()
        if set(h) == {0}:
            return depth(h[0], bound=bound, seed=seed)
        return complex_depth(obj, bound=bound, seed=seed)
    raise ResolutionError(f"cannot take the depth of {type(obj).__name__}")


def ring_depth(ring, seed=0) -> DepthReport:
    return depth(free_module(ring, (0,)), seed=seed)
