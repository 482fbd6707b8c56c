"""Bounded chain complexes of graded modules and of graded-free modules.

Homological grading is lower-index with differentials of degree -1. Free
complexes additionally carry their polynomial differential matrices, which
is what minimalization, Koszul construction, and base change operate on;
expanded blocks are derived from them. Sentinels for the zero complex are
float infinities: sup/hsup of nothing is -inf, inf/hinf is +inf.
"""

from __future__ import annotations

import numpy as np

from .gmod import (
    FreeModule,
    GradedModule,
    ModuleMap,
    free_module,
    poly_matrix_to_map,
    subquotient_data,
    zero_module,
)
from .linalg import Matrix
from .poly import Polynomial

NEG_INF = float("-inf")
POS_INF = float("inf")


class ComplexBuildError(ValueError):
    """Differential data violates d ∘ d = 0 or shape constraints."""


def _parse_entry(ring, e):
    f = ring.parse(e) if isinstance(e, str) else e
    return ring.nf(f)


class ChainComplex:
    """Bounded complex; terms[n] nonzero modules, diffs[n]: term n -> term n-1."""

    __slots__ = ("ring", "terms", "diffs", "shifts", "mats", "_homology", "_hreps")

    def __init__(self, ring, terms, diffs, shifts=None, mats=None, check=True):
        self.ring = ring
        self.terms = {n: t for n, t in terms.items() if not t.is_zero()}
        self.diffs = {
            n: d for n, d in diffs.items()
            if n in self.terms and (n - 1) in self.terms
        }
        self.shifts = shifts  # free complexes: dict n -> generator degrees
        self.mats = mats      # free complexes: dict n -> polynomial matrix
        self._homology = None
        self._hreps = None
        if check:
            self._check()

    # -- constructors ------------------------------------------------------

    @classmethod
    def free(cls, ring, shifts, mats, check=True, hi=None) -> ChainComplex:
        """Free complex from generator degrees and polynomial matrices.

        shifts[n] lists the generator degrees of term n; mats[n] (rows =
        generators of term n-1, columns = of term n) may be omitted for a
        zero differential. Entries are normal-formed, so the stored matrix
        is canonical for the ring.
        """
        shifts = {n: tuple(s) for n, s in shifts.items() if len(tuple(s))}
        clean_mats = {}
        for n, m in (mats or {}).items():
            if n not in shifts or (n - 1) not in shifts:
                continue
            rows = [[_parse_entry(ring, e) for e in row] for row in m]
            nt, ns = len(shifts[n - 1]), len(shifts[n])
            if len(rows) != nt or any(len(r) != ns for r in rows):
                raise ComplexBuildError(f"diff at {n} must be {nt} x {ns}")
            clean_mats[n] = rows
        if check:
            _check_poly_d_squared(ring, shifts, clean_mats)
        terms = {n: free_module(ring, s, hi=hi) for n, s in shifts.items()}
        diffs = {}
        for n in shifts:
            if (n - 1) not in shifts:
                continue
            m = clean_mats.get(n)
            if m is None:
                m = [[Polynomial.zero(ring.field, ring.nvars)] * len(shifts[n])
                     for _ in shifts[n - 1]]
                clean_mats[n] = m
            diffs[n] = poly_matrix_to_map(terms[n], terms[n - 1], m, check=check)
        return cls(ring, terms, diffs, shifts=shifts, mats=clean_mats, check=check)

    @classmethod
    def from_module(cls, m: GradedModule, at: int = 0) -> ChainComplex:
        if isinstance(m, FreeModule):
            return cls.free(m.ring, {at: m.shifts}, {}, hi=m.hi)
        return cls(m.ring, {at: m}, {})

    def _check(self):
        for n, d in self.diffs.items():
            if d.source is not self.terms[n] or d.target is not self.terms.get(n - 1):
                raise ComplexBuildError(f"diff at {n} connects wrong terms")
            d.verify()
            up = self.diffs.get(n + 1)
            if up is not None and not d.compose(up).is_zero():
                raise ComplexBuildError(f"d_{n} ∘ d_{n + 1} != 0")

    # -- basic structure -----------------------------------------------------

    @property
    def is_free(self) -> bool:
        return self.shifts is not None

    def support(self):
        return sorted(self.terms)

    def term(self, n: int) -> GradedModule:
        t = self.terms.get(n)
        return t if t is not None else zero_module(self.ring)

    def diff(self, n: int) -> ModuleMap:
        d = self.diffs.get(n)
        if d is not None:
            return d
        from .gmod import zero_map
        return zero_map(self.term(n), self.term(n - 1))

    @property
    def sup(self):
        return max(self.terms) if self.terms else NEG_INF

    @property
    def inf(self):
        return min(self.terms) if self.terms else POS_INF

    def is_zero(self) -> bool:
        return not self.terms

    def total_rank(self) -> int:
        if not self.is_free:
            raise ComplexBuildError("total_rank needs a free complex")
        return sum(len(s) for s in self.shifts.values())

    def is_minimal(self) -> bool:
        """Every differential entry lies in the irrelevant maximal ideal."""
        if not self.is_free:
            raise ComplexBuildError("minimality is defined for free complexes")
        for m in self.mats.values():
            for row in m:
                for e in row:
                    if not e.is_zero() and e.degree(self.ring.weights) == 0:
                        return False
        return True

    # -- homology -------------------------------------------------------------

    def homology(self) -> dict:
        if self._homology is None:
            self._homology, self._hreps = {}, {}
            for n in self.support():
                t = self.terms[n]
                hi = t.hi
                for nb in (n + 1, n - 1):
                    if nb in self.terms:
                        hi = min(hi, self.terms[nb].hi)
                lo = t.lo
                if lo > hi:
                    raise ComplexBuildError(
                        f"windows too small to compute homology at index {n}"
                    )
                down = self.diff(n)
                up = self.diffs.get(n + 1)
                sub, subsub = {}, {}
                for d in range(lo, hi + 1):
                    if t.dim(d) == 0:
                        continue
                    sub[d] = down.block(d).kernel_basis()
                    if up is not None:
                        subsub[d] = up.block(d)
                h, reps = subquotient_data(
                    self.ring, lo, hi, dict(t.dims),
                    {k: v for k, v in t.actions.items()
                     if k[1] + self.ring.weights[k[0]] <= hi},
                    sub, subsub,
                )
                if not h.is_zero():
                    self._homology[n] = h
                    self._hreps[n] = reps
        return self._homology

    def homology_module(self, n: int) -> GradedModule:
        h = self.homology().get(n)
        return h if h is not None else zero_module(self.ring)

    def homology_reps(self, n: int):
        self.homology()
        return self._hreps.get(n, {})

    @property
    def hsup(self):
        h = self.homology()
        return max(h) if h else NEG_INF

    @property
    def hinf(self):
        h = self.homology()
        return min(h) if h else POS_INF

    @property
    def amp(self):
        return self.hsup - self.hinf

    def invariants(self) -> dict:
        return {
            "sup": self.sup,
            "inf": self.inf,
            "hsup": self.hsup,
            "hinf": self.hinf,
            "amp": self.amp,
            "is_perfect": self.is_free,
        }

    # -- builders ---------------------------------------------------------------

    def shift(self, s: int) -> ChainComplex:
        """Σ^s: term n comes from old term n - s; differential gains (-1)^s."""
        sign = -1 if s % 2 else 1
        terms = {n + s: t for n, t in self.terms.items()}
        diffs = {}
        for n, d in self.diffs.items():
            diffs[n + s] = d.scale(sign)
        shifts = mats = None
        if self.is_free:
            shifts = {n + s: v for n, v in self.shifts.items()}
            mats = {
                n + s: [[e.scale(sign) for e in row] for row in m]
                for n, m in self.mats.items()
            }
        return ChainComplex(self.ring, terms, diffs, shifts=shifts, mats=mats,
                            check=False)

    def twist_internal(self, s: int) -> ChainComplex:
        """Internal-degree twist of every term; homological indices unchanged."""
        terms = {n: t.twist(s) for n, t in self.terms.items()}
        diffs = {
            n: ModuleMap(terms[n], terms[n - 1],
                         {d + s: blk for d, blk in f.blocks.items()}, check=False)
            for n, f in self.diffs.items()
        }
        shifts = mats = None
        if self.is_free:
            shifts = {n: tuple(x + s for x in v) for n, v in self.shifts.items()}
            mats = self.mats
        return ChainComplex(self.ring, terms, diffs, shifts=shifts, mats=mats,
                            check=False)

    def direct_sum(self, other: ChainComplex) -> ChainComplex:
        if self.ring != other.ring:
            raise ComplexBuildError("direct sum over different rings")
        if self.is_free and other.is_free:
            shifts, mats = {}, {}
            for n in set(self.shifts) | set(other.shifts):
                a = self.shifts.get(n, ())
                b = other.shifts.get(n, ())
                shifts[n] = a + b
                if (n - 1) in set(self.shifts) | set(other.shifts):
                    ra = self.shifts.get(n - 1, ())
                    rb = other.shifts.get(n - 1, ())
                    zero = Polynomial.zero(self.ring.field, self.ring.nvars)
                    am = self.mats.get(n, [[zero] * len(a) for _ in ra])
                    bm = other.mats.get(n, [[zero] * len(b) for _ in rb])
                    rows = []
                    for r in am:
                        rows.append(list(r) + [zero] * len(b))
                    for r in bm:
                        rows.append([zero] * len(a) + list(r))
                    if rows and (len(a) + len(b)):
                        mats[n] = rows
            return ChainComplex.free(self.ring, shifts, mats, check=False)
        terms, diffs = {}, {}
        for n in set(self.terms) | set(other.terms):
            terms[n] = self.term(n).direct_sum(other.term(n))
        for n in list(terms):
            if (n - 1) not in terms:
                continue
            blocks = {}
            for d in terms[n].dims:
                if d > terms[n - 1].hi:
                    continue
                blocks[d] = _block_diag2(
                    self.ring.field,
                    self.diff(n).block(d), other.diff(n).block(d),
                    terms[n - 1].dim(d),
                )
            diffs[n] = ModuleMap(terms[n], terms[n - 1], blocks, check=False)
        return ChainComplex(self.ring, terms, diffs, check=False)

    def tensor_down(self, new_ring) -> ChainComplex:
        """Base change of a free complex along R -> R/(more relations)."""
        if not self.is_free:
            raise ComplexBuildError("tensor_down needs a free complex")
        return ChainComplex.free(new_ring, self.shifts, self.mats)

    def betti(self) -> dict:
        if not self.is_free:
            raise ComplexBuildError("betti numbers need a free complex")
        return {n: tuple(sorted(s)) for n, s in self.shifts.items()}

    def __repr__(self):
        if self.is_free:
            body = ", ".join(f"{n}:{list(s)}" for n, s in sorted(self.shifts.items()))
            return f"FreeComplex({body})"
        body = ", ".join(f"{n}:{t.total_dim()}" for n, t in sorted(self.terms.items()))
        return f"ChainComplex(dims {body})"


def _block_diag2(field, a: Matrix, b: Matrix, rows: int) -> Matrix:
    big = np.zeros((rows, a.cols + b.cols), dtype=np.int64)
    big[:a.rows, :a.cols] = a.a
    big[a.rows:, a.cols:] = b.a
    return Matrix(field, big)


def _check_poly_d_squared(ring, shifts, mats):
    for n, m in mats.items():
        up = mats.get(n + 1)
        if up is None or (n + 1) not in shifts:
            continue
        for i in range(len(shifts[n - 1])):
            for j in range(len(shifts[n + 1])):
                acc = Polynomial.zero(ring.field, ring.nvars)
                for k in range(len(shifts[n])):
                    acc = acc + m[i][k] * up[k][j]
                if not ring.nf(acc).is_zero():
                    raise ComplexBuildError(
                        f"d² != 0 at index {n + 1} (entry {i},{j})"
                    )


# -- chain maps and cones -------------------------------------------------------


class ChainMapError(ValueError):
    """Squares of a would-be chain map fail to commute."""


class ChainMap:
    """Degree-0 chain map between complexes; parts[n]: source_n -> target_n."""

    __slots__ = ("source", "target", "parts")

    def __init__(self, source: ChainComplex, target: ChainComplex, parts,
                 check=True):
        self.source = source
        self.target = target
        self.parts = dict(parts)
        if check:
            self.verify()

    def part(self, n: int) -> ModuleMap:
        p = self.parts.get(n)
        if p is not None:
            return p
        from .gmod import zero_map
        return zero_map(self.source.term(n), self.target.term(n))

    def verify(self):
        for n in self.source.support():
            lhs = self.target.diff(n).compose(self.part(n))
            rhs = self.part(n - 1).compose(self.source.diff(n))
            for d in lhs.valid_degrees():
                if lhs.block(d) != rhs.block(d):
                    raise ChainMapError(
                        f"square at index {n}, degree {d} does not commute"
                    )


def mult_chain_map(c: ChainComplex, f: Polynomial) -> ChainMap:
    """Multiplication by homogeneous f as a chain map c<deg f> -> c."""
    e = f.degree(c.ring.weights)
    src = c.twist_internal(e)
    parts = {}
    for n, t in c.terms.items():
        blocks = {}
        for d in src.term(n).dims:
            if d > t.hi:
                continue
            blocks[d] = t.action_poly(f, d - e)
        parts[n] = ModuleMap(src.term(n), t, blocks, check=False)
    return ChainMap(src, c, parts, check=False)


def cone(f: ChainMap) -> ChainComplex:
    """cn(f)_n = target_n ⊕ source_{n-1}, d(x, y) = (d y + f x, -d x)."""
    N, M = f.target, f.source
    field = N.ring.field
    terms, diffs = {}, {}
    indices = sorted(set(N.terms) | {n + 1 for n in M.terms})
    for n in indices:
        terms[n] = N.term(n).direct_sum(M.term(n - 1))
    for n in indices:
        tgt = terms.get(n - 1)
        if tgt is None:
            continue
        blocks = {}
        dN = N.diff(n)
        dM = M.diff(n - 1)
        fpart = f.part(n - 1)
        for d in terms[n].dims:
            if d > tgt.hi:
                continue
            a = dN.block(d)                      # N_n -> N_{n-1}
            b = fpart.block(d)                   # M_{n-1} -> N_{n-1}
            c_ = dM.block(d)                     # M_{n-1} -> M_{n-2}
            rows_top = N.term(n - 1).dim(d)
            rows_bot = M.term(n - 2).dim(d)
            cols_left = N.term(n).dim(d)
            cols_right = M.term(n - 1).dim(d)
            big = np.zeros((rows_top + rows_bot, cols_left + cols_right),
                           dtype=np.int64)
            big[:rows_top, :cols_left] = a.a
            big[:rows_top, cols_left:] = b.a
            big[rows_top:, cols_left:] = (-c_.a) % field.p
            blocks[d] = Matrix(field, big)
        diffs[n] = ModuleMap(terms[n], tgt, blocks, check=False)
    return ChainComplex(N.ring, terms, diffs, check=False)


def koszul(c, xs) -> ChainComplex:
    """K(xs; c): iterated cone over multiplication by each element of xs.

    c may be a GradedModule (placed in degree 0) or a ChainComplex. Free
    complexes stay free with explicit polynomial matrices.
    """
    if isinstance(c, GradedModule):
        c = ChainComplex.from_module(c)
    for x in xs:
        x = c.ring.parse(x) if isinstance(x, str) else x
        if not x.is_homogeneous(c.ring.weights) or x.is_zero() \
                or x.degree(c.ring.weights) == 0:
            raise ComplexBuildError("Koszul elements must be homogeneous of "
                                    "positive degree")
        if c.is_free:
            c = _koszul_free_step(c, x)
        else:
            c = cone(mult_chain_map(c, x))
    return c


def _koszul_free_step(c: ChainComplex, x: Polynomial) -> ChainComplex:
    ring = c.ring
    e = x.degree(ring.weights)
    zero = Polynomial.zero(ring.field, ring.nvars)
    shifts, mats = {}, {}
    idxs = sorted(set(c.shifts) | {n + 1 for n in c.shifts})
    for n in idxs:
        cur = c.shifts.get(n, ())
        prev = c.shifts.get(n - 1, ())
        shifts[n] = cur + tuple(s + e for s in prev)
    for n in idxs:
        if (n - 1) not in shifts or not shifts[n - 1] or not shifts[n]:
            continue
        a = c.shifts.get(n, ())
        b = c.shifts.get(n - 1, ())      # twisted part of source
        ta = c.shifts.get(n - 1, ())
        tb = c.shifts.get(n - 2, ())     # twisted part of target
        dn = c.mats.get(n, [[zero] * len(a) for _ in ta])
        dn1 = c.mats.get(n - 1, [[zero] * len(b) for _ in tb])
        rows = []
        for i in range(len(ta)):
            left = list(dn[i]) if a else []
            right = [x if j == i else zero for j in range(len(b))]
            rows.append(left + right)
        for i in range(len(tb)):
            left = [zero] * len(a)
            right = [-dn1[i][j] for j in range(len(b))]
            rows.append(left + right)
        mats[n] = rows
    return ChainComplex.free(ring, shifts, mats, check=False)


# -- minimalization ----------------------------------------------------------


def minimalize(c: ChainComplex, verify: bool = True) -> ChainComplex:
    """Cancel unit entries of the differentials of a free complex.

    Gaussian elimination on the complex: a unit entry at (i, j) of d_n
    splits off a contractible 0 -> R -> R -> 0 summand. The Schur complement
    updates d_n; d_{n+1} loses row j and d_{n-1} loses column i. Homology is
    preserved (optionally re-verified degreewise).
    """
    if not c.is_free:
        raise ComplexBuildError("minimalize needs a free complex")
    ring = c.ring
    shifts = {n: list(s) for n, s in c.shifts.items()}
    mats = {n: [list(r) for r in m] for n, m in c.mats.items()}

    def unit_at():
        for n in sorted(mats):
            m = mats[n]
            for i, row in enumerate(m):
                for j, entr in enumerate(row):
                    if not entr.is_zero() and entr.degree(ring.weights) == 0:
                        return n, i, j
        return None

    while True:
        found = unit_at()
        if found is None:
            break
        n, i, j = found
        m = mats[n]
        u = next(iter(m[i][j].coeffs.values()))
        uinv = ring.field.inv(u)
        new_rows = []
        for r, row in enumerate(m):
            if r == i:
                continue
            new_row = []
            for cidx, entr in enumerate(row):
                if cidx == j:
                    continue
                corr = m[r][j] * m[i][cidx]
                new_row.append(ring.nf(entr - corr.scale(uinv)))
            new_rows.append(new_row)
        mats[n] = new_rows
        if (n + 1) in mats:
            mats[n + 1] = [row for r, row in enumerate(mats[n + 1]) if r != j]
        if (n - 1) in mats:
            mats[n - 1] = [
                [e for cidx, e in enumerate(row) if cidx != i]
                for row in mats[n - 1]
            ]
        del shifts[n][j]
        del shifts[n - 1][i]
        for idx in (n, n - 1):
            if not shifts[idx]:
                del shifts[idx]
        for idx in list(mats):
            m2 = mats[idx]
            if not m2 or not m2[0] or idx not in shifts or (idx - 1) not in shifts:
                del mats[idx]
    out = ChainComplex.free(ring, {n: tuple(s) for n, s in shifts.items()},
                            mats, check=True)
    if verify:
        _assert_same_homology(c, out)
    return out


def _assert_same_homology(a: ChainComplex, b: ChainComplex):
    ha, hb = a.homology(), b.homology()
    for n in set(ha) | set(hb):
        xa, xb = ha.get(n), hb.get(n)
        hi = min(xa.hi if xa is not None else POS_INF,
                 xb.hi if xb is not None else POS_INF)
        da = tuple((d, v) for d, v in (xa.dim_vector() if xa else ()) if d <= hi)
        db = tuple((d, v) for d, v in (xb.dim_vector() if xb else ()) if d <= hi)
        if da != db:
            raise ComplexBuildError(
                f"minimalization changed homology at index {n}: {da} vs {db}"
            )
