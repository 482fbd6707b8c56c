"""Truncated graded modules over a QuotientRing, maps, Hom spaces, iso tests.

A GradedModule stores per-degree dimensions over a window [lo, hi] and one
matrix per (variable, degree) for the action. Construction asserts that the
actions commute pairwise and that every ideal generator acts as zero, so a
successfully built value really is a truncated R-module.

Isomorphism testing is exhaustive when the Hom-space is tiny and Monte Carlo
otherwise; "not found" is always kept distinct from "proven not isomorphic".
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from itertools import product as iter_product

import numpy as np

from .linalg import Matrix, pivot_split
from .poly import Polynomial, mono_mul


class ModuleBuildError(ValueError):
    """Construction data violates the module axioms or the window."""


class GradedModule:
    """Finite-dimensional truncated graded R-module."""

    __slots__ = ("ring", "lo", "hi", "dims", "actions", "origin")

    def __init__(self, ring, lo, hi, dims, actions, origin=None, check=True):
        if lo > hi:
            raise ModuleBuildError(f"empty window [{lo}, {hi}]")
        self.ring = ring
        self.lo = lo
        self.hi = hi
        self.dims = {d: n for d, n in dims.items() if n > 0}
        if any(d < lo or d > hi for d in self.dims):
            raise ModuleBuildError("nonzero dimension outside window")
        self.actions = {}
        for (i, d), m in actions.items():
            if self.dim(d) == 0 or d + ring.weights[i] > hi:
                continue
            want = (self.dim(d + ring.weights[i]), self.dim(d))
            if (m.rows, m.cols) != want:
                raise ModuleBuildError(
                    f"action x_{i} at degree {d}: shape {(m.rows, m.cols)}, want {want}"
                )
            self.actions[(i, d)] = m
        self.origin = origin
        if check:
            self._check_commuting()
            self._check_annihilation()

    # -- basic access -----------------------------------------------------

    def dim(self, d: int) -> int:
        return self.dims.get(d, 0)

    def action(self, i: int, d: int) -> Matrix:
        m = self.actions.get((i, d))
        if m is None:
            w = self.ring.weights[i]
            return Matrix.zeros(self.ring.field, self.dim(d + w), self.dim(d))
        return m

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def is_zero(self) -> bool:
        return not self.dims

    def dim_vector(self):
        return tuple(sorted(self.dims.items()))

    def support(self):
        return sorted(self.dims)

    def action_mono(self, mono, d: int) -> Matrix:
        cur = Matrix.identity(self.ring.field, self.dim(d))
        deg = d
        for i, e in enumerate(mono):
            for _ in range(e):
                cur = self.action(i, deg) @ cur
                deg += self.ring.weights[i]
        return cur

    def action_poly(self, f: Polynomial, d: int) -> Matrix:
        e = f.degree(self.ring.weights)
        out = Matrix.zeros(self.ring.field, self.dim(d + e), self.dim(d))
        for m, c in f.coeffs.items():
            out = out + self.action_mono(m, d).scale(c)
        return out

    def action_rank_profile(self):
        prof = []
        for (i, d) in sorted(self.actions):
            prof.append((i, d, self.actions[(i, d)].rank()))
        return tuple(prof)

    # -- constructions ----------------------------------------------------

    def twist(self, s: int) -> GradedModule:
        """M<s> with M<s>_d = M_{d-s}."""
        return GradedModule(
            self.ring, self.lo + s, self.hi + s,
            {d + s: n for d, n in self.dims.items()},
            {(i, d + s): m for (i, d), m in self.actions.items()},
            check=False,
        )

    def direct_sum(self, other: GradedModule) -> GradedModule:
        # degrees below a summand's lo are genuinely zero, but degrees above
        # its hi are unknown, so the sum is only trusted up to the smaller hi
        lo, hi = min(self.lo, other.lo), min(self.hi, other.hi)
        dims = {}
        for d in set(self.dims) | set(other.dims):
            if d <= hi:
                dims[d] = self.dim(d) + other.dim(d)
        actions = {}
        F = self.ring.field
        for d in dims:
            for i in range(self.ring.nvars):
                w = self.ring.weights[i]
                if d + w > hi:
                    continue
                a, b = self.action(i, d), other.action(i, d)
                big = np.zeros((a.rows + b.rows, a.cols + b.cols), dtype=np.int64)
                big[:a.rows, :a.cols] = a.a
                big[a.rows:, a.cols:] = b.a
                actions[(i, d)] = Matrix(F, big)
        return GradedModule(self.ring, lo, hi, dims, actions, check=False)

    def restrict_window(self, lo: int, hi: int) -> GradedModule:
        return GradedModule(
            self.ring, lo, hi,
            {d: n for d, n in self.dims.items() if lo <= d <= hi},
            {(i, d): m for (i, d), m in self.actions.items()
             if lo <= d and d + self.ring.weights[i] <= hi},
            check=False,
        )

    def view_over(self, new_ring) -> GradedModule:
        """Reinterpret over a further quotient of the same polynomial ring.

        Valid when the extra ideal generators act as zero; the constructor
        check enforces exactly that.
        """
        if new_ring.names != self.ring.names or new_ring.field != self.ring.field:
            raise ModuleBuildError("view_over requires the same ambient variables")
        return GradedModule(new_ring, self.lo, self.hi, dict(self.dims),
                            dict(self.actions), origin=self.origin, check=True)

    # -- invariant checks --------------------------------------------------

    def _check_commuting(self):
        r = self.ring
        for i in range(r.nvars):
            for j in range(i + 1, r.nvars):
                wi, wj = r.weights[i], r.weights[j]
                for d in self.dims:
                    if d + wi + wj > self.hi:
                        continue
                    ij = self.action(i, d + wj) @ self.action(j, d)
                    ji = self.action(j, d + wi) @ self.action(i, d)
                    if ij != ji:
                        raise ModuleBuildError(
                            f"actions x_{i}, x_{j} fail to commute at degree {d}"
                        )

    def _check_annihilation(self):
        r = self.ring
        for g in r.gb.generators:
            e = g.degree(r.weights)
            for d in self.dims:
                if d + e > self.hi:
                    continue
                if not self.action_poly(g, d).is_zero():
                    raise ModuleBuildError(
                        f"ideal generator {r.fmt(g)} acts nonzero at degree {d}"
                    )

    def __repr__(self):
        return f"GradedModule(dims={dict(sorted(self.dims.items()))})"


class FreeModule(GradedModule):
    """Free module ⊕_g R(-s_g); basis tagged by (generator, standard monomial)."""

    __slots__ = ("shifts",)

    def __init__(self, ring, shifts, hi=None):
        shifts = tuple(shifts)
        self.shifts = shifts
        if not shifts:
            super().__init__(ring, 0, ring.D, {}, {}, check=False)
            return
        lo = min(shifts)
        if hi is None:
            hi = ring.D + lo
        if hi < lo:
            raise ModuleBuildError("window of free module is empty")
        dims = {}
        for d in range(lo, hi + 1):
            dims[d] = sum(ring.dim(d - s) for s in shifts)
        actions = {}
        for i in range(ring.nvars):
            w = ring.weights[i]
            for d in range(lo, hi - w + 1):
                if dims.get(d, 0) == 0:
                    continue
                blocks = [ring.var_matrix(i, d - s) for s in shifts]
                rows = sum(b.rows for b in blocks)
                cols = sum(b.cols for b in blocks)
                big = np.zeros((rows, cols), dtype=np.int64)
                ro = co = 0
                for b in blocks:
                    big[ro:ro + b.rows, co:co + b.cols] = b.a
                    ro += b.rows
                    co += b.cols
                actions[(i, d)] = Matrix(ring.field, big)
        super().__init__(ring, lo, hi, dims, actions, check=False)

    def tags(self, d: int):
        """Basis of degree d as (generator index, monomial) pairs."""
        out = []
        for g, s in enumerate(self.shifts):
            for m in self.ring.basis(d - s):
                out.append((g, m))
        return out

    def twist(self, s: int) -> FreeModule:
        return FreeModule(self.ring, tuple(x + s for x in self.shifts),
                          hi=self.hi + s)

    def direct_sum(self, other):
        if isinstance(other, FreeModule):
            return FreeModule(self.ring, self.shifts + other.shifts,
                              hi=min(self.hi, other.hi))
        return super().direct_sum(other)


def free_module(ring, shifts, hi=None) -> FreeModule:
    return FreeModule(ring, shifts, hi=hi)


# -- module maps ------------------------------------------------------------


class ModuleMapError(ValueError):
    """Blocks do not commute with the variable actions."""


class ModuleMap:
    """Degree-t homomorphism: blocks M_d -> N_{d+t}."""

    __slots__ = ("source", "target", "t", "blocks")

    def __init__(self, source, target, blocks, t=0, check=True):
        self.source = source
        self.target = target
        self.t = t
        self.blocks = {}
        for d, m in blocks.items():
            want = (target.dim(d + t), source.dim(d))
            if (m.rows, m.cols) != want:
                raise ModuleMapError(
                    f"block at degree {d}: shape {(m.rows, m.cols)}, want {want}"
                )
            self.blocks[d] = m
        if check:
            self.verify()

    def block(self, d: int) -> Matrix:
        m = self.blocks.get(d)
        if m is None:
            return Matrix.zeros(self.source.ring.field,
                                self.target.dim(d + self.t), self.source.dim(d))
        return m

    def valid_degrees(self):
        """Source degrees where the block is meaningful under both windows."""
        lo = max(self.source.lo, self.target.lo - self.t)
        hi = min(self.source.hi, self.target.hi - self.t)
        return range(lo, hi + 1)

    def verify(self):
        r = self.source.ring
        if self.target.ring != r and self.target.ring.names != r.names:
            raise ModuleMapError("source and target over different rings")
        for i in range(r.nvars):
            w = r.weights[i]
            for d in self.valid_degrees():
                if d + w > self.source.hi or d + self.t + w > self.target.hi:
                    continue
                lhs = self.block(d + w) @ self.source.action(i, d)
                rhs = self.target.action(i, d + self.t) @ self.block(d)
                if lhs != rhs:
                    raise ModuleMapError(
                        f"map fails to commute with x_{i} at degree {d}"
                    )

    def compose(self, other: ModuleMap) -> ModuleMap:
        """self ∘ other."""
        blocks = {}
        for d in other.valid_degrees():
            blocks[d] = self.block(d + other.t) @ other.block(d)
        return ModuleMap(other.source, self.target, blocks,
                         t=self.t + other.t, check=False)

    def __add__(self, other: ModuleMap) -> ModuleMap:
        blocks = {d: self.block(d) + other.block(d)
                  for d in set(self.blocks) | set(other.blocks)}
        return ModuleMap(self.source, self.target, blocks, t=self.t, check=False)

    def scale(self, c: int) -> ModuleMap:
        return ModuleMap(self.source, self.target,
                         {d: m.scale(c) for d, m in self.blocks.items()},
                         t=self.t, check=False)

    def __neg__(self):
        return self.scale(-1)

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.blocks.values())

    def is_degreewise_invertible(self) -> bool:
        for d in set(self.source.dims) | {d - self.t for d in self.target.dims}:
            a, b = self.source.dim(d), self.target.dim(d + self.t)
            if a != b:
                return False
            if a and self.block(d).rank() != a:
                return False
        return True

    def __repr__(self):
        return f"ModuleMap(t={self.t}, degrees={sorted(self.blocks)})"


def zero_map(source, target, t=0) -> ModuleMap:
    return ModuleMap(source, target, {}, t=t, check=False)


def identity_map(m: GradedModule) -> ModuleMap:
    return ModuleMap(
        m, m, {d: Matrix.identity(m.ring.field, n) for d, n in m.dims.items()},
        check=False,
    )


def mult_map(m: GradedModule, f: Polynomial) -> ModuleMap:
    """Multiplication by homogeneous f as a degree-0 map M<e> -> M, e = deg f."""
    e = f.degree(m.ring.weights)
    src = m.twist(e)
    blocks = {}
    for d, n in src.dims.items():
        if d > m.hi:
            continue
        blocks[d] = m.action_poly(f, d - e)
    return ModuleMap(src, m, blocks, check=False)


# -- subquotients and presentations ----------------------------------------


def subquotient_data(ring, lo, hi, ambient_dims, ambient_act, sub, subsub,
                     origin=None):
    """Module V/W for W ⊆ V inside a degreewise ambient with given actions.

    sub[d] / subsub[d] are matrices whose columns span V_d / W_d in ambient
    coordinates. Returns (module, reps) where reps[d] holds the ambient
    coordinates of the chosen basis of V_d/W_d.
    """
    F = ring.field
    dims, reps = {}, {}
    for d in range(lo, hi + 1):
        V = sub.get(d)
        W = subsub.get(d)
        nd = ambient_dims.get(d, 0)
        if V is None:
            V = Matrix.zeros(F, nd, 0)
        if W is None:
            W = Matrix.zeros(F, nd, 0)
        if W.cols and V.solve(W) is None:
            raise ModuleBuildError(f"subsub space not inside sub space at degree {d}")
        _, extra = pivot_split(W, V)
        reps[d] = V.take_cols(extra)
        dims[d] = len(extra)
    actions = {}
    for i in range(ring.nvars):
        w = ring.weights[i]
        for d in range(lo, hi - w + 1):
            if dims.get(d, 0) == 0:
                continue
            A = ambient_act.get((i, d))
            if A is None:
                raise ModuleBuildError(f"missing ambient action x_{i} at degree {d}")
            img = A @ reps[d]
            W_next = subsub.get(d + w)
            if W_next is None:
                W_next = Matrix.zeros(F, ambient_dims.get(d + w, 0), 0)
            sol = reps[d + w].hstack(W_next).solve(img)
            if sol is None:
                raise ModuleBuildError(
                    f"sub space not stable under x_{i} at degree {d}"
                )
            actions[(i, d)] = sol.take_rows(range(dims[d + w]))
    mod = GradedModule(ring, lo, hi, dims, actions, origin=origin, check=True)
    return mod, reps


def subquotient_module(ring, ambient_dims, ambient_act, sub, subsub, lo, hi):
    return subquotient_data(ring, lo, hi, ambient_dims, ambient_act, sub, subsub)[0]


def poly_matrix_to_map(src: FreeModule, tgt: FreeModule, entries,
                       check=True) -> ModuleMap:
    """Degree-0 map of free modules given by a homogeneous polynomial matrix.

    entries[i][j] is the coefficient of target generator i in the image of
    source generator j; its degree must equal src.shifts[j] - tgt.shifts[i].
    """
    ring = src.ring
    F = ring.field
    ns, nt = len(src.shifts), len(tgt.shifts)
    if len(entries) != nt or any(len(row) != ns for row in entries):
        raise ModuleMapError(f"entry matrix must be {nt} x {ns}")
    for i in range(nt):
        for j in range(ns):
            f = entries[i][j]
            if f.is_zero():
                continue
            want = src.shifts[j] - tgt.shifts[i]
            if not f.is_homogeneous(ring.weights) or f.degree(ring.weights) != want:
                raise ModuleMapError(
                    f"entry ({i},{j}) must be homogeneous of degree {want}"
                )
    blocks = {}
    for d in range(src.lo, min(src.hi, tgt.hi) + 1):
        if src.dim(d) == 0:
            continue
        big = np.zeros((tgt.dim(d), src.dim(d)), dtype=np.int64)
        ro = 0
        for i in range(nt):
            co = 0
            ri = ring.dim(d - tgt.shifts[i])
            for j in range(ns):
                cj = ring.dim(d - src.shifts[j])
                f = entries[i][j]
                if cj and ri and not f.is_zero():
                    blk = ring.mult_matrix(f, d - src.shifts[j])
                    big[ro:ro + ri, co:co + cj] = blk.a
                co += cj
            ro += ri
        blocks[d] = Matrix(F, big)
    return ModuleMap(src, tgt, blocks, check=check)


def map_to_poly_matrix(f: ModuleMap):
    """Recover the polynomial entry matrix of a degree-0 map of free modules."""
    src, tgt = f.source, f.target
    if not isinstance(src, FreeModule) or not isinstance(tgt, FreeModule):
        raise ModuleMapError("polynomial matrix needs free source and target")
    ring = src.ring
    entries = []
    for i in range(len(tgt.shifts)):
        entries.append([Polynomial.zero(ring.field, ring.nvars)] * len(src.shifts))
    for j, s in enumerate(src.shifts):
        if s < src.lo or s > min(src.hi, tgt.hi):
            raise ModuleMapError("window too small to read generator images")
        col_ofs = src.tags(s).index((j, (0,) * ring.nvars))
        img = f.block(s).take_cols([col_ofs])
        ro = 0
        for i, si in enumerate(tgt.shifts):
            n = ring.dim(s - si)
            coeffs = {m: int(img.a[ro + k, 0])
                      for k, m in enumerate(ring.basis(s - si))}
            entries[i][j] = Polynomial(ring.field, ring.nvars, coeffs)
            ro += n
    return entries


def expand(ring, shifts, relations, hi=None) -> GradedModule:
    """Cokernel of a free presentation.

    relations[g][r] = coefficient of generator g in relation r (entries
    Polynomial or string). Degree compatibility of each relation column is
    checked against the generator shifts.
    """
    shifts = tuple(shifts)
    F = free_module(ring, shifts, hi=hi)
    if not shifts:
        return F
    nrel = len(relations[0]) if relations else 0
    if relations and any(len(row) != nrel for row in relations):
        raise ModuleBuildError("ragged relation matrix")
    rels = []
    for r in range(nrel):
        col = []
        for g in range(len(shifts)):
            e = relations[g][r]
            f = ring.parse(e) if isinstance(e, str) else e
            col.append(f)
        degs = {shifts[g] + col[g].degree(ring.weights)
                for g in range(len(shifts)) if not col[g].is_zero()}
        if len(degs) > 1:
            raise ModuleBuildError(f"relation {r} is not homogeneous: degrees {degs}")
        if degs:
            rels.append((degs.pop(), col))
    sub = {d: Matrix.identity(ring.field, F.dim(d)) for d in range(F.lo, F.hi + 1)}
    subsub = {}
    for d in range(F.lo, F.hi + 1):
        cols = []
        for c_r, col in rels:
            for u in ring.basis(d - c_r):
                vec = np.zeros(F.dim(d), dtype=np.int64)
                ro = 0
                for g, s in enumerate(shifts):
                    n = ring.dim(d - s)
                    if not col[g].is_zero():
                        w = ring.to_vec(col[g].monomial_mul(u), d - s)
                        vec[ro:ro + n] = w
                    ro += n
                cols.append(vec)
        subsub[d] = (Matrix(ring.field, np.array(cols).T) if cols
                     else Matrix.zeros(ring.field, F.dim(d), 0))
    ambient_act = {k: v for k, v in F.actions.items()}
    mod, _ = subquotient_data(
        ring, F.lo, F.hi, dict(F.dims), ambient_act, sub, subsub,
        origin=("presentation", shifts, relations),
    )
    return mod


# -- Hom spaces and isomorphism testing -------------------------------------


def hom_space(a: GradedModule, b: GradedModule, t: int = 0):
    """k-basis of degree-t homomorphisms a -> b (blockwise kernel computation)."""
    ring = a.ring
    F = ring.field
    degrees = [d for d in sorted(a.dims) if b.dim(d + t) > 0]
    sizes = {d: b.dim(d + t) * a.dim(d) for d in degrees}
    offset, total = {}, 0
    for d in degrees:
        offset[d] = total
        total += sizes[d]
    if total == 0:
        return []
    rows = []
    for i in range(ring.nvars):
        w = ring.weights[i]
        for d in range(a.lo, a.hi - w + 1):
            rcount = b.dim(d + t + w) * a.dim(d)
            if rcount == 0:
                continue
            block_rows = np.zeros((rcount, total), dtype=np.int64)
            if d + w in offset:
                # vec_C(F_{d+w} @ A) = (I ⊗ A^T) vec_C(F_{d+w})
                A = a.action(i, d)
                contrib = np.kron(np.eye(b.dim(d + t + w), dtype=np.int64), A.a.T)
                block_rows[:, offset[d + w]:offset[d + w] + sizes[d + w]] += contrib
            if d in offset:
                # vec_C(B @ F_d) = (B ⊗ I) vec_C(F_d)
                B = b.action(i, d + t)
                contrib = np.kron(B.a, np.eye(a.dim(d), dtype=np.int64))
                block_rows[:, offset[d]:offset[d] + sizes[d]] -= contrib
            if block_rows.any():
                rows.append(block_rows % F.p)
    if rows:
        system = Matrix(F, np.vstack(rows))
        K = system.kernel_basis()
    else:
        K = Matrix.identity(F, total)
    basis = []
    for c in range(K.cols):
        vec = K.a[:, c]
        blocks = {}
        for d in degrees:
            n, m = b.dim(d + t), a.dim(d)
            blocks[d] = Matrix(F, vec[offset[d]:offset[d] + sizes[d]].reshape(n, m))
        basis.append(ModuleMap(a, b, blocks, t=t, check=False))
    return basis


def hom_combination(basis, coeffs) -> ModuleMap:
    out = basis[0].scale(coeffs[0])
    for h, c in zip(basis[1:], coeffs[1:]):
        out = out + h.scale(c)
    return out


@dataclass(frozen=True)
class IsoVerdict:
    kind: str  # "iso" | "not" | "unknown"
    witness: ModuleMap | None = None
    reason: str | None = None
    trials: int = 0
    seed: int | None = None

    @property
    def is_iso(self) -> bool:
        return self.kind == "iso"

    @property
    def proven_not(self) -> bool:
        return self.kind == "not"


def is_isomorphic(a: GradedModule, b: GradedModule, trials: int = 64,
                  seed: int = 0, exhaustive_limit: int = 4096) -> IsoVerdict:
    """Tri-state graded isomorphism test.

    Dimension or action-rank mismatches prove non-isomorphism. Otherwise the
    degree-0 Hom-space is searched for a degreewise invertible element:
    exhaustively when |k|^dim fits under exhaustive_limit (a miss is then a
    proof), else by seeded Monte Carlo (a miss is only NotFoundWithinTrials).
    """
    hi_common = min(a.hi, b.hi)
    support = sorted(set(a.dims) | set(b.dims))
    for d in support:
        if d > hi_common:
            # one side's truncation cannot see this degree: not comparable
            return IsoVerdict(
                "unknown", reason=f"support at degree {d} beyond common window"
            )
        if a.dim(d) != b.dim(d):
            return IsoVerdict("not", reason=f"graded dimension mismatch at degree {d}")
    if a.is_zero():
        return IsoVerdict("iso", witness=zero_map(a, b))
    for i in range(a.ring.nvars):
        w = a.ring.weights[i]
        for d in support:
            if d + w > hi_common:
                continue
            if a.action(i, d).rank() != b.action(i, d).rank():
                return IsoVerdict(
                    "not", reason=f"rank of x_{i} action differs at degree {d}"
                )
    basis = hom_space(a, b, 0)
    if not basis:
        return IsoVerdict("not", reason="no nonzero homomorphisms")
    p = a.ring.field.p
    n = len(basis)
    if p ** n <= exhaustive_limit:
        count = 0
        for coeffs in iter_product(range(p), repeat=n):
            if not any(coeffs):
                continue
            count += 1
            f = hom_combination(basis, coeffs)
            if f.is_degreewise_invertible():
                return IsoVerdict("iso", witness=f, trials=count, seed=seed)
        return IsoVerdict("not", reason="no invertible element in Hom space "
                                        "(exhaustive)", trials=count, seed=seed)
    rng = random.Random(seed)
    for trial in range(trials):
        coeffs = [rng.randrange(p) for _ in range(n)]
        if not any(coeffs):
            continue
        f = hom_combination(basis, coeffs)
        if f.is_degreewise_invertible():
            return IsoVerdict("iso", witness=f, trials=trial + 1, seed=seed)
    return IsoVerdict("unknown", reason="no invertible combination found",
                      trials=trials, seed=seed)


def zero_module(ring) -> GradedModule:
    return GradedModule(ring, 0, ring.D, {}, {}, check=False)


def direct_sum_list(ring, mods):
    out = None
    for m in mods:
        out = m if out is None else out.direct_sum(m)
    return out if out is not None else zero_module(ring)
