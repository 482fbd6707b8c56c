"""Graded quotient algebras R = k[x_1..x_n]/I and their classification.

The ambient polynomial ring Q is standard-graded by declared positive
variable degrees. R is materialized degreewise up to a truncation degree D:
basis of standard monomials per degree plus multiplication matrices. All
predicates that a truncation could leave undecided return tri-state values
(True / False / None); None is never silently coerced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import Matrix, PrimeField, pivot_split
from .poly import (
    GroebnerBasis,
    Polynomial,
    buchberger,
    degrevlex,
    format_poly,
    mono_div,
    mono_mul,
    monomial_dim,
    monomials_of_degree,
    normal_form,
    parse_poly,
    TermOrder,
)


class RingBuildError(ValueError):
    """Ring description is malformed (non-homogeneous ideal, zero ring, ...)."""


# -- ambient polynomial ring, degreewise ----------------------------------


def q_basis(weights, d: int):
    """Monomial basis of Q_d, degrevlex-descending; empty below degree 0."""
    if d < 0:
        return []
    return monomials_of_degree(len(weights), weights, d)


def q_mult_matrix(field: PrimeField, weights, f: Polynomial, d: int) -> Matrix:
    """Multiplication by homogeneous f as a matrix Q_d -> Q_{d+deg f}."""
    e = f.degree(weights)
    src = q_basis(weights, d)
    tgt = q_basis(weights, d + e)
    index = {m: i for i, m in enumerate(tgt)}
    A = np.zeros((len(tgt), len(src)), dtype=np.int64)
    for j, u in enumerate(src):
        for m, c in f.coeffs.items():
            A[index[mono_mul(u, m)], j] += c
    return Matrix(field, A)


def ideal_space(field: PrimeField, weights, gens, d: int, min_cofactor: int = 0) -> Matrix:
    """Columns spanning {u*g : g in gens, deg u >= min_cofactor} in Q_d.

    min_cofactor=0 gives I_d, min_cofactor=1 gives (n*I)_d for n the
    irrelevant ideal. Any homogeneous generating set works.
    """
    tgt = q_basis(weights, d)
    index = {m: i for i, m in enumerate(tgt)}
    cols = []
    for g in gens:
        e = g.degree(weights)
        if e is None:
            continue
        for u in q_basis(weights, d - e):
            if min_cofactor > 0 and sum(u) == 0:
                continue
            v = np.zeros(len(tgt), dtype=np.int64)
            for m, c in g.coeffs.items():
                v[index[mono_mul(u, m)]] += c
            cols.append(v)
    if not cols:
        return Matrix.zeros(field, len(tgt), 0)
    return Matrix(field, np.array(cols).T)


# -- the quotient ring -----------------------------------------------------


class QuotientRing:
    """R = k[x_1..x_n]/I with degreewise monomial bases up to degree D."""

    __slots__ = (
        "field", "names", "weights", "order", "gens", "gb", "D",
        "krull_dim", "is_artinian", "top_degree",
        "_basis", "_index", "_varmat",
    )

    def __init__(self, field, names, weights, order, gens, gb, D):
        self.field = field
        self.names = tuple(names)
        self.weights = tuple(weights)
        self.order = order
        self.gens = tuple(gens)
        self.gb = gb
        self.D = D
        self.krull_dim = monomial_dim(gb, len(self.names))
        self.is_artinian = self.krull_dim == 0
        self._basis: dict = {}
        self._index: dict = {}
        self._varmat: dict = {}
        self.top_degree = self._top_degree() if self.is_artinian else None
        if self.is_artinian and self.D < self.top_degree:
            raise RingBuildError(
                f"truncation {self.D} below top nonzero degree {self.top_degree}"
            )

    @classmethod
    def build(cls, field: PrimeField, names, gens, weights=None,
              order_kind: str = "degrevlex", truncation: int = 6) -> QuotientRing:
        names = list(names)
        if len(set(names)) != len(names):
            raise RingBuildError("duplicate variable names")
        weights = tuple(weights) if weights is not None else (1,) * len(names)
        if len(weights) != len(names) or any(w <= 0 for w in weights):
            raise RingBuildError("variable degrees must be positive, one per variable")
        if truncation <= 0:
            raise RingBuildError("truncation must be positive")
        order = TermOrder(order_kind, weights)
        polys = []
        for g in gens:
            f = parse_poly(g, names, field) if isinstance(g, str) else g
            if f.is_zero():
                continue
            if not f.is_homogeneous(weights):
                raise RingBuildError(f"non-homogeneous ideal generator: {g!r}")
            if f.degree(weights) == 0:
                raise RingBuildError("unit in ideal: quotient would be the zero ring")
            polys.append(f)
        gb = buchberger(polys, order) if polys else GroebnerBasis((), order)
        if any(g.degree(weights) == 0 for g in gb):
            raise RingBuildError("unit in ideal: quotient would be the zero ring")
        return cls(field, names, weights, order, polys, gb, truncation)

    # -- structure -------------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.names)

    @property
    def max_weight(self) -> int:
        return max(self.weights) if self.weights else 1

    def _top_degree(self) -> int:
        # artinian: each variable has a pure power among the leading terms,
        # so standard monomials cap at sum (a_i - 1) * w_i
        lms = self.gb.leading_monomials()
        bound = 0
        for i in range(self.nvars):
            a_i = None
            for m in lms:
                if all(e == 0 for k, e in enumerate(m) if k != i):
                    a_i = m[i] if a_i is None else min(a_i, m[i])
            if a_i is None:
                raise AssertionError("artinian ring without pure variable power")
            bound += (a_i - 1) * self.weights[i]
        top = 0
        for d in range(bound, -1, -1):
            if self._raw_basis(d):
                top = d
                break
        return top

    def _raw_basis(self, d: int):
        lms = self.gb.leading_monomials()
        return [
            m for m in q_basis(self.weights, d)
            if all(mono_div(m, lm) is None for lm in lms)
        ]

    def basis(self, d: int):
        """Standard monomials of degree d (empty outside [0, D])."""
        if d < 0 or d > self.D:
            return []
        if d not in self._basis:
            b = self._raw_basis(d)
            self._basis[d] = b
            self._index[d] = {m: i for i, m in enumerate(b)}
        return self._basis[d]

    def dim(self, d: int) -> int:
        return len(self.basis(d))

    def parse(self, s: str) -> Polynomial:
        return parse_poly(s, self.names, self.field)

    def fmt(self, f: Polynomial) -> str:
        return format_poly(f, self.names, self.order)

    def nf(self, f: Polynomial) -> Polynomial:
        return normal_form(f, self.gb)

    def to_vec(self, f: Polynomial, d: int) -> np.ndarray:
        """Coordinates of nf(f) in basis(d); f homogeneous of degree d."""
        self.basis(d)
        v = np.zeros(self.dim(d), dtype=np.int64)
        for m, c in self.nf(f).coeffs.items():
            v[self._index[d][m]] = c
        return v

    def from_vec(self, d: int, v) -> Polynomial:
        b = self.basis(d)
        return Polynomial(self.field, self.nvars,
                          {m: int(c) for m, c in zip(b, v)})

    def mult_matrix(self, f: Polynomial, d: int) -> Matrix:
        """Multiplication by homogeneous f as a matrix R_d -> R_{d+deg f}."""
        e = f.degree(self.weights)
        if e is None:
            return Matrix.zeros(self.field, self.dim(d), self.dim(d))
        cols = [self.to_vec(f.monomial_mul(u), d + e) for u in self.basis(d)]
        if not cols:
            return Matrix.zeros(self.field, self.dim(d + e), 0)
        return Matrix(self.field, np.array(cols).T)

    def var_matrix(self, i: int, d: int) -> Matrix:
        key = (i, d)
        if key not in self._varmat:
            x = Polynomial.variable(self.field, self.nvars, i)
            self._varmat[key] = self.mult_matrix(x, d)
        return self._varmat[key]

    def variable(self, i: int) -> Polynomial:
        return Polynomial.variable(self.field, self.nvars, i)

    def quotient_by(self, extra) -> QuotientRing:
        """R/(extra) presented over the same ambient polynomial ring."""
        more = [self.parse(g) if isinstance(g, str) else g for g in extra]
        return QuotientRing.build(
            self.field, self.names, list(self.gens) + more,
            weights=self.weights, order_kind=self.order.kind, truncation=self.D,
        )

    def __eq__(self, other):
        return (
            isinstance(other, QuotientRing)
            and self.field == other.field
            and self.names == other.names
            and self.weights == other.weights
            and self.order.kind == other.order.kind
            and self.gb.generators == other.gb.generators
            and self.D == other.D
        )

    def __hash__(self):
        return hash((self.field.p, self.names, self.weights, self.order.kind,
                     self.gb.generators, self.D))

    def __repr__(self):
        ideal = ", ".join(self.fmt(g) for g in self.gb) or "0"
        return f"F{self.field.p}[{','.join(self.names)}]/({ideal})"


# -- classification --------------------------------------------------------


@dataclass(frozen=True)
class RingClassification:
    edim: int
    mu: int
    krull_dim: int
    is_artinian: bool
    is_burch: bool | None
    is_complete_intersection: bool
    is_hypersurface: bool
    conormal_free: bool | None


def mu_generator_degrees(r: QuotientRing) -> list:
    """Degrees of a minimal homogeneous generating set of I, with multiplicity.

    Graded Nakayama: degree-d minimal generator count = dim I_d - dim (nI)_d.
    """
    if not r.gb.generators:
        return []
    top = max(g.degree(r.weights) for g in r.gb)
    out = []
    for d in range(1, top + 1):
        di = ideal_space(r.field, r.weights, r.gb.generators, d).rank()
        dn = ideal_space(r.field, r.weights, r.gb.generators, d, min_cofactor=1).rank()
        out.extend([d] * (di - dn))
    return out


def mu_and_edim(r: QuotientRing) -> tuple:
    mu = len(mu_generator_degrees(r))
    edim = 0
    for d in range(1, r.max_weight + 1):
        if r.dim(d) == 0:
            continue
        # (m^2)_d = sum of R_a * R_{d-a} inside R_d
        cols = []
        for a in range(1, d):
            for u in r.basis(a):
                mu_poly = Polynomial.term(r.field, r.nvars, u)
                for v in r.basis(d - a):
                    cols.append(r.to_vec(mu_poly.monomial_mul(v), d))
        if cols:
            msq = Matrix(r.field, np.array(cols).T).rank()
        else:
            msq = 0
        edim += r.dim(d) - msq
    return mu, edim


def _colon_spaces(r: QuotientRing, bound: int) -> dict:
    """(I :_Q n)_d for d = 0..bound, as column-span matrices in Q_d coordinates."""
    F, W, gens = r.field, r.weights, r.gb.generators
    spaces = {}
    for d in range(bound + 1):
        nd = len(q_basis(W, d))
        blocks = []
        aux_cols = 0
        for j in range(r.nvars):
            A = q_mult_matrix(F, W, r.variable(j), d)
            B = ideal_space(F, W, gens, d + W[j])
            blocks.append((A, B))
            aux_cols += B.cols
        if nd == 0:
            spaces[d] = Matrix.zeros(F, 0, 0)
            continue
        # f in (I:n)_d iff for all j exists g_j with x_j*f = B_j g_j
        total_rows = sum(A.rows for A, _ in blocks)
        big = np.zeros((total_rows, nd + aux_cols), dtype=np.int64)
        ro = 0
        co = nd
        for A, B in blocks:
            big[ro:ro + A.rows, :nd] = A.a
            if B.cols:
                big[ro:ro + A.rows, co:co + B.cols] = (-B.a) % F.p
            ro += A.rows
            co += B.cols
        ker = Matrix(F, big).kernel_basis()
        spaces[d] = ker.take_rows(range(nd)) if ker.cols else Matrix.zeros(F, nd, 0)
    return spaces


def is_burch(r: QuotientRing):
    """Burch test: n*I != n*(I :_Q n) in the ambient ring Q.

    Degreewise comparison. A witness degree proves True unconditionally.
    The all-degrees-agree answer False is only sound when the colon ideal's
    generator degrees are provably inside the scanned range, which holds when
    R is artinian or I is a monomial ideal; otherwise returns None (unknown).
    """
    if not r.gb.generators:
        raise ValueError("Burch test requires a nonzero ideal")
    F, W, gens = r.field, r.weights, r.gb.generators
    maxgen = max(g.degree(W) for g in gens)
    monomial = all(len(g.coeffs) == 1 for g in gens)
    if r.is_artinian:
        # (I:n) = I + socle lifts, generated in degrees <= max(maxgen, top)
        gen_bound = max(maxgen, r.top_degree)
        exact = True
    elif monomial:
        # colon of a monomial ideal: iterated intersections bound generator
        # degrees by nvars * maxgen
        gen_bound = r.nvars * maxgen
        exact = True
    else:
        gen_bound = maxgen + 2
        exact = False
    bound = gen_bound + r.max_weight
    colon = _colon_spaces(r, bound)
    for d in range(bound + 1):
        ni = ideal_space(F, W, gens, d, min_cofactor=1).rank()
        cols = []
        for j in range(r.nvars):
            prev = d - W[j]
            if prev < 0 or colon[prev].cols == 0:
                continue
            A = q_mult_matrix(F, W, r.variable(j), prev)
            cols.append((A @ colon[prev]).a)
        nj = Matrix(F, np.hstack(cols)).rank() if cols else 0
        if ni != nj:
            return True
    return False if exact else None


def classify(r: QuotientRing) -> RingClassification:
    """Ring classification: CI / hypersurface via mu = height of I."""
    mu, edim = mu_and_edim(r)
    ci = mu == r.nvars - r.krull_dim
    hyper = ci and mu <= 1
    if r.gb.generators:
        burch = is_burch(r)
        _, conormal_free = conormal_module(r)
    else:
        # I = 0: n*I = 0 = n*(0:n) in a domain, so not Burch; I/I^2 = 0 is
        # free of rank zero
        burch = False
        conormal_free = True
    return RingClassification(
        edim=edim,
        mu=mu,
        krull_dim=r.krull_dim,
        is_artinian=r.is_artinian,
        is_burch=burch,
        is_complete_intersection=ci,
        is_hypersurface=hyper,
        conormal_free=conormal_free,
    )


def conormal_module(r: QuotientRing):
    """I/I^2 as a truncated graded R-module, plus a freeness tri-state.

    Freeness is decided by comparing graded dimensions with the free module
    on the minimal generators: a mismatch proves not-free; full agreement
    proves free when R is artinian and the window sees everything; otherwise
    the verdict is None (window inconclusive).
    """
    from .gmod import subquotient_module

    if not r.gb.generators:
        raise ValueError("conormal module requires a nonzero ideal")
    F, W, gens = r.field, r.weights, r.gb.generators
    sq_gens = [g * h for g in gens for h in gens]
    ambient_dims = {d: len(q_basis(W, d)) for d in range(r.D + 1)}
    ambient_act = {}
    for j in range(r.nvars):
        for d in range(r.D + 1 - W[j]):
            ambient_act[(j, d)] = q_mult_matrix(F, W, r.variable(j), d)
    sub = {d: ideal_space(F, W, gens, d) for d in range(r.D + 1)}
    subsub = {d: ideal_space(F, W, sq_gens, d) for d in range(r.D + 1)}
    mod = subquotient_module(r, ambient_dims, ambient_act, sub, subsub, 0, r.D)

    gen_degs = mu_generator_degrees(r)
    free_ok = True
    for d in range(r.D + 1):
        free_d = sum(r.dim(d - s) for s in gen_degs)
        if mod.dim(d) != free_d:
            free_ok = False
            break
    if not free_ok:
        return mod, False
    if r.is_artinian and r.D >= max(gen_degs) + r.top_degree:
        # all degrees where either side could live are inside the window and
        # agree; the canonical surjection from the free module is then a
        # degreewise bijection
        return mod, True
    return mod, None


def monomial_regular(r: QuotientRing, f: Polynomial) -> bool | None:
    """Exact regularity of a monomial modulo a monomial ideal.

    f is regular iff (I : f) = I, and for monomial data the colon ideal is
    generated by u / gcd(u, f) over the minimal generators u. No window is
    involved, so the answer is a certificate. None when either side is not
    monomial.
    """
    if len(f.coeffs) != 1:
        return None
    (m, _), = f.coeffs.items()
    if all(e == 0 for e in m):
        return None
    if any(len(g.coeffs) != 1 for g in r.gb.generators):
        return None
    for g in r.gb.generators:
        (u, _), = g.coeffs.items()
        q = tuple(ui - min(ui, mi) for ui, mi in zip(u, m))
        if not r.nf(Polynomial.term(r.field, r.nvars, q)).is_zero():
            return False
    return True


def is_regular_element(r: QuotientRing, f: Polynomial, m) -> bool | None:
    """Is multiplication by f injective on m in every checkable degree?

    Checkable degrees are those whose image still fits in m's window.
    Returns None when the window exposes nothing to check.
    """
    if not f.is_homogeneous(r.weights) or f.is_zero() or f.degree(r.weights) == 0:
        raise ValueError("regular-element test needs homogeneous f of positive degree")
    e = f.degree(r.weights)
    checked = 0
    for d in range(m.lo, m.hi - e + 1):
        if m.dim(d) == 0:
            continue
        checked += 1
        if m.action_poly(f, d).kernel_basis().cols:
            return False
    if checked == 0 and not m.is_zero():
        return None
    return True
