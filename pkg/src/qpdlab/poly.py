"""Multivariate polynomials over F_p, term orders, and a small Buchberger engine.

Monomials are plain exponent tuples. Polynomials are immutable coefficient
dicts. The default order is weighted graded reverse lexicographic; pure lex
is available behind the same TermOrder interface.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations

from .linalg import PrimeField

Monomial = tuple  # exponent tuple, one entry per variable


class ResourceExceeded(RuntimeError):
    """A configured work budget ran out before the computation finished."""

    def __init__(self, message: str, steps: int | None = None):
        super().__init__(message)
        self.steps = steps


class PolyParseError(ValueError):
    """Input string does not match the polynomial grammar."""


# -- monomial helpers -----------------------------------------------------


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial):
    """a / b, or None when b does not divide a."""
    q = tuple(x - y for x, y in zip(a, b))
    if any(e < 0 for e in q):
        return None
    return q


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def mono_deg(m: Monomial, weights) -> int:
    return sum(e * w for e, w in zip(m, weights))


def mono_support(m: Monomial) -> frozenset:
    return frozenset(i for i, e in enumerate(m) if e)


@dataclass(frozen=True)
class TermOrder:
    """Monomial order: 'degrevlex' (weighted) or 'lex'."""

    kind: str
    weights: tuple

    def __post_init__(self):
        if self.kind not in ("degrevlex", "lex"):
            raise ValueError(f"unknown order: {self.kind}")
        if any(w <= 0 for w in self.weights):
            raise ValueError("variable degrees must be positive")

    @property
    def nvars(self) -> int:
        return len(self.weights)

    def key(self, m: Monomial):
        if self.kind == "lex":
            return m
        # degrevlex: higher weighted degree wins; ties broken by the last
        # differing exponent being smaller.
        return (mono_deg(m, self.weights), tuple(-e for e in reversed(m)))

    def sort_desc(self, monomials):
        return sorted(monomials, key=self.key, reverse=True)


def degrevlex(weights) -> TermOrder:
    return TermOrder("degrevlex", tuple(weights))


# -- polynomials ----------------------------------------------------------


class Polynomial:
    """Immutable polynomial over F_p in a fixed number of variables."""

    __slots__ = ("field", "nvars", "coeffs")

    def __init__(self, field: PrimeField, nvars: int, coeffs: dict):
        clean = {}
        for m, c in coeffs.items():
            c %= field.p
            if c:
                if len(m) != nvars:
                    raise ValueError("monomial length != nvars")
                clean[tuple(m)] = c
        self.field = field
        self.nvars = nvars
        self.coeffs = clean

    @classmethod
    def zero(cls, field, nvars):
        return cls(field, nvars, {})

    @classmethod
    def constant(cls, field, nvars, c):
        return cls(field, nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, field, nvars, i):
        m = [0] * nvars
        m[i] = 1
        return cls(field, nvars, {tuple(m): 1})

    @classmethod
    def term(cls, field, nvars, mono, c=1):
        return cls(field, nvars, {tuple(mono): c})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return (
            isinstance(other, Polynomial)
            and self.field == other.field
            and self.nvars == other.nvars
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field.p, self.nvars, frozenset(self.coeffs.items())))

    def __add__(self, other: Polynomial) -> Polynomial:
        c = dict(self.coeffs)
        for m, v in other.coeffs.items():
            c[m] = c.get(m, 0) + v
        return Polynomial(self.field, self.nvars, c)

    def __neg__(self) -> Polynomial:
        return Polynomial(self.field, self.nvars, {m: -v for m, v in self.coeffs.items()})

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __mul__(self, other: Polynomial) -> Polynomial:
        out: dict = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                m = mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial(self.field, self.nvars, out)

    def scale(self, c: int) -> Polynomial:
        return Polynomial(self.field, self.nvars, {m: v * c for m, v in self.coeffs.items()})

    def monomial_mul(self, mono: Monomial, c: int = 1) -> Polynomial:
        return Polynomial(
            self.field, self.nvars, {mono_mul(m, mono): v * c for m, v in self.coeffs.items()}
        )

    def leading_term(self, order: TermOrder):
        """(monomial, coefficient) of the largest term; raises on zero."""
        if not self.coeffs:
            raise ValueError("leading term of zero polynomial")
        m = max(self.coeffs, key=order.key)
        return m, self.coeffs[m]

    def monic(self, order: TermOrder) -> Polynomial:
        _, c = self.leading_term(order)
        return self.scale(self.field.inv(c))

    def degree(self, weights):
        """Max weighted degree of the terms; None for the zero polynomial."""
        if not self.coeffs:
            return None
        return max(mono_deg(m, weights) for m in self.coeffs)

    def is_homogeneous(self, weights) -> bool:
        degs = {mono_deg(m, weights) for m in self.coeffs}
        return len(degs) <= 1

    def __repr__(self):
        return f"Polynomial({self.coeffs})"


# -- parsing / formatting -------------------------------------------------

_TOKEN = re.compile(r"\s*(\d+|[A-Za-z_][A-Za-z_0-9]*|\^|\*|\+|-)")


def _tokenize(text: str):
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise PolyParseError(f"bad character at offset {pos}: {text[pos:]!r}")
            break
        out.append(m.group(1))
        pos = m.end()
    return out


def parse_poly(text: str, var_names, field: PrimeField) -> Polynomial:
    """Parse `term (('+'|'-') term)*`, term = coeff? ('*'? var ('^' exp)?)*."""
    names = list(var_names)
    index = {n: i for i, n in enumerate(names)}
    nvars = len(names)
    toks = _tokenize(text)
    if not toks:
        raise PolyParseError("empty polynomial string")
    result = Polynomial.zero(field, nvars)
    pos = 0

    def parse_term(sign: int):
        nonlocal pos, result
        coeff = sign
        expo = [0] * nvars
        saw_factor = False
        expect_factor = True
        while pos < len(toks) and toks[pos] not in ("+", "-"):
            t = toks[pos]
            if t == "*":
                if not saw_factor:
                    raise PolyParseError("'*' before any factor")
                pos += 1
                expect_factor = True
                continue
            if t.isdigit():
                coeff *= int(t)
                pos += 1
            elif t in index:
                v = index[t]
                pos += 1
                e = 1
                if pos < len(toks) and toks[pos] == "^":
                    pos += 1
                    if pos >= len(toks) or not toks[pos].isdigit():
                        raise PolyParseError("'^' must be followed by an integer")
                    e = int(toks[pos])
                    pos += 1
                expo[v] += e
            elif t == "^":
                raise PolyParseError("'^' may only follow a variable")
            else:
                raise PolyParseError(f"unknown variable {t!r}")
            saw_factor = True
            expect_factor = False
        if not saw_factor or expect_factor:
            raise PolyParseError("empty term")
        result = result + Polynomial.term(field, nvars, tuple(expo), coeff)

    sign = 1
    if toks[0] == "-":
        sign = -1
        pos = 1
    parse_term(sign)
    while pos < len(toks):
        op = toks[pos]
        if op not in ("+", "-"):
            raise PolyParseError(f"expected '+' or '-', got {op!r}")
        pos += 1
        parse_term(-1 if op == "-" else 1)
    return result


def format_poly(f: Polynomial, var_names, order: TermOrder | None = None) -> str:
    """Canonical string form; coefficients reduced to [0, p)."""
    if f.is_zero():
        return "0"
    order = order or degrevlex((1,) * f.nvars)
    parts = []
    for m in order.sort_desc(f.coeffs):
        c = f.coeffs[m]
        factors = []
        for i, e in enumerate(m):
            if e == 1:
                factors.append(var_names[i])
            elif e > 1:
                factors.append(f"{var_names[i]}^{e}")
        if not factors:
            parts.append(str(c))
        elif c == 1:
            parts.append("*".join(factors))
        else:
            parts.append("*".join([str(c)] + factors))
    return " + ".join(parts)


# -- division, Buchberger -------------------------------------------------


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced Groebner basis: monic generators, no leading term divides another."""

    generators: tuple
    order: TermOrder

    def __iter__(self):
        return iter(self.generators)

    def leading_monomials(self):
        return tuple(g.leading_term(self.order)[0] for g in self.generators)


def normal_form(f: Polynomial, gb, order: TermOrder | None = None) -> Polynomial:
    """Fully reduce f: no remainder term is divisible by any leading term."""
    if isinstance(gb, GroebnerBasis):
        gens, order = gb.generators, gb.order
    else:
        gens = tuple(g for g in gb if not g.is_zero())
        if order is None:
            raise ValueError("order required for a raw generator list")
    if gens and gens[0].nvars != f.nvars:
        raise ValueError("variable-count mismatch")
    lead = [(g, *g.leading_term(order)) for g in gens]
    field = f.field
    p = f
    rem = Polynomial.zero(f.field, f.nvars)
    while not p.is_zero():
        lm, lc = p.leading_term(order)
        for g, glm, glc in lead:
            q = mono_div(lm, glm)
            if q is not None:
                p = p - g.monomial_mul(q, lc * field.inv(glc))
                break
        else:
            t = Polynomial.term(field, f.nvars, lm, lc)
            rem = rem + t
            p = p - t
    return rem


def s_polynomial(f: Polynomial, g: Polynomial, order: TermOrder) -> Polynomial:
    lmf, lcf = f.leading_term(order)
    lmg, lcg = g.leading_term(order)
    l = mono_lcm(lmf, lmg)
    field = f.field
    return f.monomial_mul(mono_div(l, lmf), field.inv(lcf)) - g.monomial_mul(
        mono_div(l, lmg), field.inv(lcg)
    )


def buchberger(gens, order: TermOrder, step_budget: int = 100_000) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by gens.

    step_budget caps the number of S-polynomial reductions; exceeding it
    raises ResourceExceeded rather than returning a partial basis.
    """
    G = [g.monic(order) for g in gens if not g.is_zero()]
    if not G:
        return GroebnerBasis((), order)
    pairs = [(i, j) for i in range(len(G)) for j in range(i + 1, len(G))]
    steps = 0
    while pairs:
        # normal selection: smallest lcm first keeps intermediate bases small
        pairs.sort(key=lambda ij: order.key(
            mono_lcm(G[ij[0]].leading_term(order)[0], G[ij[1]].leading_term(order)[0])
        ))
        i, j = pairs.pop(0)
        lmi = G[i].leading_term(order)[0]
        lmj = G[j].leading_term(order)[0]
        if mono_lcm(lmi, lmj) == mono_mul(lmi, lmj):
            continue  # coprime leading terms: S-poly reduces to zero
        steps += 1
        if steps > step_budget:
            raise ResourceExceeded("buchberger step budget exceeded", steps=steps)
        h = normal_form(s_polynomial(G[i], G[j], order), G, order)
        if not h.is_zero():
            h = h.monic(order)
            G.append(h)
            pairs.extend((t, len(G) - 1) for t in range(len(G) - 1))
    return _reduce_basis(G, order)


def _reduce_basis(G, order: TermOrder) -> GroebnerBasis:
    # drop generators whose leading term is divisible by another's
    lms = [g.leading_term(order)[0] for g in G]
    keep = []
    for i, g in enumerate(G):
        if any(
            j != i and mono_div(lms[i], lms[j]) is not None
            and (j < i or lms[j] != lms[i])
            for j in range(len(G))
        ):
            continue
        keep.append(g)
    # tail-reduce each against the others until stable
    out = list(keep)
    changed = True
    while changed:
        changed = False
        for i in range(len(out)):
            others = out[:i] + out[i + 1:]
            r = normal_form(out[i], others, order) if others else out[i]
            if r.is_zero():
                out.pop(i)
                changed = True
                break
            r = r.monic(order)
            if r != out[i]:
                out[i] = r
                changed = True
    out.sort(key=lambda g: order.key(g.leading_term(order)[0]))
    return GroebnerBasis(tuple(out), order)


def monomial_dim(gb: GroebnerBasis, nvars: int) -> int:
    """Krull dimension of Q/ideal via the initial ideal.

    Maximum size of a variable subset S such that no leading monomial is
    supported inside S. Returns -1 for the zero ring (1 in the ideal).
    """
    lms = gb.leading_monomials()
    supports = [mono_support(m) for m in lms]
    if any(not s for s in supports):
        return -1
    for k in range(nvars, -1, -1):
        for S in combinations(range(nvars), k):
            sset = set(S)
            if all(not sup <= sset for sup in supports):
                return k
    raise AssertionError("unreachable: empty subset is always independent")


def monomials_of_degree(nvars: int, weights, d: int):
    """All exponent tuples of weighted degree exactly d, degrevlex-descending."""
    out = []

    def rec(i, remaining, acc):
        if i == nvars:
            if remaining == 0:
                out.append(tuple(acc))
            return
        w = weights[i]
        for e in range(remaining // w + 1):
            rec(i + 1, remaining - e * w, acc + [e])

    rec(0, d, [])
    order = degrevlex(tuple(weights))
    return order.sort_desc(out)
