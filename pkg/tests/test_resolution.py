from __future__ import annotations

import pytest

from qpdlab.complexes import NEG_INF, POS_INF, ChainComplex, koszul
from qpdlab.gmod import expand, free_module
from qpdlab.linalg import PrimeField
from qpdlab.resolution import (
    ResolutionError,
    cokernel_module,
    depth,
    ext_modules,
    residue_field,
    residue_resolution,
    resolve,
    resolve_module,
    ring_depth,
)
from qpdlab.ring import QuotientRing

F101 = PrimeField(101)


def ring(gens, names=("x", "y"), trunc=6, field=F101):
    return QuotientRing.build(field, names, gens, truncation=trunc)


POLY2 = ring([])
POLY3 = ring([], names=("x", "y", "z"))
DUAL = ring(["x^2"], names=("x",))
FAT = ring(["x^2", "x*y", "y^2"])


def k_of(r):
    return residue_field(r)


# -- resolutions over polynomial rings ----------------------------------------

def test_residue_field_resolves_to_koszul():
    rep = resolve_module(k_of(POLY2))
    assert rep.is_finite and rep.pd == 2
    assert rep.betti == {0: (0,), 1: (1, 1), 2: (2,)}
    assert rep.complex.is_minimal()


def test_residue_field_three_variables():
    rep = resolve_module(k_of(POLY3))
    assert rep.is_finite and rep.pd == 3
    assert [len(rep.betti[i]) for i in range(4)] == [1, 3, 3, 1]


def test_free_module_short_circuit():
    rep = resolve_module(free_module(POLY2, (0, 2)))
    assert rep.is_finite and rep.pd == 0
    assert rep.note == "already free"


def test_zero_module_resolution():
    from qpdlab.gmod import zero_module
    rep = resolve_module(zero_module(POLY2))
    assert rep.is_finite and rep.pd == NEG_INF


def test_cyclic_module_with_one_relation():
    m = expand(POLY2, [0], [["x"]])  # k[y]
    rep = resolve_module(m)
    assert rep.is_finite and rep.pd == 1
    assert rep.betti == {0: (0,), 1: (1,)}


def test_two_generator_module():
    m = expand(POLY2, [0, 0], [["x"], ["y"]])  # coker (x, y)^T
    rep = resolve_module(m)
    assert rep.is_finite and rep.pd == 1
    assert rep.betti == {0: (0, 0), 1: (1,)}


def test_resolution_is_exact_against_input():
    for m in (k_of(POLY2),
              expand(POLY2, [0], [["x^2", "x*y"]]),
              expand(POLY2, [0, 1], [["x^2", "y^2"], ["y", "x"]])):
        rep = resolve_module(m)
        c = rep.complex
        h0 = c.homology_module(0)
        hi = min(h0.hi, m.hi)
        assert tuple(p for p in h0.dim_vector() if p[0] <= hi) == \
            tuple(p for p in m.dim_vector() if p[0] <= hi)
        for n in range(1, (c.sup if c.sup != NEG_INF else 0) + 1):
            assert c.homology_module(n).is_zero()
        assert c.is_minimal()


# -- resolutions over quotient rings -------------------------------------------

def test_dual_numbers_periodic_resolution():
    rep = resolve_module(k_of(DUAL), h_max=5)
    assert rep.verdict == "at_least" and rep.pd == 5
    assert rep.betti == {s: (s,) for s in range(6)}


def test_fat_point_doubling_betti():
    rep = resolve_module(k_of(FAT), h_max=4)
    assert rep.verdict == "at_least"
    assert [len(rep.betti[i]) for i in range(5)] == [1, 2, 4, 8, 16]


def test_artinian_finite_pd_of_free():
    rep = resolve_module(free_module(DUAL, (1,)))
    assert rep.is_finite and rep.pd == 0


def test_hypersurface_quotient_by_regular_variable_certified():
    # R = k[x,y]/(x^2): y is regular (monomial colon test), so R/(y) gets a
    # certified length-1 resolution even though R is neither artinian nor regular
    r = ring(["x^2"])
    m = expand(r, [0], [["y"]])
    rep = resolve_module(m, h_max=3)
    assert rep.is_finite and rep.pd == 1
    assert rep.betti == {0: (0,), 1: (1,)}


def test_nonmonomial_ideal_kernel_zero_stays_uncertified():
    # over k[x,y]/(x^2+y^2) the element x is regular, but no exact route
    # (monomial colon, artinian bound, domain evaluation) applies
    r = ring(["x^2+y^2"])
    m = expand(r, [0], [["x"]])
    rep = resolve_module(m, h_max=3)
    assert rep.verdict == "at_least"
    assert "no certification route" in rep.note or "cap" in rep.note


# -- resolving complexes ---------------------------------------------------------

def test_resolve_free_complex_minimalizes():
    c = ChainComplex.free(POLY2, {0: (0, 2), 1: (1, 1, 2)},
                          {1: [["x", "y", "0"], ["0", "0", "1"]]})
    rep = resolve(c)
    assert rep.is_finite
    assert rep.betti == {0: (0,), 1: (1, 1)}


def test_resolve_complex_with_single_homology_index():
    c = ChainComplex(POLY2, {2: k_of(POLY2)}, {})
    rep = resolve(c)
    assert rep.is_finite and rep.pd == 4
    assert rep.betti == {2: (0,), 3: (1, 1), 4: (2,)}


def test_resolve_complex_with_spread_homology_rejected():
    m = k_of(POLY2)
    c = ChainComplex(POLY2, {0: m, 2: m}, {})
    with pytest.raises(ResolutionError):
        resolve(c)


def test_cokernel_module_of_koszul():
    k2 = koszul(ChainComplex.free(POLY2, {0: (0,)}, {}), ["x", "y"])
    c1 = cokernel_module(k2, 1)
    assert c1.dim(1) == 2 and c1.dim(2) == 3


# -- Ext ---------------------------------------------------------------------------

def test_ext_k_k_over_plane():
    k = k_of(POLY2)
    exts, rep = ext_modules(k, k, 3)
    assert rep.is_finite
    assert exts[0].dim_vector() == ((0, 1),)
    assert exts[1].dim_vector() == ((-1, 2),)
    assert exts[2].dim_vector() == ((-2, 1),)
    assert exts[3].is_zero()


def test_ext_k_into_ring_concentrated_at_top():
    k = k_of(POLY2)
    r_free = free_module(POLY2, (0,))
    exts, _ = ext_modules(k, r_free, 2)
    assert exts[0].is_zero() and exts[1].is_zero()
    assert exts[2].dim_vector() == ((-2, 1),)


def test_ext_over_dual_numbers_never_dies():
    k = k_of(DUAL)
    exts, rep = ext_modules(k, k, 3)
    assert rep.verdict == "at_least"
    for i in range(3):  # top index of the truncated resolution excluded
        assert exts[i].total_dim() == 1


# -- depth ---------------------------------------------------------------------------

def test_depth_of_polynomial_rings():
    assert ring_depth(POLY2).value == 2
    assert ring_depth(POLY3).value == 3


def test_depth_of_modules():
    assert depth(k_of(POLY2)).value == 0
    assert depth(expand(POLY2, [0], [["x"]])).value == 1  # k[y]
    assert depth(free_module(POLY2, (0,))).value == 2


def test_depth_artinian_ring_is_zero():
    assert ring_depth(DUAL).value == 0
    assert ring_depth(FAT).value == 0


def test_depth_zero_module():
    from qpdlab.gmod import zero_module
    assert depth(zero_module(POLY2)).value == POS_INF


def test_classical_auslander_buchsbaum():
    mods = [k_of(POLY2),
            expand(POLY2, [0], [["x"]]),
            expand(POLY2, [0, 0], [["x"], ["y"]]),
            expand(POLY2, [0], [["x^2", "x*y"]])]
    for m in mods:
        rep = resolve_module(m)
        assert rep.is_finite
        assert rep.pd + depth(m).value == 2


def test_residue_resolution_is_cached():
    a = residue_resolution(POLY2, 3)
    b = residue_resolution(POLY2, 3)
    assert a is b
