"""Products of prime fields: modules, complexes, the short-circuit evaluator."""

from __future__ import annotations

import numpy as np
import pytest

from qpdlab.complexes import NEG_INF
from qpdlab.linalg import Matrix, PrimeField
from qpdlab.qpd import qpd_eval
from qpdlab.vnr import (
    ProductBuildError,
    ProductComplex,
    ProductModule,
    ProductRing,
    quasi_iso_to_homology,
    random_product_complex,
    vnr_pd,
    vnr_qpd_eval,
)

R55 = ProductRing.build([5, 5])
R23 = ProductRing.build([2, 3])


def mat(field, rows):
    return Matrix(field, np.array(rows, dtype=np.int64).reshape(
        len(rows), len(rows[0]) if rows else 0))


def test_product_ring_repr_and_factors():
    assert R55.nfactors == 2
    assert repr(R23) == "F2 x F3"


def test_module_validation():
    with pytest.raises(ProductBuildError):
        ProductModule(R55, (1,))
    with pytest.raises(ProductBuildError):
        ProductModule(R55, (1, -1))
    assert ProductModule(R55, (0, 0)).is_zero()


def test_complex_shape_and_d_squared_checks():
    t = {0: ProductModule(R55, (1, 1)), 1: ProductModule(R55, (1, 1))}
    bad_shape = {1: [mat(R55.factors[0], [[1, 0]]),
                     mat(R55.factors[1], [[1]])]}
    with pytest.raises(ProductBuildError, match="shape"):
        ProductComplex(R55, t, bad_shape)
    t3 = {n: ProductModule(R55, (1, 1)) for n in (0, 1, 2)}
    ident = lambda f: mat(R55.factors[f], [[1]])
    with pytest.raises(ProductBuildError, match="d_1 o d_2"):
        ProductComplex(R55, t3, {1: [ident(0), ident(1)],
                                 2: [ident(0), ident(1)]})


def test_homology_of_contractible_pair_vanishes_in_that_factor():
    t = {0: ProductModule(R55, (1, 1)), 1: ProductModule(R55, (1, 0))}
    d = {1: [mat(R55.factors[0], [[1]]), Matrix.zeros(R55.factors[1], 1, 0)]}
    c = ProductComplex(R55, t, d)
    assert {n: h.dims for n, h in c.homology().items()} == {0: (0, 1)}


def test_quasi_iso_onto_homology_is_verified_not_assumed():
    c = random_product_complex(R55, seed=3)
    q = quasi_iso_to_homology(c)
    assert q["verified"]
    # chain map: composite with the differential vanishes per factor
    for n, mats in c.diffs.items():
        if (n - 1) in q["maps"]:
            for f in range(R55.nfactors):
                assert (q["maps"][n - 1][f] @ mats[f]).is_zero()
    # induced map on homology hits the full homology dimension
    for n, hm in q["homology"].items():
        for f in range(R55.nfactors):
            ker = c.diff(n)[f].kernel_basis()
            assert (q["maps"][n][f] @ ker).rank() == hm.dims[f]


def test_pd_and_qpd_agree_and_are_zero_or_neg_inf():
    assert vnr_pd(ProductModule(R55, (2, 0))) == 0
    assert vnr_pd(ProductModule(R55, (0, 0))) is NEG_INF
    v = vnr_qpd_eval(ProductModule(R55, (1, 2)))
    assert (v.kind, v.value, v.exact) == ("certified", 0, True)


def test_zero_complex_evaluates_to_minus_infinity():
    t = {0: ProductModule(R55, (1, 1)), 1: ProductModule(R55, (1, 1))}
    d = {1: [mat(R55.factors[0], [[1]]), mat(R55.factors[1], [[2]])]}
    v = vnr_qpd_eval(ProductComplex(R55, t, d))
    assert v.value is NEG_INF


def test_qpd_eval_dispatches_product_inputs():
    v = qpd_eval(ProductModule(R23, (1, 1)))
    assert (v.kind, v.value, v.exact) == ("certified", 0, True)
    v = qpd_eval(random_product_complex(R23, seed=11))
    assert v.kind == "certified"
    assert v.value in (0, NEG_INF)


def test_ab_fields_reflect_homology_position():
    c = random_product_complex(R55, seed=7)
    h = c.homology()
    v = vnr_qpd_eval(c)
    if h:
        assert v.ab["hsup"] == max(h)
        assert v.ab["depth_R"] - v.ab["depth_M"] == v.value + v.ab["hsup"]


@pytest.mark.parametrize("seed", range(12))
def test_random_complexes_verify_quasi_iso(seed):
    c = random_product_complex(R55, seed=seed)
    assert quasi_iso_to_homology(c)["verified"]
    v = vnr_qpd_eval(c)
    assert v.exact
    assert (v.value == 0) == bool(c.homology())
