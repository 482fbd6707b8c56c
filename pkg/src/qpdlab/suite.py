"""Verification suite: reproduce the worked examples and law families.

Each item is a pure function of the seed; items run in a thread pool capped
by QPDLAB_THREADS. Statuses: PASS, FAIL, SKIPPED (feature disabled), and
EXPECTED-DISCREPANCY for the one item whose computed certificate contradicts
the pinned expectation and is reported rather than resolved (the
quotient-by-a-variable item over the two-variable complete intersection: a
value-0 certificate exists and is attached).
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor

from .complexes import ChainComplex, koszul, minimalize
from .gmod import expand, free_module, is_isomorphic, mult_map
from .linalg import PrimeField
from .qpd import (
    builder_direct_sum,
    builder_koszul_transfer,
    builder_power_reduction,
    builder_split_reduction,
    check_qpr,
    homology_bound,
    qpd_eval,
    search,
    QpdCertificate,
)
from .ring import QuotientRing, classify
from .vnr import ProductRing, quasi_iso_to_homology, random_product_complex, vnr_pd


def _ring(p, names, gens, trunc=6):
    return QuotientRing.build(PrimeField(p), names, gens, truncation=trunc)


def _residue(r):
    return expand(r, [0], [[n for n in r.names]])


def _fail(detail, **data):
    return "FAIL", detail, data


def _ok(detail="", **data):
    return "PASS", detail, data


# -- items ------------------------------------------------------------------------


def item_two_term_complex(p, seed, enable_search):
    r = _ring(p, ("x", "y"), [])
    c = ChainComplex.free(r, {0: (0,), 1: (1, 1)}, {1: [["x", "y"]]})
    v = qpd_eval(c, seed=seed)
    if not (v.kind == "certified" and v.exact and v.value == 0):
        return _fail(f"expected certified exact 0, got {v.kind} {v.value}")
    rep = homology_bound(c, seed=seed)
    if rep.get("rhs") != 2 or not rep.get("strict"):
        return _fail(f"homology bound expected strict 0 < 2, got {rep}")
    return _ok("qpd 0, homology bound 2, strict", value=v.value,
               rhs=rep["rhs"])


def _ab_instances(p):
    poly1 = _ring(p, ("x",), [])
    poly2 = _ring(p, ("x", "y"), [])
    dual = _ring(p, ("x",), ["x^2"])
    ci = _ring(p, ("x", "y"), ["x^2", "y^2"])
    hyper = _ring(p, ("x", "y"), ["y^2"])
    out = [
        ("free/k[x]", free_module(poly1, (0,))),
        ("free-shifted/k[x]", free_module(poly1, (2,))),
        ("free-rank2/k[x]", free_module(poly1, (0, 1))),
        ("k/k[x]", _residue(poly1)),
        ("R/(x^2)/k[x]", expand(poly1, [0], [["x^2"]])),
        ("R/(x^3)/k[x]", expand(poly1, [0], [["x^3"]])),
        ("free/k[x,y]", free_module(poly2, (0,))),
        ("free-mixed/k[x,y]", free_module(poly2, (0, 1, 3))),
        ("k/k[x,y]", _residue(poly2)),
        ("R/(x)/k[x,y]", expand(poly2, [0], [["x"]])),
        ("R/(y)/k[x,y]", expand(poly2, [0], [["y"]])),
        ("R/(x,y^2)/k[x,y]", expand(poly2, [0], [["x", "y^2"]])),
        ("koszul-x/k[x,y]", koszul(free_module(poly2, (0,)),
                                   [poly2.parse("x")])),
        ("koszul-xy/k[x,y]", koszul(free_module(poly2, (0,)),
                                    [poly2.parse("x"), poly2.parse("y")])),
        ("syzygy-complex/k[x,y]",
         ChainComplex.free(poly2, {0: (0,), 1: (1, 1)}, {1: [["x", "y"]]})),
        ("shifted-sum/k[x,y]",
         ChainComplex(poly2, {0: _residue(poly2), 1: _residue(poly2)}, {})),
        ("k/dual", _residue(dual)),
        ("free/dual", free_module(dual, (0, 2))),
        ("k/ci", _residue(ci)),
        ("free/ci", free_module(ci, (1,))),
        ("k/hyper", _residue(hyper)),
    ]
    return out


def item_ab_identity(p, seed, enable_search):
    bad = []
    n = 0
    for name, m in _ab_instances(p):
        v = qpd_eval(m, seed=seed)
        if not (v.kind == "certified" and v.exact):
            bad.append(f"{name}: not certified exact ({v.kind})")
            continue
        n += 1
        if v.value is not None and isinstance(v.value, int):
            lhs = v.value + v.ab["hsup"]
            rhs = v.ab["depth_R"] - v.ab["depth_M"]
            if lhs != rhs:
                bad.append(f"{name}: {lhs} != {rhs}")
    if bad:
        return _fail("; ".join(bad))
    if n < 20:
        return _fail(f"only {n} certified instances, need 20")
    return _ok(f"{n} instances, identity exact on all", instances=n)


def item_comparison(p, seed, enable_search):
    checks = []
    poly2 = _ring(p, ("x", "y"), [])
    from .resolution import resolve_module

    for name, m in [("k", _residue(poly2)),
                    ("R/(x)", expand(poly2, [0], [["x"]])),
                    ("free", free_module(poly2, (0, 2)))]:
        rep = resolve_module(m, seed=seed)
        v = qpd_eval(m, seed=seed)
        if not (rep.is_finite and v.kind == "certified"):
            return _fail(f"{name}: pd or qpd did not certify")
        if v.value != rep.pd - 0:
            return _fail(f"{name}: qpd {v.value} != pd {rep.pd} - hsup 0")
        checks.append(name)
    if not enable_search:
        return "SKIPPED", "search disabled", {}
    dual2 = _ring(2, ("x",), ["x^2"])
    k = _residue(dual2)
    cert, counters = search(k, window=4, max_rank=3, seed=seed)
    if cert is None or cert.value != 0:
        return _fail("search did not find the value-0 certificate")
    v = qpd_eval(k, seed=seed)
    if v.value != cert.value:
        return _fail(f"search {cert.value} != builder {v.value}")
    return _ok(f"pd comparison on {len(checks)} instances; search agrees "
               f"at value 0", enumerated=counters["enumerated"])


def item_direct_sum(p, seed, enable_search):
    poly2 = _ring(p, ("x", "y"), [])
    poly1 = _ring(p, ("x",), [])
    certs = {
        "k2": check_qpr(koszul(free_module(poly2, (0,)),
                               [poly2.parse("x"), poly2.parse("y")]),
                        _residue(poly2), seed=seed),
        "free2": check_qpr(ChainComplex.from_module(free_module(poly2, (0,))),
                           free_module(poly2, (0,)), seed=seed),
        "syz": None,
        "k1": check_qpr(koszul(free_module(poly1, (0,)),
                               [poly1.parse("x")]), _residue(poly1),
                        seed=seed),
        "free1": check_qpr(ChainComplex.from_module(free_module(poly1, (1,))),
                           free_module(poly1, (1,)), seed=seed),
        "sq1": check_qpr(
            ChainComplex.free(poly1, {0: (0,), 1: (2,)}, {1: [["x^2"]]}),
            expand(poly1, [0], [["x^2"]]), seed=seed),
    }
    c = ChainComplex.free(poly2, {0: (0,), 1: (1, 1)}, {1: [["x", "y"]]})
    certs["syz"] = check_qpr(c, c, seed=seed)
    pool2 = [certs["k2"], certs["free2"], certs["syz"]]
    pool1 = [certs["k1"], certs["free1"], certs["sq1"]]
    pairs = [(a, b) for i, a in enumerate(pool2) for b in pool2[i:]]
    pairs += [(a, b) for i, a in enumerate(pool1) for b in pool1[i:]]
    done = 0
    for a, b in pairs:
        ds = builder_direct_sum(a, b, seed=seed, both_exact=True)
        if not isinstance(ds, QpdCertificate):
            return _fail(f"pair did not certify: {ds}")
        again = check_qpr(ds.resolution, ds.target, seed=seed + 1)
        if not isinstance(again, QpdCertificate) or again.value != ds.value:
            return _fail("re-verification failed on a direct sum")
        lhs = ds.value + int(ds.target.hsup)
        rhs = max(a.value + int(a.target.hsup), b.value + int(b.target.hsup))
        if lhs != rhs:
            return _fail(f"sum identity {lhs} != {rhs}")
        done += 1
    if done < 10:
        return _fail(f"only {done} pairs, need 10")
    return _ok(f"{done} pairs verified with the sum identity exact",
               pairs=done)


def _transfer_instances(p):
    poly1 = _ring(p, ("x",), [])
    poly2 = _ring(p, ("x", "y"), [])
    hyper = _ring(p, ("x", "y"), ["y^2"])
    out = [
        (poly1, free_module(poly1, (0,)), "x"),
        (poly1, free_module(poly1, (2,)), "x"),
        (poly1, _residue(poly1), "x"),
        (poly2, free_module(poly2, (0,)), "x"),
        (poly2, free_module(poly2, (0, 1)), "y"),
        (poly2, expand(poly2, [0], [["y"]]), "x"),
        (poly2, expand(poly2, [0], [["x"]]), "y"),
        (poly2, expand(poly2, [0], [["y^2"]]), "x"),
        (poly2, expand(poly2, [0], [["x+y"]]), "x"),
        (poly2, _residue(poly2), "x"),
        (hyper, free_module(hyper, (0,)), "x"),
    ]
    return out


def item_koszul_transfer(p, seed, enable_search):
    from .resolution import resolve_module

    done = 0
    for ring, m, xname in _transfer_instances(p):
        rep = resolve_module(m, seed=seed)
        if not rep.is_finite:
            return _fail(f"instance over {ring} has uncertified pd")
        cert = check_qpr(rep.complex, m, seed=seed)
        if not isinstance(cert, QpdCertificate):
            return _fail(f"base certificate failed over {ring}")
        x = ring.parse(xname)
        tr = builder_koszul_transfer(cert, x, seed=seed)
        if not isinstance(tr, QpdCertificate):
            return _fail(f"transfer failed over {ring}: {tr}")
        again = check_qpr(tr.resolution, tr.target, seed=seed + 1)
        if not isinstance(again, QpdCertificate) or again.value != tr.value:
            return _fail(f"transfer re-verification failed over {ring}")
        # degreewise: H_j(K(x;P)) has the dimensions of H_j(P) over R/(x)
        kp = koszul(cert.resolution, [x])
        hk = kp.homology()
        hp = cert.resolution.homology()
        e = x.degree(ring.weights)
        horizon = min(h.hi for src in (hk, hp) for h in src.values()) \
            if hk and hp else 0
        for j, h in hp.items():
            mm = mult_map(h, x)      # block(d) is H_{d-e} -> H_d
            for d in range(h.lo, horizon + 1):
                want = h.dim(d) - mm.block(d).rank()
                got = hk[j].dim(d) if j in hk else 0
                if d <= horizon and want != got:
                    return _fail(f"degreewise mismatch at H_{j} degree {d}: "
                                 f"{got} != {want}")
        done += 1
    if done < 10:
        return _fail(f"only {done} instances, need 10")
    return _ok(f"{done} transfers re-verified, degreewise dims match",
               instances=done)


def item_reduction_laws(p, seed, enable_search):
    poly1 = _ring(p, ("x",), [])
    base = check_qpr(koszul(free_module(poly1, (0,)), [poly1.parse("x")]),
                     _residue(poly1), seed=seed)
    pw = builder_power_reduction(base, "x", 2, seed=seed)
    if not isinstance(pw, QpdCertificate) or pw.value != 0:
        return _fail("power reduction n=2 did not give value 0")
    again = check_qpr(pw.resolution, pw.target, seed=seed + 1)
    if not isinstance(again, QpdCertificate):
        return _fail("power certificate does not re-verify")
    sp = builder_split_reduction(base, ["x"], seed=seed)
    if not isinstance(sp, QpdCertificate):
        return _fail(f"split reduction failed: {sp}")
    again = check_qpr(sp.resolution, sp.target, seed=seed + 1)
    if not isinstance(again, QpdCertificate):
        return _fail("split certificate does not re-verify")
    # descent equality: value over R = value over R/(y) plus one
    poly2 = _ring(p, ("x", "y"), [])
    down = _ring(p, ("x", "y"), ["y"])
    v_top = qpd_eval(_residue(poly2), seed=seed)
    v_down = qpd_eval(_residue(down), seed=seed)
    if not (v_top.exact and v_down.exact
            and v_top.value == v_down.value + 1):
        return _fail(f"descent equality failed: {v_top.value} vs "
                     f"{v_down.value} + 1")
    # bound through pd: value <= pd - hsup - d on the hypersurface instance
    hyper = _ring(p, ("x", "y"), ["y^2"])
    v = qpd_eval(_residue(hyper), seed=seed)
    if not (v.kind == "certified" and v.value == 1):
        return _fail(f"hypersurface residue field: expected 1, got {v.value}")
    return _ok("power, split, descent equality, hypersurface bound all hold")


def item_ring_classification(p, seed, enable_search):
    ci = classify(_ring(p, ("x", "y"), ["x^2", "y^2"]))
    if not (ci.is_complete_intersection and not ci.is_hypersurface):
        return _fail("k[x,y]/(x^2,y^2) misclassified")
    fat = classify(_ring(p, ("x", "y"), ["x^2", "x*y", "y^2"], trunc=4))
    if (fat.is_complete_intersection or fat.edim != 2 or fat.mu != 3
            or fat.is_burch is not True):
        return _fail("k[x,y]/(x^2,xy,y^2) misclassified")
    dual = classify(_ring(p, ("x",), ["x^2"]))
    if not dual.is_hypersurface:
        return _fail("k[x]/(x^2) misclassified")
    return _ok("three pinned classifications match",
               fat_mu=fat.mu, fat_edim=fat.edim)


def item_minimalization(p, seed, enable_search):
    from random import Random

    # Koszul pieces padded with contractible identity squares
    poly2 = _ring(p, ("x", "y"), [])
    rng = Random(seed)
    done = 0
    for i in range(20):
        base = koszul(free_module(poly2, (rng.randrange(0, 2),)),
                      [poly2.parse(poly2.names[rng.randrange(2)])])
        s = rng.randrange(0, 3)
        pad = ChainComplex.free(poly2, {s: (1,), s + 1: (1,)},
                                {s + 1: [["1"]]})
        c = base.direct_sum(pad)
        m = minimalize(c)
        if not m.is_minimal():
            return _fail(f"instance {i}: output not minimal")
        hc, hm = c.homology(), m.homology()
        if sorted(hc) != sorted(hm):
            return _fail(f"instance {i}: homology support changed")
        for n in hc:
            if hc[n].dims != hm[n].dims:
                return _fail(f"instance {i}: homology dims changed at {n}")
        if m.betti() != base.betti():
            return _fail(f"instance {i}: betti differs from the unpadded "
                         f"complex")
        done += 1
    return _ok(f"{done} padded complexes minimalized with homology intact",
               instances=done)


def item_product_rings(p, seed, enable_search):
    r = ProductRing.build([5, 5])
    done = 0
    for i in range(50):
        c = random_product_complex(r, seed=seed * 1000 + i)
        q = quasi_iso_to_homology(c)
        if not q["verified"]:
            return _fail(f"instance {i}: quasi-isomorphism failed")
        v = qpd_eval(c)
        pd = vnr_pd(c)
        if (v.value == 0) != (pd == 0):
            return _fail(f"instance {i}: qpd/pd finiteness disagree")
        done += 1
    return _ok(f"{done} complexes quasi-isomorphic to homology; qpd = pd",
               instances=done)


def item_infinite_behavior(p, seed, enable_search):
    fat = _ring(p, ("x", "y"), ["x^2", "x*y", "y^2"], trunc=4)
    m = expand(fat, [0], [["x"]])
    v = qpd_eval(m, seed=seed, enable_search=enable_search,
                 search_window=2, search_rank=2, max_candidates=2000)
    if v.kind != "not_found_within_bounds":
        return _fail(f"expected not_found_within_bounds, got {v.kind}")
    if not v.note:
        return _fail("no budget/failure report attached")
    return _ok("bounded failure reported, infinity never certified",
               budgets=v.budgets)


def item_quotient_by_variable_discrepancy(p, seed, enable_search):
    ci = _ring(p, ("x", "y"), ["x^2", "y^2"])
    m = expand(ci, [0], [["x"]])
    v = qpd_eval(m, seed=seed)
    if v.kind == "certified" and v.value == 0:
        return ("EXPECTED-DISCREPANCY",
                "a value-0 certificate exists for R/(x) over "
                "k[x,y]/(x^2,y^2); the pinned expectation is that no "
                "bounded resolution exists, the engine attaches its "
                "certificate instead of suppressing it",
                {"certificate": v.certificate.describe()})
    return _fail(f"expected the value-0 certificate, got {v.kind} {v.value}")


def item_determinism(p, seed, enable_search):
    from .jsonio import dumps, qpd_json

    ci = _ring(p, ("x", "y"), ["x^2", "y^2"])
    outs = []
    for _ in range(2):
        v = qpd_eval(_residue(ci), seed=seed)
        outs.append(dumps(qpd_json(v)))
    if outs[0] != outs[1]:
        return _fail("repeated evaluation differs byte-for-byte")
    return _ok("repeated evaluation is byte-identical")


ITEMS = [
    ("two-term-complex", item_two_term_complex),
    ("ab-identity-family", item_ab_identity),
    ("pd-comparison-and-search", item_comparison),
    ("direct-sum-law", item_direct_sum),
    ("koszul-transfer", item_koszul_transfer),
    ("reduction-laws", item_reduction_laws),
    ("ring-classification", item_ring_classification),
    ("minimalization", item_minimalization),
    ("product-rings", item_product_rings),
    ("infinite-qpd-behavior", item_infinite_behavior),
    ("quotient-by-variable-discrepancy", item_quotient_by_variable_discrepancy),
    ("determinism", item_determinism),
]

OK_STATUSES = {"PASS", "SKIPPED", "EXPECTED-DISCREPANCY"}


def verify_paper_suite(seed: int = 0, p: int = 101,
                       enable_search: bool = True, threads=None) -> dict:
    """Run every suite item; the report is ok iff nothing FAILs."""
    if threads is None:
        threads = int(os.environ.get("QPDLAB_THREADS", "0")) or None

    def run(pair):
        name, fn = pair
        t0 = time.perf_counter()
        try:
            status, detail, data = fn(p, seed, enable_search)
        except Exception as e:   # an item crash is a failure, not a crash
            status, detail, data = "FAIL", f"exception: {e!r}", {}
        return {
            "name": name,
            "status": status,
            "detail": detail,
            "data": data,
            "seconds": round(time.perf_counter() - t0, 3),
        }

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, ITEMS))
    else:
        results = [run(pair) for pair in ITEMS]
    ok = all(r["status"] in OK_STATUSES for r in results)
    return {
        "suite": {
            "seed": seed,
            "field": p,
            "search_enabled": bool(enable_search),
            "items": results,
            "all_ok": ok,
        }
    }
