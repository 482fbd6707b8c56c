"""JSON documents in, JSON reports out.

Input documents carry a ring description plus optionally a module or a
complex; every parse error names the position that failed. Reports encode
unbounded values as the strings "-infinity" / "infinity" since JSON has no
integer infinities, and all serialization is key-sorted so identical inputs
produce identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import asdict

from .complexes import NEG_INF, POS_INF, ChainComplex
from .gmod import GradedModule, expand
from .linalg import PrimeField
from .ring import QuotientRing, RingClassification


class DocumentError(ValueError):
    """Malformed input document; the message names the failing position."""


def _get(obj, key, kind, path, optional=False, default=None):
    if not isinstance(obj, dict):
        raise DocumentError(f"at {path}: expected an object")
    if key not in obj:
        if optional:
            return default
        raise DocumentError(f"at {path}: missing key {key!r}")
    v = obj[key]
    if kind is not None and not isinstance(v, kind):
        names = kind.__name__ if isinstance(kind, type) else \
            "/".join(k.__name__ for k in kind)
        raise DocumentError(f"at {path}.{key}: expected {names}, "
                            f"got {type(v).__name__}")
    return v


# -- parsing ---------------------------------------------------------------------


def parse_ring(doc) -> QuotientRing:
    fdoc = _get(doc, "field", dict, "$")
    p = _get(fdoc, "p", int, "$.field")
    rdoc = _get(doc, "ring", dict, "$")
    names = _get(rdoc, "vars", list, "$.ring")
    if not names or not all(isinstance(v, str) and v.isidentifier()
                            for v in names):
        raise DocumentError("at $.ring.vars: need a nonempty list of "
                            "identifiers")
    weights = _get(rdoc, "var_degrees", list, "$.ring", optional=True,
                   default=[1] * len(names))
    if len(weights) != len(names) or not all(
            isinstance(w, int) and w >= 1 for w in weights):
        raise DocumentError("at $.ring.var_degrees: need one positive "
                            "integer per variable")
    ideal = _get(rdoc, "ideal", list, "$.ring", optional=True, default=[])
    order = _get(rdoc, "order", str, "$.ring", optional=True,
                 default="degrevlex")
    trunc = _get(rdoc, "truncation", int, "$.ring", optional=True, default=6)
    if trunc < 1:
        raise DocumentError("at $.ring.truncation: must be positive")
    try:
        field = PrimeField(p)
    except ValueError as e:
        raise DocumentError(f"at $.field.p: {e}") from None
    gens = []
    for i, s in enumerate(ideal):
        if not isinstance(s, str):
            raise DocumentError(f"at $.ring.ideal[{i}]: expected a string")
        gens.append(s)
    try:
        return QuotientRing.build(field, names, gens, weights=weights,
                                  order_kind=order, truncation=trunc)
    except ValueError as e:
        raise DocumentError(f"at $.ring: {e}") from None


def ring_doc(r: QuotientRing) -> dict:
    return {
        "field": {"p": r.field.p},
        "ring": {
            "vars": list(r.names),
            "var_degrees": list(r.weights),
            "ideal": [r.fmt(g) for g in r.gb.generators],
            "order": r.order.kind,
            "truncation": r.D,
        },
    }


def parse_module(doc, ring: QuotientRing, path="$.module") -> GradedModule:
    gens = _get(doc, "generators", list, path)
    shifts = []
    for i, g in enumerate(gens):
        shifts.append(_get(g, "shift", int, f"{path}.generators[{i}]"))
    rels = _get(doc, "relations", list, path, optional=True, default=[])
    if rels and len(rels) != len(shifts):
        raise DocumentError(f"at {path}.relations: need one row per "
                            f"generator ({len(shifts)}), got {len(rels)}")
    rows = []
    for i, row in enumerate(rels):
        if not isinstance(row, list) or not all(isinstance(e, str)
                                                for e in row):
            raise DocumentError(f"at {path}.relations[{i}]: expected a list "
                                f"of polynomial strings")
        rows.append(row)
    try:
        return expand(ring, shifts, rows)
    except ValueError as e:
        raise DocumentError(f"at {path}: {e}") from None


def parse_complex(doc, ring: QuotientRing, path="$.complex") -> ChainComplex:
    lo = _get(doc, "min_index", int, path, optional=True, default=0)
    tdocs = _get(doc, "terms", list, path)
    if not tdocs:
        raise DocumentError(f"at {path}.terms: need at least one term")
    shifts, modules = {}, {}
    for i, td in enumerate(tdocs):
        tpath = f"{path}.terms[{i}]"
        if not isinstance(td, dict):
            raise DocumentError(f"at {tpath}: expected an object")
        if "free" in td:
            pairs = _get(td, "free", list, tpath)
            flat = []
            for j, pr in enumerate(pairs):
                if (not isinstance(pr, list) or len(pr) != 2
                        or not all(isinstance(x, int) for x in pr)):
                    raise DocumentError(f"at {tpath}.free[{j}]: expected "
                                        f"[shift, rank]")
                sh, rank = pr
                if rank < 0:
                    raise DocumentError(f"at {tpath}.free[{j}]: negative rank")
                flat.extend([sh] * rank)
            shifts[lo + i] = tuple(flat)
        elif "module" in td:
            modules[lo + i] = parse_module(td["module"], ring,
                                           path=f"{tpath}.module")
        else:
            raise DocumentError(f"at {tpath}: need 'free' or 'module'")
    ddocs = _get(doc, "diffs", list, path, optional=True, default=[])
    if modules and ddocs:
        raise DocumentError(f"at {path}.diffs: differentials are only "
                            f"supported between free terms")
    if modules:
        terms = dict(modules)
        for n, sh in shifts.items():
            from .gmod import free_module
            terms[n] = free_module(ring, sh)
        return ChainComplex(ring, terms, {})
    mats = {}
    for i, m in enumerate(ddocs):
        dpath = f"{path}.diffs[{i}]"
        if not isinstance(m, list) or not all(
                isinstance(row, list) and all(isinstance(e, str) for e in row)
                for row in m):
            raise DocumentError(f"at {dpath}: expected a matrix of "
                                f"polynomial strings")
        mats[lo + i + 1] = m
    try:
        return ChainComplex.free(ring, shifts, mats, check=True)
    except ValueError as e:
        raise DocumentError(f"at {path}: {e}") from None


def complex_doc(c: ChainComplex) -> dict:
    """Document form of a free complex; round-trips through parse_complex.

    Term rows are emitted one generator at a time so the differential
    matrices keep their column order under a round trip.
    """
    if not c.is_free:
        raise ValueError("complex documents need a free complex")
    if not c.shifts:
        return {"complex": {"min_index": 0, "terms": [{"free": []}],
                            "diffs": []}}
    lo, hi = min(c.shifts), max(c.shifts)
    terms = [{"free": [[int(s), 1] for s in c.shifts.get(n, ())]}
             for n in range(lo, hi + 1)]
    diffs = []
    for n in range(lo + 1, hi + 1):
        m = c.mats.get(n)
        rows = len(c.shifts.get(n - 1, ()))
        cols = len(c.shifts.get(n, ()))
        if m is None:
            diffs.append([["0"] * cols for _ in range(rows)])
        else:
            diffs.append([[c.ring.fmt(e) for e in row] for row in m])
    return {"complex": {"min_index": lo, "terms": terms, "diffs": diffs}}


def parse_document(doc) -> dict:
    """Parse a full input document into {'ring', 'module'?, 'complex'?}."""
    if not isinstance(doc, dict):
        raise DocumentError("at $: expected a JSON object")
    out = {"ring": parse_ring(doc)}
    if "module" in doc:
        out["module"] = parse_module(doc["module"], out["ring"])
    if "complex" in doc:
        out["complex"] = parse_complex(doc["complex"], out["ring"])
    return out


def load_document(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as e:
        raise DocumentError(f"cannot read {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise DocumentError(f"{path}: line {e.lineno} column {e.colno}: "
                            f"{e.msg}") from None
    return parse_document(doc)


# -- report encoding ----------------------------------------------------------------


def enc_value(v):
    if v is NEG_INF:
        return "-infinity"
    if v is POS_INF:
        return "infinity"
    return v


def betti_rows(betti: dict) -> list:
    """Rows [index, [count per distinct generator degree, ascending]]."""
    rows = []
    for n in sorted(betti):
        sh = betti[n]
        degs = sorted(set(sh))
        rows.append([n, [sum(1 for s in sh if s == d) for d in degs]])
    return rows


def graded_betti_rows(betti: dict) -> list:
    rows = []
    for n in sorted(betti):
        sh = betti[n]
        degs = sorted(set(sh))
        rows.append([n, [[d, sum(1 for s in sh if s == d)] for d in degs]])
    return rows


def pd_json(rep) -> dict:
    out = {
        "pd": {"verdict": rep.verdict, "value": enc_value(rep.pd)},
        "betti": betti_rows(rep.betti),
    }
    if rep.note:
        out["pd"]["note"] = rep.note
    return out


def depth_json(dr) -> dict:
    out = {"value": enc_value(dr.value), "exact": dr.exact}
    if dr.witness_index is not None:
        out["witness_index"] = dr.witness_index
    if dr.note:
        out["note"] = dr.note
    return {"depth": out}


def qpd_json(v) -> dict:
    body = {"verdict": v.kind, "exact": bool(v.exact)}
    if v.value is not None:
        body["value"] = enc_value(v.value)
    if v.ab is not None and all(
            isinstance(v.ab.get(k), int) for k in ("depth_R", "depth_M",
                                                   "hsup")):
        body["ab_check"] = {k: v.ab[k] for k in ("depth_R", "depth_M",
                                                 "hsup")}
    if v.note:
        body["note"] = v.note
    if v.certificate is not None:
        body["certificate"] = v.certificate.describe()
    if v.budgets:
        body["budgets"] = {k: v.budgets[k] for k in sorted(v.budgets)}
    return {"qpd": body}


def classification_json(c: RingClassification) -> dict:
    d = asdict(c)
    return {
        "classification": {
            "ci": d["is_complete_intersection"],
            "hypersurface": d["is_hypersurface"],
            "burch": d["is_burch"],
            "artinian": d["is_artinian"],
            "edim": d["edim"],
            "mu": d["mu"],
            "krull_dim": d["krull_dim"],
            "conormal_free": d["conormal_free"],
        }
    }


def module_dims_rows(m: GradedModule) -> list:
    return [[d, m.dims[d]] for d in sorted(m.dims)]


def homology_json(c: ChainComplex) -> dict:
    h = c.homology()
    return {"homology": [[n, module_dims_rows(h[n])] for n in sorted(h)]}


def invariants_json(c: ChainComplex) -> dict:
    h = c.homology()
    return {
        "invariants": {
            "sup": enc_value(c.sup),
            "inf": enc_value(min(c.terms) if c.terms else POS_INF),
            "hsup": enc_value(c.hsup),
            "hinf": enc_value(min(h) if h else POS_INF),
            "amp": enc_value(c.amp),
            "is_minimal": c.is_minimal() if c.is_free else None,
        }
    }


def dumps(report: dict, pretty: bool = False) -> str:
    if pretty:
        return json.dumps(report, sort_keys=True, indent=2)
    return json.dumps(report, sort_keys=True, separators=(",", ":"))
