"""Command line front end.

JSON in, JSON out. Exit codes: 0 when the requested value was computed,
1 on malformed input (documents or flags), 2 when budgets ran out or a
verification failed; the partial report is still emitted in that case.
Reports echo the full command line and seed, so any report can be re-run
from its own header.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from .complexes import ChainComplex, minimalize
from .jsonio import (
    DocumentError,
    betti_rows,
    classification_json,
    complex_doc,
    depth_json,
    dumps,
    homology_json,
    invariants_json,
    module_dims_rows,
    parse_document,
    pd_json,
    qpd_json,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_BUDGET = 2


class _InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # exit 1 on bad flags; argparse's default of 2 is reserved for budgets
    def error(self, message):
        raise _InputError(message)


def _positive(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qpdlab",
                 description="exact graded homological algebra over F_p")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, help, doc=True, hmax=False, search=False):
        p = sub.add_parser(name, help=help)
        if doc:
            p.add_argument("document", help="input JSON document")
            p.add_argument("--truncation", type=_positive, metavar="D",
                           help="override the document's degree window")
        p.add_argument("--trials", type=_positive, default=64)
        p.add_argument("--seed", type=int, default=0)
        if hmax:
            p.add_argument("--hmax", type=_positive, metavar="N",
                           help="homological cutoff for resolutions")
        if search:
            p.add_argument("--search", action="store_true",
                           help="enable the enumeration fallback")
            p.add_argument("--search-rank", type=_positive, metavar="R")
            p.add_argument("--search-window", type=_positive, metavar="W")
            p.add_argument("--max-candidates", type=_positive,
                           default=200_000)
        p.add_argument("--out", metavar="PATH",
                       help="write the report here instead of stdout")
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--json", action="store_true",
                         help="compact JSON (default)")
        fmt.add_argument("--pretty", action="store_true")
        return p

    cmd("ring-classify", "classify the ring of the document")
    cmd("homology", "graded homology of the document's complex or module")
    cmd("invariants", "sup, inf, hsup, hinf, amp, minimality")
    cmd("minimize", "strip contractible summands from a free complex")
    cmd("resolve", "minimal free resolution and projective dimension",
        hmax=True)
    cmd("depth", "depth of the module/complex, or of the ring itself",
        hmax=True)
    cmd("ext", "Ext^i(k, M) dimension tables", hmax=True)
    cmd("qpd", "quasi-projective dimension with certificate",
        hmax=True, search=True)
    p = cmd("verify-paper-suite", "run the whole verification suite",
            doc=False)
    p.add_argument("--field", type=_positive, default=101, metavar="P",
                   help="prime for the suite's ambient field")
    p.add_argument("--no-search", action="store_true",
                   help="skip search-dependent items")
    p.add_argument("--threads", type=_positive,
                   help="item parallelism (also QPDLAB_THREADS)")
    return ap


# -- dispatch -----------------------------------------------------------------------


def _want(parsed, key, what):
    obj = parsed.get(key)
    if obj is None:
        raise DocumentError(f"this command needs a '{key}' section ({what})")
    return obj


def _as_complex(parsed):
    if "complex" in parsed:
        return parsed["complex"]
    if "module" in parsed:
        return ChainComplex.from_module(parsed["module"])
    raise DocumentError("this command needs a 'module' or 'complex' section")


def _load(args):
    try:
        with open(args.document) as fh:
            doc = json.load(fh)
    except OSError as e:
        raise DocumentError(f"cannot read {args.document}: {e}") from None
    except json.JSONDecodeError as e:
        raise DocumentError(f"{args.document}: line {e.lineno} column "
                            f"{e.colno}: {e.msg}") from None
    if args.truncation is not None:
        if not isinstance(doc, dict) or not isinstance(doc.get("ring"), dict):
            raise DocumentError("at $.ring: expected an object")
        doc["ring"]["truncation"] = args.truncation
    return parse_document(doc)


def run_ring_classify(args):
    from .ring import classify

    c = classify(_load(args)["ring"])
    warnings = []
    if c.is_burch is None:
        warnings.append("Unknown: the Burch test is exact only for artinian "
                        "or monomial ideals; verdict left open")
    if c.conormal_free is None:
        warnings.append("Unknown: conormal freeness not settled inside the "
                        "window")
    return classification_json(c), warnings, EXIT_OK


def run_homology(args):
    return homology_json(_as_complex(_load(args))), [], EXIT_OK


def run_invariants(args):
    return invariants_json(_as_complex(_load(args))), [], EXIT_OK


def run_minimize(args):
    c = _want(_load(args), "complex", "a free complex to minimalize")
    if not c.is_free:
        raise DocumentError("minimalization needs a free complex")
    m = minimalize(c)
    out = {"minimized": complex_doc(m)["complex"],
           "betti": betti_rows(m.betti())}
    return out, [], EXIT_OK


def run_resolve(args):
    from .resolution import resolve_module

    m = _want(_load(args), "module", "the module to resolve")
    rep = resolve_module(m, h_max=args.hmax, seed=args.seed)
    warnings, code = [], EXIT_OK
    if not rep.is_finite:
        warnings.append(f"AtLeast: resolution truncated, pd >= {rep.pd}")
        code = EXIT_BUDGET
    return pd_json(rep), warnings, code


def run_depth(args):
    from .resolution import depth_of, ring_depth

    parsed = _load(args)
    if "module" in parsed or "complex" in parsed:
        target = parsed.get("complex", parsed.get("module"))
        dr = depth_of(target, bound=args.hmax, seed=args.seed)
    else:
        dr = ring_depth(parsed["ring"], seed=args.seed)
    warnings, code = [], EXIT_OK
    if not dr.exact:
        warnings.append(f"Unknown: depth not pinned down ({dr.note})")
        code = EXIT_BUDGET
    return depth_json(dr), warnings, code


def run_ext(args):
    from .resolution import ext_modules, residue_field

    parsed = _load(args)
    m = _want(parsed, "module", "the second Ext argument")
    ring = parsed["ring"]
    i_max = args.hmax if args.hmax is not None else ring.nvars + 1
    exts, rep = ext_modules(residue_field(ring), m, i_max, seed=args.seed)
    rows = [[i, module_dims_rows(exts[i])] for i in sorted(exts)]
    warnings, code = [], EXIT_OK
    if not rep.is_finite and max(exts, default=-1) < i_max:
        warnings.append(f"AtLeast: the resolution of k was truncated; only "
                        f"Ext^i for i <= {max(exts, default=-1)} are vouched")
        code = EXIT_BUDGET
    return {"ext": rows}, warnings, code


def run_qpd(args):
    from .qpd import qpd_eval

    parsed = _load(args)
    target = parsed.get("complex", parsed.get("module"))
    if target is None:
        raise DocumentError("this command needs a 'module' or 'complex' "
                            "section")
    kw = {}
    if args.search or args.search_rank or args.search_window:
        kw["enable_search"] = True
    if args.search_rank:
        kw["search_rank"] = args.search_rank
    if args.search_window:
        kw["search_window"] = args.search_window
    v = qpd_eval(target, h_max=args.hmax, trials=args.trials, seed=args.seed,
                 max_candidates=args.max_candidates, **kw)
    warnings, code = [], EXIT_OK
    if v.kind == "not_found_within_bounds":
        warnings.append(f"NotFoundWithinBounds: {v.note}")
        code = EXIT_BUDGET
    elif not v.exact:
        warnings.append(f"upper bound only: {v.note}")
    return qpd_json(v), warnings, code


def run_suite(args):
    from .suite import verify_paper_suite

    rep = verify_paper_suite(seed=args.seed, p=args.field,
                             enable_search=not args.no_search,
                             threads=args.threads)
    warnings = [f"{it['status']}: {it['name']}: {it['detail']}"
                for it in rep["suite"]["items"] if it["status"] != "PASS"]
    code = EXIT_OK if rep["suite"]["all_ok"] else EXIT_BUDGET
    return rep, warnings, code


RUNNERS = {
    "ring-classify": run_ring_classify,
    "homology": run_homology,
    "invariants": run_invariants,
    "minimize": run_minimize,
    "resolve": run_resolve,
    "depth": run_depth,
    "ext": run_ext,
    "qpd": run_qpd,
    "verify-paper-suite": run_suite,
}

_ALIASES = {("ring", "classify"): "ring-classify"}


def _budgets(args):
    out = {"trials": getattr(args, "trials", None), "seed": args.seed}
    for name in ("truncation", "hmax", "search_rank", "search_window",
                 "max_candidates", "field", "threads"):
        v = getattr(args, name, None)
        if v is not None:
            out[name] = v
    return {k: v for k, v in out.items() if v is not None}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    for alias, canon in _ALIASES.items():
        if tuple(argv[:len(alias)]) == alias:
            argv[:len(alias)] = [canon]
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except _InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    t0 = time.perf_counter()
    try:
        result, warnings, code = RUNNERS[args.command](args)
    except DocumentError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    report = {
        "command": list(argv),
        "engine": {"name": "qpdlab", "version": __version__},
        "seed": args.seed,
        "budgets": _budgets(args),
        "result": result,
        "warnings": warnings,
        "timing": {"seconds": round(time.perf_counter() - t0, 3)},
    }
    text = dumps(report, pretty=bool(args.pretty))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
