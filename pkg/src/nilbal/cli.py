"""Command-line front end.  Every verb prints one JSON document on stdout."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

from . import bounds, catalog, lie, nq, witt
from .errors import InputError, NonStabilizationError, RejectedError
from .presentations import FinitePresentation, PcPresentation, load_presentation, pc_to_finite_presentation


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _pretty(args, lines: Sequence[str]) -> None:
    if getattr(args, "pretty", False):
        for line in lines:
            print(line, file=sys.stderr)


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc.msg} (line {exc.lineno})") from None


def _group(args) -> FinitePresentation:
    if args.catalog:
        entry = catalog.load(args.catalog)
        if not entry.is_group:
            raise InputError(f"{args.catalog} is a Lie algebra, not a group")
        return entry.presentation()
    if not args.input:
        raise InputError("give --input FILE or --catalog NAME")
    pres = load_presentation(_read_json(args.input))
    if isinstance(pres, PcPresentation):
        return pc_to_finite_presentation(pres)
    return pres


def _algebra(args) -> lie.LieAlgebra:
    if args.catalog:
        entry = catalog.load(args.catalog)
        if entry.is_group:
            raise InputError(f"{args.catalog} is a group, not a Lie algebra")
        return entry.payload
    if not args.input:
        raise InputError("give --input FILE or --catalog NAME")
    return lie.LieAlgebra.from_json(_read_json(args.input))


def _primes(text: Optional[str]):
    if text is None:
        return nq.DEFAULT_PRIMES
    try:
        ps = tuple(sorted({int(t) for t in text.split(",") if t.strip()}))
    except ValueError:
        raise InputError(f"bad prime list {text!r}") from None
    from .exactla import is_prime
    bad = [p for p in ps if not is_prime(p)]
    if bad:
        raise InputError(f"not prime: {bad}")
    return ps


def _quotient(args, pres):
    """Class-c quotient, refusing unstable towers unless --quotient is given."""
    big = nq.nilpotent_quotient(pres, args.cls + 1)
    q = big.truncate(args.cls)
    if not q.next_layer_empty and not args.quotient:
        raise NonStabilizationError(
            f"class bound {args.cls} too small: layer {args.cls + 1} is nontrivial "
            "(pass --quotient to work with the class-c quotient anyway)"
        )
    return q


def _h_json(inv, keep_empty_torsion=True):
    out = {"rank": inv.free_rank}
    if keep_empty_torsion or inv.factors:
        out["torsion"] = list(inv.factors)
    return out


# -- verbs ------------------------------------------------------------------

def cmd_witt(args):
    ranks = [witt.witt_rank(args.rank, k) for k in range(1, args.max_class + 1)]
    _emit({"ranks": ranks, "hirsch": sum(ranks)})
    _pretty(args, [f"weight {k}: rank {r}" for k, r in enumerate(ranks, 1)])


def cmd_nq(args):
    q = _quotient(args, _group(args))
    _emit({
        "pc": q.pc.to_json(),
        "hirsch": nq.hirsch(q),
        "class": q.nilpotency_class,
        "lcs_ranks": list(nq.lcs_ranks(q)),
        "stable": bool(q.next_layer_empty),
    })
    _pretty(args, [f"{n}: weight {w}" for n, w in zip(q.pc.names, q.pc.weights)])


def cmd_multiplier(args):
    q = _quotient(args, _group(args))
    m = nq.multiplier_of_pc(q.pc)
    _emit(_h_json(m))


def cmd_betti(args):
    q = _quotient(args, _group(args))
    rep = nq.betti_report_of_quotient(q, _primes(args.primes))
    _emit(rep.to_json())
    rows = [f"Q: b1={rep.beta1_q} b2={rep.beta2_q}"]
    rows += [f"F_{p}: b1={a} b2={b}" for p, a, b in rep.per_prime]
    _pretty(args, rows)


def cmd_balance(args):
    q = _quotient(args, _group(args))
    rep = nq.betti_report_of_quotient(q, _primes(args.primes))
    ok, reason = nq.balance_verdict(rep)
    _emit({"balanced": ok, "h1": _h_json(rep.h1, False), "h2": _h_json(rep.h2)})
    _pretty(args, [reason])


def cmd_lie_betti(args):
    L = _algebra(args)
    report = lie.check_lie(L)
    if not report.ok:
        raise RejectedError(f"not a nilpotent Lie algebra (Jacobi fails at {report.failing_triples()})")
    b = lie.betti_lie(L, args.prime)
    _emit({"betti": list(b), "field": "Q" if args.prime is None else args.prime})


def cmd_cup(args):
    L = _algebra(args)
    kl, vl = lie.parse_cochain(L, args.left)
    kr, vr = lie.parse_cochain(L, args.right)
    u = lie.cohomology_class(L, kl, vl, args.prime)
    v = lie.cohomology_class(L, kr, vr, args.prime)
    w = lie.cup(L, u, v)
    _emit({"degree": w.degree, "class": lie.format_cochain(L, w.degree, w.vector)})


def cmd_gysin(args):
    Q = _algebra(args)
    k, vec = lie.parse_cochain(Q, args.cocycle)
    if k != 2:
        raise InputError("the extension cocycle must have degree 2")
    e = lie.ExtensionCocycle.from_vector(Q, vec)
    g = lie.gysin_beta2(Q, e, args.prime)
    ext = lie.central_extension(Q, e, args.name)
    direct = lie.betti_lie(ext, args.prime)[2]
    _emit({"gysin_beta2": g, "direct_beta2": direct, "extension": ext.to_json()})


def cmd_bounds(args):
    b = args.bounds_verb
    if b == "e2":
        lo, hi = bounds.e2_bounds(bounds.QuotientBettiData(args.b1, args.b2, args.b3, args.z))
        _emit({"lower": lo, "upper": hi})
    elif b == "lubotzky":
        _emit({"holds": bounds.lubotzky_check(args.b1, args.b2, args.h)})
    elif b == "fht":
        thr = bounds.fht_threshold(args.beta, args.r) if args.r >= 2 else None
        _emit({"holds": bounds.fht_check(args.beta, args.r, args.b2), "threshold": str(thr)})
    elif b == "relfree":
        _emit({"lower_bound": bounds.relfree_lower_bound(args.beta, args.k)})
    elif b == "pd":
        _emit({"betti": list(bounds.pd_complete_betti(args.h, args.b1, args.b2))})


def _matrix(data, key):
    try:
        return [[Fraction(str(x)) for x in row] for row in data[key]]
    except (KeyError, TypeError, ValueError, ZeroDivisionError):
        raise InputError(f"module JSON needs a rational matrix under {key!r}") from None


def cmd_metabelian(args):
    data = _read_json(args.input)
    if not isinstance(data, dict):
        raise InputError("module JSON must be an object with keys 'X' and 'Y'")
    M = bounds.MetabelianModule(_matrix(data, "X"), _matrix(data, "Y"))
    _emit(bounds.metabelian_homology(M).to_json())


def _verify_all(args) -> int:
    reports = catalog.verify_all(catalog.NAMES, args.jobs)
    _emit({"passed": all(r.passed for r in reports), "entries": [r.to_json() for r in reports]})
    rows = []
    for r in reports:
        rows.append(f"{'PASS' if r.passed else 'FAIL'} {r.name}")
        rows += [f"    {f.key}: expected {f.expected}, got {f.actual}" for f in r.failures()]
    _pretty(args, rows)
    return 0 if all(r.passed for r in reports) else 1


def cmd_catalog(args):
    v = args.catalog_verb
    if v == "list":
        _emit({"entries": [
            {"name": n, "kind": catalog.load(n).kind} for n in catalog.NAMES
        ]})
    elif v == "show":
        _emit(catalog.load(args.name).to_json())
    elif v == "export":
        _emit(catalog.load(args.name).to_json()["data"])
    elif v == "verify":
        r = catalog.verify(args.name)
        _emit(r.to_json())
        return 0 if r.passed else 1
    elif v == "verify-all":
        return _verify_all(args)
    return 0


# -- parser -----------------------------------------------------------------

def _group_opts(p, cls_required=True):
    src = p.add_argument_group("input")
    src.add_argument("--input", help="presentation JSON file")
    src.add_argument("--catalog", help="use a catalog entry instead of a file")
    p.add_argument("--class", dest="cls", type=int, required=cls_required, help="nilpotency class bound")
    p.add_argument("--quotient", action="store_true",
                   help="work with the class-c quotient even if the tower has not stopped")


def _lie_opts(p):
    p.add_argument("--input", help="lie-algebra JSON file")
    p.add_argument("--catalog", help="use a catalog entry instead of a file")
    p.add_argument("--prime", type=int, default=None, help="compute over F_p instead of Q")


def _sub_parser(common):
    class _Parser(argparse.ArgumentParser):
        def __init__(self, *a, **kw):
            kw.setdefault("parents", [common])
            super().__init__(*a, **kw)
    return _Parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nilbal", description="Homological balance of nilpotent groups.")
    ap.add_argument("--pretty", action="store_true", help="human-readable summary on stderr")
    # --pretty is also accepted after the verb
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", default=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="verb", required=True, parser_class=_sub_parser(common))

    p = sub.add_parser("witt", help="lower central ranks of a free group")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--max-class", type=int, required=True)
    p.set_defaults(func=cmd_witt)

    p = sub.add_parser("nq", help="nilpotent quotient")
    _group_opts(p)
    p.set_defaults(func=cmd_nq)

    p = sub.add_parser("multiplier", help="Schur multiplier H_2(G; Z)")
    _group_opts(p)
    p.set_defaults(func=cmd_multiplier)

    for verb, func in (("betti", cmd_betti), ("balance", cmd_balance)):
        p = sub.add_parser(verb)
        _group_opts(p)
        p.add_argument("--primes", help="comma-separated primes (default 2,3,5,7)")
        p.set_defaults(func=func)

    p = sub.add_parser("lie-betti", help="Betti numbers of a nilpotent Lie algebra")
    _lie_opts(p)
    p.set_defaults(func=cmd_lie_betti)

    p = sub.add_parser("cup", help="cup product of two cohomology classes")
    _lie_opts(p)
    p.add_argument("--left", required=True, help='cochain such as "y*"')
    p.add_argument("--right", required=True, help='cochain such as "y*d* + y*e* - c*d*"')
    p.set_defaults(func=cmd_cup)

    p = sub.add_parser("gysin", help="beta_2 of a central extension via the Gysin sequence")
    _lie_opts(p)
    p.add_argument("--cocycle", required=True, help="closed 2-cochain on the quotient")
    p.add_argument("--name", default="f", help="name of the new central basis element")
    p.set_defaults(func=cmd_gysin)

    p = sub.add_parser("bounds", help="Betti-number inequalities")
    bsub = p.add_subparsers(dest="bounds_verb", required=True, parser_class=_sub_parser(common))
    q = bsub.add_parser("e2")
    for k in ("b1", "b2", "b3", "z"):
        q.add_argument(f"--{k}", type=int, required=True)
    q = bsub.add_parser("lubotzky")
    for k in ("b1", "b2", "h"):
        q.add_argument(f"--{k}", type=int, required=True)
    q = bsub.add_parser("fht")
    for k in ("beta", "r", "b2"):
        q.add_argument(f"--{k}", type=int, required=True)
    q = bsub.add_parser("relfree")
    for k in ("beta", "k"):
        q.add_argument(f"--{k}", type=int, required=True)
    q = bsub.add_parser("pd")
    q.add_argument("--h", type=int, required=True)
    q.add_argument("--b1", type=int, required=True)
    q.add_argument("--b2", type=int, default=None)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("metabelian", help="homology of the metabelian module complex")
    p.add_argument("--input", required=True, help='JSON {"X": matrix, "Y": matrix}')
    p.set_defaults(func=cmd_metabelian)

    p = sub.add_parser("catalog", help="built-in examples")
    csub = p.add_subparsers(dest="catalog_verb", required=True, parser_class=_sub_parser(common))
    csub.add_parser("list")
    for v in ("show", "verify", "export"):
        csub.add_parser(v).add_argument("name")
    csub.add_parser("verify-all").add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("verify-all", help="verify every catalog entry")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_verify_all)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.func(args)
    except InputError as exc:
        print(f"nilbal: input error: {exc}", file=sys.stderr)
        return 2
    except RejectedError as exc:
        print(f"nilbal: rejected: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"nilbal: input error: {exc}", file=sys.stderr)
        return 2
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
