"""Command-line front end.

Exit codes: 0 all PASS/CONFIRMED, 1 any FAIL/REFUTED, 2 input error,
3 NO-VERDICT/INCOMPLETE.  Reports go to standard output as deterministic
JSON; a one-line status goes to standard error (coloured when
``NORMCAT_COLOR`` is set).
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import banach, cauchy, core, fincat, freecat, metcat
from .core import DEFAULT_BUDGET, DEFAULT_TOL, DIAGNOSTIC_TAGS, Status
from .errors import InputError, Refutation, UndecidableError
from .extreal import to_json
from .functors import parse_expr
from .serialize import InputDocument, dumps, load

DEFAULT_SEED = 0
DEFAULT_CAP = 3
EXIT = {"PASS": 0, "CONFIRMED-UP-TO-HORIZON": 0, "FAIL": 1, "REFUTED": 1,
        "NO-VERDICT": 3, "INCOMPLETE": 3}


# -- documents to objects -------------------------------------------------------

def _spaces(payload) -> dict:
    out = {}
    for name, sp in sorted(payload["spaces"].items()):
        d = dict(sp)
        d["name"] = name
        out[name] = metcat.metric_space_from_payload(d)
    return out


def _space_ref(spaces, name, where):
    try:
        return spaces[name]
    except KeyError:
        raise InputError(f"{where} names unknown space {name!r}") from None


def lipschitz_from_payload(payload):
    spaces = _spaces(payload)
    gens = {}
    for m in payload["maps"]:
        src = _space_ref(spaces, m["source"], m["id"])
        tgt = _space_ref(spaces, m["target"], m["id"])
        gens[m["id"]] = metcat.LipschitzMap.from_mapping(src, tgt, m["assign"])
    return metcat.LipschitzCategory(list(spaces.values()), gens), spaces, gens


def ep_from_payload(payload):
    spaces = _spaces(payload)
    gens = {}
    for q in payload["pairs"]:
        src = _space_ref(spaces, q["source"], q["id"])
        tgt = _space_ref(spaces, q["target"], q["id"])
        e = metcat.LipschitzMap.from_mapping(src, tgt, q["e"])
        p = metcat.LipschitzMap.from_mapping(tgt, src, q["p"])
        gens[q["id"]] = metcat.EpPair(e, p)
    return metcat.EpCategory(list(spaces.values()), generators=gens), spaces, gens


def _group_from_payload(payload):
    g = payload["group"]
    op = {(a, b): c for a, b, c in g["op"]}
    return fincat.check_group(g["elements"], op, g["inverse"], window=bool(g.get("window", False)))


def category_from_doc(doc: InputDocument):
    """``(category, cap)`` for any document kind that describes a normed category."""
    p = doc.payload
    if doc.kind == "finite_category":
        c = fincat.from_payload(p)
        if c.norm_table is None:
            raise InputError("finite_category document has no norm table", pointer="/norm")
        return c, None
    if doc.kind == "norm_table":
        if "group" in p:
            return fincat.group_category(_group_from_payload(p), p["norm"]), None
        return fincat.from_payload({**p["category"], "norm": p["norm"]}), None
    if doc.kind == "metric_space":
        return fincat.pseudometric_as_category(p["points"], p["dist"]), None
    if doc.kind == "digraph":
        return freecat.FreeCategory(freecat.WeightedDigraph.from_payload(p)), DEFAULT_CAP
    if doc.kind == "lipschitz_map":
        return lipschitz_from_payload(p)[0], None
    if doc.kind == "ep_pair":
        return ep_from_payload(p)[0], None
    if doc.kind == "sequence_table":
        return fincat.from_payload(p["category"]), None
    raise InputError(f"a {doc.kind} document does not describe a normed category", pointer="/kind")


def sequence_from_doc(doc: InputDocument):
    if doc.kind != "sequence_table":
        raise InputError(f"expected a sequence_table document, got {doc.kind}", pointer="/kind")
    p = doc.payload
    host = fincat.from_payload(p["category"])
    if host.norm_table is None:
        raise InputError("sequence host has no norm table", pointer="/category/norm")
    objs = p["objects"]
    known = set(host.objects())
    for i, x in enumerate(objs):
        if x not in known:
            raise InputError(f"unknown object {x!r}", pointer=f"/objects/{i}")
    if "steps" in p:
        for i, a in enumerate(p["steps"]):
            if a not in host.arrow_ids:
                raise InputError(f"unknown arrow {a!r}", pointer=f"/steps/{i}")
            if host.dom(a) != objs[i] or (i + 1 < len(objs) and host.cod(a) != objs[i + 1]):
                raise InputError(f"step {i} does not connect x_{i} to x_{i + 1}", pointer=f"/steps/{i}")
        return host, cauchy.Sequence.from_table(host, objs, steps=p["steps"])
    bonds = {}
    for i, b in enumerate(p["bonds"]):
        if b["arrow"] not in host.arrow_ids:
            raise InputError(f"unknown arrow {b['arrow']!r}", pointer=f"/bonds/{i}/arrow")
        bonds[b["n"], b["m"]] = b["arrow"]
    return host, cauchy.Sequence.from_table(host, objs, bonds=bonds)


def certificate_from(payload) -> cauchy.CauchyCertificate:
    return cauchy.CauchyCertificate(tuple((e, n) for e, n in payload["rows"]))


def functor_from_arg(text: str):
    if os.path.exists(text):
        doc = load(text)
        if doc.kind != "functor_expr":
            raise InputError(f"expected a functor_expr document, got {doc.kind}", pointer="/kind")
        text = doc.payload["expr"]
    return banach.ContractionFunctor.from_expr(parse_expr(text))


# -- commands ---------------------------------------------------------------------

def _audit_status(report) -> str:
    tags = [t for t in report.verdicts if t not in DIAGNOSTIC_TAGS]
    if any(report.verdicts[t] is Status.FAIL for t in tags):
        return "FAIL"
    if any(report.verdicts[t] is Status.SKIPPED for t in tags):
        return "NO-VERDICT"
    return "PASS"


def cmd_audit(args):
    doc = load(args.document)
    if doc.kind == "norm_table" and "group" in doc.payload:
        g = _group_from_payload(doc.payload)
        report = fincat.check_group_norm_equivalence(g, doc.payload["norm"], tol=args.tol)
    else:
        cat, cap = category_from_doc(doc)
        cap = args.horizon if (cap is not None and args.horizon is not None) else cap
        report = core.audit_norm(cat, budget=args.budget or DEFAULT_BUDGET, tol=args.tol, cap=cap,
                                 jobs=args.jobs)
    out = {"kind": doc.kind, "report": report.to_dict(), "log_base": "e"}
    return _audit_status(report), out


def cmd_kernel(args):
    doc = load(args.document)
    cat, cap = category_from_doc(doc)
    out = {"kind": doc.kind}
    if doc.kind in ("finite_category", "norm_table") and "kernel" in doc.payload.get("category", doc.payload):
        c = cat if isinstance(cat, fincat.FiniteCategory) else None
        k0 = doc.payload.get("category", doc.payload)["kernel"]
        report = fincat.check_potential_kernel(c, k0)
        out["candidate"] = sorted(k0)
        if report.passed:
            dn = c.with_norm(fincat.discrete_norm(c, k0))
            audit = core.audit_norm(dn, tol=args.tol)
            recovered = sorted(a for a in dn.arrow_ids if dn.norm(a) <= args.tol)
            out.update(discrete_norm=dn.norm_table and {a: to_json(v) for a, v in dn.norm_table.items()},
                       audit=audit.to_dict(), recovered=recovered, recovers_input=recovered == sorted(k0))
            report.merge(audit)
            if recovered != sorted(k0):
                report.record("K1", False, {"recovered": recovered})
        out["report"] = report.to_dict()
        return _audit_status(report), out
    kv = core.kernel(cat, args.tol)
    arrows = [cat.label(f) for f in kv.arrows(cap=cap)]
    report = core.check_kernel_axioms(cat, kv.contains, cap=cap)
    out.update(kernel=arrows, report=report.to_dict())
    return _audit_status(report), out


def cmd_quasimetric(args):
    doc = load(args.document)
    if doc.kind == "digraph":
        g = freecat.WeightedDigraph.from_payload(doc.payload)
        if args.source is not None and args.target is not None:
            d, verts, arrs = freecat.shortest_path(g, args.source, args.target)
            return "PASS", {"rho": d, "path": verts, "arrows": arrs}
        cat = freecat.FreeCategory(g)
    else:
        cat, _ = category_from_doc(doc)
        if args.source is not None and args.target is not None:
            objs = {cat.object_label(x): x for x in cat.objects()}
            try:
                x, y = objs[args.source], objs[args.target]
            except KeyError as exc:
                raise InputError(f"unknown object {exc.args[0]!r}") from None
            d, f = core.infimum_arrow(cat, x, y)
            return "PASS", {"rho": d, "arrow": None if f is None else cat.label(f)}
    objs = cat.objects()
    rho = {cat.object_label(x): {cat.object_label(y): core.induced_quasimetric(cat, x, y) for y in objs}
           for x in objs}
    report = core.audit_quasimetric(cat, objs, tol=args.tol)
    return _audit_status(report), {"rho": rho, "report": report.to_dict()}


def cmd_freecat_norm(args):
    doc = load(args.document)
    if doc.kind != "digraph":
        raise InputError(f"expected a digraph document, got {doc.kind}", pointer="/kind")
    g = freecat.WeightedDigraph.from_payload(doc.payload)
    steps = list(args.steps)
    if args.source is None and not steps:
        raise InputError("an empty path needs --from")
    source = args.source if args.source is not None else (g.dom(steps[0]) if steps[0] in g.arrows else None)
    if source is None:
        raise InputError(f"arrow {steps[0]!r} is not in the digraph")
    p = freecat.make_path(g, source, steps)
    if args.target is not None and args.target != p.target:
        raise InputError(f"path ends at {p.target!r}, not --to {args.target!r}")
    return "PASS", {"norm": freecat.path_norm(g, p), "path": str(p), "source": p.source,
                    "target": p.target, "steps": list(p.steps)}


def cmd_cauchy_check(args):
    doc = load(args.document)
    host, seq = sequence_from_doc(doc)
    horizon = args.horizon if args.horizon is not None else len(doc.payload["objects"]) - 1
    if horizon > len(doc.payload["objects"]) - 1:
        raise InputError(f"horizon {horizon} exceeds the table length")
    cert = None
    if args.certificate:
        cdoc = load(args.certificate)
        if cdoc.kind != "certificate":
            raise InputError(f"expected a certificate document, got {cdoc.kind}", pointer="/kind")
        cert = certificate_from(cdoc.payload)
    elif "certificate" in doc.payload:
        cert = certificate_from(doc.payload["certificate"])
    series = cauchy.series_criterion(seq, horizon)
    out = {"horizon": horizon, "partial_sums": series.to_dict()["partial_sums"]}
    if cert is None:
        out["notes"] = ["no certificate supplied"]
        return cauchy.NO_VERDICT, out
    verdict = cauchy.check_cauchy(seq, cert, horizon)
    out["verdict"] = verdict.to_dict()
    return verdict.status, out


def cmd_colimit_verify(args):
    doc = load(args.document)
    host, seq = sequence_from_doc(doc)
    p = doc.payload
    if "cocone" not in p:
        raise InputError("sequence_table document has no cocone", pointer="/cocone")
    horizon = args.horizon if args.horizon is not None else len(p["objects"]) - 1
    v = p["cocone"]["vertex"]
    arrows = p["cocone"]["arrows"]
    for i, a in enumerate(arrows):
        if a not in host.arrow_ids:
            raise InputError(f"unknown arrow {a!r}", pointer=f"/cocone/arrows/{i}")
    report = cauchy.verify_colimit_candidate(seq, v, arrows, horizon, tol=args.tol)
    out = {"horizon": horizon, "vertex": v, "report": report.to_dict()}
    if report.passed_tags(("C1-COCONE", "C2")):
        chk = cauchy.convergent_implies_cauchy_check(seq, v, arrows, horizon, c2_tol=args.tol)
        out["derived_certificate"] = chk.certificate.to_dict() if chk.certificate else None
        out["cross_check"] = {"bound_ok": chk.bound_ok, "flags": chk.flags,
                              "cauchy": chk.cauchy.to_dict() if chk.cauchy else None}
    return _audit_status(report), out


def cmd_fixpoint_solve(args):
    F = functor_from_arg(args.expr)
    eps = args.eps if args.eps is not None else 2.0 ** -8
    res = banach.solve_fixed_point(F, eps=eps, max_iter=args.budget or banach.DEFAULT_MAX_ITER)
    out = res.to_dict()
    verified = res.verify()
    out["verified"] = verified
    if res.status == "INCOMPLETE":
        return "INCOMPLETE", out
    return ("PASS" if verified else "FAIL"), out


def cmd_fixpoint_verify(args):
    F = functor_from_arg(args.expr)
    if args.document is None:
        eps = args.eps if args.eps is not None else 2.0 ** -8
        res = banach.solve_fixed_point(F, eps=eps, max_iter=args.budget or banach.DEFAULT_MAX_ITER)
        tol = args.tol if args.tol_given else res.residual
        chk = banach.fixed_point_check(F, res.fixed_point, res.witness, tol, inverse=res.inverse,
                                       category=res.completion)
        out = {"source": "solver", "tol": tol, "iterations": res.iterations}
    else:
        doc = load(args.document)
        if doc.kind != "ep_pair":
            raise InputError(f"expected an ep_pair document, got {doc.kind}", pointer="/kind")
        _, spaces, gens = ep_from_payload(doc.payload)
        if not gens:
            raise InputError("ep_pair document lists no pairs", pointer="/pairs")
        h = gens[doc.payload["pairs"][0]["id"]]
        s = h.source
        fs = F.obj(s)
        h = _retarget(h, fs)
        host = metcat.EpCategory([s] if s == fs else [s, fs])
        F = banach.ContractionFunctor(host, F.obj, F.arr, F.factor, name=F.name)
        tol = args.tol
        chk = banach.fixed_point_check(F, s, h, tol)
        out = {"source": "document", "tol": tol, "pair": doc.payload["pairs"][0]["id"]}
    out.update(verdict=chk.verdict, is_isomorphism=chk.is_isomorphism, mu=chk.mu,
               mu_inverse=chk.mu_inverse, warnings=chk.warnings, functor=F.name)
    if chk.verdict is None:
        return "NO-VERDICT", out
    return ("PASS" if chk.verdict else "FAIL"), out


def _retarget(h, fs):
    """Identify ``cod h`` with ``F(s)`` point-by-position when their distance matrices agree."""
    y = h.target
    if y == fs or y.size != fs.size or not np.array_equal(y.matrix, fs.matrix):
        return h
    return metcat.EpPair(metcat.LipschitzMap(h.source, fs, h.e.assign),
                         metcat.LipschitzMap(fs, h.source, h.p.assign))


COMMANDS = {
    "audit": cmd_audit,
    "kernel": cmd_kernel,
    "quasimetric": cmd_quasimetric,
    "freecat-norm": cmd_freecat_norm,
    "cauchy-check": cmd_cauchy_check,
    "colimit-verify": cmd_colimit_verify,
    "fixpoint-solve": cmd_fixpoint_solve,
    "fixpoint-verify": cmd_fixpoint_verify,
}


class _TolAction(argparse.Action):
    def __call__(self, parser, ns, values, option_string=None):
        setattr(ns, self.dest, values)
        ns.tol_given = True


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, action=_TolAction,
                        help="additive tolerance for inequality checks")
    common.add_argument("--horizon", type=int, default=None,
                        help="sequence horizon (path-length cap for digraph audits)")
    common.add_argument("--budget", type=int, default=None,
                        help="pair budget for audits, iteration budget for fixpoint-solve")
    common.add_argument("--eps", type=float, default=None, help="target residual")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed echoed in the report")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for audit pairs")
    common.add_argument("--from", dest="source", default=None)
    common.add_argument("--to", dest="target", default=None)

    parser = argparse.ArgumentParser(prog="normcat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("audit", "kernel", "quasimetric"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("document")
    sp = sub.add_parser("freecat-norm", parents=[common])
    sp.add_argument("document")
    sp.add_argument("steps", nargs="*")
    sp = sub.add_parser("cauchy-check", parents=[common])
    sp.add_argument("document")
    sp.add_argument("certificate", nargs="?")
    sp = sub.add_parser("colimit-verify", parents=[common])
    sp.add_argument("document")
    sp = sub.add_parser("fixpoint-solve", parents=[common])
    sp.add_argument("expr")
    sp = sub.add_parser("fixpoint-verify", parents=[common])
    sp.add_argument("expr")
    sp.add_argument("document", nargs="?")
    parser.set_defaults(tol_given=False)
    return parser


def _status_line(command: str, status: str) -> str:
    color = os.environ.get("NORMCAT_COLOR", "").lower() in ("1", "true", "always", "yes")
    if color:
        code = {0: "32", 1: "31", 2: "35", 3: "33"}[EXIT.get(status, 2)]
        status = f"\033[{code}m{status}\033[0m"
    return f"normcat {command}: {status}"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    try:
        status, body = COMMANDS[args.command](args)
        code = EXIT[status]
    except (InputError, Refutation, UndecidableError) as exc:
        if isinstance(exc, InputError):
            status, code = "INPUT-ERROR", 2
        elif isinstance(exc, Refutation):
            status, code = "REFUTED", 1
        else:
            status, code = "NO-VERDICT", 3
        body = {"error": str(exc)}
        for attr in ("pointer", "tag", "witness"):
            val = getattr(exc, attr, None)
            if val:
                body[attr] = val
        rep = getattr(exc, "report", None)
        if rep is not None:
            body["report"] = rep.to_dict()
    body = {**body, "command": args.command, "seed": args.seed, "status": status}
    sys.stdout.write(dumps(body))
    sys.stderr.write(_status_line(args.command, status) + "\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
