"""Normed-category interface, axiom auditor, kernels and induced quasi-metric.

A norm on a category assigns every arrow a value in [0, +inf] such that

* MC1: ``mu(id_x) == 0``;
* MC2: ``mu(f.g) <= mu(f) + mu(g)``;
* MC3: ``mu(g) <= mu(f.g) + mu(f)``.

The stronger ``|mu(f) - mu(g)| <= mu(f.g)`` (tag ``MCFULL``) is reported as
a diagnostic only and never fails an audit.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from .errors import CompositionError, UndecidableError, UndefinedComposite
from .extreal import INF, leq, sat_sub, to_json

DEFAULT_TOL = 1e-9
DEFAULT_BUDGET = 10**6

TAG_ORDER = (
    "CAT-LAWS", "MC1", "MC2", "MC3", "MCFULL", "K1", "K2", "N1", "N2", "N3",
    "Q1", "Q2", "FUNCTOR", "CONTRACTION", "NONEXPANSIVE",
)
DIAGNOSTIC_TAGS = frozenset({"MCFULL", "NONEXPANSIVE"})


class Status(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    SKIPPED = "SKIPPED"


class NormedCategory(ABC):
    """Behavioural interface every normed-category instance implements.

    ``hom(x, y, cap)`` enumerates the arrows ``x -> y``; views with
    infinitely many arrows must refuse enumeration without a ``cap``.
    ``compose(f, g)`` is ``f . g`` and is defined when ``dom(f) == cod(g)``.
    """

    finite = True

    def objects(self) -> list:
        raise UndecidableError(f"{type(self).__name__} has query-only objects")

    @abstractmethod
    def hom(self, x, y, cap=None) -> Iterable: ...

    @abstractmethod
    def dom(self, f): ...

    @abstractmethod
    def cod(self, f): ...

    @abstractmethod
    def identity(self, x): ...

    @abstractmethod
    def norm(self, f) -> float: ...

    @abstractmethod
    def _compose(self, f, g): ...

    def compose(self, f, g):
        if not self.objects_equal(self.dom(f), self.cod(g)):
            raise CompositionError(
                f"cannot compose {self.label(f)} after {self.label(g)}: "
                f"dom {self.dom(f)!r} != cod {self.cod(g)!r}"
            )
        return self._compose(f, g)

    def objects_equal(self, a, b) -> bool:
        return a == b

    def arrows_equal(self, f, g) -> bool:
        return f == g

    def label(self, f) -> str:
        return str(f)

    def object_label(self, x) -> str:
        return str(x)

    def arrows(self, cap=None) -> list:
        objs = self.objects()
        return [f for x in objs for y in objs for f in self.hom(x, y, cap=cap)]


@dataclass
class AuditReport:
    """Per-tag verdicts with counterexamples.

    Every ``FAIL`` carries at least one witness whose ``lhs`` exceeds
    ``rhs`` by more than ``tol``.
    """

    tol: float = DEFAULT_TOL
    verdicts: dict = field(default_factory=dict)
    counterexamples: dict = field(default_factory=dict)
    violations: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    max_witnesses: int = 5

    def record(self, tag: str, ok: bool, witness=None) -> None:
        """``witness`` is a dict or a zero-argument callable built only on failure."""
        if ok:
            self.verdicts.setdefault(tag, Status.PASS)
            return
        self.verdicts[tag] = Status.FAIL
        self.violations[tag] = self.violations.get(tag, 0) + 1
        bucket = self.counterexamples.setdefault(tag, [])
        if witness is not None and len(bucket) < self.max_witnesses:
            bucket.append(witness() if callable(witness) else witness)

    def skip(self, tag: str, note: str | None = None) -> None:
        if self.verdicts.get(tag) is not Status.FAIL:
            self.verdicts[tag] = Status.SKIPPED
        if note:
            self.notes.append(f"{tag}: {note}")

    def status(self, tag: str) -> Status | None:
        return self.verdicts.get(tag)

    @property
    def checked_axioms(self) -> list[str]:
        known = [t for t in TAG_ORDER if t in self.verdicts]
        return known + sorted(t for t in self.verdicts if t not in TAG_ORDER)

    @property
    def passed(self) -> bool:
        """Every non-diagnostic tag PASSed (a SKIPPED tag is not a pass)."""
        return all(v is Status.PASS for t, v in self.verdicts.items() if t not in DIAGNOSTIC_TAGS)

    @property
    def failed(self) -> bool:
        return any(v is Status.FAIL for t, v in self.verdicts.items() if t not in DIAGNOSTIC_TAGS)

    def passed_tags(self, tags: Iterable[str]) -> bool:
        return all(self.verdicts.get(t) is Status.PASS for t in tags)

    def merge(self, other: "AuditReport") -> "AuditReport":
        for tag in other.checked_axioms:
            v = other.verdicts[tag]
            if v is Status.FAIL:
                self.verdicts[tag] = Status.FAIL
                self.violations[tag] = self.violations.get(tag, 0) + other.violations.get(tag, 0)
                bucket = self.counterexamples.setdefault(tag, [])
                room = self.max_witnesses - len(bucket)
                bucket.extend(other.counterexamples.get(tag, [])[:max(room, 0)])
            elif v is Status.SKIPPED:
                self.skip(tag)
            else:
                self.verdicts.setdefault(tag, Status.PASS)
        self.notes.extend(other.notes)
        for k, n in other.stats.items():
            self.stats[k] = self.stats.get(k, 0) + n if isinstance(n, int) else n
        return self

    def to_dict(self) -> dict:
        return {
            "tol": self.tol,
            "checked_axioms": self.checked_axioms,
            "verdicts": {t: self.verdicts[t].value for t in self.checked_axioms},
            "counterexamples": {
                t: [_jsonable(w) for w in ws] for t, ws in self.counterexamples.items()
            },
            "violations": dict(self.violations),
            "notes": list(self.notes),
            "stats": dict(self.stats),
            "passed": self.passed,
        }


def _jsonable(obj):
    if isinstance(obj, float):
        return to_json(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


# -- enumeration ------------------------------------------------------------

@dataclass
class Scope:
    """Arrows of a category gathered once, grouped by domain and codomain.

    Arrows are addressed by their position in ``arrows``.
    """

    objects: list
    arrows: list
    dom_idx: list
    cod_idx: list
    by_dom: dict
    by_cod: dict

    @property
    def composable_pairs(self) -> int:
        return sum(len(self.by_cod.get(y, ())) * len(fs) for y, fs in self.by_dom.items())

    def index_pairs(self):
        """Composable ``(i, j)`` with ``arrows[i] . arrows[j]`` defined."""
        for i in range(len(self.arrows)):
            for j in self.by_cod.get(self.dom_idx[i], ()):
                yield i, j

    def pairs(self):
        for i, j in self.index_pairs():
            yield self.arrows[i], self.arrows[j]


def enumerate_scope(cat: NormedCategory, cap=None) -> Scope:
    objs = list(cat.objects())
    arrows, dom_idx, cod_idx = [], [], []
    by_dom, by_cod = defaultdict(list), defaultdict(list)
    for i, x in enumerate(objs):
        for j, y in enumerate(objs):
            for f in cat.hom(x, y, cap=cap):
                k = len(arrows)
                arrows.append(f)
                dom_idx.append(i)
                cod_idx.append(j)
                by_dom[i].append(k)
                by_cod[j].append(k)
    return Scope(objs, arrows, dom_idx, cod_idx, dict(by_dom), dict(by_cod))


# -- category laws ----------------------------------------------------------

def check_category_laws(cat: NormedCategory, scope: Scope, budget: int = DEFAULT_BUDGET,
                        report: AuditReport | None = None) -> AuditReport:
    """Identity, closure and associativity laws on an enumerated scope."""
    report = report or AuditReport()
    tag = "CAT-LAWS"
    undefined = 0
    arrows = scope.arrows
    for x in scope.objects:
        i = cat.identity(x)
        ok = cat.objects_equal(cat.dom(i), x) and cat.objects_equal(cat.cod(i), x)
        report.record(tag, ok, {"law": "identity-type", "object": cat.object_label(x)})
    for f in arrows:
        for side, (a, b) in (("right", (f, cat.identity(cat.dom(f)))),
                             ("left", (cat.identity(cat.cod(f)), f))):
            try:
                ok = cat.arrows_equal(cat.compose(a, b), f)
            except UndefinedComposite:
                ok = False
            report.record(tag, ok, lambda side=side, f=f: {"law": f"{side}-identity", "f": cat.label(f)})
    composites = {}
    for i, j in scope.index_pairs():
        f, g = arrows[i], arrows[j]
        try:
            h = cat.compose(f, g)
        except UndefinedComposite:
            if getattr(cat, "partial", False):
                undefined += 1
            else:
                report.record(tag, False, {"law": "closure", "f": cat.label(f),
                                           "g": cat.label(g), "fg": None})
            continue
        composites[i, j] = h
        ok = cat.objects_equal(cat.dom(h), cat.dom(g)) and cat.objects_equal(cat.cod(h), cat.cod(f))
        report.record(tag, ok, lambda f=f, g=g, h=h: {"law": "closure", "f": cat.label(f),
                                                      "g": cat.label(g), "fg": cat.label(h)})
    checked = 0
    truncated = False
    for (i, j), fg in composites.items():
        for k in scope.by_cod.get(scope.dom_idx[j], ()):
            if checked >= budget:
                truncated = True
                break
            gk = composites.get((j, k))
            if gk is None:
                continue
            try:
                lhs = cat.compose(fg, arrows[k])
                rhs = cat.compose(arrows[i], gk)
            except UndefinedComposite:
                undefined += 1
                continue
            checked += 1
            report.record(tag, cat.arrows_equal(lhs, rhs),
                          lambda i=i, j=j, k=k, lhs=lhs, rhs=rhs: {
                              "law": "associativity", "f": cat.label(arrows[i]),
                              "g": cat.label(arrows[j]), "h": cat.label(arrows[k]),
                              "(fg)h": cat.label(lhs), "f(gh)": cat.label(rhs)})
        if truncated:
            break
    report.verdicts.setdefault(tag, Status.PASS)
    report.stats["associativity_triples"] = checked
    if truncated:
        report.notes.append(f"CAT-LAWS: associativity checked on the first {budget} triples only")
    if undefined:
        report.notes.append(
            f"CAT-LAWS: {undefined} out-of-window composites undefined and skipped")
    return report


# -- norm audit -------------------------------------------------------------

def _mc_events(cat, f, g, tol):
    """MC2/MC3/MCFULL events for one composable pair; None if undefined."""
    try:
        h = cat.compose(f, g)
    except UndefinedComposite:
        return None
    a, b, c = cat.norm(f), cat.norm(g), cat.norm(h)

    def base():
        return {"f": cat.label(f), "g": cat.label(g), "fg": cat.label(h),
                "mu_f": a, "mu_g": b, "mu_fg": c}
    events = []
    ok2 = leq(c, a + b, tol)
    events.append(("MC2", ok2, None if ok2 else {**base(), "lhs": c, "rhs": a + b}))
    ok3 = leq(b, c + a, tol)
    events.append(("MC3", ok3, None if ok3 else {**base(), "lhs": b, "rhs": c + a}))
    # |a - b| <= c as two one-sided inequalities, avoiding INF - INF
    if not leq(a, c + b, tol):
        events.append(("MCFULL", False, {**base(), "lhs": a, "rhs": c + b}))
    elif not ok3:
        events.append(("MCFULL", False, {**base(), "lhs": b, "rhs": c + a}))
    else:
        events.append(("MCFULL", True, None))
    return events


def check_pair(cat: NormedCategory, f, g, tol: float = DEFAULT_TOL) -> dict:
    """MC2, MC3 and MCFULL verdicts for a single composable pair."""
    events = _mc_events(cat, f, g, tol)
    if events is None:
        raise UndefinedComposite("composite undefined in this window")
    return {tag: ok for tag, ok, _ in events}


def _pair_chunk(cat, pairs, tol):
    out, undefined = [], 0
    for f, g in pairs:
        ev = _mc_events(cat, f, g, tol)
        if ev is None:
            undefined += 1
        else:
            out.extend(ev)
    return out, undefined


def audit_norm(cat: NormedCategory, budget: int = DEFAULT_BUDGET, tol: float = DEFAULT_TOL,
               cap=None, jobs: int = 1, check_laws: bool = True) -> AuditReport:
    """Exhaustively audit MC1-MC3 (and the MCFULL diagnostic) on ``cat``.

    ``budget`` bounds the number of composable pairs; over budget, every
    tag is SKIPPED rather than partially checked, so enlarging the budget
    can never turn a FAIL into a PASS.  ``cap`` bounds enumeration of views
    with infinite hom-sets (path length for free categories).
    """
    report = AuditReport(tol=tol)
    scope = enumerate_scope(cat, cap=cap)
    npairs = scope.composable_pairs
    report.stats.update(objects=len(scope.objects), arrows=len(scope.arrows),
                        composable_pairs=npairs)
    if cap is not None:
        report.notes.append(f"enumeration capped at {cap}")
    if npairs > budget:
        for tag in ("CAT-LAWS", "MC1", "MC2", "MC3", "MCFULL"):
            report.skip(tag)
        report.notes.append(f"budget exceeded: {npairs} composable pairs > budget {budget}")
        return report
    if check_laws:
        check_category_laws(cat, scope, budget, report)
        if report.status("CAT-LAWS") is Status.FAIL:
            for tag in ("MC1", "MC2", "MC3", "MCFULL"):
                report.skip(tag)
            report.notes.append("category laws failed; norm axioms not checked")
            return report

    for x in scope.objects:
        m = cat.norm(cat.identity(x))
        report.record("MC1", leq(m, 0.0, tol),
                      {"object": cat.object_label(x), "mu_id": m, "lhs": m, "rhs": 0.0})
    report.verdicts.setdefault("MC1", Status.PASS)

    pairs = list(scope.pairs())
    if jobs > 1 and len(pairs) > 1:
        size = math.ceil(len(pairs) / jobs)
        chunks = [pairs[i:i + size] for i in range(0, len(pairs), size)]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda ch: _pair_chunk(cat, ch, tol), chunks))
    else:
        results = [_pair_chunk(cat, pairs, tol)]
    undefined = 0
    for events, und in results:
        undefined += und
        for tag, ok, witness in events:
            report.record(tag, ok, witness)
    for tag in ("MC2", "MC3", "MCFULL"):
        report.verdicts.setdefault(tag, Status.PASS)
    if undefined:
        report.notes.append(
            f"MC2/MC3: {undefined} out-of-window composable pairs skipped (SKIPPED)")
    return report


# -- kernel -----------------------------------------------------------------

class KernelView(NormedCategory):
    """Subcategory of arrows with norm at most ``tol``; same objects."""

    def __init__(self, base: NormedCategory, tol: float = DEFAULT_TOL):
        self.base = base
        self.tol = tol
        self.finite = base.finite

    def objects(self):
        return self.base.objects()

    def hom(self, x, y, cap=None):
        return [f for f in self.base.hom(x, y, cap=cap) if self.base.norm(f) <= self.tol]

    def dom(self, f):
        return self.base.dom(f)

    def cod(self, f):
        return self.base.cod(f)

    def identity(self, x):
        return self.base.identity(x)

    def norm(self, f):
        return self.base.norm(f)

    def _compose(self, f, g):
        return self.base._compose(f, g)

    def objects_equal(self, a, b):
        return self.base.objects_equal(a, b)

    def arrows_equal(self, f, g):
        return self.base.arrows_equal(f, g)

    def label(self, f):
        return self.base.label(f)

    def object_label(self, x):
        return self.base.object_label(x)

    def contains(self, f) -> bool:
        return self.base.norm(f) <= self.tol


def kernel(cat: NormedCategory, tol: float = DEFAULT_TOL) -> KernelView:
    return KernelView(cat, tol)


def check_kernel_axioms(cat: NormedCategory, members, cap=None,
                        budget: int = DEFAULT_BUDGET) -> AuditReport:
    """(K1) every identity is a member; (K2) ``f, f.g`` members imply ``g``.

    ``members`` is a set of arrows or a predicate on arrows.
    """
    inside = members if callable(members) else (lambda f: f in members)
    report = AuditReport(tol=0.0)
    scope = enumerate_scope(cat, cap=cap)
    for x in scope.objects:
        i = cat.identity(x)
        report.record("K1", inside(i), {"object": cat.object_label(x), "identity": cat.label(i)})
    report.verdicts.setdefault("K1", Status.PASS)
    if scope.composable_pairs > budget:
        report.skip("K2", f"{scope.composable_pairs} pairs exceed budget {budget}")
        return report
    for f, g in scope.pairs():
        if not inside(f):
            continue
        try:
            h = cat.compose(f, g)
        except UndefinedComposite:
            continue
        if inside(h):
            report.record("K2", inside(g), {"f": cat.label(f), "g": cat.label(g),
                                            "fg": cat.label(h)})
    report.verdicts.setdefault("K2", Status.PASS)
    return report


# -- isomorphisms -----------------------------------------------------------

@dataclass
class IsoCheck:
    """Outcome of a 0-isomorphism test; ``verdict`` None means undecided."""

    verdict: bool | None
    is_isomorphism: bool | None
    inverse: object = None
    mu: float = INF
    mu_inverse: float | None = None
    warnings: list = field(default_factory=list)

    def __bool__(self):
        return bool(self.verdict)


def find_inverse(cat: NormedCategory, f, candidates=None, cap=None, budget: int = DEFAULT_BUDGET):
    """Return ``(decided, inverse)``; ``inverse`` is None when none exists."""
    x, y = cat.dom(f), cat.cod(f)
    id_x, id_y = cat.identity(x), cat.identity(y)
    if cat.objects_equal(x, y) and cat.arrows_equal(f, id_x):
        return True, f
    decided = True
    if candidates is None:
        if not cat.finite and cap is None:
            return False, None
        candidates = list(cat.hom(y, x, cap=cap))
        decided = cat.finite
        if len(candidates) > budget:
            candidates = candidates[:budget]
            decided = False
    else:
        decided = False
    for g in candidates:
        try:
            if cat.arrows_equal(cat.compose(g, f), id_x) and cat.arrows_equal(cat.compose(f, g), id_y):
                return True, g
        except UndefinedComposite:
            continue
    return decided, None


def is_zero_isomorphism(cat: NormedCategory, f, tol: float = DEFAULT_TOL, candidates=None,
                        cap=None, budget: int = DEFAULT_BUDGET) -> IsoCheck:
    """Whether ``f`` is an isomorphism of norm at most ``tol``.

    Without ``candidates`` the inverse is searched in ``hom(cod f, dom f)``;
    on views whose hom-sets cannot be exhausted the verdict is ``None``.
    """
    mu = cat.norm(f)
    decided, inv = find_inverse(cat, f, candidates=candidates, cap=cap, budget=budget)
    if inv is None:
        if not decided:
            return IsoCheck(None, None, mu=mu,
                            warnings=["undecidable within budget: inverse search not exhaustive"])
        return IsoCheck(False, False, mu=mu)
    mu_inv = cat.norm(inv)
    warnings = []
    delta, _ = sat_sub(max(mu, mu_inv), min(mu, mu_inv))
    if delta > tol and not (mu == INF and mu_inv == INF):
        warnings.append(f"NORM-ASYMMETRY: mu(f)={mu!r} mu(f^-1)={mu_inv!r}")
    return IsoCheck(mu <= tol, True, inverse=inv, mu=mu, mu_inverse=mu_inv, warnings=warnings)


# -- induced quasi-metric ---------------------------------------------------

def infimum_arrow(cat: NormedCategory, x, y, cap=None) -> tuple[float, object]:
    """``(inf mu over hom(x, y), a minimising arrow or None)``."""
    special = getattr(cat, "hom_infimum", None)
    if special is not None:
        return special(x, y)
    if not cat.finite and cap is None:
        raise UndecidableError("infinite hom-set: supply a cap or a free-category view")
    best, arg = INF, None
    for f in cat.hom(x, y, cap=cap):
        m = cat.norm(f)
        if arg is None or m < best:
            best, arg = m, f
    return best, arg


def induced_quasimetric(cat: NormedCategory, x, y, cap=None) -> float:
    """``rho(x, y) = inf { mu(f) : f in hom(x, y) }``, INF for an empty hom-set."""
    return infimum_arrow(cat, x, y, cap=cap)[0]


def audit_quasimetric(cat: NormedCategory, objects=None, tol: float = 0.0, cap=None) -> AuditReport:
    """Check (Q1) and (Q2) of the induced quasi-metric on all object triples."""
    objs = list(objects if objects is not None else cat.objects())
    rho = {(i, j): induced_quasimetric(cat, a, b, cap=cap)
           for i, a in enumerate(objs) for j, b in enumerate(objs)}
    report = AuditReport(tol=tol)
    for i, a in enumerate(objs):
        report.record("Q1", rho[i, i] <= tol, {"object": cat.object_label(a), "rho": rho[i, i]})
    n = len(objs)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                lhs, rhs = rho[i, j], rho[i, k] + rho[k, j]
                report.record("Q2", leq(lhs, rhs, tol),
                              {"x": cat.object_label(objs[i]), "y": cat.object_label(objs[j]),
                               "z": cat.object_label(objs[k]), "lhs": lhs, "rhs": rhs})
    report.verdicts.setdefault("Q1", Status.PASS)
    report.verdicts.setdefault("Q2", Status.PASS)
    return report

