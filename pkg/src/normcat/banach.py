"""Contraction functors, orbit iteration and certified fixed points.

For a contraction ``F`` with factor ``r < 1`` and a start arrow
``f: a -> F(a)`` of finite norm, the orbit ``a -> F(a) -> F^2(a) -> ...``
has step norms at most ``r^k mu(f)``, so ``mu(f) r^n / (1 - r)`` bounds
every bond from stage ``n`` on.  The solver stops at the first ``n``
where that a-priori bound reaches the requested residual.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .cauchy import (
    DEFAULT_EPS_GRID, CauchyCertificate, GeometricTail, Sequence, SequenceCompletion, Transformation,
)
from .core import DEFAULT_TOL, AuditReport, IsoCheck, NormedCategory, Status, is_zero_isomorphism
from .errors import InputError, UndecidableError
from .extreal import INF, leq
from .functors import Expr, parse_expr
from .metcat import ColimitApproximant, EpCategory, EpPair, LipschitzMap, metric_colimit, point_space

DEFAULT_MAX_ITER = 64


class ContractionFunctor:
    """Endofunctor of ``host`` with a claimed contraction factor ``r``.

    ``object_map`` and ``arrow_map`` are callables or dicts.
    """

    def __init__(self, host: NormedCategory, object_map, arrow_map, factor: float, name: str = "F"):
        self.host = host
        self._obj = object_map if callable(object_map) else _lookup(object_map, "object")
        self._arr = arrow_map if callable(arrow_map) else _lookup(arrow_map, "arrow")
        self.factor = float(factor)
        self.name = name
        if not 0 <= self.factor:
            raise InputError("contraction factor must be non-negative")

    @classmethod
    def from_expr(cls, expr: Expr | str, host: NormedCategory | None = None) -> "ContractionFunctor":
        e = parse_expr(expr) if isinstance(expr, str) else expr
        return cls(host or EpCategory(), e.space, e.lift, e.factor, name=str(e))

    def obj(self, x):
        return self._obj(x)

    def arr(self, f):
        return self._arr(f)

    def power_obj(self, x, k: int):
        for _ in range(k):
            x = self.obj(x)
        return x


def _lookup(table: Mapping, what: str) -> Callable:
    def get(k):
        try:
            return table[k]
        except KeyError:
            raise InputError(f"{what} map is undefined at {k!r}") from None
    return get


def identity_functor(host: NormedCategory) -> ContractionFunctor:
    return ContractionFunctor(host, lambda x: x, lambda f: f, 1.0, name="Id")


def _scaled(r: float, mu: float) -> float:
    # r * INF is INF for r > 0; a factor of exactly 0 annihilates every norm
    if r == 0.0:
        return 0.0
    return r * mu


def verify_contraction(F: ContractionFunctor, arrows=None, objects=None, budget: int = 10_000,
                       tol: float = DEFAULT_TOL) -> AuditReport:
    """FUNCTOR and CONTRACTION verdicts, with NONEXPANSIVE as a diagnostic.

    On a finite host all arrows are checked (up to ``budget``); otherwise
    ``arrows`` must be a sample.
    """
    h = F.host
    report = AuditReport(tol=tol)
    if arrows is None:
        if not h.finite:
            raise InputError("host is not finite: supply a sample of arrows")
        arrows = h.arrows()
    arrows = list(arrows)
    if objects is None:
        objects = h.objects() if h.finite else []
        seen = []
        for f in arrows:
            for x in (h.dom(f), h.cod(f)):
                if not any(h.objects_equal(x, y) for y in seen):
                    seen.append(x)
        if not h.finite:
            objects = seen
    objects = list(objects)
    if len(arrows) > budget:
        report.notes.append(f"sample truncated to the first {budget} arrows")
        arrows = arrows[:budget]
    if h.finite:
        known = h.objects()
        for x in objects:
            if not any(h.objects_equal(F.obj(x), y) for y in known):
                raise InputError(f"{F.name} maps {h.object_label(x)} outside the host")
    for x in objects:
        fx = F.obj(x)
        ok = h.arrows_equal(F.arr(h.identity(x)), h.identity(fx))
        report.record("FUNCTOR", ok, {"law": "identity", "object": h.object_label(x)})
    images = []
    for f in arrows:
        ff = F.arr(f)
        images.append(ff)
        ok = h.objects_equal(h.dom(ff), F.obj(h.dom(f))) and h.objects_equal(h.cod(ff), F.obj(h.cod(f)))
        report.record("FUNCTOR", ok, {"law": "typing", "f": h.label(f)})
        mu, fmu = h.norm(f), h.norm(ff)
        rhs = _scaled(F.factor, mu)
        report.record("CONTRACTION", leq(fmu, rhs, tol),
                      {"f": h.label(f), "mu_f": mu, "mu_Ff": fmu, "lhs": fmu, "rhs": rhs})
        report.record("NONEXPANSIVE", leq(fmu, mu, tol),
                      {"f": h.label(f), "mu_f": mu, "mu_Ff": fmu, "lhs": fmu, "rhs": mu})
    pairs = 0
    for i, f in enumerate(arrows):
        for j, g in enumerate(arrows):
            if pairs >= budget:
                break
            if not h.objects_equal(h.dom(f), h.cod(g)):
                continue
            pairs += 1
            try:
                fg = h.compose(f, g)
            except Exception:  # out-of-window composites carry no functoriality claim
                continue
            ok = h.arrows_equal(F.arr(fg), h.compose(images[i], images[j]))
            report.record("FUNCTOR", ok, {"law": "composition", "f": h.label(f), "g": h.label(g)})
    for tag in ("FUNCTOR", "CONTRACTION", "NONEXPANSIVE"):
        report.verdicts.setdefault(tag, Status.PASS)
    report.stats.update(factor=F.factor, arrows=len(arrows), pairs=pairs)
    return report


def orbit(F: ContractionFunctor, f, n: int | None = None) -> Sequence:
    """``a -> F(a) -> F^2(a) -> ...`` with steps ``F^k(f)``; ``n`` limits the prefix to ``n + 1`` objects."""
    h = F.host
    a = h.dom(f)
    if not h.objects_equal(h.cod(f), F.obj(a)):
        raise InputError("start arrow must go from a to F(a)")
    if h.norm(f) == INF:
        raise InputError("start arrow has infinite norm")
    objs, steps = [a], [f]

    def obj(k):
        while len(objs) <= k:
            objs.append(F.obj(objs[-1]))
        return objs[k]

    def step(k):
        while len(steps) <= k:
            steps.append(F.arr(steps[-1]))
        return steps[k]
    return Sequence(h, obj, step=step, length=None if n is None else n + 1, name=f"orbit[{F.name}]")


def tail_bound(mu_f: float, r: float, n: int) -> float:
    """``mu_f r^n / (1 - r)``: bounds ``mu`` of every orbit bond from stage ``n``."""
    if not 0 <= r < 1:
        raise InputError(f"tail bound needs 0 <= r < 1, got {r!r}")
    if mu_f == INF:
        raise InputError("tail bound needs a finite start norm")
    return GeometricTail(mu_f, r).tail_sum(n)


def tail_certificate(mu_f: float, r: float, eps_grid=DEFAULT_EPS_GRID) -> CauchyCertificate:
    """``N(eps)`` = least ``n`` with ``tail_bound(mu_f, r, n) <= eps``."""
    tail_bound(mu_f, r, 0)
    return CauchyCertificate.from_function(GeometricTail(mu_f, r).modulus, eps_grid)


def extension(F: ContractionFunctor) -> Callable[[Sequence], Sequence]:
    """The extension of ``F`` to sequences, applied pointwise."""
    def Fbar(s: Sequence) -> Sequence:
        return Sequence(s.host, lambda k: F.obj(s.object_at(k)), step=lambda k: F.arr(s.step(k)),
                        length=s.length, name=f"{F.name}({s.name})")
    return Fbar


def start_arrow(F: ContractionFunctor, a=None) -> EpPair:
    """Default start ``<* -> first point of F(a), constant>`` for EP hosts."""
    a = a if a is not None else point_space()
    fa = F.obj(a)
    if a.size != 1:
        raise InputError("the default start arrow needs a one-point start space")
    return EpPair(LipschitzMap(a, fa, [0]), LipschitzMap(fa, a, [0] * fa.size))


@dataclass
class FixedPointResult:
    """Certified approximate fixed point.

    ``fixed_point`` is the orbit, ``witness`` the transformation
    ``s -> F(s)`` with components ``F^k(f)``; ``mu_estimate`` is its norm at
    the stopping index and ``residual`` the a-priori tail bound there.
    """

    functor: ContractionFunctor
    fixed_point: Sequence
    witness: Transformation
    inverse: Transformation
    completion: SequenceCompletion
    approximant: ColimitApproximant | None
    mu_start: float
    mu_estimate: float
    residual: float
    iterations: int
    eps: float
    status: str
    contraction: AuditReport
    notes: list = field(default_factory=list)

    def verify(self, tol: float | None = None) -> bool:
        return verify_fixed_point(self.functor, self.fixed_point, self.witness,
                                  self.residual if tol is None else tol,
                                  inverse=self.inverse, category=self.completion)

    def to_dict(self) -> dict:
        out = {"functor": self.functor.name, "factor": self.functor.factor, "eps": self.eps,
               "iterations": self.iterations, "mu_start": self.mu_start,
               "mu_estimate": self.mu_estimate, "residual": self.residual, "status": self.status,
               "notes": list(self.notes)}
        if self.approximant is not None:
            out["approximant"] = self.approximant.summary()
        return out


def solve_fixed_point(F: ContractionFunctor, a=None, f=None, eps: float = 2.0 ** -8,
                      max_iter: int = DEFAULT_MAX_ITER) -> FixedPointResult:
    """Iterate the orbit of ``f`` until ``tail_bound <= eps``.

    On EP hosts the stage spaces are glued by :func:`metric_colimit` into a
    finite approximant.  Hitting ``max_iter`` first gives status
    ``INCOMPLETE``.
    """
    h = F.host
    if f is None:
        if not isinstance(h, EpCategory):
            raise InputError("a start arrow is required outside EP hosts")
        f = start_arrow(F, a)
    mu_f = h.norm(f)
    if mu_f == INF:
        raise InputError("start arrow has infinite norm")
    r = F.factor
    if not 0 <= r < 1:
        raise InputError(f"{F.name} has factor {r!r}; a contraction needs r < 1")
    seq = orbit(F, f)
    sample = [seq.step(k) for k in range(3)]
    sample.append(h.identity(seq.object_at(0)))
    report = verify_contraction(F, arrows=sample, objects=[seq.object_at(k) for k in range(3)])
    if not report.passed_tags(("FUNCTOR", "CONTRACTION")):
        raise InputError(f"{F.name} fails the contraction check", report=report)
    n = 0
    while tail_bound(mu_f, r, n) > eps and n < max_iter:
        n += 1
    residual = tail_bound(mu_f, r, n)
    status = "COMPLETE" if residual <= eps else "INCOMPLETE"
    notes = [] if status == "COMPLETE" else [f"iteration budget {max_iter} reached before the residual"]
    approximant = None
    if isinstance(f, EpPair):
        spaces = [seq.object_at(k) for k in range(n + 1)]
        inclusions = [seq.step(k).e for k in range(n)]
        tail = GeometricTail(mu_f, r)
        modulus = tail.modulus if status == "COMPLETE" else (lambda e: n)
        approximant = metric_colimit(spaces, inclusions, modulus, eps, horizon=n)
    Fbar = extension(F)
    target = Fbar(seq)
    witness = Transformation(seq, target, lambda k: k, seq.step, name="h")
    inverse = Transformation(target, seq, lambda k: k + 1,
                             lambda k: h.identity(seq.object_at(k + 1)), name="h^-1")
    completion = SequenceCompletion(h, horizon=n)
    mu_est = completion.norm(witness)
    return FixedPointResult(F, seq, witness, inverse, completion, approximant, mu_f, mu_est,
                            residual, n, eps, status, report, notes)


def fixed_point_check(F: ContractionFunctor, s, h, tol: float = DEFAULT_TOL, inverse=None,
                      category: NormedCategory | None = None) -> IsoCheck:
    """Is ``h: s -> F(s)`` a 0-isomorphism (up to ``tol``)?"""
    cat = category or F.host
    image = extension(F)(s) if isinstance(s, Sequence) else F.obj(s)
    if not (cat.objects_equal(cat.dom(h), s) and cat.objects_equal(cat.cod(h), image)):
        return IsoCheck(False, None, mu=cat.norm(h), warnings=["h is not an arrow s -> F(s)"])
    try:
        return is_zero_isomorphism(cat, h, tol, candidates=None if inverse is None else [inverse])
    except UndecidableError as exc:
        return IsoCheck(None, None, mu=cat.norm(h), warnings=[str(exc)])


def verify_fixed_point(F: ContractionFunctor, s, h, tol: float = DEFAULT_TOL, inverse=None,
                       category: NormedCategory | None = None) -> bool:
    """True iff ``h`` is an isomorphism ``s -> F(s)`` with ``mu(h) <= tol``."""
    return fixed_point_check(F, s, h, tol, inverse, category).verdict is True
