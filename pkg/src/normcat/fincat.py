"""Finite categories given by composition tables, and norms on them.

Arrow and object ids are opaque strings.  Enumeration order is
lexicographic by id so that audit witnesses are reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, Sequence

from .core import (
    DEFAULT_BUDGET, DEFAULT_TOL, AuditReport, NormedCategory, Status, audit_norm,
    check_category_laws, check_kernel_axioms, enumerate_scope,
)
from .errors import InputError, NotSubcategoryError, UndefinedComposite
from .extreal import INF, ext, leq


class FiniteCategory(NormedCategory):
    """A finite category presented by an explicit composition table.

    ``table[(f, g)]`` is ``f . g``.  With ``partial=True`` missing entries
    are out-of-window composites (truncated infinite groups) rather than
    defects; the auditors skip them with a note.
    """

    finite = True

    def __init__(self, objects: Iterable[str], arrows: Mapping[str, tuple[str, str]],
                 identities: Mapping[str, str], table: Mapping[tuple[str, str], str],
                 norm: Mapping[str, float] | None = None, partial: bool = False):
        self._objects = tuple(sorted(objects))
        self._arrows = MappingProxyType({a: (d, c) for a, (d, c) in arrows.items()})
        self._identities = MappingProxyType(dict(identities))
        self._table = MappingProxyType(dict(table))
        self.partial = partial
        objset = set(self._objects)
        for a, (d, c) in self._arrows.items():
            if d not in objset or c not in objset:
                raise InputError(f"arrow {a!r} has dangling endpoint ({d!r} -> {c!r})")
        for x in self._objects:
            if x not in self._identities:
                raise InputError(f"object {x!r} has no identity arrow")
        for x, i in self._identities.items():
            if x not in objset:
                raise InputError(f"identity given for unknown object {x!r}")
            if i not in self._arrows:
                raise InputError(f"identity of {x!r} is unknown arrow {i!r}")
        for (f, g), h in self._table.items():
            for a in (f, g, h):
                if a not in self._arrows:
                    raise InputError(f"composition table mentions unknown arrow {a!r}")
        homs: dict[tuple[str, str], list[str]] = {}
        for a in sorted(self._arrows):
            homs.setdefault(self._arrows[a], []).append(a)
        self._homs = {k: tuple(v) for k, v in homs.items()}
        self._norm = None
        if norm is not None:
            self._norm = self._check_norm_table(norm)

    def _check_norm_table(self, norm):
        out = {}
        for a in self._arrows:
            if a not in norm:
                raise InputError(f"norm table is missing arrow {a!r}")
            try:
                out[a] = ext(norm[a])
            except ValueError as exc:
                raise InputError(f"norm of {a!r}: {exc}") from None
        extra = set(norm) - set(self._arrows)
        if extra:
            raise InputError(f"norm table mentions unknown arrows {sorted(extra)}")
        return MappingProxyType(out)

    # -- NormedCategory -------------------------------------------------
    def objects(self):
        return list(self._objects)

    def hom(self, x, y, cap=None):
        return self._homs.get((x, y), ())

    def dom(self, f):
        return self._arrows[f][0]

    def cod(self, f):
        return self._arrows[f][1]

    def identity(self, x):
        return self._identities[x]

    def norm(self, f):
        if self._norm is None:
            raise InputError("category has no norm table attached")
        return self._norm[f]

    def _compose(self, f, g):
        try:
            return self._table[f, g]
        except KeyError:
            raise UndefinedComposite(f"no table entry for {f} . {g}") from None

    # -- extras ----------------------------------------------------------
    @property
    def arrow_ids(self) -> list[str]:
        return sorted(self._arrows)

    @property
    def norm_table(self) -> Mapping[str, float] | None:
        return self._norm

    @property
    def table(self) -> Mapping[tuple[str, str], str]:
        return self._table

    def identity_ids(self) -> set[str]:
        return set(self._identities.values())

    def with_norm(self, norm: Mapping[str, float]) -> "FiniteCategory":
        return FiniteCategory(self._objects, self._arrows, self._identities, self._table,
                              norm=norm, partial=self.partial)

    def with_table(self, table) -> "FiniteCategory":
        return FiniteCategory(self._objects, self._arrows, self._identities, table,
                              norm=self._norm, partial=self.partial)

    def composable_pairs(self):
        return [(f, g) for f in self.arrow_ids for g in self.arrow_ids
                if self.dom(f) == self.cod(g)]

    def to_payload(self) -> dict:
        payload = {
            "objects": list(self._objects),
            "arrows": [{"id": a, "dom": d, "cod": c} for a, (d, c) in sorted(self._arrows.items())],
            "identities": dict(sorted(self._identities.items())),
            "compose": [[f, g, h] for (f, g), h in sorted(self._table.items())],
        }
        if self.partial:
            payload["partial"] = True
        if self._norm is not None:
            payload["norm"] = {a: ("inf" if v == INF else v) for a, v in sorted(self._norm.items())}
        return payload


def from_payload(payload: Mapping) -> FiniteCategory:
    norm = payload.get("norm")
    return FiniteCategory(
        payload["objects"],
        {a["id"]: (a["dom"], a["cod"]) for a in payload["arrows"]},
        payload["identities"],
        {(f, g): h for f, g, h in payload["compose"]},
        norm=norm,
        partial=bool(payload.get("partial", False)),
    )


def preorder_category(elements: Sequence[str], leq_rel: Callable[[str, str], bool],
                      norm: Callable[[str, str], float] | None = None) -> FiniteCategory:
    """Thin category with an arrow ``"x<y"`` whenever ``leq_rel(x, y)``."""
    elements = list(elements)
    arrows, table = {}, {}
    name = lambda x, y: f"{x}<{y}"
    for x in elements:
        for y in elements:
            if x == y or leq_rel(x, y):
                arrows[name(x, y)] = (x, y)
    for x in elements:
        for y in elements:
            for z in elements:
                if name(x, y) in arrows and name(y, z) in arrows:
                    if name(x, z) not in arrows:
                        raise InputError(f"relation is not transitive at {x}, {y}, {z}")
                    table[name(y, z), name(x, y)] = name(x, z)
    ids = {x: name(x, x) for x in elements}
    table_norm = None
    if norm is not None:
        table_norm = {a: norm(d, c) for a, (d, c) in arrows.items()}
    return FiniteCategory(elements, arrows, ids, table, norm=table_norm)


def validate_category(c: FiniteCategory, budget: int = DEFAULT_BUDGET) -> AuditReport:
    """CAT-LAWS audit: closure, identity laws and associativity.

    Dangling ids are rejected by the constructor with :class:`InputError`;
    a missing table entry on a non-partial category is a closure FAIL.
    """
    report = AuditReport(tol=0.0)
    scope = enumerate_scope(c)
    check_category_laws(c, scope, budget, report)
    return report


# -- monics and potential kernels -------------------------------------------

def monic_arrows(c: FiniteCategory) -> set[str]:
    """Arrows satisfying right cancellation: ``f.g1 == f.g2`` implies ``g1 == g2``."""
    monics = set()
    for f in c.arrow_ids:
        x = c.dom(f)
        ok = True
        for w in c.objects():
            parallel = c.hom(w, x)
            seen = {}
            for g in parallel:
                try:
                    h = c.compose(f, g)
                except UndefinedComposite:
                    continue
                if h in seen and seen[h] != g:
                    ok = False
                    break
                seen[h] = g
            if not ok:
                break
        if ok:
            monics.add(f)
    return monics


def check_potential_kernel(c: FiniteCategory, k0: Iterable[str]) -> AuditReport:
    """(K1)/(K2) audit of a candidate kernel ``k0``.

    Raises :class:`NotSubcategoryError` when ``k0`` is not closed under
    composition or mentions unknown arrows.
    """
    k0 = set(k0)
    unknown = k0 - set(c.arrow_ids)
    if unknown:
        raise NotSubcategoryError(f"unknown arrows {sorted(unknown)}",
                                  witness={"unknown": sorted(unknown)})
    for f in sorted(k0):
        for g in sorted(k0):
            if c.dom(f) != c.cod(g):
                continue
            try:
                h = c.compose(f, g)
            except UndefinedComposite:
                continue
            if h not in k0:
                raise NotSubcategoryError(
                    f"k0 is not closed under composition: {f} . {g} = {h}",
                    witness={"f": f, "g": g, "fg": h})
    return check_kernel_axioms(c, k0)


def discrete_norm(c: FiniteCategory, k0: Iterable[str]) -> dict[str, float]:
    """The 0/INF norm whose kernel is exactly ``k0``."""
    k0 = set(k0)
    report = check_potential_kernel(c, k0)
    if not report.passed:
        raise InputError("k0 is not a potential kernel", tag="NOT-POTENTIAL-KERNEL",
                         report=report)
    return {a: (0.0 if a in k0 else INF) for a in c.arrow_ids}


# -- groups -----------------------------------------------------------------

@dataclass(frozen=True)
class Group:
    """Group presentation by a (possibly windowed) multiplication table.

    ``op[(a, b)]`` is ``a * b``; a missing entry means the product leaves
    the window.
    """

    elements: tuple
    op: Mapping
    inverse: Mapping
    unit: str
    window: bool = False


def check_group(elements: Sequence[str], op: Mapping, inverse: Mapping,
                window: bool = False) -> Group:
    elements = tuple(elements)
    elset = set(elements)
    for (a, b), c in op.items():
        if a not in elset or b not in elset or c not in elset:
            raise InputError(f"op table entry ({a}, {b}) -> {c} leaves the element set")
    if not window:
        missing = [(a, b) for a in elements for b in elements if (a, b) not in op]
        if missing:
            raise InputError(f"op table is not total, e.g. {missing[0]}")
    units = [e for e in elements
             if all(op.get((e, a), a) == a and op.get((a, e), a) == a for a in elements)
             and all((e, a) in op and (a, e) in op for a in elements)]
    if not units:
        raise InputError("op table has no neutral element")
    unit = units[0]
    for a in elements:
        if a not in inverse:
            raise InputError(f"element {a!r} has no inverse")
        b = inverse[a]
        if op.get((a, b)) != unit or op.get((b, a)) != unit:
            raise InputError(f"{b!r} is not an inverse of {a!r}")
    for a in elements:
        for b in elements:
            ab = op.get((a, b))
            if ab is None:
                continue
            for c in elements:
                bc = op.get((b, c))
                if bc is None:
                    continue
                lhs, rhs = op.get((ab, c)), op.get((a, bc))
                if lhs is None or rhs is None:
                    continue
                if lhs != rhs:
                    raise InputError(f"op table is not associative at ({a}, {b}, {c})")
    return Group(elements, MappingProxyType(dict(op)), MappingProxyType(dict(inverse)), unit, window)


GROUP_OBJECT = "*"


def group_as_normed_category(elements: Sequence[str], op: Mapping, inverse: Mapping,
                             mu: Mapping[str, float], window: bool = False) -> FiniteCategory:
    """One-object category whose arrows are the group elements, normed by ``mu``."""
    g = check_group(elements, op, inverse, window=window)
    arrows = {a: (GROUP_OBJECT, GROUP_OBJECT) for a in g.elements}
    return FiniteCategory([GROUP_OBJECT], arrows, {GROUP_OBJECT: g.unit}, dict(op),
                          norm=mu, partial=window)


def cyclic_group(n: int) -> Group:
    els = [f"r{k}" for k in range(n)]
    op = {(f"r{a}", f"r{b}"): f"r{(a + b) % n}" for a in range(n) for b in range(n)}
    inv = {f"r{a}": f"r{(-a) % n}" for a in range(n)}
    return check_group(els, op, inv)


def integer_window(radius: int) -> Group:
    """Integers ``-radius..radius`` under addition; sums outside are undefined."""
    name = str
    els = [name(k) for k in range(-radius, radius + 1)]
    op = {(name(a), name(b)): name(a + b)
          for a in range(-radius, radius + 1) for b in range(-radius, radius + 1)
          if abs(a + b) <= radius}
    inv = {name(a): name(-a) for a in range(-radius, radius + 1)}
    return check_group(els, op, inv, window=True)


def group_category(g: Group, mu: Mapping[str, float]) -> FiniteCategory:
    return group_as_normed_category(g.elements, g.op, g.inverse, mu, window=g.window)


def check_group_norm_equivalence(g: Group, mu: Mapping[str, float],
                                 tol: float = DEFAULT_TOL) -> AuditReport:
    """Audit (N1)-(N3) and (MC1)-(MC3) independently on a group.

    ``report.stats["suites_agree"]`` records whether both suites reach the
    same overall verdict, which is expected on every group.
    """
    mu = {a: ext(v) for a, v in mu.items()}
    report = AuditReport(tol=tol)
    e = g.unit
    report.record("N1", leq(mu[e], 0.0, tol), {"element": e, "lhs": mu[e], "rhs": 0.0})
    for a in g.elements:
        b = g.inverse[a]
        lo, hi = sorted((mu[a], mu[b]))
        report.record("N2", leq(hi, lo, tol),
                      {"element": a, "inverse": b, "mu": mu[a], "mu_inverse": mu[b],
                       "lhs": hi, "rhs": lo})
    for a in g.elements:
        for b in g.elements:
            ab = g.op.get((a, b))
            if ab is None:
                continue
            report.record("N3", leq(mu[ab], mu[a] + mu[b], tol),
                          {"f": a, "g": b, "fg": ab, "lhs": mu[ab], "rhs": mu[a] + mu[b]})
    for tag in ("N1", "N2", "N3"):
        report.verdicts.setdefault(tag, Status.PASS)
    mc = audit_norm(group_category(g, mu), tol=tol)
    for tag in ("MC1", "MC2", "MC3"):
        report.verdicts[tag] = mc.verdicts[tag]
        if tag in mc.counterexamples:
            report.counterexamples[tag] = mc.counterexamples[tag]
            report.violations[tag] = mc.violations[tag]
    report.notes.extend(mc.notes)
    n_ok = report.passed_tags(("N1", "N2", "N3"))
    mc_ok = report.passed_tags(("MC1", "MC2", "MC3"))
    report.stats["suites_agree"] = n_ok == mc_ok
    return report


# -- pseudo-metrics ---------------------------------------------------------

def pseudometric_as_category(points: Sequence[str], rho) -> FiniteCategory:
    """Indiscrete category on ``points`` with ``mu(x->y) = rho[x][y]``.

    The triangle inequality is not required: it is exactly what the norm
    audit tests (as MC2).
    """
    points = [str(p) for p in points]
    n = len(points)
    try:
        mat = [[ext(rho[i][j]) for j in range(n)] for i in range(n)]
    except (ValueError, IndexError, TypeError) as exc:
        raise InputError(f"distance matrix: {exc}") from None
    for i in range(n):
        if mat[i][i] != 0.0:
            raise InputError(f"rho({points[i]}, {points[i]}) must be 0")
        for j in range(n):
            if mat[i][j] != mat[j][i]:
                raise InputError(
                    f"rho is asymmetric at ({points[i]}, {points[j]}); every arrow here is an "
                    "isomorphism, so use the free category of the asymmetric space instead "
                    "(freecat.asymmetric_space_to_digraph)")
    name = lambda x, y: f"{x}->{y}"
    arrows = {name(x, y): (x, y) for x in points for y in points}
    table = {(name(y, z), name(x, y)): name(x, z) for x in points for y in points for z in points}
    ids = {x: name(x, x) for x in points}
    norm = {name(points[i], points[j]): mat[i][j] for i in range(n) for j in range(n)}
    return FiniteCategory(points, arrows, ids, table, norm=norm)


def disjoint_sum(a: FiniteCategory, b: FiniteCategory, tags=("0", "1")) -> FiniteCategory:
    """Coproduct of two finite categories; ids are prefixed ``"<tag>:"``."""
    objects, arrows, ids, table, norm = [], {}, {}, {}, {}
    for tag, c in zip(tags, (a, b)):
        p = lambda s, tag=tag: f"{tag}:{s}"
        objects += [p(x) for x in c.objects()]
        for f in c.arrow_ids:
            arrows[p(f)] = (p(c.dom(f)), p(c.cod(f)))
            if c.norm_table is not None:
                norm[p(f)] = c.norm_table[f]
        ids.update({p(x): p(c.identity(x)) for x in c.objects()})
        table.update({(p(f), p(g)): p(h) for (f, g), h in c.table.items()})
    with_norm = a.norm_table is not None and b.norm_table is not None
    return FiniteCategory(objects, arrows, ids, table, norm=norm if with_norm else None,
                          partial=a.partial or b.partial)
