"""Sequences as functors from omega, Cauchy certificates and the completion.

Every verdict here is horizon-bounded: ``CONFIRMED-UP-TO-HORIZON`` means
the supplied certificate survived all checks up to the horizon,
``REFUTED`` carries a finite witness, and ``NO-VERDICT`` means finite
data cannot decide.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence as Seq

from .core import DEFAULT_TOL, AuditReport, NormedCategory, Status
from .errors import InputError, UndecidableError, UndefinedComposite
from .extreal import INF, to_json

CONFIRMED = "CONFIRMED-UP-TO-HORIZON"
REFUTED = "REFUTED"
NO_VERDICT = "NO-VERDICT"

DEFAULT_EPS_GRID = (1.0, 0.3, 0.1, 0.03, 0.01, 3e-3, 1e-3, 3e-4, 1e-4, 1e-5, 1e-6)


class PreorderCategory(NormedCategory):
    """Thin category: one arrow ``(a, b)`` whenever ``leq(a, b)``.

    ``norm`` receives the pair ``(a, b)``.  Without an explicit object list
    the view is query-only (e.g. indexed by all naturals).
    """

    def __init__(self, leq: Callable, norm: Callable, objects: Seq | None = None, name: str = "preorder"):
        self._leq = leq
        self._norm = norm
        self._objects = list(objects) if objects is not None else None
        self.finite = objects is not None
        self.name = name

    def objects(self):
        if self._objects is None:
            return super().objects()
        return list(self._objects)

    def hom(self, x, y, cap=None):
        return [(x, y)] if self._leq(x, y) else []

    def dom(self, f):
        return f[0]

    def cod(self, f):
        return f[1]

    def identity(self, x):
        return (x, x)

    def norm(self, f):
        return float(self._norm(f))

    def _compose(self, f, g):
        return (g[0], f[1])

    def label(self, f):
        return f"{f[0]}->{f[1]}"


# -- sequences --------------------------------------------------------------

class Sequence:
    """A functor from omega into ``host``.

    Supply either ``step(n)`` (the arrow ``x_n -> x_{n+1}``; longer bonds
    are composites) or ``bond(n, m)`` directly.  ``length`` bounds
    table-backed prefixes.  Results are memoised under a lock.
    """

    def __init__(self, host: NormedCategory, object_at: Callable[[int], object],
                 step: Callable[[int], object] | None = None,
                 bond: Callable[[int, int], object] | None = None,
                 length: int | None = None, name: str = "x"):
        if (step is None) == (bond is None):
            raise InputError("give exactly one of step or bond")
        self.host = host
        self._object_at = object_at
        self._step = step
        self._bond = bond
        self.length = length
        self.name = name
        self._lock = threading.RLock()
        self._objs: dict = {}
        self._bonds: dict = {}

    @property
    def table_backed(self) -> bool:
        return self._bond is not None

    @classmethod
    def from_table(cls, host, objects: Seq, steps: Seq | None = None, bonds: dict | None = None,
                   name: str = "x") -> "Sequence":
        """Finite prefix from consecutive ``steps`` or an explicit ``bonds[(n, m)]`` table."""
        objs = list(objects)
        if steps is not None:
            steps = list(steps)
            if len(steps) != len(objs) - 1:
                raise InputError(f"{len(objs)} objects need {len(objs) - 1} steps, got {len(steps)}")
            return cls(host, objs.__getitem__, step=steps.__getitem__, length=len(objs), name=name)
        table = dict(bonds or {})

        def bond(n, m):
            try:
                return table[n, m]
            except KeyError:
                raise InputError(f"bond ({n}, {m}) missing from the table") from None
        return cls(host, objs.__getitem__, bond=bond, length=len(objs), name=name)

    def _check_index(self, n):
        if n < 0 or (self.length is not None and n >= self.length):
            raise InputError(f"index {n} outside the sequence (length {self.length})")

    def object_at(self, n: int):
        self._check_index(n)
        with self._lock:
            if n not in self._objs:
                self._objs[n] = self._object_at(n)
            return self._objs[n]

    def bond(self, n: int, m: int):
        """``x_n^m``; requesting ``n > m`` is a contract violation."""
        if n > m:
            raise InputError(f"bond({n}, {m}) requested with n > m")
        self._check_index(m)
        self._check_index(n)
        with self._lock:
            key = (n, m)
            if key in self._bonds:
                return self._bonds[key]
            if n == m:
                out = self.host.identity(self.object_at(n))
            elif self._bond is not None:
                out = self._bond(n, m)
            else:
                k = max((j for j in range(n, m) if (n, j) in self._bonds), default=n)
                acc = self._bonds.get((n, k)) if k > n else self.host.identity(self.object_at(n))
                for j in range(k, m):
                    acc = self.host.compose(self._step(j), acc)
                    self._bonds[n, j + 1] = acc
                out = acc
            self._bonds[key] = out
            return out

    def step(self, n: int):
        return self.bond(n, n + 1)

    def step_norms(self, horizon: int) -> list[float]:
        return [self.host.norm(self.step(n)) for n in range(horizon)]

    def subsequence(self, index: Callable[[int], int] | Seq[int], name: str | None = None) -> "Sequence":
        """``n -> x_{index(n)}`` for a strictly increasing ``index``."""
        idx = index if callable(index) else list(index).__getitem__
        length = None if callable(index) else len(index)

        def bond(n, m):
            a, b = idx(n), idx(m)
            if n < m and a >= b:
                raise InputError(f"reindexing is not strictly increasing at {n}, {m}")
            return self.bond(a, b)
        return Sequence(self.host, lambda n: self.object_at(idx(n)), bond=bond, length=length,
                        name=name or f"{self.name}'")

    def shift(self, k: int = 1) -> "Sequence":
        length = None if self.length is None else self.length - k
        return Sequence(self.host, lambda n: self.object_at(n + k),
                        bond=lambda n, m: self.bond(n + k, m + k), length=length,
                        name=f"{self.name}[+{k}]")

    def agrees(self, other: "Sequence", horizon: int) -> bool:
        h = self.host
        for n in range(horizon + 1):
            if not h.objects_equal(self.object_at(n), other.object_at(n)):
                return False
            if n < horizon and not h.arrows_equal(self.step(n), other.step(n)):
                return False
        return True

    def check_functoriality(self, horizon: int) -> int:
        """Exhaustively check ``x_m^k . x_n^m == x_n^k``; raise on violation."""
        h = self.host
        checked = 0
        for n in range(horizon + 1):
            for m in range(n, horizon + 1):
                for k in range(m, horizon + 1):
                    lhs = h.compose(self.bond(m, k), self.bond(n, m))
                    if not h.arrows_equal(lhs, self.bond(n, k)):
                        raise InputError("sequence is not functorial",
                                         witness={"n": n, "m": m, "k": k})
                    checked += 1
        return checked

    def __repr__(self):
        return f"<Sequence {self.name}>"


def constant_sequence(host: NormedCategory, x, name: str = "const") -> Sequence:
    return Sequence(host, lambda n: x, step=lambda n: host.identity(x), name=name)


# -- certificates -----------------------------------------------------------

@dataclass(frozen=True)
class CauchyCertificate:
    """Finite modulus table ``(eps, N)``: ``mu(x_m^n) < eps`` whenever ``N < m <= n``."""

    rows: tuple

    def __post_init__(self):
        rows = tuple((float(e), int(n)) for e, n in self.rows)
        object.__setattr__(self, "rows", rows)
        if not rows:
            raise InputError("certificate has no rows")
        for e, n in rows:
            if not e > 0 or n < 0:
                raise InputError(f"bad certificate row ({e}, {n})")
        for (e1, n1), (e2, n2) in zip(rows, rows[1:]):
            if not (e1 > e2 and n1 <= n2):
                raise InputError("certificate rows must have decreasing eps and nondecreasing N")

    @classmethod
    def from_function(cls, modulus: Callable[[float], int], eps_grid=DEFAULT_EPS_GRID) -> "CauchyCertificate":
        return cls(tuple((e, modulus(e)) for e in sorted(set(eps_grid), reverse=True)))

    @property
    def max_n(self) -> int:
        return self.rows[-1][1]

    def threshold(self, eps: float) -> int:
        """``N`` of the coarsest row whose eps is at most ``eps``."""
        for e, n in self.rows:
            if e <= eps:
                return n
        raise InputError(f"certificate does not reach eps = {eps!r}")

    def to_dict(self) -> dict:
        return {"rows": [[e, n] for e, n in self.rows]}


@dataclass
class CauchyVerdict:
    status: str
    horizon: int
    witness: dict | None = None
    checked: int = 0
    certificate: CauchyCertificate | None = None
    notes: list = field(default_factory=list)

    @property
    def confirmed(self) -> bool:
        return self.status == CONFIRMED

    def to_dict(self) -> dict:
        out = {"status": self.status, "horizon": self.horizon, "checked": self.checked,
               "notes": list(self.notes)}
        if self.witness is not None:
            out["witness"] = {k: to_json(v) if isinstance(v, float) else v
                              for k, v in self.witness.items()}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_dict()
        return out


def check_cauchy(seq: Sequence, cert: CauchyCertificate, horizon: int,
                 check_functor: bool = True) -> CauchyVerdict:
    """Check ``mu(x_m^n) < eps`` for every row and all ``N < m <= n <= horizon``."""
    if horizon < cert.max_n:
        raise InputError(f"horizon {horizon} is below the certificate's largest N {cert.max_n}")
    if check_functor and seq.table_backed:
        seq.check_functoriality(horizon)
    host = seq.host
    checked = 0
    for eps, n0 in cert.rows:
        for m in range(n0 + 1, horizon + 1):
            for n in range(m, horizon + 1):
                mu = host.norm(seq.bond(m, n))
                checked += 1
                if not mu < eps:
                    return CauchyVerdict(REFUTED, horizon, {"eps": eps, "N": n0, "m": m, "n": n, "mu": mu},
                                         checked, cert)
    return CauchyVerdict(CONFIRMED, horizon, None, checked, cert)


@dataclass(frozen=True)
class GeometricTail:
    """Claimed bound ``mu(x_k^{k+1}) <= c * q**k`` for all ``k >= n0``."""

    c: float
    q: float
    n0: int = 0

    def __post_init__(self):
        if not (0 <= self.q < 1) or not (0 <= self.c < INF):
            raise InputError("geometric tail needs finite c >= 0 and 0 <= q < 1")

    def step_bound(self, k: int) -> float:
        return self.c * self.q ** k

    def tail_sum(self, m: int) -> float:
        """Bound on ``mu(x_m^n)`` for every ``n >= m >= n0`` (MC2 chaining)."""
        return self.c * self.q ** m / (1.0 - self.q)

    def modulus(self, eps: float) -> int:
        """Least ``n >= n0`` with ``tail_sum(n) <= eps``."""
        n = self.n0
        while self.tail_sum(n) > eps:
            n += 1
            if n > 100_000:
                raise InputError(f"tail does not reach eps = {eps!r}")
        return n


@dataclass
class SeriesResult:
    partial_sums: list
    status: str
    certificate: CauchyCertificate | None = None
    witness: dict | None = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {"status": self.status, "partial_sums": [to_json(s) for s in self.partial_sums],
               "notes": list(self.notes)}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_dict()
        if self.witness is not None:
            out["witness"] = {k: to_json(v) if isinstance(v, float) else v for k, v in self.witness.items()}
        return out


def series_criterion(seq: Sequence, horizon: int, tail: GeometricTail | None = None,
                     eps_grid=DEFAULT_EPS_GRID, tol: float = 0.0) -> SeriesResult:
    """Partial sums of consecutive bond norms, plus a certificate from a geometric tail.

    Without a tail the result is NO-VERDICT: bounded partial sums up to a
    horizon say nothing about the rest of the series.  A supplied tail is
    checked against every observed step from ``n0``; a violation refutes
    the tail (not the sequence).
    """
    norms = seq.step_norms(horizon)
    sums, acc = [], 0.0
    for mu in norms:
        acc += mu
        sums.append(acc)
    if tail is None:
        return SeriesResult(sums, NO_VERDICT, notes=["no tail bound supplied"])
    for k in range(tail.n0, horizon):
        if norms[k] > tail.step_bound(k) + tol:
            return SeriesResult(sums, REFUTED, witness={"k": k, "mu": norms[k],
                                                        "bound": tail.step_bound(k)},
                                notes=["observed step exceeds the claimed tail"])
    rows, notes = [], []
    for eps in sorted(set(eps_grid), reverse=True):
        n = tail.modulus(eps)
        if n <= horizon:
            rows.append((eps, n))
        else:
            notes.append(f"eps={eps!r} needs N={n} beyond horizon {horizon}; row dropped")
    if not rows:
        return SeriesResult(sums, NO_VERDICT, notes=notes)
    return SeriesResult(sums, CONFIRMED, CauchyCertificate(tuple(rows)), notes=notes)


# -- convergence --------------------------------------------------------------

def _cocone_getter(cocone):
    if callable(cocone):
        return cocone
    arrows = list(cocone)

    def get(n):
        try:
            return arrows[n]
        except IndexError:
            raise InputError(f"cocone arrow g_{n} missing") from None
    return get


def verify_colimit_candidate(seq: Sequence, v, cocone, horizon: int,
                             tol: float = DEFAULT_TOL) -> AuditReport:
    """Verdicts for C1-COCONE, C1-UNIVERSAL and C2 up to ``horizon``.

    C1-UNIVERSAL is checked against the chain truncated at the horizon and
    only on finite hosts.  C2 requires ``mu(g_n) < tol`` and a
    nonincreasing trend over the last quartile of the horizon.
    """
    host = seq.host
    g = _cocone_getter(cocone)
    report = AuditReport(tol=tol)
    gs = []
    for n in range(horizon + 1):
        a = g(n)
        if a is None:
            raise InputError(f"cocone arrow g_{n} missing")
        if not (host.objects_equal(host.dom(a), seq.object_at(n)) and host.objects_equal(host.cod(a), v)):
            raise InputError(f"g_{n} is not an arrow x_{n} -> v")
        gs.append(a)
    for n in range(horizon + 1):
        for m in range(n + 1, horizon + 1):
            ok = host.arrows_equal(host.compose(gs[m], seq.bond(n, m)), gs[n])
            report.record("C1-COCONE", ok, {"n": n, "m": m})
    report.verdicts.setdefault("C1-COCONE", Status.PASS)

    if host.finite:
        last = seq.object_at(horizon)
        for w in host.objects():
            for hh in host.hom(last, w):
                us = [u for u in host.hom(v, w)
                      if host.arrows_equal(host.compose(u, gs[horizon]), hh)]
                report.record("C1-UNIVERSAL", len(us) == 1,
                              {"w": host.object_label(w), "h": host.label(hh), "factorizations": len(us)})
        report.verdicts.setdefault("C1-UNIVERSAL", Status.PASS)
        report.notes.append(f"C1-UNIVERSAL: checked on the chain truncated at {horizon}")
    else:
        report.skip("C1-UNIVERSAL", "host is not finite; universality not enumerable")

    mus = [host.norm(a) for a in gs]
    start = math.ceil(3 * horizon / 4)
    for n in range(start, horizon + 1):
        report.record("C2", mus[n] < tol, {"n": n, "mu_g": mus[n], "lhs": mus[n], "rhs": tol})
        if n > start:
            report.record("C2", mus[n] <= mus[n - 1] + tol,
                          {"n": n, "trend": "increasing", "lhs": mus[n], "rhs": mus[n - 1]})
    report.verdicts.setdefault("C2", Status.PASS)
    report.stats["mu_g"] = [to_json(m) for m in mus]
    return report


@dataclass
class ConvergenceCheck:
    """Certificate derived from a convergent cocone and its cross-checks."""

    certificate: CauchyCertificate | None
    cauchy: CauchyVerdict | None
    bound_ok: bool
    bound_witness: dict | None
    checked_pairs: int
    flags: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.bound_ok and (self.cauchy is None or self.cauchy.confirmed) and not self.flags


def convergent_implies_cauchy_check(seq: Sequence, v, cocone, horizon: int, eps_grid=DEFAULT_EPS_GRID,
                                    tol: float = DEFAULT_TOL, c2_tol: float | None = None) -> ConvergenceCheck:
    """Derive ``N(eps)`` = least ``n0`` with ``mu(g_n) < eps/2`` for all observed ``n >= n0``.

    Requires C1-COCONE and C2 (threshold ``c2_tol``, default ``tol``) to
    pass.  The certificate is cross-checked with :func:`check_cauchy`, and
    ``mu(x_n^m) <= mu(g_n) + mu(g_m)`` is checked with slack ``tol`` on
    every pair up to the horizon.
    """
    report = verify_colimit_candidate(seq, v, cocone, horizon, tol if c2_tol is None else c2_tol)
    for tag in ("C1-COCONE", "C2"):
        if report.status(tag) is not Status.PASS:
            raise InputError(f"{tag} does not pass; not a convergent cocone", report=report)
    host = seq.host
    g = _cocone_getter(cocone)
    mus = [host.norm(g(n)) for n in range(horizon + 1)]
    rows, notes = [], []
    for eps in sorted(set(eps_grid), reverse=True):
        if not mus[horizon] < eps / 2:
            notes.append(f"eps={eps!r}: mu(g_n) not below eps/2 within the horizon; row dropped")
            continue
        n0 = horizon
        while n0 > 0 and mus[n0 - 1] < eps / 2:
            n0 -= 1
        rows.append((eps, n0))
    bound_ok, witness, checked = True, None, 0
    for n in range(horizon + 1):
        for m in range(n + 1, horizon + 1):
            checked += 1
            lhs = host.norm(seq.bond(n, m))
            rhs = mus[n] + mus[m]
            if bound_ok and not lhs <= rhs + tol:
                bound_ok, witness = False, {"n": n, "m": m, "lhs": lhs, "rhs": rhs}
    flags = []
    if not bound_ok:
        flags.append("NORM-BOND-INCONSISTENCY: mu(x_n^m) exceeds mu(g_n) + mu(g_m)")
    if not rows:
        return ConvergenceCheck(None, None, bound_ok, witness, checked, flags, notes)
    cert = CauchyCertificate(tuple(rows))
    verdict = check_cauchy(seq, cert, horizon)
    if not verdict.confirmed:
        flags.append("NORM-BOND-INCONSISTENCY: derived certificate refuted by check_cauchy")
    return ConvergenceCheck(cert, verdict, bound_ok, witness, checked, flags, notes)


# -- transformations ----------------------------------------------------------

class Transformation:
    """Natural transformation ``x -> y . phi`` with components ``f_n: x_n -> y_{phi(n)}``."""

    def __init__(self, source: Sequence, target: Sequence, phi, components, name: str = "f"):
        if source.host is not target.host:
            raise InputError("source and target sequences live in different hosts")
        self.source, self.target, self.name = source, target, name
        self.host = source.host
        self._phi = phi if callable(phi) else list(phi).__getitem__
        self._comp = components if callable(components) else list(components).__getitem__
        self._lock = threading.RLock()
        self._memo: dict = {}

    def reindex(self, n: int) -> int:
        return int(self._phi(n))

    def component(self, n: int):
        with self._lock:
            if n not in self._memo:
                f = self._comp(n)
                h = self.host
                if not (h.objects_equal(h.dom(f), self.source.object_at(n))
                        and h.objects_equal(h.cod(f), self.target.object_at(self.reindex(n)))):
                    raise InputError(f"component {n} is not an arrow x_{n} -> y_phi({n})")
                self._memo[n] = f
            return self._memo[n]

    def check_naturality(self, horizon: int, exhaustive: bool = False) -> int:
        """Check the squares for ``m < n <= horizon`` (consecutive ones unless ``exhaustive``)."""
        h = self.host
        checked = 0
        for m in range(horizon):
            if self.reindex(m + 1) <= self.reindex(m):
                raise InputError("reindexing is not strictly increasing", witness={"m": m})
            for n in (range(m + 1, horizon + 1) if exhaustive else (m + 1,)):
                lhs = h.compose(self.target.bond(self.reindex(m), self.reindex(n)), self.component(m))
                rhs = h.compose(self.component(n), self.source.bond(m, n))
                if not h.arrows_equal(lhs, rhs):
                    raise InputError("naturality square does not commute", witness={"m": m, "n": n})
                checked += 1
        return checked

    def __repr__(self):
        return f"<Transformation {self.name}: {self.source.name} -> {self.target.name}>"


@dataclass
class NormEstimate:
    """``value = mu(f_H)`` with the empirical bracket over the final window.

    ``slack[n]`` is ``mu(x_n^H) + mu(y_{phi n}^{phi H})``: by naturality and
    MC2, ``mu(f_n) <= mu(f_H) + slack[n]``.  ``bound_ok`` records that this
    one-sided bound held on every checked index.
    """

    value: float
    bracket: tuple
    horizon: int
    window: int
    bound_ok: bool
    max_slack: float

    @property
    def width(self) -> float:
        return self.bracket[1] - self.bracket[0]


def transformation_norm(t: Transformation, horizon: int, certs=None, window: int = 2,
                        tol: float = DEFAULT_TOL, check: bool = True) -> NormEstimate:
    """Estimate ``lim mu(f_n)`` by ``mu(f_H)``."""
    if certs is not None:
        for seq, cert in zip((t.source, t.target), certs):
            if cert is None:
                continue
            v = check_cauchy(seq, cert, max(horizon, cert.max_n))
            if not v.confirmed:
                raise InputError(f"sequence {seq.name} is not Cauchy", witness=v.witness)
    if check:
        t.check_naturality(horizon)
    h = t.host
    mus = [h.norm(t.component(n)) for n in range(horizon + 1)]
    lo = max(0, horizon - window + 1)
    tail = mus[lo:]
    big = t.reindex(horizon)
    bound_ok, max_slack = True, 0.0
    for n in range(horizon + 1):
        slack = h.norm(t.source.bond(n, horizon)) + h.norm(t.target.bond(t.reindex(n), big))
        if n >= lo:
            max_slack = max(max_slack, slack)
        if not mus[n] <= mus[horizon] + slack + tol:
            bound_ok = False
    return NormEstimate(mus[horizon], (min(tail), max(tail)), horizon, window, bound_ok, max_slack)


class SequenceCompletion(NormedCategory):
    """Sequences in ``host`` and transformations between them.

    The norm is the estimate ``mu(f_H)`` at the completion's horizon;
    arrows are equal when their components agree after pushing both to a
    common index; objects are equal when they agree up to the horizon.
    """

    finite = False

    def __init__(self, host: NormedCategory, horizon: int, window: int = 2):
        self.host = host
        self.horizon = horizon
        self.window = window

    def hom(self, x, y, cap=None):
        raise UndecidableError("transformations between sequences cannot be enumerated")

    def dom(self, f):
        return f.source

    def cod(self, f):
        return f.target

    def identity(self, x):
        return Transformation(x, x, lambda n: n, lambda n: x.bond(n, n), name=f"id[{x.name}]")

    def norm(self, f):
        return transformation_norm(f, self.horizon, window=self.window, check=False).value

    def _compose(self, f, g):
        h = self.host
        return Transformation(g.source, f.target, lambda n: f.reindex(g.reindex(n)),
                              lambda n: h.compose(f.component(g.reindex(n)), g.component(n)),
                              name=f"{f.name}.{g.name}")

    def objects_equal(self, a, b):
        return a is b or a.agrees(b, self.horizon)

    def arrows_equal(self, f, g):
        if not (self.objects_equal(f.source, g.source) and self.objects_equal(f.target, g.target)):
            return False
        h, y = self.host, f.target
        try:
            for n in range(self.horizon + 1):
                a, b = f.reindex(n), g.reindex(n)
                k = max(a, b)
                if not h.arrows_equal(h.compose(y.bond(a, k), f.component(n)),
                                      h.compose(y.bond(b, k), g.component(n))):
                    return False
        except UndefinedComposite:
            return False
        return True

    def label(self, f):
        return f.name

    def object_label(self, x):
        return x.name

    def embed_object(self, x) -> Sequence:
        return constant_sequence(self.host, x, name=f"const[{self.host.object_label(x)}]")

    def embed_arrow(self, f, source: Sequence | None = None, target: Sequence | None = None) -> Transformation:
        source = source or self.embed_object(self.host.dom(f))
        target = target or self.embed_object(self.host.cod(f))
        return Transformation(source, target, lambda n: n, lambda n: f, name=self.host.label(f))


# -- diagonalization ----------------------------------------------------------

@dataclass
class Grid:
    """Rows of sequences with transitions ``row_n -> row_{n+1}`` (identity reindexing)."""

    rows: Callable[[int], Sequence]
    transitions: Callable[[int], Transformation]
    certificates: Callable[[int], CauchyCertificate] | None = None


@dataclass
class DiagonalResult:
    sequence: Sequence
    indices: list
    status: str
    series: SeriesResult | None
    rounds: int
    progress: list = field(default_factory=list)

    @property
    def certificate(self):
        return self.series.certificate if self.series else None


def _diagonal(grid: Grid, idx: list) -> Sequence:
    def obj(n):
        return grid.rows(n).object_at(idx[n])

    def step(n):
        t = grid.transitions(n)
        if t.reindex(idx[n]) != idx[n]:
            raise InputError(f"transition {n} is not reindexed to the identity")
        nxt = grid.rows(n + 1)
        return nxt.host.compose(nxt.bond(idx[n], idx[n + 1]), t.component(idx[n]))
    host = grid.rows(0).host
    return Sequence(host, obj, step=step, length=len(idx), name="diagonal")


def diagonalize(grid: Grid, horizon: int, tail: GeometricTail, row_horizon: int | None = None,
                max_rounds: int = 8, eps_grid=DEFAULT_EPS_GRID) -> DiagonalResult:
    """Diagonal ``n -> row_n[k_n]`` certified through the series criterion.

    Starts from ``k_n = n``.  While the diagonal violates ``tail`` the rows
    are re-refined: ``k_n`` skips ahead to the row's modulus at half the
    tail's step budget.  Exhausting ``row_horizon`` gives NO-VERDICT.
    """
    row_horizon = row_horizon if row_horizon is not None else 2 * horizon
    certs = grid.certificates
    if certs is not None:
        for n in range(horizon + 1):
            c = certs(n)
            v = check_cauchy(grid.rows(n), c, max(row_horizon, c.max_n))
            if not v.confirmed:
                raise InputError(f"row {n} is not Cauchy", witness=v.witness)
    idx = list(range(horizon + 1))
    progress = []
    series = None
    for rnd in range(max_rounds + 1):
        diag = _diagonal(grid, idx)
        series = series_criterion(diag, horizon, tail, eps_grid)
        progress.append({"round": rnd, "indices": list(idx), "status": series.status})
        if series.status == CONFIRMED:
            return DiagonalResult(diag, idx, CONFIRMED, series, rnd, progress)
        if series.status != REFUTED or certs is None:
            break
        new = []
        for n in range(horizon + 1):
            try:
                k = max(idx[n], certs(n).threshold(tail.step_bound(n) / 2))
            except InputError:
                k = idx[n]
            new.append(max(k, new[-1] + 1) if new else k)
        if new == idx or new[-1] > row_horizon:
            progress.append({"round": rnd + 1, "indices": new, "status": "EXHAUSTED"})
            break
        idx = new
    return DiagonalResult(_diagonal(grid, idx), idx, NO_VERDICT, series, len(progress) - 1, progress)
