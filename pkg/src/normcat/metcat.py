"""Finite metric spaces, the Lipschitz norm and embedding-projection pairs.

Spaces expose vectorised ``pair_distances(I, J)`` over point indices.
Besides dense spaces given by a matrix there are structured spaces
(scaled copies, max-products, disjoint sums) whose distances are computed
on demand, so the large spaces produced by iterating a functor never need
a full distance matrix.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Mapping, Sequence

import numpy as np

from .core import NormedCategory
from .errors import CompositionError, InputError, Refutation, UndecidableError
from .extreal import INF

EXACT_TOL = 1e-12
VERIFY_LIMIT = 512


class FiniteMetricSpace:
    """Dense finite metric space: point ids and a distance matrix.

    ``validate`` checks symmetry, zero diagonal, positivity off the
    diagonal and the triangle inequality (slack ``EXACT_TOL`` relative to
    the diameter).
    """

    def __init__(self, points: Sequence[Hashable], dist, validate: bool = True,
                 name: str | None = None):
        self._points = tuple(points)
        d = np.array(dist, dtype=float)
        n = len(self._points)
        if d.shape != (n, n):
            raise InputError(f"distance matrix has shape {d.shape}, expected {(n, n)}")
        if len(set(self._points)) != n:
            raise InputError("duplicate point ids")
        if n == 0:
            raise InputError("metric spaces must be nonempty")
        d.setflags(write=False)
        self._dist = d
        self._name = name
        if validate:
            check_metric(d)

    # -- structure ------------------------------------------------------
    @property
    def points(self) -> tuple:
        return self._points

    @property
    def size(self) -> int:
        return len(self._points)

    @property
    def name(self) -> str:
        return self._name or f"space{self.size}"

    def pair_distances(self, I, J) -> np.ndarray:
        return self._dist[np.asarray(I), np.asarray(J)]

    @property
    def matrix(self) -> np.ndarray:
        return self._dist

    def _key(self):
        return ("dense", self._points, self._dist.tobytes())

    # -- shared behaviour -----------------------------------------------
    @cached_property
    def _index(self) -> dict:
        return {p: i for i, p in enumerate(self.points)}

    def index(self, p) -> int:
        try:
            return self._index[p]
        except KeyError:
            raise InputError(f"{p!r} is not a point of {self.name}") from None

    def d(self, p, q) -> float:
        return float(self.pair_distances(self.index(p), self.index(q)))

    def diameter(self) -> float:
        return float(self.matrix.max())

    @cached_property
    def _hash(self):
        return hash(self._key())

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        return self._hash == other._hash and self._key() == other._key()

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} |{self.size}|>"

    def to_payload(self) -> dict:
        return {"points": [str(p) for p in self.points],
                "dist": self.matrix.tolist()}


def check_metric(d: np.ndarray, tol: float = EXACT_TOL) -> None:
    if not np.all(np.isfinite(d)):
        raise InputError("distances must be finite")
    if np.any(np.diag(d) != 0):
        raise InputError("distance matrix must have a zero diagonal")
    if not np.array_equal(d, d.T):
        raise InputError("distance matrix must be symmetric")
    n = d.shape[0]
    off = ~np.eye(n, dtype=bool)
    if np.any(d[off] <= 0):
        raise InputError("distinct points must be at positive distance")
    slack = tol * max(1.0, float(d.max()))
    for k in range(n):
        bad = d > d[:, k, None] + d[None, k, :] + slack
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            raise InputError(f"triangle inequality fails: d({i},{j}) > d({i},{k}) + d({k},{j})")


def metric_space_from_payload(payload: Mapping, validate: bool = True) -> FiniteMetricSpace:
    from .extreal import ext
    try:
        dist = [[ext(v) for v in row] for row in payload["dist"]]
    except ValueError as exc:
        raise InputError(f"distance matrix: {exc}") from None
    return FiniteMetricSpace(payload["points"], dist, validate=validate,
                             name=payload.get("name"))


class _StructuredSpace(FiniteMetricSpace):
    """Base for spaces whose distances derive from component spaces."""

    def __init__(self):  # noqa: D401 - no dense data
        self._name = None

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @cached_property
    def _matrix(self) -> np.ndarray:
        idx = np.arange(self.size)
        m = self.pair_distances(idx[:, None], idx[None, :])
        m.setflags(write=False)
        return m


class ScaledSpace(_StructuredSpace):
    def __init__(self, factor: float, base: FiniteMetricSpace):
        super().__init__()
        if not factor > 0:
            raise InputError("scale factor must be positive")
        self.factor = float(factor)
        self.base = base

    @property
    def points(self):
        return self.base.points

    @property
    def size(self):
        return self.base.size

    @property
    def name(self):
        return f"scale({self.factor!r},{self.base.name})"

    def pair_distances(self, I, J):
        return self.factor * self.base.pair_distances(I, J)

    def _key(self):
        return ("scale", self.factor, self.base)


class ProductSpace(_StructuredSpace):
    """Cartesian product with the max metric; points are pairs."""

    def __init__(self, left: FiniteMetricSpace, right: FiniteMetricSpace):
        super().__init__()
        self.left, self.right = left, right

    @cached_property
    def points(self):
        return tuple(itertools.product(self.left.points, self.right.points))

    @property
    def size(self):
        return self.left.size * self.right.size

    @property
    def name(self):
        return f"product({self.left.name},{self.right.name})"

    def pair_distances(self, I, J):
        n = self.right.size
        li, ri = np.divmod(np.asarray(I), n)
        lj, rj = np.divmod(np.asarray(J), n)
        return np.maximum(self.left.pair_distances(li, lj), self.right.pair_distances(ri, rj))

    def _key(self):
        return ("product", self.left, self.right)


class SumSpace(_StructuredSpace):
    """Disjoint union; points of different summands are ``gap`` apart."""

    def __init__(self, left: FiniteMetricSpace, right: FiniteMetricSpace, gap: float = 1.0):
        super().__init__()
        self.left, self.right, self.gap = left, right, float(gap)
        if 2 * gap < max(_diam(left), _diam(right)):
            raise InputError("summand diameter exceeds twice the gap; the sum would not be a metric")

    @cached_property
    def points(self):
        return tuple((0, p) for p in self.left.points) + tuple((1, p) for p in self.right.points)

    @property
    def size(self):
        return self.left.size + self.right.size

    @property
    def name(self):
        return f"sum({self.left.name},{self.right.name})"

    def pair_distances(self, I, J):
        I, J = np.broadcast_arrays(np.asarray(I), np.asarray(J))
        n = self.left.size
        out = np.full(I.shape, self.gap)
        ll = (I < n) & (J < n)
        rr = (I >= n) & (J >= n)
        if ll.any():
            out[ll] = self.left.pair_distances(I[ll], J[ll])
        if rr.any():
            out[rr] = self.right.pair_distances(I[rr] - n, J[rr] - n)
        return out

    def _key(self):
        return ("sum", self.left, self.right, self.gap)


def _diam(space: FiniteMetricSpace) -> float:
    if isinstance(space, ScaledSpace):
        return space.factor * _diam(space.base)
    if isinstance(space, ProductSpace):
        return max(_diam(space.left), _diam(space.right))
    if isinstance(space, SumSpace):
        return space.gap if space.size > 1 and space.left.size and space.right.size else 0.0
    return space.diameter()


def point_space(name: str = "point") -> FiniteMetricSpace:
    return FiniteMetricSpace(["*"], [[0.0]], name=name)


def discrete_space(k: int, name: str | None = None) -> FiniteMetricSpace:
    d = 1.0 - np.eye(k)
    return FiniteMetricSpace(list(range(k)), d, name=name or f"alphabet({k})")


# -- maps -------------------------------------------------------------------

class LipschitzMap:
    """A map between finite metric spaces, stored as an index array."""

    __slots__ = ("source", "target", "assign", "_hash")

    def __init__(self, source: FiniteMetricSpace, target: FiniteMetricSpace, assign):
        a = np.asarray(assign, dtype=np.int64)
        if a.shape != (source.size,):
            raise InputError(f"assignment has {a.shape} entries, source has {source.size} points")
        if a.size and (a.min() < 0 or a.max() >= target.size):
            raise InputError("assignment points outside the target")
        a.setflags(write=False)
        self.source, self.target, self.assign = source, target, a
        self._hash = None

    @classmethod
    def _trusted(cls, source, target, assign: np.ndarray) -> "LipschitzMap":
        """Skip validation for index arrays that are valid by construction."""
        self = cls.__new__(cls)
        assign.setflags(write=False)
        self.source, self.target, self.assign, self._hash = source, target, assign, None
        return self

    @classmethod
    def from_mapping(cls, source, target, mapping: Mapping) -> "LipschitzMap":
        missing = [p for p in source.points if p not in mapping]
        if missing:
            raise InputError(f"assignment is not total: missing {missing[:3]}")
        return cls(source, target, [target.index(mapping[p]) for p in source.points])

    def __call__(self, p):
        return self.target.points[int(self.assign[self.source.index(p)])]

    def as_mapping(self) -> dict:
        return {p: self.target.points[int(i)] for p, i in zip(self.source.points, self.assign)}

    def __eq__(self, other):
        if not isinstance(other, LipschitzMap):
            return NotImplemented
        return (self.assign.tobytes() == other.assign.tobytes()
                and self.source == other.source and self.target == other.target)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.source, self.target, self.assign.tobytes()))
        return self._hash

    def __repr__(self):
        return f"<map {self.source.name}->{self.target.name} {self.assign.tolist()}>"

    def is_injective(self) -> bool:
        return len(np.unique(self.assign)) == self.assign.size

    def image_distances(self) -> np.ndarray:
        a = self.assign
        return self.target.pair_distances(a[:, None], a[None, :])


def identity_map(space: FiniteMetricSpace) -> LipschitzMap:
    return LipschitzMap(space, space, np.arange(space.size))


def compose_maps(f: LipschitzMap, g: LipschitzMap) -> LipschitzMap:
    """``f . g``."""
    if f.source != g.target:
        raise CompositionError(f"cannot compose {f!r} after {g!r}")
    return LipschitzMap._trusted(g.source, f.target, f.assign[g.assign])


def _ratios(f: LipschitzMap):
    n = f.source.size
    iu = np.triu_indices(n, 1)
    return f.source.matrix[iu], f.image_distances()[iu]


def lip_constant(f: LipschitzMap) -> float:
    """``sup rho_Y(f p, f q) / rho_X(p, q)`` over distinct pairs; 0 if there are none."""
    if f.source.size < 2:
        return 0.0
    dx, dy = _ratios(f)
    return float(np.max(dy / dx))


def inverse_lip_constant(f: LipschitzMap) -> float:
    """Lipschitz constant of ``f^-1`` on the image; INF when ``f`` is not injective."""
    if f.source.size < 2:
        return 0.0
    dx, dy = _ratios(f)
    if np.any(dy == 0):
        return INF
    return float(np.max(dx / dy))


def lipschitz_norm(f: LipschitzMap) -> float:
    """``log max(Lip f, Lip f^-1)``: 0 exactly on isometric embeddings, INF off injections."""
    if not f.is_injective():
        return INF
    m = max(lip_constant(f), inverse_lip_constant(f))
    if m == 0.0:
        return 0.0
    return max(0.0, math.log(m))


def is_isometric(f: LipschitzMap, tol: float = EXACT_TOL) -> bool:
    return bool(np.all(np.abs(f.image_distances() - f.source.matrix) <= tol))


def is_nonexpansive(f: LipschitzMap, tol: float = EXACT_TOL) -> bool:
    return bool(np.all(f.image_distances() <= f.source.matrix + tol))



def close_under_composition(spaces, generators: Mapping, identity, compose):
    """Arrows generated by named ``generators`` and identities on ``spaces``.

    Returns ``(homs, labels)``: ``homs[(X, Y)]`` lists arrows in discovery
    order and composites are labelled ``"f.g"``.
    """
    labels: dict = {}
    homs: dict = {}
    for s in spaces:
        i = identity(s)
        labels.setdefault(i, f"id[{s.name}]")
        homs.setdefault((s, s), []).append(i)
    frontier = []
    for name, f in generators.items():
        if f.source not in spaces or f.target not in spaces:
            raise InputError(f"generator {name} leaves the listed spaces")
        if f not in labels:
            labels[f] = name
            homs.setdefault((f.source, f.target), []).append(f)
            frontier.append(f)
    everything = [a for v in homs.values() for a in v]
    while frontier:
        new = []
        for f in list(everything):
            for g in list(everything):
                if f.source != g.target:
                    continue
                h = compose(f, g)
                if h not in labels:
                    labels[h] = f"{labels[f]}.{labels[g]}"
                    homs.setdefault((h.source, h.target), []).append(h)
                    new.append(h)
        everything.extend(new)
        frontier = new
    return {k: tuple(v) for k, v in homs.items()}, labels


class LipschitzCategory(NormedCategory):
    """Finite metric spaces with maps between them, normed by :func:`lipschitz_norm`.

    Without ``generators`` every map between the listed spaces is an arrow;
    otherwise the arrows are the closure of the named generators and the
    identities under composition.
    """

    def __init__(self, spaces: Sequence[FiniteMetricSpace], generators: Mapping | None = None):
        self.spaces = list(spaces)
        self._labels: dict = {}
        self._homs = None
        if generators is not None:
            self._close(generators)

    def _close(self, generators):
        self._homs, self._labels = close_under_composition(
            self.spaces, generators, identity_map, compose_maps)

    def objects(self):
        return list(self.spaces)

    def hom(self, x, y, cap=None):
        if self._homs is not None:
            return self._homs.get((x, y), ())
        return [LipschitzMap(x, y, a) for a in itertools.product(range(y.size), repeat=x.size)]

    def dom(self, f):
        return f.source

    def cod(self, f):
        return f.target

    def identity(self, x):
        return identity_map(x)

    def norm(self, f):
        return lipschitz_norm(f)

    def _compose(self, f, g):
        return compose_maps(f, g)

    def label(self, f):
        return self._labels.get(f) or f"{f.source.name}->{f.target.name}:{f.assign.tolist()}"

    def object_label(self, x):
        return x.name


# -- embedding-projection pairs ---------------------------------------------

@dataclass(frozen=True, eq=True)
class EpPair:
    """Arrow ``X -> Y``: isometric ``e: X -> Y`` and non-expansive ``p: Y -> X``
    with ``p . e = id_X``.
    """

    e: LipschitzMap
    p: LipschitzMap
    verify: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        e, p = self.e, self.p
        if e.target != p.source or p.target != e.source:
            raise InputError("embedding and projection do not form a pair X -> Y -> X")
        if not np.array_equal(p.assign[e.assign], np.arange(e.source.size)):
            raise InputError("p . e is not the identity")
        if self.verify:
            if not is_isometric(e):
                raise InputError("embedding is not isometric")
            if not is_nonexpansive(p):
                raise InputError("projection is expansive")

    @property
    def source(self):
        return self.e.source

    @property
    def target(self):
        return self.e.target

    def __repr__(self):
        return f"<ep {self.source.name}->{self.target.name} e={self.e.assign.tolist()} p={self.p.assign.tolist()}>"


def ep_identity(space: FiniteMetricSpace) -> EpPair:
    i = identity_map(space)
    return EpPair(i, i, verify=False)


def ep_compose(f: EpPair, g: EpPair, verify: bool | None = None) -> EpPair:
    """``f . g = <e_f . e_g, p_g . p_f>``; invariants re-verified.

    With ``verify=None`` the O(n^2) isometry checks run only when the
    target has at most ``VERIFY_LIMIT`` points; ``p . e = id`` is always
    checked.
    """
    if f.source != g.target:
        raise CompositionError(f"cannot compose {f!r} after {g!r}")
    if verify is None:
        verify = f.target.size <= VERIFY_LIMIT
    return EpPair(compose_maps(f.e, g.e), compose_maps(g.p, f.p), verify=verify)


def ep_delta(f: EpPair) -> float:
    """``sup_y rho_Y(e(p(y)), y)``."""
    y = np.arange(f.target.size)
    back = f.e.assign[f.p.assign]
    return float(np.max(f.target.pair_distances(back, y)))


def ep_pairs_between(x: FiniteMetricSpace, y: FiniteMetricSpace, budget: int = 200_000) -> list[EpPair]:
    """Every EP pair ``x -> y`` by exhaustive search."""
    nx, ny = x.size, y.size
    if nx > ny:
        return []
    if math.perm(ny, nx) * nx ** max(ny - nx, 0) > budget:
        raise UndecidableError(f"too many candidate EP pairs between {x.name} and {y.name}")
    out = []
    for emb in itertools.permutations(range(ny), nx):
        e = LipschitzMap(x, y, emb)
        if not is_isometric(e):
            continue
        rest = [j for j in range(ny) if j not in emb]
        for choice in itertools.product(range(nx), repeat=len(rest)):
            a = np.empty(ny, dtype=np.int64)
            a[list(emb)] = np.arange(nx)
            a[rest] = choice
            p = LipschitzMap(y, x, a)
            if is_nonexpansive(p):
                out.append(EpPair(e, p, verify=False))
    return out


class EpCategory(NormedCategory):
    """EP pairs between finite metric spaces, normed by :func:`ep_delta`.

    With ``spaces`` the hom-sets are enumerated exhaustively (or generated
    from named ``generators``); without, the view is query-only (used as
    the host of functor iterations).
    """

    def __init__(self, spaces: Sequence[FiniteMetricSpace] | None = None, budget: int = 200_000,
                 generators: Mapping | None = None):
        self.spaces = list(spaces) if spaces is not None else None
        self.finite = spaces is not None
        self.budget = budget
        self._cache = {}
        self._labels = {}
        if generators is not None:
            if spaces is None:
                raise InputError("generators need an explicit list of spaces")
            homs, self._labels = close_under_composition(
                self.spaces, generators, ep_identity, lambda f, g: ep_compose(f, g, verify=True))
            for x in self.spaces:
                for y in self.spaces:
                    self._cache[x, y] = list(homs.get((x, y), ()))

    def objects(self):
        if self.spaces is None:
            return super().objects()
        return list(self.spaces)

    def hom(self, x, y, cap=None):
        key = (x, y)
        if key not in self._cache:
            self._cache[key] = ep_pairs_between(x, y, self.budget)
        return self._cache[key]

    def dom(self, f):
        return f.source

    def cod(self, f):
        return f.target

    def identity(self, x):
        return ep_identity(x)

    def norm(self, f):
        return ep_delta(f)

    def _compose(self, f, g):
        return ep_compose(f, g)

    def label(self, f):
        return self._labels.get(f) or \
            f"{f.source.name}->{f.target.name}:e{f.e.assign.tolist()}:p{f.p.assign.tolist()}"

    def object_label(self, x):
        return x.name


# -- colimits of metric chains ----------------------------------------------

@dataclass
class ColimitApproximant:
    """Finite approximant of the colimit of a chain of point inclusions.

    Points are stage-qualified ids ``(k, p)``: ``p`` first appears at stage
    ``k``.  Distances are those of stage ``stage``; every later stage up to
    ``horizon`` agrees within ``error_bound``.
    """

    space: FiniteMetricSpace
    stage: int
    horizon: int
    error_bound: float
    observed_spread: float
    representatives: dict

    def summary(self) -> dict:
        return {"points": self.space.size, "stage": self.stage, "horizon": self.horizon,
                "error_bound": self.error_bound, "observed_spread": self.observed_spread,
                "diameter": self.space.diameter() if self.space.size <= 4096 else None}


def metric_colimit(spaces: Sequence[FiniteMetricSpace], inclusions: Sequence[LipschitzMap],
                   modulus: Callable[[float], int], eps: float,
                   horizon: int | None = None) -> ColimitApproximant:
    """Approximate ``rho_inf(s, t) = lim rho_n(s, t)`` for a chain of inclusions.

    ``modulus(eps)`` is the stage ``N`` after which every pairwise distance
    sequence stays within ``eps``.  The claim is checked on stages
    ``N..horizon``; a violation raises :class:`Refutation` naming the pair
    and stages.
    """
    if len(inclusions) != len(spaces) - 1:
        raise InputError("need exactly one inclusion between consecutive stages")
    h = len(spaces) - 1 if horizon is None else horizon
    if h > len(spaces) - 1:
        raise InputError(f"horizon {h} exceeds the {len(spaces)} supplied stages")
    for k, inc in enumerate(inclusions):
        if inc.source != spaces[k] or inc.target != spaces[k + 1]:
            raise InputError(f"inclusion {k} does not map stage {k} into stage {k + 1}")
        if not inc.is_injective():
            raise InputError(f"inclusion {k} is not injective")
    threshold = getattr(modulus, "threshold", modulus)
    n_stage = int(threshold(eps))
    if n_stage > h:
        raise InputError(f"modulus asks for stage {n_stage} beyond horizon {h}")

    ids: list = []
    idx = np.empty(0, dtype=np.int64)
    for k in range(n_stage + 1):
        if k:
            idx = inclusions[k - 1].assign[idx]
        hit = np.zeros(spaces[k].size, dtype=bool)
        hit[idx] = True
        fresh = np.flatnonzero(~hit)
        ids.extend((k, spaces[k].points[i]) for i in fresh)
        idx = np.concatenate([idx, fresh])
    base = spaces[n_stage].pair_distances(idx[:, None], idx[None, :])
    spread = 0.0
    cur = idx
    for m in range(n_stage + 1, h + 1):
        cur = inclusions[m - 1].assign[cur]
        dm = spaces[m].pair_distances(cur[:, None], cur[None, :])
        gap = np.abs(dm - base)
        worst = float(gap.max())
        if worst > eps:
            i, j = map(int, np.unravel_index(int(np.argmax(gap)), gap.shape))
            raise Refutation(
                f"modulus violated: stage {m} moves a distance by {worst!r} > {eps!r}",
                witness={"pair": [str(ids[i]), str(ids[j])], "stages": [n_stage, m],
                         "rho_N": float(base[i, j]), "rho_m": float(dm[i, j])})
        spread = max(spread, worst)
    space = FiniteMetricSpace(ids, base, validate=False, name=f"colimit@{n_stage}")
    reps = {pid: spaces[n_stage].points[int(i)] for pid, i in zip(ids, idx)}
    return ColimitApproximant(space, n_stage, h, float(eps), spread, reps)
