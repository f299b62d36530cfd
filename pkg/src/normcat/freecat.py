"""Weighted digraphs, their free categories and shortest-path quasi-metrics."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Sequence

from .core import NormedCategory
from .errors import CompositionError, InputError
from .extreal import INF


class WeightedDigraph:
    """Vertices, arrows with ``dom``/``cod`` and finite non-negative weights."""

    def __init__(self, vertices: Sequence[str], arrows: Mapping[str, tuple[str, str, float]]):
        self.vertices = tuple(sorted(vertices))
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise InputError("duplicate vertex ids")
        clean = {}
        for a, (d, c, w) in arrows.items():
            if d not in vs or c not in vs:
                raise InputError(f"arrow {a!r} has dangling endpoint ({d!r} -> {c!r})")
            w = float(w)
            if not math.isfinite(w) or w < 0:
                raise InputError(f"arrow {a!r} has invalid weight {w!r}; weights must be finite and >= 0")
            clean[a] = (d, c, w)
        self.arrows = MappingProxyType(clean)
        out: dict[str, list[str]] = {v: [] for v in self.vertices}
        for a in sorted(clean):
            out[clean[a][0]].append(a)
        self._out = {v: tuple(a) for v, a in out.items()}

    def dom(self, a: str) -> str:
        return self.arrows[a][0]

    def cod(self, a: str) -> str:
        return self.arrows[a][1]

    def weight(self, a: str) -> float:
        return self.arrows[a][2]

    def out_arrows(self, v: str) -> tuple[str, ...]:
        return self._out[v]

    @classmethod
    def from_payload(cls, payload: Mapping) -> "WeightedDigraph":
        return cls(payload["vertices"],
                   {a["id"]: (a["dom"], a["cod"], a["w"]) for a in payload["arrows"]})

    def to_payload(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "arrows": [{"id": a, "dom": d, "cod": c, "w": w}
                       for a, (d, c, w) in sorted(self.arrows.items())],
        }


@dataclass(frozen=True)
class PathArrow:
    """Arrow ``source -> target`` of the free category: a path of arrow ids."""

    source: str
    steps: tuple[str, ...]
    target: str

    def __str__(self):
        if not self.steps:
            return f"id[{self.source}]"
        return f"{self.source}:{'.'.join(self.steps)}:{self.target}"


def make_path(g: WeightedDigraph, source: str, steps: Sequence[str]) -> PathArrow:
    """Validate ``steps`` as a walk from ``source`` in ``g``."""
    if source not in g.vertices:
        raise InputError(f"unknown vertex {source!r}")
    here = source
    for a in steps:
        if a not in g.arrows:
            raise InputError(f"arrow {a!r} is not in the digraph")
        if g.dom(a) != here:
            raise InputError(f"step {a!r} starts at {g.dom(a)!r}, expected {here!r}")
        here = g.cod(a)
    return PathArrow(source, tuple(steps), here)


def compose_paths(f: PathArrow, g: PathArrow) -> PathArrow:
    """``f . g``: walk ``g`` first, then ``f``."""
    if f.source != g.target:
        raise CompositionError(f"cannot compose {f} after {g}")
    return PathArrow(g.source, g.steps + f.steps, f.target)


def path_norm(g: WeightedDigraph, p: PathArrow) -> float:
    """Sum of the arrow weights along ``p`` (0 for an identity)."""
    total = 0.0
    for a in p.steps:
        if a not in g.arrows:
            raise InputError(f"arrow {a!r} is not in the digraph")
        total += g.weight(a)
    return total


def shortest_path(g: WeightedDigraph, x: str, y: str) -> tuple[float, list[str], list[str]]:
    """Label-setting shortest path from ``x`` to ``y``.

    Returns ``(distance, vertex_path, arrow_path)``; unreachable targets give
    ``(INF, [], [])``.  Ties are broken by vertex id, then arrow id.
    """
    for v in (x, y):
        if v not in g.vertices:
            raise InputError(f"unknown vertex {v!r}")
    dist = {x: 0.0}
    pred: dict[str, tuple[str, str]] = {}
    done = set()
    heap = [(0.0, x)]
    while heap:
        d, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        if v == y:
            break
        for a in g.out_arrows(v):
            w = g.cod(a)
            nd = d + g.weight(a)
            if w not in dist or nd < dist[w]:
                dist[w] = nd
                pred[w] = (v, a)
                heapq.heappush(heap, (nd, w))
    if y not in done:
        return INF, [], []
    verts, arrs = [y], []
    while verts[-1] != x:
        v, a = pred[verts[-1]]
        verts.append(v)
        arrs.append(a)
    return dist[y], verts[::-1], arrs[::-1]


def quasimetric_shortest_path(g: WeightedDigraph, x: str, y: str) -> float:
    """``rho(x, y)``: least total weight of a path ``x -> y`` (INF if none)."""
    return shortest_path(g, x, y)[0]


class FreeCategory(NormedCategory):
    """Lazy view of the free category on a weighted digraph.

    ``hom(x, y, cap)`` lists paths of length at most ``cap`` by
    nondecreasing length; a cap is mandatory.
    """

    finite = False

    def __init__(self, graph: WeightedDigraph):
        self.graph = graph

    def objects(self):
        return list(self.graph.vertices)

    def hom(self, x, y, cap=None):
        if cap is None:
            raise InputError("free-category hom-sets are infinite; a path-length cap is required")
        found = []
        layer = [(x, ())]
        for length in range(cap + 1):
            for v, steps in layer:
                if v == y:
                    found.append(PathArrow(x, steps, y))
            if length == cap:
                break
            layer = [(self.graph.cod(a), steps + (a,))
                     for v, steps in layer for a in self.graph.out_arrows(v)]
        return found

    def dom(self, f):
        return f.source

    def cod(self, f):
        return f.target

    def identity(self, x):
        return PathArrow(x, (), x)

    def norm(self, f):
        return path_norm(self.graph, f)

    def _compose(self, f, g):
        return compose_paths(f, g)

    def hom_infimum(self, x, y):
        d, _, arrs = shortest_path(self.graph, x, y)
        return d, (PathArrow(x, tuple(arrs), y) if d != INF else None)


def free_category(g: WeightedDigraph) -> FreeCategory:
    return FreeCategory(g)


def asymmetric_space_to_digraph(points: Sequence[str], rho) -> WeightedDigraph:
    """Complete digraph with one arrow ``x->y`` of weight ``rho[x][y]`` per pair.

    Loops ``x->x`` of weight 0 are included, so ``rho`` is exactly the norm
    restricted to paths of length one.
    """
    points = [str(p) for p in points]
    n = len(points)
    arrows = {}
    for i, x in enumerate(points):
        for j, y in enumerate(points):
            w = float(rho[i][j])
            if not math.isfinite(w) or w < 0:
                raise InputError(f"rho({x}, {y}) = {w!r} must be finite and >= 0")
            if i == j and w != 0.0:
                raise InputError(f"rho({x}, {x}) must be 0")
            arrows[f"{x}->{y}"] = (x, y, w)
    if len(set(points)) != n:
        raise InputError("duplicate point ids")
    return WeightedDigraph(points, arrows)
