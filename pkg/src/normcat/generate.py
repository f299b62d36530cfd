"""Seeded random instances for the property and acceptance suites.

Every generator takes a ``numpy.random.Generator`` so suites are
reproducible from a single seed.
"""
from __future__ import annotations

import itertools

import numpy as np

from .extreal import INF
from .fincat import FiniteCategory, cyclic_group, group_category, pseudometric_as_category, preorder_category
from .freecat import WeightedDigraph
from .metcat import EpPair, FiniteMetricSpace, LipschitzCategory, LipschitzMap

DYADIC = 4  # weights are multiples of 1/DYADIC


def rng_from(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _closure(w: np.ndarray) -> np.ndarray:
    """All-pairs shortest paths (Floyd-Warshall) of a symmetric weight matrix."""
    d = w.copy()
    for k in range(len(d)):
        d = np.minimum(d, d[:, k:k + 1] + d[k:k + 1, :])
    return d


def random_metric(rng, n: int, dyadic: bool = True, zeros: bool = False) -> np.ndarray:
    """Distance matrix on ``n`` points: shortest-path closure of random edge weights.

    With ``zeros`` some edges get weight 0, giving a pseudometric.
    """
    if dyadic:
        w = rng.integers(1, 4 * DYADIC + 1, size=(n, n)) / DYADIC
    else:
        w = rng.uniform(0.1, 4.0, size=(n, n))
    if zeros:
        w = np.where(rng.random((n, n)) < 0.3, 0.0, w)
    w = np.minimum(w, w.T)
    np.fill_diagonal(w, 0.0)
    return _closure(w)


def random_space(rng, n: int, name: str, dyadic: bool = True) -> FiniteMetricSpace:
    return FiniteMetricSpace([f"{name}{i}" for i in range(n)], random_metric(rng, n, dyadic), name=name)


def random_map(rng, x: FiniteMetricSpace, y: FiniteMetricSpace, injective_bias: float = 0.7) -> LipschitzMap:
    if x.size <= y.size and rng.random() < injective_bias:
        return LipschitzMap(x, y, rng.permutation(y.size)[:x.size])
    return LipschitzMap(x, y, rng.integers(0, y.size, size=x.size))


def lipschitz_pair(rng, max_points: int = 6):
    """Composable ``(f, g)`` with ``g: X -> Y``, ``f: Y -> Z`` over spaces of at most ``max_points``."""
    sizes = sorted(rng.integers(1, max_points + 1, size=3))
    x, y, z = (random_space(rng, int(n), nm, dyadic=bool(rng.random() < 0.5))
               for n, nm in zip(sizes, "XYZ"))
    return random_map(rng, y, z), random_map(rng, x, y), LipschitzCategory([x, y, z])


def hair_extension(rng, x: FiniteMetricSpace, extra: int, name: str) -> EpPair:
    """EP pair ``x -> y`` where ``y`` adds ``extra`` points hanging off ``x``.

    Each new point ``b`` hangs off ``p(b)`` at height ``t_b > 0`` and
    ``rho(a, b) = rho(pa, pb) + t_a + t_b`` for ``a != b`` (``t = 0`` on
    ``x``), so ``e`` is isometric and ``p`` non-expansive.  The points of
    ``y`` are shuffled so the embedding is not a prefix.
    """
    n = x.size
    m = n + extra
    base = np.concatenate([np.arange(n), rng.integers(0, n, size=extra)])
    t = np.concatenate([np.zeros(n), rng.integers(1, 2 * DYADIC + 1, size=extra) / DYADIC])
    d = x.matrix[base[:, None], base[None, :]] + t[:, None] + t[None, :]
    np.fill_diagonal(d, 0.0)
    perm = rng.permutation(m)  # new position of old index i is perm[i]
    inv = np.argsort(perm)
    dd = d[inv[:, None], inv[None, :]]
    y = FiniteMetricSpace([f"{name}{i}" for i in range(m)], dd, name=name)
    e = LipschitzMap(x, y, perm[:n])
    p = LipschitzMap(y, x, base[inv])
    return EpPair(e, p)


def ep_pair_chain(rng, max_points: int = 6):
    """Composable EP pairs ``(f, g)`` with ``g: X -> Y``, ``f: Y -> Z``."""
    nx = int(rng.integers(1, max(2, max_points - 1)))
    x = random_space(rng, nx, "X")
    ey = int(rng.integers(0, max_points - nx + 1))
    g = hair_extension(rng, x, ey, "Y")
    ez = int(rng.integers(0, max_points - g.target.size + 1))
    f = hair_extension(rng, g.target, ez, "Z")
    return f, g


# -- finite normed categories -------------------------------------------------

def weighted_word_norm(n: int, weights: dict[int, float]) -> dict[str, float]:
    """Norm on ``Z/n`` from symmetric generator weights: cheapest word for each element."""
    best = np.full(n, np.inf)
    best[0] = 0.0
    for _ in range(n):
        for k, w in weights.items():
            for s in (k % n, -k % n):
                best = np.minimum(best, np.roll(best, s) + w)
    return {f"r{k}": (float(best[k]) if np.isfinite(best[k]) else INF) for k in range(n)}


def random_group_category(rng, zero_generator: bool = False) -> FiniteCategory:
    n = int(rng.integers(2, 9))
    gens = rng.choice(np.arange(1, n), size=min(n - 1, int(rng.integers(1, 3))), replace=False)
    weights = {int(k): float(rng.integers(1, 3 * DYADIC + 1) / DYADIC) for k in gens}
    if zero_generator:
        weights[int(gens[0])] = 0.0
    weights.setdefault(1, 4.0)  # keep the norm finite
    return group_category(cyclic_group(n), weighted_word_norm(n, weights))


def random_pseudometric_category(rng, zeros: bool = False) -> FiniteCategory:
    n = int(rng.integers(1, 6))
    return pseudometric_as_category([f"p{i}" for i in range(n)], random_metric(rng, n, zeros=zeros).tolist())


def random_graded_preorder(rng) -> FiniteCategory:
    """Random poset (transitive closure of a random DAG) normed by ``h(y) - h(x)`` for monotone ``h``."""
    n = int(rng.integers(2, 7))
    adj = np.triu(rng.random((n, n)) < 0.4, 1)
    reach = adj | np.eye(n, dtype=bool)
    for k in range(n):
        reach |= reach[:, k:k + 1] & reach[k:k + 1, :]
    h = np.zeros(n)
    for j in range(n):  # indices follow a topological order
        below = [h[i] for i in range(j) if reach[i, j]]
        h[j] = max(below, default=0.0) + float(rng.integers(0, 3))
    names = [f"v{i}" for i in range(n)]
    idx = {v: i for i, v in enumerate(names)}
    return preorder_category(names, lambda a, b: bool(reach[idx[a], idx[b]]),
                             lambda a, b: float(h[idx[b]] - h[idx[a]]))


def random_normed_category(rng):
    """One of: pseudometric, weighted cyclic group, graded poset, all-maps Lipschitz category."""
    kind = int(rng.integers(0, 4))
    if kind == 0:
        return random_pseudometric_category(rng, zeros=bool(rng.random() < 0.3))
    if kind == 1:
        return random_group_category(rng, zero_generator=bool(rng.random() < 0.3))
    if kind == 2:
        return random_graded_preorder(rng)
    spaces = [random_space(rng, int(rng.integers(1, hi)), nm) for nm, hi in (("A", 4), ("B", 3))]
    return LipschitzCategory(spaces)


def random_kernel_pair(rng) -> tuple[FiniteCategory, set[str]]:
    """A finite category and a potential kernel: the norm-0 arrows of a random norm."""
    kind = int(rng.integers(0, 3))
    if kind == 0:
        c = random_pseudometric_category(rng, zeros=True)
    elif kind == 1:
        c = random_group_category(rng, zero_generator=bool(rng.random() < 0.7))
    else:
        c = random_graded_preorder(rng)
    k0 = {a for a in c.arrow_ids if c.norm(a) == 0.0}
    return c.with_norm(None), k0


# -- digraphs --------------------------------------------------------------------

def random_digraph(rng, max_vertices: int = 8, name: str = "g") -> WeightedDigraph:
    """Digraph on at most ``max_vertices`` vertices with dyadic weights (zero allowed)."""
    n = int(rng.integers(1, max_vertices + 1))
    verts = [f"{name}{i}" for i in range(n)]
    arrows = {}
    pairs = list(itertools.product(range(n), repeat=2))
    count = int(rng.integers(0, 2 * n + 2))
    for k in range(count):
        i, j = pairs[int(rng.integers(0, len(pairs)))]
        w = float(rng.integers(0, 4 * DYADIC + 1) / DYADIC)
        arrows[f"a{k}"] = (verts[i], verts[j], w)
    return WeightedDigraph(verts, arrows)


def digraph_fixture_set(seed: int = 0, count: int = 40) -> list[WeightedDigraph]:
    rng = rng_from(seed)
    return [random_digraph(rng, name=f"g{i}_") for i in range(count)]
