"""Independent reference computations, written without the library's algorithms."""
from __future__ import annotations

import itertools
import math

INF = math.inf


def simple_path_minimum(vertices, arrows, x, y) -> float:
    """Least weight over all simple paths ``x -> y`` by exhaustive DFS (0 when ``x == y``)."""
    if x == y:
        return 0.0
    out = {v: [] for v in vertices}
    for _, (d, c, w) in arrows.items():
        out[d].append((c, w))
    best = INF
    stack = [(x, 0.0, frozenset([x]))]
    while stack:
        v, acc, seen = stack.pop()
        for c, w in out[v]:
            if c == y:
                best = min(best, acc + w)
            elif c not in seen:
                stack.append((c, acc + w, seen | {c}))
    return best


def unnest(point) -> tuple:
    """``(a0, (a1, (... '*')))`` -> ``(a0, a1, ...)``."""
    word = []
    while isinstance(point, tuple):
        word.append(point[0])
        point = point[1]
    return tuple(word)


def prefix_distance(u, v) -> float:
    """``2^-j`` for the first index ``j`` where the words differ; 0 when equal."""
    for j, (a, b) in enumerate(zip(u, v)):
        if a != b:
            return 2.0 ** -j
    return 0.0


def all_words(k: int, n: int):
    return list(itertools.product(range(k), repeat=n))


def cyclic_word_length(n: int) -> list[int]:
    """Word length on Z/n for the generator set {1, -1}."""
    return [min(k, n - k) for k in range(n)]


def series_modulus(eps: float) -> int:
    """``ceil(log2(2 / eps))``: least N with ``2^(1-N) <= eps`` for the tail of ``sum 2^-k``."""
    return math.ceil(math.log2(2.0 / eps))
