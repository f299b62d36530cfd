"""Named worked examples used by the tests, the acceptance suite and the CLI fixtures."""
from __future__ import annotations

from .banach import ContractionFunctor, orbit
from .cauchy import Grid, PreorderCategory, Sequence, Transformation, constant_sequence
from .extreal import INF
from .fincat import FiniteCategory, disjoint_sum, pseudometric_as_category
from .functors import parse_expr
from .metcat import FiniteMetricSpace, LipschitzCategory, LipschitzMap, point_space

STREAM_EXPR = "product(alphabet(2), scale(0.5, X))"


# -- Lipschitz maps ----------------------------------------------------------

def lipschitz_counterexample(r: float = 2.0):
    """``g: {x} -> {x, y}`` and ``h: {x, y} -> {x, z}`` with ``d(x, z) = r``.

    ``g`` and ``h . g`` are isometric while ``Lip h = r``; returns
    ``(category, g, h)`` with the category generated by ``g`` and ``h``.
    """
    one = FiniteMetricSpace(["x"], [[0.0]], name="X1")
    two = FiniteMetricSpace(["x", "y"], [[0.0, 1.0], [1.0, 0.0]], name="X2")
    wide = FiniteMetricSpace(["x", "z"], [[0.0, r], [r, 0.0]], name="Xr")
    g = LipschitzMap.from_mapping(one, two, {"x": "x"})
    h = LipschitzMap.from_mapping(two, wide, {"x": "x", "y": "z"})
    return LipschitzCategory([one, two, wide], {"g": g, "h": h}), g, h


# -- sequences in preorders -------------------------------------------------

def _ord(a, b) -> bool:
    return a <= b


def even_odd_naturals() -> PreorderCategory:
    """Naturals ordered as usual; ``mu(m, n) = 0`` if ``m`` is even or ``m == n``, else INF."""
    def mu(f):
        m, n = f
        return 0.0 if m % 2 == 0 or m == n else INF
    return PreorderCategory(_ord, mu, name="even-odd")


def natural_sequence(host) -> Sequence:
    return Sequence(host, lambda n: n, bond=lambda n, m: (n, m), name="nat")


LIMITS = ("l0", "l1")


def two_limit_category(truncate: int | None = None) -> PreorderCategory:
    """Naturals plus two tops ``l0``, ``l1``, each below the other.

    Arrows out of naturals have norm 0; the arrows between the tops have
    norm INF.  ``truncate`` keeps only the naturals ``0..truncate`` and
    lists the objects, giving a finite category.
    """
    def leq(a, b):
        if isinstance(a, str):
            return isinstance(b, str)
        return isinstance(b, str) or a <= b

    def mu(f):
        a, b = f
        if a == b or not isinstance(a, str):
            return 0.0
        return INF
    objects = None if truncate is None else list(range(truncate + 1)) + list(LIMITS)
    return PreorderCategory(leq, mu, objects=objects, name="two-limits")


def real_line() -> PreorderCategory:
    """Reals under ``<=`` with ``mu(a, b) = b - a``."""
    return PreorderCategory(_ord, lambda f: f[1] - f[0], name="reals")


def geometric_approach(host=None) -> tuple:
    """``x_n = 1 - 2^-n`` in :func:`real_line` with cocone into ``1``: ``mu(g_n) = 2^-n``."""
    host = host or real_line()
    seq = Sequence(host, lambda n: 1.0 - 2.0 ** -n, bond=lambda n, m: (1.0 - 2.0 ** -n, 1.0 - 2.0 ** -m),
                   name="geom")
    return host, seq, 1.0, (lambda n: (1.0 - 2.0 ** -n, 1.0))


def dyadic_path(horizon: int, ratio: float = 0.5):
    """Free category on ``v0 -> v1 -> ...`` with step ``k`` weighted ``ratio**k``; returns the sequence."""
    from .freecat import FreeCategory, PathArrow, WeightedDigraph
    verts = [f"v{k:03d}" for k in range(horizon + 1)]
    arrows = {f"s{k:03d}": (verts[k], verts[k + 1], ratio ** k) for k in range(horizon)}
    cat = FreeCategory(WeightedDigraph(verts, arrows))
    return Sequence(cat, verts.__getitem__,
                    step=lambda k: PathArrow(verts[k], (f"s{k:03d}",), verts[k + 1]),
                    length=horizon + 1, name="dyadic")


# -- contraction fixtures ------------------------------------------------------

def ladder_points(n: int) -> list[str]:
    return [str(i) for i in range(n + 1)]


def ladder_category(n: int, r: float) -> FiniteCategory:
    """Ultrametric ``d(i, j) = r^min(i, j)`` on ``0..n`` as an indiscrete normed category."""
    pts = ladder_points(n)
    rho = [[0.0 if i == j else r ** min(i, j) for j in range(n + 1)] for i in range(n + 1)]
    return pseudometric_as_category(pts, rho)


def ladder_functor(cat: FiniteCategory, n: int, r: float, prefix: str = "") -> ContractionFunctor:
    """``i -> min(i + 1, n)``: scales every arrow norm by exactly ``r`` (or sends it to 0)."""
    def shift(x):
        i = int(x[len(prefix):])
        return f"{prefix}{min(i + 1, n)}"

    def arr(f):
        d, c = cat.dom(f), cat.cod(f)
        return _arrow_between(cat, shift(d), shift(c))
    return ContractionFunctor(cat, shift, arr, r, name=f"ladder({r})")


def _arrow_between(cat: FiniteCategory, x, y):
    hom = cat.hom(x, y)
    if len(hom) != 1:
        raise ValueError(f"expected a unique arrow {x} -> {y}")
    return hom[0]


def sum_functor(cat: FiniteCategory, parts: dict, factor: float) -> ContractionFunctor:
    """``F + G`` on a disjoint sum: ``parts[tag]`` acts on the ``tag:``-prefixed copy."""
    def split(s):
        tag, _, rest = s.partition(":")
        return tag, rest

    def obj(x):
        tag, rest = split(x)
        return f"{tag}:{parts[tag].obj(rest)}"

    def arr(f):
        tag, rest = split(f)
        return f"{tag}:{parts[tag].arr(rest)}"
    return ContractionFunctor(cat, obj, arr, factor, name="+".join(p.name for p in parts.values()))


def non_uniqueness(n: int = 4, r: float = 0.5):
    """``K + K`` for the ladder ``K`` with ``F + F``.

    Returns ``(category, functor, [(s, h), ...])``: each copy's top ``n``
    is fixed by ``F`` with ``h`` its identity.
    """
    k = ladder_category(n, r)
    f = ladder_functor(k, n, r)
    kk = disjoint_sum(k, k)
    ff = sum_functor(kk, {"0": f, "1": f}, r)
    fixed = [(f"{t}:{n}", kk.identity(f"{t}:{n}")) for t in ("0", "1")]
    return kk, ff, fixed


def stream_functor() -> ContractionFunctor:
    return ContractionFunctor.from_expr(parse_expr(STREAM_EXPR))


def stream_grid(F: ContractionFunctor | None = None) -> tuple:
    """Rows ``n``: the orbit of ``F`` from the point, frozen after stage ``n``.

    Returns ``(grid, orbit_sequence)``.
    """
    from .banach import start_arrow
    F = F or stream_functor()
    base = orbit(F, start_arrow(F, point_space()))
    host = F.host
    rows = {}

    def row(n):
        if n not in rows:
            rows[n] = Sequence(host, lambda k, n=n: base.object_at(min(k, n)),
                               step=lambda k, n=n: base.step(k) if k < n else host.identity(base.object_at(n)),
                               name=f"row{n}")
        return rows[n]

    def transition(n):
        src, dst = row(n), row(n + 1)
        return Transformation(src, dst, lambda k: k,
                              lambda k: host.identity(base.object_at(k)) if k <= n else base.step(n),
                              name=f"t{n}")
    return Grid(row, transition), base


def constant_grid(host, x) -> Grid:
    row = constant_sequence(host, x)
    return Grid(lambda n: row, lambda n: Transformation(row, row, lambda k: k, lambda k: host.identity(x)))


CONTRACTION_EXPRS = (
    STREAM_EXPR,
    "scale(0.5, X)",
    "sum(point, scale(0.5, X))",
    "product(alphabet(2), scale(0.25, sum(point, X)))",
)


def builtin_contractions() -> list[tuple]:
    """``(name, functor, start_arrows)`` for every built-in contraction fixture.

    Start arrows go ``a -> F(a)``, so their orbits are sequences.
    """
    from .banach import start_arrow
    out = []
    for text in CONTRACTION_EXPRS:
        F = ContractionFunctor.from_expr(parse_expr(text))
        out.append((text, F, [start_arrow(F)]))
    n, r = 6, 0.5
    k = ladder_category(n, r)
    out.append((f"ladder({r})", ladder_functor(k, n, r), [f"{i}->{min(i + 1, n)}" for i in range(n + 1)]))
    kk, ff, _ = non_uniqueness(n=4, r=r)
    out.append(("ladder+ladder", ff, [f"{t}:{i}->{min(i + 1, 4)}" for t in "01" for i in range(5)]))
    return out
