import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from normcat import core, generate
from normcat.core import Status
from normcat.errors import InputError, Refutation
from normcat.extreal import INF
from normcat.metcat import (
    EpCategory, EpPair, FiniteMetricSpace, LipschitzCategory, LipschitzMap, ProductSpace, ScaledSpace,
    SumSpace, compose_maps, discrete_space, ep_compose, ep_delta, ep_identity, ep_pairs_between,
    lipschitz_norm, metric_colimit, point_space,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def lip_norm_oracle(src, tgt, assign):
    """Pure-Python ``log max(Lip f, Lip f^-1)``."""
    n = len(src)
    if len(set(assign)) < n:
        return INF
    ratios = [tgt[assign[i]][assign[j]] / src[i][j] for i in range(n) for j in range(n) if i != j]
    if not ratios:
        return 0.0
    return max(0.0, math.log(max(max(ratios), max(1 / r for r in ratios))))


def delta_oracle(tgt, e, p):
    return max(tgt[e[p[y]]][y] for y in range(len(tgt)))


def test_space_validation():
    with pytest.raises(InputError):
        FiniteMetricSpace("abc", [[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    with pytest.raises(InputError):
        FiniteMetricSpace("ab", [[0, 1], [2, 0]])
    with pytest.raises(InputError):
        FiniteMetricSpace("ab", [[0, 0], [0, 0]])
    assert FiniteMetricSpace("abc", [[0, 1, 5], [1, 0, 1], [5, 1, 0]], validate=False).size == 3


def test_counterexample_norms_frozen():
    one = FiniteMetricSpace(["x"], [[0]])
    two = FiniteMetricSpace(["x", "y"], [[0, 1], [1, 0]])
    wide = FiniteMetricSpace(["x", "z"], [[0, 2], [2, 0]])
    g = LipschitzMap(one, two, [0])
    h = LipschitzMap(two, wide, [0, 1])
    assert lipschitz_norm(g) == 0.0
    assert lipschitz_norm(compose_maps(h, g)) == 0.0
    assert lipschitz_norm(h) == pytest.approx(0.6931471805599453, abs=1e-12)


def test_non_injective_map_has_inf_norm():
    two = discrete_space(2)
    assert lipschitz_norm(LipschitzMap(two, two, [0, 0])) == INF


def test_structured_spaces_match_dense_oracle():
    a = discrete_space(2)
    b = FiniteMetricSpace("pq", [[0, 0.5], [0.5, 0]])
    prod = ProductSpace(a, ScaledSpace(0.5, b))
    for (i, (x, u)), (j, (y, v)) in itertools.product(enumerate(prod.points), repeat=2):
        want = max(a.d(x, y), 0.5 * b.d(u, v))
        assert prod.matrix[i, j] == want
    s = SumSpace(a, b)
    assert s.d((0, 0), (1, "p")) == 1.0 and s.d((1, "p"), (1, "q")) == 0.5
    with pytest.raises(InputError):
        SumSpace(FiniteMetricSpace("ab", [[0, 3], [3, 0]]), a)


def test_ep_pair_validation():
    x, y = point_space(), discrete_space(2)
    EpPair(LipschitzMap(x, y, [0]), LipschitzMap(y, x, [0, 0]))
    with pytest.raises(InputError):  # p . e is a swap
        EpPair(LipschitzMap(y, y, [1, 0]), LipschitzMap(y, y, [0, 1]))
    wide = FiniteMetricSpace("ab", [[0, 2], [2, 0]])
    with pytest.raises(InputError):
        EpPair(LipschitzMap(y, wide, [0, 1]), LipschitzMap(wide, y, [0, 1]))


def test_ep_pairs_between_counts():
    assert len(ep_pairs_between(point_space(), discrete_space(2))) == 2
    assert len(ep_pairs_between(discrete_space(2), discrete_space(3))) == 12
    assert ep_pairs_between(discrete_space(3), discrete_space(2)) == []


def test_ep_delta_of_start_pair():
    x, y = point_space(), discrete_space(3)
    f = EpPair(LipschitzMap(x, y, [1]), LipschitzMap(y, x, [0, 0, 0]))
    assert ep_delta(f) == 1.0
    assert ep_delta(ep_identity(y)) == 0.0


def test_ep_category_audit_small():
    cat = EpCategory([point_space(), discrete_space(2), FiniteMetricSpace("abc", [[0, 1, 2], [1, 0, 1], [2, 1, 0]])])
    assert core.audit_norm(cat).passed


def test_lipschitz_category_all_maps_audit():
    spaces = [discrete_space(2), FiniteMetricSpace("abc", [[0, 1, 2], [1, 0, 1], [2, 1, 0]])]
    rep = core.audit_norm(LipschitzCategory(spaces))
    assert rep.passed and rep.status("MCFULL") is Status.FAIL


def test_metric_colimit_of_growing_chain():
    # stage k: points 0..k on a line with spacing 2^-j; inclusions are prefixes
    spaces, incs = [], []
    for k in range(6):
        pos = np.concatenate([[0.0], np.cumsum([2.0 ** -j for j in range(k)])])
        spaces.append(FiniteMetricSpace(list(range(k + 1)), np.abs(pos[:, None] - pos[None, :])))
        if k:
            incs.append(LipschitzMap(spaces[k - 1], spaces[k], np.arange(k)))
    ap = metric_colimit(spaces, incs, lambda e: 3, 0.01, horizon=5)
    assert ap.space.size == 4 and ap.observed_spread == 0.0 and ap.stage == 3


def test_metric_colimit_refutes_moving_distances():
    a = FiniteMetricSpace("ab", [[0, 1], [1, 0]])
    b = FiniteMetricSpace("ab", [[0, 2], [2, 0]], name="b")
    with pytest.raises(Refutation) as exc:
        metric_colimit([a, b], [LipschitzMap(a, b, [0, 1])], lambda e: 0, 0.5)
    assert exc.value.witness["stages"] == [0, 1]


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_lipschitz_norm_matches_oracle(seed):
    f, g, _ = generate.lipschitz_pair(np.random.default_rng(seed))
    for m in (f, g):
        want = lip_norm_oracle(m.source.matrix.tolist(), m.target.matrix.tolist(), m.assign.tolist())
        got = lipschitz_norm(m)
        assert got == want or abs(got - want) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_lipschitz_mc2_mc3(seed):
    f, g, cat = generate.lipschitz_pair(np.random.default_rng(seed))
    verdict = core.check_pair(cat, f, g, tol=1e-9)
    assert verdict["MC2"] and verdict["MC3"]


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_hair_extension_is_an_ep_pair(seed):
    f, g = generate.ep_pair_chain(np.random.default_rng(seed))
    for pair in (f, g):
        t = pair.target.matrix.tolist()
        assert ep_delta(pair) == delta_oracle(t, pair.e.assign.tolist(), pair.p.assign.tolist())
    fg = ep_compose(f, g, verify=True)
    assert fg.source == g.source and fg.target == f.target


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_ep_norm_axioms(seed):
    f, g = generate.ep_pair_chain(np.random.default_rng(seed))
    cat = EpCategory()
    v = core.check_pair(cat, f, g, tol=1e-9)
    assert v["MC2"] and v["MC3"]
    assert ep_delta(ep_identity(f.target)) == 0.0
