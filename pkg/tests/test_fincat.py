import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from normcat import core, fincat, generate
from normcat.core import Status
from normcat.errors import InputError, NotSubcategoryError
from normcat.extreal import INF
from normcat.fincat import (
    FiniteCategory, check_group_norm_equivalence, check_potential_kernel, cyclic_group, discrete_norm,
    disjoint_sum, from_payload, integer_window, monic_arrows, preorder_category, pseudometric_as_category,
)

from oracles import cyclic_word_length

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_payload_roundtrip():
    c = preorder_category(["a", "b", "c"], lambda x, y: x <= y, lambda x, y: 0.0 if x == y else INF)
    d = from_payload(c.to_payload())
    assert d.arrow_ids == c.arrow_ids and dict(d.norm_table) == dict(c.norm_table)


def test_dangling_arrow_rejected():
    with pytest.raises(InputError):
        FiniteCategory(["a"], {"ia": ("a", "a"), "f": ("a", "b")}, {"a": "ia"}, {})


def test_non_transitive_relation_rejected():
    rel = {("a", "b"), ("b", "c")}
    with pytest.raises(InputError):
        preorder_category("abc", lambda x, y: (x, y) in rel)


def test_negative_norm_rejected():
    with pytest.raises(InputError):
        pseudometric_as_category("ab", [[0, -1], [-1, 0]])


def test_asymmetric_pseudometric_rejected():
    with pytest.raises(InputError):
        pseudometric_as_category("ab", [[0, 1], [2, 0]])


def test_z6_word_length_passes_both_suites():
    g = cyclic_group(6)
    word = dict(zip(g.elements, map(float, cyclic_word_length(6))))
    assert word == {"r0": 0.0, "r1": 1.0, "r2": 2.0, "r3": 3.0, "r4": 2.0, "r5": 1.0}
    rep = check_group_norm_equivalence(g, word)
    assert rep.passed and rep.stats["suites_agree"]


def test_asymmetric_group_norm_fails_both_suites():
    g = cyclic_group(3)
    rep = check_group_norm_equivalence(g, {"r0": 0.0, "r1": 1.0, "r2": 2.0})
    assert rep.status("N2") is Status.FAIL and rep.status("MC3") is Status.FAIL
    assert rep.stats["suites_agree"]


def test_integer_window_is_partial():
    g = integer_window(3)
    rep = check_group_norm_equivalence(g, {str(k): float(abs(k)) for k in range(-3, 4)})
    assert rep.passed and any("skipped" in n for n in rep.notes)


def test_monics_in_a_preorder_are_everything():
    c = preorder_category(["a", "b"], lambda x, y: x <= y)
    assert monic_arrows(c) == set(c.arrow_ids)


def test_monics_detect_collapse():
    # two parallel arrows a -> b equalized by b -> c
    arrows = {"ia": ("a", "a"), "ib": ("b", "b"), "ic": ("c", "c"), "u": ("a", "b"), "v": ("a", "b"),
              "k": ("b", "c"), "w": ("a", "c")}
    table = {(i, i): i for i in ("ia", "ib", "ic")}
    table.update({("u", "ia"): "u", ("ib", "u"): "u", ("v", "ia"): "v", ("ib", "v"): "v",
                  ("k", "ib"): "k", ("ic", "k"): "k", ("w", "ia"): "w", ("ic", "w"): "w",
                  ("k", "u"): "w", ("k", "v"): "w"})
    c = FiniteCategory("abc", arrows, {"a": "ia", "b": "ib", "c": "ic"}, table)
    assert core.audit_norm(c.with_norm({a: 0.0 for a in arrows})).passed
    assert "k" not in monic_arrows(c) and {"u", "v", "w"} <= monic_arrows(c)


def test_kernel_must_be_a_subcategory():
    c = pseudometric_as_category("ab", [[0, 1], [1, 0]])
    with pytest.raises(NotSubcategoryError):
        check_potential_kernel(c, {"a->a", "b->b", "a->b", "b->a", "zz"})
    with pytest.raises(NotSubcategoryError):
        check_potential_kernel(preorder_category("abc", lambda x, y: x <= y), {"a<b", "b<c"} | {
            "a<a", "b<b", "c<c"})


def test_k1_failure_and_discrete_norm_refusal():
    c = preorder_category(["a", "b"], lambda x, y: x <= y)
    rep = check_potential_kernel(c, {"a<a"})
    assert rep.status("K1") is Status.FAIL
    with pytest.raises(InputError):
        discrete_norm(c, {"a<a"})


def test_k2_failure():
    # a -> b -> c with k0 = identities + (a<c) + (b<c) but not a<b
    c = preorder_category("abc", lambda x, y: x <= y)
    k0 = {"a<a", "b<b", "c<c", "a<c", "b<c"}
    assert check_potential_kernel(c, k0).status("K2") is Status.FAIL


def test_disjoint_sum_has_no_cross_arrows():
    k = pseudometric_as_category("ab", [[0, 1], [1, 0]])
    s = disjoint_sum(k, k)
    assert s.hom("0:a", "1:a") == () and len(s.arrow_ids) == 8
    assert core.audit_norm(s).passed


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_potential_kernel_round_trip(seed):
    c, k0 = generate.random_kernel_pair(np.random.default_rng(seed))
    assert check_potential_kernel(c, k0).passed
    dn = c.with_norm(discrete_norm(c, k0))
    assert core.audit_norm(dn).passed
    assert set(core.kernel(dn).arrows()) == k0


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_group_suites_agree(seed):
    rng = np.random.default_rng(seed)
    c = generate.random_group_category(rng)
    g = cyclic_group(len(c.arrow_ids))
    mu = dict(c.norm_table)
    if rng.random() < 0.5:  # perturb: break symmetry or subadditivity
        k = str(rng.choice(list(mu)))
        mu[k] = mu[k] + float(rng.integers(1, 5))
    assert check_group_norm_equivalence(g, mu).stats["suites_agree"]
