import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from normcat import core
from normcat.cauchy import (
    CONFIRMED, NO_VERDICT, REFUTED, CauchyCertificate, GeometricTail, PreorderCategory, Sequence,
    SequenceCompletion, Transformation, check_cauchy, constant_sequence, convergent_implies_cauchy_check,
    diagonalize, series_criterion, transformation_norm, verify_colimit_candidate,
)
from normcat.core import Status
from normcat.errors import InputError
from normcat.extreal import INF
from normcat.fincat import from_payload
from normcat.fixtures import (
    LIMITS, constant_grid, dyadic_path, even_odd_naturals, geometric_approach, natural_sequence, real_line,
    stream_grid, two_limit_category,
)
from normcat.serialize import load

from oracles import series_modulus

NON_DYADIC = (0.3, 0.1, 0.03, 0.01, 3e-3, 1e-3)


def test_even_odd_refuted_with_finite_witness():
    seq = natural_sequence(even_odd_naturals())
    v = check_cauchy(seq, CauchyCertificate(((1.0, 2),)), horizon=8)
    assert v.status == REFUTED
    assert v.witness["m"] % 2 == 1 and v.witness["mu"] == INF


def test_even_subsequence_confirmed():
    seq = natural_sequence(even_odd_naturals()).subsequence(lambda k: 2 * k)
    v = check_cauchy(seq, CauchyCertificate(((1.0, 0), (1e-6, 0))), horizon=20)
    assert v.status == CONFIRMED and v.checked > 0


def test_bond_order_is_a_contract():
    seq = natural_sequence(real_line())
    with pytest.raises(InputError):
        seq.bond(3, 2)


def test_certificate_rows_validated():
    with pytest.raises(InputError):
        CauchyCertificate(((0.1, 3), (0.3, 5)))
    with pytest.raises(InputError):
        CauchyCertificate(())
    cert = CauchyCertificate(((0.3, 3), (0.1, 5)))
    assert cert.threshold(0.2) == 5
    with pytest.raises(InputError):
        cert.threshold(0.01)


def test_horizon_below_certificate_rejected():
    with pytest.raises(InputError):
        check_cauchy(natural_sequence(real_line()), CauchyCertificate(((0.1, 9),)), horizon=4)


def test_table_functoriality_violation_raises():
    host = from_payload(load("tests/fixtures/evenodd_chain.json").payload["category"])
    bonds = {(0, 1): "0<1", (1, 2): "1<2", (0, 2): "0<1"}  # (0, 2) mistyped
    seq = Sequence.from_table(host, ["0", "1", "2"], bonds=bonds)
    with pytest.raises(InputError) as exc:
        seq.check_functoriality(2)
    assert exc.value.witness == {"n": 0, "m": 1, "k": 2}


def test_geometric_tail_modulus_matches_closed_form():
    tail = GeometricTail(1.0, 0.5)
    for eps in (1.0, 0.3, 0.1, 0.03, 1e-3, 1e-6):
        assert tail.modulus(eps) == series_modulus(eps)
    assert [series_modulus(e) for e in (0.3, 0.1, 0.03, 1e-6)] == [3, 5, 7, 21]  # frozen


def test_series_on_dyadic_path():
    seq = dyadic_path(64)
    res = series_criterion(seq, 64, GeometricTail(1.0, 0.5))
    assert res.status == CONFIRMED
    assert abs(res.partial_sums[-1] - 2.0) <= 1e-9
    assert all(n == series_modulus(e) for e, n in res.certificate.rows)
    assert check_cauchy(seq, res.certificate, 64).status == CONFIRMED


def test_series_without_tail_is_no_verdict():
    assert series_criterion(dyadic_path(8), 8).status == NO_VERDICT


def test_series_refutes_a_wrong_tail():
    res = series_criterion(dyadic_path(8), 8, GeometricTail(1.0, 0.25))
    assert res.status == REFUTED and res.witness["k"] == 1


def test_geometric_approach_converges_and_is_cauchy():
    host, seq, v, cocone = geometric_approach()
    rep = verify_colimit_candidate(seq, v, cocone, 16, tol=1e-3)
    assert rep.status("C1-COCONE") is Status.PASS and rep.status("C2") is Status.PASS
    assert rep.status("C1-UNIVERSAL") is Status.SKIPPED
    chk = convergent_implies_cauchy_check(seq, v, cocone, 16, eps_grid=NON_DYADIC, c2_tol=1e-3)
    assert chk.ok and chk.cauchy.status == CONFIRMED
    # mu(g_n) = 2^-n < eps/2 from the first n with 2^-n < eps/2
    for eps, n in chk.certificate.rows:
        assert 2.0 ** -n < eps / 2 and (n == 0 or not 2.0 ** -(n - 1) < eps / 2)


def test_convergence_needs_a_passing_cocone():
    host, seq, v, cocone = geometric_approach()
    with pytest.raises(InputError):
        convergent_implies_cauchy_check(seq, 2.0, lambda n: (seq.object_at(n), 2.0), 8)


def test_two_limits_both_verify():
    host = two_limit_category()
    seq = natural_sequence(host)
    for lim in LIMITS:
        rep = verify_colimit_candidate(seq, lim, lambda n, lim=lim: (n, lim), 12)
        assert rep.status("C1-COCONE") is Status.PASS and rep.status("C2") is Status.PASS
    finite = two_limit_category(truncate=4)
    chk = core.is_zero_isomorphism(finite, ("l0", "l1"))
    assert chk.is_isomorphism is True and chk.verdict is False and chk.mu == INF


def test_finite_chain_colimit_and_top_cocone():
    ok = load("tests/fixtures/geometric_chain.json").payload
    host = from_payload(ok["category"])
    seq = Sequence.from_table(host, ok["objects"], steps=ok["steps"])
    rep = verify_colimit_candidate(seq, ok["cocone"]["vertex"], ok["cocone"]["arrows"], 12, tol=0.01)
    assert rep.passed
    top = load("tests/fixtures/top_cocone.json").payload
    host = from_payload(top["category"])
    seq = Sequence.from_table(host, top["objects"], steps=top["steps"])
    rep = verify_colimit_candidate(seq, "v", top["cocone"]["arrows"], 12, tol=0.01)
    assert rep.status("C1-COCONE") is Status.PASS and rep.status("C1-UNIVERSAL") is Status.FAIL


def test_transformation_naturality_and_norm():
    host = real_line()
    x = natural_sequence(host)
    y = x.shift(1)
    t = Transformation(x, y, lambda n: n, lambda n: (n, n + 1))
    assert t.check_naturality(6, exhaustive=True) == 21
    est = transformation_norm(t, 6)
    assert est.value == 1.0 and est.bound_ok
    bad = Transformation(x, y, lambda n: 0, lambda n: (n, 1))
    with pytest.raises(InputError):
        bad.check_naturality(2)


def test_completion_embeds_host_arrows():
    host = real_line()
    comp = SequenceCompletion(host, horizon=5)
    f = comp.embed_arrow((0.0, 0.75))
    assert comp.norm(f) == 0.75
    ident = comp.identity(comp.embed_object(0.0))
    assert comp.norm(ident) == 0.0
    g = comp.embed_arrow((0.75, 1.0))
    assert comp.norm(comp.compose(g, f)) == 1.0
    assert core.check_pair(comp, g, f)["MC2"]


def test_diagonal_of_stream_grid():
    grid, base = stream_grid()
    res = diagonalize(grid, 8, GeometricTail(1.0, 0.5), eps_grid=NON_DYADIC)
    assert res.status == CONFIRMED
    assert all(n == series_modulus(e) for e, n in res.certificate.rows)


def test_diagonal_of_constant_grid():
    host = real_line()
    res = diagonalize(constant_grid(host, 0.0), 6, GeometricTail(0.0, 0.5))
    assert res.status == CONFIRMED and res.rounds == 0


increasing_steps = st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=2, max_size=12)


@settings(max_examples=100, deadline=None)
@given(increasing_steps, st.floats(min_value=0.1, max_value=0.9))
def test_certified_geometric_sequences_are_cauchy(fracs, q):
    # steps s_k = frac_k * q^k are dominated by the tail (1, q)
    steps = [f * q ** k for k, f in enumerate(fracs)]
    pos = np.concatenate([[0.0], np.cumsum(steps)]).tolist()
    seq = Sequence(real_line(), pos.__getitem__, bond=lambda n, m: (pos[n], pos[m]), length=len(pos))
    h = len(pos) - 1
    res = series_criterion(seq, h, GeometricTail(1.0, q), tol=1e-12)
    assert res.status in (CONFIRMED, NO_VERDICT)
    if res.status == CONFIRMED:
        assert check_cauchy(seq, res.certificate, h).status == CONFIRMED


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=1, max_value=30))
def test_constant_sequence_is_stable(h):
    host = PreorderCategory(lambda a, b: a <= b, lambda f: f[1] - f[0])
    seq = constant_sequence(host, 3)
    assert all(mu == 0.0 for mu in seq.step_norms(h))
