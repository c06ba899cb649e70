import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leflab.algebra import LinearForm, MonomialAlgebra, mult_matrix, parse_descriptor, tensor_extend
from leflab.errors import IndexOutOfRange, ParityViolation, PreconditionViolated
from leflab.exact_linalg import det, rank_mod_p
from leflab.lefschetz import (Method, almost_centered, audit_corpus, brenner_kaid_wlp,
                              ci_det_recursion, ci_det_table, equivalence_audit, has_slp, has_wlp,
                              li_zanello_wlp_n3, midheavy_criteria, quadratic_a_recursion,
                              wlp_via_extension)

CI = MonomialAlgebra.complete_intersection
NON_CI = ["mono:3:x0^3,x1^3,x2^3,x0*x1*x2", "mono:2:x0^3,x0*x1,x1^3", "mono:2:x0^2,x1^3",
          "mono:2:x0^3,x0^2*x1,x1^2", "mono:3:x0^2,x1^2,x2^2,x0*x1*x2"]


def brute_wlp_mod_p(A, p):
    ell = LinearForm.ones(A.n)
    return all(rank_mod_p(mult_matrix(A, ell, 1, i), p).full_rank
               for i in range(A.socle_degree))


def test_section_five_fixtures():
    A = parse_descriptor("mono:3:x0^3,x1^3,x2^3,x0*x1*x2")
    assert has_wlp(A).wlp is False
    assert has_wlp(tensor_extend(A, 2)).wlp is True
    P = MonomialAlgebra.power_ideal(2, 3)
    assert has_slp(P).slp is True
    assert not almost_centered(P.hilbert)
    assert not midheavy_criteria(P.hilbert)
    assert has_slp(tensor_extend(P, 2)).slp is False


def test_slp_of_boolean_ci():
    for method in Method:
        assert has_slp(CI([2, 2, 2, 2]), method=method).slp is True


def test_recursion_method_needs_ci_over_q():
    with pytest.raises(PreconditionViolated):
        has_slp(CI([2, 2]), char=2, method=Method.RECURSION)
    with pytest.raises(PreconditionViolated):
        has_slp(MonomialAlgebra.power_ideal(2, 3), method=Method.CLOSED_FORM)


def test_failing_witness_is_a_real_failure():
    A = parse_descriptor("mono:3:x0^3,x1^3,x2^3,x0*x1*x2")
    v = has_wlp(A)
    i, t = v.failing_witness
    assert not rank_mod_p(mult_matrix(A, LinearForm.ones(3), t, i), 10007).full_rank


def test_verdict_dict_keys():
    A = CI([2, 3])
    assert set(has_slp(A).to_dict("ci:2,3", 0, A.hilbert)) == {
        "algebra", "char", "wlp", "slp", "witness", "method", "hf", "certified"}


def test_ci_det_examples():
    assert ci_det_recursion((2, 3, 4), 2) == 12
    assert ci_det_recursion((4, 3, 2), 2) == 12
    assert ci_det_recursion((2, 3), 0) == 3
    assert ci_det_recursion((4, 3), 1) == 6
    assert ci_det_recursion((4, 3), 2) == 1
    assert ci_det_table((2, 3, 4)).entries == {0: 60, 1: 240, 2: 12, 3: 1}


def test_ci_det_index_checks():
    with pytest.raises(IndexOutOfRange):
        ci_det_recursion((2, 3), 2)
    with pytest.raises(PreconditionViolated):
        ci_det_recursion((), 0)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=3), st.data())
def test_ci_det_matches_brute_force_and_is_order_free(caps, data):
    A = CI(caps)
    e = A.socle_degree
    i = data.draw(st.integers(0, e // 2))
    ref = abs(det(mult_matrix(A, LinearForm.ones(A.n), e - 2 * i, i)))
    assert ci_det_recursion(caps, i) == ref
    assert ci_det_recursion(caps, i, canonical=False) == ref
    perm = data.draw(st.permutations(caps))
    assert ci_det_recursion(perm, i, canonical=False) == ref


def test_quadratic_signed_det():
    for n in range(1, 7):
        A = CI([2] * n)
        for i in range(n // 2 + 1):
            signed = det(mult_matrix(A, LinearForm.ones(n), n - 2 * i, i))
            assert quadratic_a_recursion(n, i) == signed
            assert abs(signed) == ci_det_recursion([2] * n, i)


def test_almost_centered_and_midheavy():
    assert not almost_centered((1, 2, 3))
    assert almost_centered((1, 3, 3, 1))
    assert almost_centered((1,))
    assert midheavy_criteria((1, 3, 3, 1))
    assert not midheavy_criteria((1, 2, 3))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 5), min_size=1, max_size=6))
def test_symmetric_unimodal_is_almost_centered(half):
    up = sorted(half)
    h = up + up[::-1]
    assert almost_centered(h)
    assert midheavy_criteria(h)


@pytest.mark.parametrize("text", ["ci:2,3", "ci:3,3", "ci:2,2,2"] + NON_CI)
def test_wlp_via_extension_matches_brute_force(text):
    B = parse_descriptor(text)
    for d in range(1, B.socle_degree + 3):
        assert wlp_via_extension(B, d) == has_wlp(tensor_extend(B, d)).wlp


@pytest.mark.parametrize("text", ["ci:2,3", "ci:2,2,2", "mono:2:x0^3,x0*x1,x1^3"] + NON_CI[:1])
def test_slp_iff_every_square_extension_has_wlp(text):
    B = parse_descriptor(text)
    every = all(wlp_via_extension(B, d) for d in range(1, B.socle_degree + 2))
    assert has_slp(B).slp == every


@pytest.mark.parametrize("text", ["ci:2,3", "ci:3", "mono:2:x0^3,x0*x1,x1^3", "mono:2:x0^2,x1^3",
                                  "mono:2:x0^3,x0^2*x1,x1^2", "mono:2:x0^3,x0*x1^2,x1^3"])
def test_extension_keeps_slp_iff_almost_centered(text):
    B = parse_descriptor(text)
    lhs = almost_centered(B.hilbert) and has_slp(B).slp
    per_d = [has_slp(tensor_extend(B, d)).slp for d in range(1, 5)]
    assert all(per_d) == lhs


def test_audit_on_fixtures():
    rep = equivalence_audit(MonomialAlgebra.power_ideal(2, 3))
    assert rep.agree and not rep.conditions["ac_and_slp"]
    rep = equivalence_audit(CI([2, 3]))
    assert rep.agree and all(rep.conditions.values())


def test_corpus_size():
    corpus = audit_corpus()
    assert len(corpus) == 30
    assert len({A.descriptor() for A in corpus}) == 30


def test_li_zanello_against_brute_force():
    for d1, d2, d3 in itertools.combinations_with_replacement(range(1, 6), 3):
        if (d1 + d2 + d3) % 2:
            continue
        A = CI([d1, d2, d3])
        for p in (2, 3, 5):
            assert li_zanello_wlp_n3(d1, d2, d3, p) == brute_wlp_mod_p(A, p)


def test_li_zanello_rejects_odd_total():
    with pytest.raises(ParityViolation):
        li_zanello_wlp_n3(1, 1, 1, 2)
    with pytest.raises(PreconditionViolated):
        li_zanello_wlp_n3(3, 2, 1, 2)


def test_brenner_kaid_against_brute_force():
    for m in (1, 2, 3):
        A = CI([2 * m] * 3)
        for p in (2, 3, 5, 7):
            assert brenner_kaid_wlp(m, p) == brute_wlp_mod_p(A, p)
    assert not brenner_kaid_wlp(2, 5) and brenner_kaid_wlp(2, 3)
