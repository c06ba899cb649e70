import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leflab.algebra import LinearForm, MonomialAlgebra, mult_matrix, parse_descriptor, tensor_extend
from leflab.binom_dets import det_c_exact, prime_cond_product, recursion_guard_product
from leflab.errors import CharacteristicObstruction, NotSquare, PreconditionViolated
from leflab.exact_linalg import det, rank_mod_p, rank_rational
from leflab.recursion import (BruteForceOracle, ExtensionOracle, HilbertOracle, RankQuery,
                              RequiredMode, build_lr, decide_full_rank, det_formula,
                              nested_oracle, p_divides_t_rule, q_range, quadratic_ci_criterion,
                              quadratic_det_formula, required_mode)


def brute(A, t, i, p=0):
    M = mult_matrix(A, LinearForm.ones(A.n), t, i)
    return (rank_mod_p(M, p) if p else rank_rational(M)).full_rank


def test_q_range_examples():
    # upper end is min(3, 3 - 5 - 2 + 9, 5) = 3
    assert list(q_range(5, 2, 4, 9)) == [2, 3]
    B = MonomialAlgebra.complete_intersection([4, 4, 4])
    assert B.socle_degree == 9
    v, trace = decide_full_rank(B, 4, (5, 2))
    assert [c.q for c in trace.children] == [2, 3]
    assert v == brute(tensor_extend(B, 4), 2, 5)
    assert list(q_range(3, 2, 2, 9)) == [0, 1]
    assert list(q_range(4, 1, 3, 4)) == []   # i >= s
    assert list(q_range(1, 1, 3, 5)) == []   # d - 1 >= i + t
    with pytest.raises(PreconditionViolated):
        q_range(0, 1, 0, 1)


def test_required_mode():
    assert required_mode(5, 1, 3, 5) is RequiredMode.ALL_SURJECTIVE
    assert required_mode(0, 1, 3, 6) is RequiredMode.ALL_INJECTIVE
    assert required_mode(1, 2, 2, 4) is RequiredMode.SAME_REASON


def test_rank_query_bounds():
    with pytest.raises(PreconditionViolated):
        RankQuery(0, 0)
    with pytest.raises(PreconditionViolated):
        RankQuery(-1, 1)


def test_cubic_two_variables_fails():
    B = MonomialAlgebra.power_ideal(2, 3)
    verdict, trace = decide_full_rank(B, 2, (1, 2))
    assert not verdict
    assert verdict == brute(tensor_extend(B, 2), 2, 1)


def test_zero_target_is_trivially_full():
    verdict, trace = decide_full_rank(MonomialAlgebra.complete_intersection([3, 3]), 2, (9, 1))
    assert verdict and trace.children == ()


def test_square_free_example():
    B = MonomialAlgebra.complete_intersection([2, 2, 2])
    verdict, trace = decide_full_rank(B, 2, (2, 1))
    A = tensor_extend(B, 2)
    assert verdict and brute(A, 1, 2)
    assert mult_matrix(A, LinearForm.ones(4), 1, 2).shape == (4, 6)


def test_trace_enumerates_q_range_and_serializes():
    B = MonomialAlgebra.complete_intersection([2, 3])
    verdict, trace = decide_full_rank(B, 4, (2, 2))
    s = B.socle_degree
    assert [c.q for c in trace.children] == list(q_range(2, 2, 4, s))
    blob = json.loads(json.dumps(trace.to_dict()))
    assert set(blob) >= {"i", "t", "d", "mode", "children", "verdict"}
    assert set(blob["children"][0]) >= {"q", "src_deg", "power", "rank", "reason"}
    assert verdict == blob["verdict"]


def test_parallel_children_same_trace():
    B = MonomialAlgebra.complete_intersection([3, 3])
    for i, t in [(2, 3), (3, 4), (1, 5)]:
        a = decide_full_rank(B, 4, (i, t))
        b = decide_full_rank(B, 4, (i, t), workers=3)
        assert a == b


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 2), st.data(), st.integers(1, 4))
def test_equivalence_on_random_monomial_bases(n, data, d):
    caps = data.draw(st.lists(st.integers(1, 4), min_size=n, max_size=n))
    extra = data.draw(st.lists(st.lists(st.integers(0, 3), min_size=n, max_size=n), max_size=2))
    gens = [tuple(c if k == j else 0 for k in range(n)) for j, c in enumerate(caps)]
    gens += [tuple(g) for g in extra if any(g)]
    B = MonomialAlgebra.from_generators(n, gens)
    A = tensor_extend(B, d)
    for i in range(A.socle_degree + 1):
        for t in range(1, A.socle_degree - i + 1):
            assert decide_full_rank(B, d, (i, t))[0] == brute(A, t, i)


def test_char_p_agrees_when_guard_allows():
    checked = 0
    for caps in itertools.chain(itertools.product(range(1, 4), repeat=1),
                                itertools.product(range(1, 4), repeat=2)):
        B = MonomialAlgebra.complete_intersection(caps)
        for d in range(1, 5):
            A = tensor_extend(B, d)
            for p in (2, 3, 5):
                for i in range(A.socle_degree + 1):
                    for t in range(1, A.socle_degree - i + 1):
                        try:
                            v, _ = decide_full_rank(B, d, (i, t), char=p)
                        except CharacteristicObstruction as exc:
                            assert exc.product % p == 0
                            continue
                        assert v == brute(A, t, i, p), (caps, d, p, i, t)
                        checked += 1
    assert checked > 500


def test_obstruction_raised():
    B = MonomialAlgebra.complete_intersection([3, 3])
    s = B.socle_degree
    assert prime_cond_product(1, 3, 3, s) == det_c_exact((3, 2, 3))
    assert recursion_guard_product(1, 3, 3, s) == det_c_exact((3, 1, 3)) * det_c_exact((3, 2, 3))
    with pytest.raises(CharacteristicObstruction) as info:
        decide_full_rank(B, 3, (1, 3), char=3)
    assert info.value.p == 3 and info.value.product % 3 == 0


def test_published_guard_is_too_narrow():
    # k[y]/(y^2) extended by x^2 in characteristic 2: (x + y)^2 = 2xy = 0
    B = MonomialAlgebra.complete_intersection([2])
    assert prime_cond_product(0, 2, 2, 1) == 1
    assert not brute(tensor_extend(B, 2), 2, 0, 2)
    assert recursion_guard_product(0, 2, 2, 1) == 2
    with pytest.raises(CharacteristicObstruction):
        decide_full_rank(B, 2, (0, 2), char=2)


def test_hilbert_mock_flips_verdict():
    h = (1, 2, 3, 2, 1)
    d, i, t = 2, 2, 1
    ok, trace = decide_full_rank(HilbertOracle(h), d, (i, t))
    assert ok
    (child,) = [c for c in trace.children if c.q == 1]
    broken = HilbertOracle(h, {(child.src_deg, child.power): 0})
    assert not decide_full_rank(broken, d, (i, t))[0]


def test_extension_oracle_ranks():
    for caps in [(2, 2, 3), (3, 2, 2), (2, 3, 4)]:
        oracle = nested_oracle(caps)
        A = MonomialAlgebra.complete_intersection(caps)
        for i in range(A.socle_degree + 1):
            for t in range(1, A.socle_degree - i + 1):
                M = mult_matrix(A, LinearForm.ones(A.n), t, i)
                assert oracle.rank(i, t).rank == rank_rational(M).rank


def test_extension_oracle_over_non_ci():
    B = MonomialAlgebra.power_ideal(2, 3)
    oracle = ExtensionOracle(BruteForceOracle(B), 3)
    A = tensor_extend(B, 3)
    for i in range(A.socle_degree + 1):
        for t in range(1, A.socle_degree - i + 1):
            M = mult_matrix(A, LinearForm.ones(A.n), t, i)
            assert oracle.rank(i, t).rank == rank_rational(M).rank


def test_quadratic_criterion_examples():
    assert quadratic_ci_criterion(5, 1, 2, 7)
    assert not quadratic_ci_criterion(5, 1, 3, 3)
    assert quadratic_ci_criterion(4, 2, 3, 2)
    assert quadratic_ci_criterion(4, 1, 2, 0)


@pytest.mark.parametrize("p", [2, 3])
def test_p_divides_t_rule_matches_brute_force(p):
    bases = ["ci:2", "ci:2,2", "ci:2,3", "ci:3,3", "ci:2,2,2", "mono:2:x0^2,x0*x1,x1^2",
             "mono:2:x0^3,x0^2*x1,x0*x1^2,x1^3"]
    for desc in bases:
        B = parse_descriptor(desc)
        A = tensor_extend(B, 2)
        for i in range(A.socle_degree + 1):
            for t in range(p, A.socle_degree - i + 1, p):
                assert p_divides_t_rule(B, (i, t), p) == brute(A, t, i, p), (desc, i, t)


def test_p_divides_t_edge_case_uses_power_t():
    # B = k[y,z]/(y^2,z^2) in characteristic 2: (y+z)^2 = 0, so 1 -> A_2 dies
    B = parse_descriptor("ci:2,2")
    A = tensor_extend(B, 2)
    assert not brute(A, 2, 0, 2)
    assert not p_divides_t_rule(B, (0, 2), 2)
    with pytest.raises(PreconditionViolated):
        p_divides_t_rule(B, (0, 3), 2)


def test_det_formula_example():
    assert det_formula(MonomialAlgebra.complete_intersection([2, 3]), 4, (2, 2)) == 12
    # the map from A_9 on a socle-4 algebra hits zero with zero source
    assert det_formula(MonomialAlgebra.complete_intersection([2, 2]), 2, (7, 1)) == 1
    with pytest.raises(NotSquare):
        det_formula(MonomialAlgebra.complete_intersection([2, 3]), 2, (0, 1))


def test_det_formula_square_free_ten_by_ten():
    B = MonomialAlgebra.complete_intersection([2] * 4)
    A = tensor_extend(B, 2)
    M = mult_matrix(A, LinearForm.ones(5), 1, 2)
    assert M.shape == (10, 10)
    assert det_formula(B, 2, (2, 1)) == abs(det(M))


def test_det_formula_non_ci_base():
    B = parse_descriptor("mono:2:x0^2,x0*x1,x1^4")
    oracle = BruteForceOracle(B)
    A = tensor_extend(B, 3)
    ell = oracle.form.extend(1)
    for i in range(A.socle_degree + 1):
        for t in range(1, A.socle_degree - i + 1):
            if A.hilbert[i] == A.hilbert[i + t]:
                assert det_formula(oracle, 3, (i, t)) == abs(det(mult_matrix(A, ell, t, i)))


def test_quadratic_det_formula_signed():
    checked = 0
    for caps in itertools.chain(*(itertools.product(range(1, 4), repeat=k) for k in (1, 2, 3))):
        B = MonomialAlgebra.complete_intersection(caps)
        hB = B.hilbert
        A = tensor_extend(B, 2)
        ell = LinearForm.ones(A.n)
        for i in range(1, A.socle_degree + 1):
            for t in range(1, A.socle_degree - i + 1):
                n, m = hB[i], hB[i - 1]
                if hB[i + t - 1] != n or hB[i + t] != m or hB[i + t] == 0:
                    continue
                dp = det(mult_matrix(B, LinearForm.ones(B.n), t - 1, i))
                du = det(mult_matrix(B, LinearForm.ones(B.n), t + 1, i - 1)) if m else 1
                want = det(mult_matrix(A, ell, t, i))
                assert quadratic_det_formula(n, m, dp, du, t) == want, (caps, i, t)
                checked += 1
    assert checked > 20


def test_quadratic_edge_case_determinant():
    # i = 0 and B_t = 0 with dim B_{t-1} = 1
    B = MonomialAlgebra.complete_intersection([3])
    A = tensor_extend(B, 2)
    t = 3
    assert det(mult_matrix(A, LinearForm.ones(2), t, 0)) == t * det(
        mult_matrix(B, LinearForm.ones(1), t - 1, 0))


def test_build_lr_small_cases():
    B = MonomialAlgebra.complete_intersection([2, 3])
    lr = build_lr(B, 1, 1, 2)
    assert lr.l_matrix == lr.l_matrix.identity(lr.l_matrix.rows) and lr.l_scale == 1
    # d = 2: L = [[I, -U/t], [0, I]], so c_{1,1} = -1/t, and the bottom scalar is t
    lr = build_lr(B, 2, 1, 2)
    assert lr.coefficients[1] == (Fraction(-1, 2),)
    assert lr.antidiagonal_scalars[2] == 2
    assert not lr.problems()
    lr = build_lr(MonomialAlgebra.complete_intersection([3]), 3, 1, 3)
    ratios = [lr.antidiagonal_scalars[p] for p in (1, 2, 3)]
    assert ratios == [Fraction(det_c_exact((3, 0, 3)), det_c_exact((3, 1, 3))),
                      Fraction(det_c_exact((3, 1, 3)), det_c_exact((3, 2, 3))), 3]
    assert not lr.problems()


def test_build_lr_sweep():
    for desc in ["ci:2", "ci:2,2", "ci:3,2", "mono:2:x0^2,x0*x1,x1^3"]:
        B = parse_descriptor(desc)
        for d in range(1, 5):
            for t in range(1, 7):
                for i in range(B.socle_degree + d):
                    assert not build_lr(B, d, i, t).problems(), (desc, d, i, t)


def test_slp_of_base_is_necessary():
    # whenever the extension has full rank everywhere, the q = 0 children do too
    for desc in ["ci:2,3", "mono:2:x0^3,x0^2*x1,x0*x1^2,x1^3", "mono:2:x0^2,x0*x1,x1^4"]:
        B = parse_descriptor(desc)
        for d in range(1, 4):
            A = tensor_extend(B, d)
            pairs = [(i, t) for i in range(A.socle_degree + 1)
                     for t in range(1, A.socle_degree - i + 1)]
            results = [decide_full_rank(B, d, q) for q in pairs]
            if all(v for v, _ in results):
                for _, trace in results:
                    for c in trace.children:
                        if c.q == 0:
                            assert c.report.full_rank
