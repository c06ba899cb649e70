import math

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from leflab.binom_dets import (BinomSpec, abs_det_c_krattenthaler, abs_det_c_macmahon,
                               abs_det_c_roberts, build_c, det_c_exact, hyperfactorial,
                               plane_partitions, plane_partitions_brute, prime_cond_product,
                               prime_factorization_of_abs_det)
from leflab.errors import PreconditionViolated


def test_fixture_values():
    assert abs(det_c_exact((2, 1, 2))) == 2
    assert abs(det_c_exact((3, 2, 3))) == 3
    assert det_c_exact((3, 1, 3)) == -6
    assert det_c_exact((2, 1, 4)) == -4
    assert abs(det_c_exact((4, 2, 4))) == 20


def test_build_c_entries():
    C = build_c(BinomSpec(3, 1, 3))
    assert C.to_rows() == [[3, 3], [3, 1]]
    assert build_c(BinomSpec(5, 3, 3)).shape == (0, 0)
    assert det_c_exact((5, 3, 3)) == 1


def test_sympy_oracle():
    for t, p, d in [(4, 1, 5), (6, 2, 5), (7, 3, 7)]:
        n = d - p
        ref = sympy.Matrix(n, n, lambda r, c: sympy.binomial(t, d - r - c - 1)).det()
        assert det_c_exact((t, p, d)) == ref


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 12), st.integers(1, 12), st.data())
def test_four_routes_agree(t, d, data):
    p = data.draw(st.integers(0, min(t, d)))
    s = BinomSpec(t, p, d)
    v = abs(det_c_exact(s))
    assert abs_det_c_krattenthaler(s) == v
    assert abs_det_c_macmahon(s) == v
    assert abs_det_c_roberts(s) == v
    assert v != 0


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10), st.integers(1, 10), st.data())
def test_factorization_reassembles(t, d, data):
    p = data.draw(st.integers(0, min(t, d)))
    f = prime_factorization_of_abs_det((t, p, d))
    assert math.prod(q**e for q, e in f.items()) == abs(det_c_exact((t, p, d)))
    assert f == {int(k): v for k, v in sympy.factorint(abs(det_c_exact((t, p, d)))).items()}


def test_factorization_fixtures():
    assert prime_factorization_of_abs_det((2, 1, 4)) == {2: 2}
    assert prime_factorization_of_abs_det((3, 1, 3)) == {2: 1, 3: 1}


def test_closed_forms_reject_large_p():
    with pytest.raises(PreconditionViolated):
        abs_det_c_macmahon((2, 3, 4))
    with pytest.raises(PreconditionViolated):
        BinomSpec(2, 5, 4)


def test_hyperfactorial():
    assert [hyperfactorial(n) for n in range(6)] == [1, 1, 1, 2, 12, 288]


def test_plane_partitions():
    assert plane_partitions(1, 1, 1) == 2
    assert plane_partitions(2, 2, 2) == 20
    assert plane_partitions(3, 3, 3) == 980
    for a in range(1, 4):
        for b in range(1, 4):
            for c in range(1, 4):
                assert plane_partitions(a, b, c) == plane_partitions_brute(a, b, c)
                assert plane_partitions(a, b, c) == abs(det_c_exact((b + c, c, a + c)))


def test_plane_partitions_symmetric():
    assert plane_partitions(2, 3, 4) == plane_partitions(4, 2, 3) == plane_partitions(3, 4, 2)


def test_prime_cond_product():
    # i >= s leaves the range empty
    assert prime_cond_product(9, 2, 4, 9) == 1
    assert prime_cond_product(5, 2, 4, 9) == det_c_exact((2, 1, 4))
    # d=3, t=3, i=1, s=3: p runs over max(1,2,2)=2..min(2,2)=2
    assert prime_cond_product(1, 3, 3, 3) == det_c_exact((3, 2, 3))
