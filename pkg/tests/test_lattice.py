import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polytope_ml import lattice

small_ints = st.integers(min_value=-6, max_value=6)


def matrices(rows, cols):
    return st.lists(st.lists(small_ints, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


def is_hnf(H):
    last_pivot = -1
    for row in H:
        if not any(row):
            continue
        piv = next(j for j, x in enumerate(row) if x)
        if piv <= last_pivot or row[piv] <= 0:
            return False
        last_pivot = piv
    for i, row in enumerate(H):
        if not any(row):
            assert all(not any(r) for r in H[i:])
            continue
        piv = next(j for j, x in enumerate(row) if x)
        for above in H[:i]:
            if not 0 <= above[piv] < row[piv]:
                return False
    return True


def cofactor_det(M):
    if len(M) == 1:
        return M[0][0]
    return sum((-1) ** j * M[0][j] * cofactor_det([r[:j] + r[j + 1 :] for r in M[1:]]) for j in range(len(M)))


def brute_force_hnf_2x2(M):
    # the HNF is the unique normal form in the orbit of M under GL(2, Z); search small U
    rng = range(-4, 5)
    for a, b, c, d in itertools.product(rng, repeat=4):
        if abs(a * d - b * c) != 1:
            continue
        H = lattice.matmul([[a, b], [c, d]], M)
        if is_hnf(H):
            return H
    return None


def test_hnf_worked_example():
    H, U = lattice.hermite_normal_form([[2, 4], [1, 3]])
    assert H == [[1, 1], [0, 2]]
    assert lattice.matmul(U, [[2, 4], [1, 3]]) == H
    assert brute_force_hnf_2x2([[2, 4], [1, 3]]) == H


@given(matrices(2, 2))
def test_hnf_matches_brute_force_2x2(M):
    if cofactor_det(M) == 0:
        return
    H, _ = lattice.hermite_normal_form(M)
    ref = brute_force_hnf_2x2(M)
    if ref is not None:
        assert H == ref


@given(st.integers(1, 4), st.integers(1, 5), st.data())
def test_hnf_properties(r, c, data):
    M = data.draw(matrices(r, c))
    H, U = lattice.hermite_normal_form(M)
    assert lattice.matmul(U, M) == H
    assert abs(lattice.determinant(U)) == 1
    assert is_hnf(H)


@given(st.integers(1, 4), st.data())
def test_determinant_matches_cofactor_expansion(n, data):
    M = data.draw(matrices(n, n))
    assert lattice.determinant(M) == cofactor_det(M)


def test_determinant_needs_pivoting():
    assert lattice.determinant([[0, 1], [1, 0]]) == -1
    assert lattice.determinant([[0, 0], [1, 2]]) == 0


@given(st.integers(1, 3), st.integers(2, 6), st.data())
@settings(max_examples=60)
def test_kernel_is_saturated(r, c, data):
    M = data.draw(matrices(r, c))
    K = lattice.integer_kernel_basis(M)
    assert len(K) == c - lattice.rank(M)
    for row in K:
        assert all(sum(a * b for a, b in zip(mrow, row)) == 0 for mrow in M)
    if K:
        # saturated: the kernel rows have HNF index 1 in their own rational span
        H, _ = lattice.hermite_normal_form(K)
        G = [row for row in H if any(row)]
        assert len(G) == len(K)
        minors = [lattice.determinant([[row[j] for j in cols] for row in K])
                  for cols in itertools.combinations(range(c), len(K))]
        assert lattice.gcd_of_vector(minors) == 1


def test_kernel_of_pentagon_matches_displayed_relations():
    V = [[1, 0, -1, -1, 0], [0, -1, -1, 0, 1]]
    K = lattice.integer_kernel_basis(V)
    shown = [[1, 0, 1, 0, 1], [1, 0, 0, 1, 0], [0, 1, 0, 0, 1]]
    assert lattice.same_lattice(K, shown)


def test_kernel_rejects_sublattice_generators():
    # 2 * (1, -1) is in the kernel but only (1, -1) belongs to a saturated basis
    K = lattice.integer_kernel_basis([[2, 2]])
    assert K in ([[1, -1]], [[-1, 1]])


def test_lattice_index():
    assert lattice.lattice_index([[1, 0], [0, 1], [1, 1]]) == 1
    assert lattice.lattice_index([[-1, -1], [2, -1], [-1, 2]]) == 3
    assert lattice.lattice_index([[1, 2], [2, 4]]) == 0


def test_solve_in_lattice():
    B = [[2, 0], [0, 3]]
    assert lattice.solve_in_lattice([4, 9], B) == [2, 3]
    assert lattice.solve_in_lattice([1, 0], B) is None
    c = lattice.solve_in_lattice([3, 5], [[1, 1], [1, 2]])
    assert lattice.matmul([c], [[1, 1], [1, 2]]) == [[3, 5]]


def test_inverse_rational():
    M = [[2, 1], [1, 1]]
    assert lattice.inverse_rational(M) == [[1, -1], [-1, 2]]
    inv = lattice.inverse_rational([[2, 0], [0, 4]])
    assert inv == [[Fraction(1, 2), 0], [0, Fraction(1, 4)]]
    with pytest.raises(ZeroDivisionError):
        lattice.inverse_rational([[1, 2], [2, 4]])


def test_gcd_helpers():
    assert lattice.gcd_of_vector([4, -6]) == 2
    assert lattice.gcd_of_vector([0, 0]) == 0
    assert lattice.is_primitive([3, 5])
    assert not lattice.is_primitive([2, 4])
    assert lattice.lcm_of([2, 3, 4]) == 12
    with pytest.raises(ValueError):
        lattice.gcd_of_vector([])


@given(st.integers(2, 3), st.integers(0, 10**6))
def test_random_unimodular(d, seed):
    M = lattice.random_unimodular(d, np.random.default_rng(seed), max_entry=4)
    assert abs(lattice.determinant(M)) == 1
    assert max(abs(x) for row in M for x in row) <= 4
