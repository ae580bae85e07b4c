from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dicke_star import oracle
from dicke_star.collective import (DickeIndex, binomial, collective_operators, dicke_split_coeff,
                                   ladder_coeff, split_isometry)


def pascal(n):
    rows = [[1]]
    for _ in range(n):
        prev = rows[-1]
        rows.append([1] + [prev[i] + prev[i + 1] for i in range(len(prev) - 1)] + [1])
    return rows


def test_binomial_matches_pascal():
    rows = pascal(80)
    for n, row in enumerate(rows):
        for k, v in enumerate(row):
            assert binomial(n, k) == v


@pytest.mark.parametrize("n,k", [(-1, 0), (3, 4), (3, -1)])
def test_binomial_rejects_bad_input(n, k):
    with pytest.raises(ValueError):
        binomial(n, k)


def test_dicke_index_m():
    assert DickeIndex(3, 0).m == Fraction(3, 2)
    assert DickeIndex(3, 3).m == Fraction(-3, 2)
    with pytest.raises(ValueError):
        DickeIndex(3, 4)


def test_ladder_values():
    assert ladder_coeff(0.5, -0.5, "raise") == pytest.approx(1.0)
    assert ladder_coeff(0.5, 0.5, "raise") == 0.0
    assert ladder_coeff(1, 0, "lower") == pytest.approx(np.sqrt(2))
    with pytest.raises(ValueError):
        ladder_coeff(1, 2)


@pytest.mark.parametrize("n", [1, 2, 5, 8])
def test_collective_algebra(n):
    jz, jp = collective_operators(n)
    jm = jp.T
    np.testing.assert_allclose(jp @ jm - jm @ jp, 2 * jz, atol=1e-12)
    j = n / 2
    jx, jy = (jp + jm) / 2, (jp - jm) / 2j
    casimir = jx @ jx + jy @ jy + jz @ jz
    np.testing.assert_allclose(casimir, j * (j + 1) * np.eye(n + 1), atol=1e-12)


@pytest.mark.parametrize("n", [2, 3, 6])
def test_collective_operators_match_spin_sums(n):
    # J+ acting on computational-basis Dicke vectors
    sp = np.array([[0.0, 1.0], [0.0, 0.0]])
    Jp = sum(oracle.site_operator(sp, i, n) for i in range(n))
    D = np.column_stack([oracle.dicke_vector(n, l) for l in range(n + 1)])
    _, jp = collective_operators(n)
    np.testing.assert_allclose(D.T @ Jp @ D, jp, atol=1e-12)


@pytest.mark.parametrize("n_total", [2, 7, 20, 60])
def test_split_rows_normalized(n_total):
    for n_left in range(1, n_total):
        V = split_isometry(n_total, n_left)
        np.testing.assert_allclose(V.T @ V, np.eye(n_total + 1), atol=1e-12)


def test_split_symmetry():
    n, nl = 13, 5
    for l in range(n + 1):
        for k in range(max(0, l - (n - nl)), min(nl, l) + 1):
            assert dicke_split_coeff(n, nl, l, k) == pytest.approx(dicke_split_coeff(n, n - nl, l, l - k))


def test_split_against_computational_basis():
    n, nl = 6, 2
    V = split_isometry(n, nl)
    for l in range(n + 1):
        full = oracle.dicke_vector(n, l)
        rebuilt = sum(V[k * (n - nl + 1) + j, l] * np.kron(oracle.dicke_vector(nl, k), oracle.dicke_vector(n - nl, j))
                      for k in range(nl + 1) for j in range(n - nl + 1))
        np.testing.assert_allclose(rebuilt, full, atol=1e-12)


def test_split_large_n_stays_finite():
    row = [dicke_split_coeff(2000, 1000, 1000, k) for k in range(1001)]
    assert np.all(np.isfinite(row))
    assert sum(c * c for c in row) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 40).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n), st.integers(1, n - 1))))
def test_split_coefficients_are_hypergeometric(args):
    n, l, nl = args
    nr = n - nl
    total = 0.0
    for k in range(0, nl + 1):
        c = dicke_split_coeff(n, nl, l, k)
        if 0 <= l - k <= nr:
            expect = np.sqrt(binomial(nl, k) * binomial(nr, l - k) / binomial(n, l))
            assert c == pytest.approx(expect, rel=1e-12)
        else:
            assert c == 0.0
        total += c * c
    assert total == pytest.approx(1.0, abs=1e-12)
