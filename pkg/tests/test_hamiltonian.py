import numpy as np
import pytest

from dicke_star import oracle
from dicke_star.hamiltonian import (DimensionCapError, SpinStarParams, build_block, dimension_cap,
                                    field_diagonal, parity_grouping, spin_flip_permutation,
                                    write_matrix_csv)


def test_params_validation():
    with pytest.raises(ValueError):
        SpinStarParams(gamma=1.5)
    with pytest.raises(ValueError):
        SpinStarParams(np=0)
    with pytest.raises(ValueError):
        SpinStarParams(sign=0)
    p = SpinStarParams(n0=2, np=3)
    assert p.n == 5 and p.dim == 12
    assert p.replace(gamma=0.2).gamma == 0.2


@pytest.mark.parametrize("n0,np_", [(1, 1), (1, 6), (2, 5), (4, 4)])
def test_block_is_real_symmetric(n0, np_):
    M = build_block(SpinStarParams(n0, np_, 0.3, -0.4, h=0.7)).matrix
    assert M.dtype == np.float64
    np.testing.assert_array_equal(M, M.T)


@pytest.mark.parametrize("n0,np_", [(1, 4), (1, 5), (3, 4)])
def test_block_never_mixes_parity(n0, np_):
    block = build_block(SpinStarParams(n0, np_, 0.6, 0.3))
    par = block.parity()
    assert not np.any(block.matrix[np.ix_(par == 0, par == 1)])


def test_parity_grouping_small_cases():
    # (l0, lp) labels of the two groups; index = l0 * (np + 1) + lp
    g = parity_grouping(2)
    a1, a2 = g.groups()
    assert {divmod(int(i), 3) for i in a1} == {(0, 1), (1, 0), (1, 2)}
    assert {divmod(int(i), 3) for i in a2} == {(0, 0), (0, 2), (1, 1)}
    g = parity_grouping(3)
    a1, a2 = g.groups()
    assert {divmod(int(i), 4) for i in a1} == {(0, 1), (0, 3), (1, 0), (1, 2)}
    assert {divmod(int(i), 4) for i in a2} == {(0, 0), (0, 2), (1, 1), (1, 3)}


@pytest.mark.parametrize("np_", [2, 3, 8, 9])
def test_grouping_makes_block_diagonal(np_):
    g = parity_grouping(np_)
    M = g.apply(build_block(SpinStarParams(1, np_, 0.4, 0.7)).matrix)
    s = g.sector_sizes[0]
    assert not np.any(M[:s, s:])


def test_field_term():
    p = SpinStarParams(2, 3, 0.2, 0.1)
    diff = build_block(p.replace(h=0.5)).matrix - build_block(p).matrix
    np.testing.assert_allclose(diff, np.diag(0.5 * field_diagonal(2, 3)))
    assert field_diagonal(1, 1).tolist() == [1.0, 0.0, 0.0, -1.0]


@pytest.mark.parametrize("n0,np_", [(1, 2), (1, 3), (2, 3)])
def test_block_spectrum_is_in_full_spectrum(n0, np_):
    p = SpinStarParams(n0, np_, 0.35, 0.55, h=0.2)
    w_block = np.linalg.eigvalsh(build_block(p).matrix)
    w_full = np.linalg.eigvalsh(oracle.full_hamiltonian(p))
    for w in w_block:
        assert np.min(np.abs(w_full - w)) < 1e-10


@pytest.mark.parametrize("np_", [2, 5])
def test_spin_flip_commutes_at_zero_field(np_):
    p = SpinStarParams(1, np_, 0.45, 0.3)
    M = build_block(p).matrix
    perm = spin_flip_permutation(1, np_)
    np.testing.assert_allclose(M[np.ix_(perm, perm)], M, atol=1e-14)


def test_antiferro_sign_flips_delta():
    p = SpinStarParams(1, 4, 0.0, 0.4, sign=-1)
    a = np.linalg.eigvalsh(build_block(p).matrix)
    b = np.linalg.eigvalsh(build_block(p.replace(sign=1, delta=-0.4)).matrix)
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_dimension_cap(monkeypatch):
    monkeypatch.setenv("DICKE_STAR_DIM_CAP", "50")
    assert dimension_cap() == 50
    with pytest.raises(DimensionCapError):
        build_block(SpinStarParams(1, 30))


def test_matrix_dump(tmp_path):
    path = tmp_path / "m.csv"
    block = build_block(SpinStarParams(1, 2, 0.5))
    write_matrix_csv(block, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "row,col,value"
    assert len(lines) - 1 == np.count_nonzero(block.matrix)
