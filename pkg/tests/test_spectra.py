import numpy as np
import pytest

from dicke_star import oracle
from dicke_star.hamiltonian import SpinStarParams, build_block, spin_flip_permutation
from dicke_star.spectra import (DD, EDD, ND, classify_gap, critical_periphery_size, diagonalize,
                                energy_gap, gap_scan, ground_manifold, lowest_eigenvalues, solve)


def closed_form_np3(g, d):
    """The eight levels of the n0 = 1, np = 3 block."""
    out = []
    for s in (1, -1):
        out += [0.5 * (d / 2 + 1 + s * np.sqrt((d - 1) ** 2 + 3 * g * g)),
                0.5 * (d / 2 - 1 + s * np.sqrt((d + 1) ** 2 + 3 * g * g)),
                0.5 * (-d / 2 + g + s * np.sqrt((d + g) ** 2 + 3)),
                0.5 * (-d / 2 - g + s * np.sqrt((d - g) ** 2 + 3))]
    return np.sort(out)


@pytest.mark.parametrize("g", [0.0, 0.5, 1.0])
def test_np2_ground_energy_at_zero_delta(g):
    e0 = diagonalize(build_block(SpinStarParams(1, 2, g, 0.0))).eigenvalues[0]
    assert e0 == pytest.approx(-np.sqrt(2 * (g * g + 1)) / 2, abs=1e-12)


@pytest.mark.parametrize("g,d", [(0.2, 0.3), (0.9, -0.6), (-0.4, 0.8)])
def test_np3_closed_form(g, d):
    w = diagonalize(build_block(SpinStarParams(1, 3, g, d))).eigenvalues
    np.testing.assert_allclose(w, closed_form_np3(g, d), atol=1e-12)


@pytest.mark.parametrize("n0,np_", [(1, 6), (2, 5), (3, 7)])
def test_eigenpairs(n0, np_):
    block = build_block(SpinStarParams(n0, np_, 0.3, 0.6))
    s = diagonalize(block)
    V = s.eigenvectors
    np.testing.assert_allclose(block.matrix @ V, V * s.eigenvalues, atol=1e-12)
    np.testing.assert_allclose(V.T @ V, np.eye(block.dim), atol=1e-12)
    assert s.eigenvalues.sum() == pytest.approx(np.trace(block.matrix), abs=1e-10)
    assert np.all(np.diff(s.eigenvalues) >= 0)


@pytest.mark.parametrize("np_", [3, 20, 101])
def test_banded_lowest_eigenvalues(np_):
    block = build_block(SpinStarParams(1, np_, 0.07, 0.5))
    np.testing.assert_allclose(lowest_eigenvalues(block, 3), diagonalize(block).eigenvalues[:3], atol=1e-11)


def test_banded_with_large_center():
    block = build_block(SpinStarParams(6, 9, 0.2, 0.3))
    np.testing.assert_allclose(lowest_eigenvalues(block, 2), diagonalize(block).eigenvalues[:2], atol=1e-11)


def test_classify_gap():
    assert classify_gap(0.0) == DD
    assert classify_gap(1e-6) == EDD
    assert classify_gap(1e-3) == ND
    assert classify_gap(1e-3, deg_tol=1e-2) == EDD


def test_even_periphery_is_degenerate():
    for g in (0.0, 0.3, 0.8):
        for d in (-0.5, 0.0, 0.7):
            assert solve(SpinStarParams(1, 6, g, d)).kind == DD


def test_odd_periphery_kinds():
    assert solve(SpinStarParams(1, 5, 0.0, 0.0)).kind == ND
    # gap 9.7e-5 just below the threshold
    assert solve(SpinStarParams(1, 15, 0.1, 0.0)).kind == EDD
    assert solve(SpinStarParams(1, 13, 0.1, 0.0)).kind == ND


@pytest.mark.parametrize("p", [SpinStarParams(1, 4, 0.3, 0.2), SpinStarParams(1, 17, 0.1, 0.3),
                               SpinStarParams(2, 3, 0.4, 0.1)])
def test_pair_spans_lowest_levels(p):
    s = diagonalize(build_block(p))
    man = ground_manifold(s, p, deg_tol=1e-3)
    assert man.kind in (DD, EDD)
    P_pair = sum(np.outer(v, v) for v in man.states)
    P_low = s.eigenvectors[:, :2] @ s.eigenvectors[:, :2].T
    assert np.linalg.norm(P_pair - P_low, 2) < 1e-9


@pytest.mark.parametrize("np_", [2, 4, 10])
def test_pair_are_flip_eigenstates(np_):
    p = SpinStarParams(1, np_, 0.35, 0.45)
    man = solve(p)
    flip = spin_flip_permutation(1, np_)
    plus, minus = man.states
    assert abs(plus @ plus[flip]) == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(plus[flip], plus, atol=1e-10)
    np.testing.assert_allclose(minus[flip], -minus, atol=1e-10)


def test_tgs_invariants():
    man = solve(SpinStarParams(1, 8, 0.2, 0.1))
    rho = man.density()
    np.testing.assert_allclose(rho, rho.T.conj(), atol=1e-14)
    assert np.trace(rho) == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.eigvalsh(rho)[0] >= -1e-12


def test_matches_oracle_spectrum_bottom():
    p = SpinStarParams(1, 6, 0.25, 0.4)
    assert energy_gap(p)[0] == pytest.approx(np.linalg.eigvalsh(oracle.full_hamiltonian(p))[0], abs=1e-12)


def test_gap_scan_is_monotone():
    gaps = [g for _, g in gap_scan(SpinStarParams(1, 1, 0.05, 0.5), range(3, 80, 2))]
    assert np.all(np.diff(gaps) <= 1e-14)


def test_gap_scan_tied_sizes():
    out = gap_scan(SpinStarParams(1, 1, 0.0, 0.2), [2, 4], tie_n0=True)
    assert out[1][1] == pytest.approx(energy_gap(SpinStarParams(4, 4, 0.0, 0.2))[2])


def test_critical_size():
    assert critical_periphery_size(0.1, 0.0) == 13
    assert critical_periphery_size(0.05, 0.0) == 19
    assert critical_periphery_size(0.0, 0.3, np_max=101) is None
    assert critical_periphery_size(1.0, 0.0) == 0


def test_degenerate_levels_resolved_by_magnetization():
    from dicke_star.hamiltonian import field_diagonal
    p = SpinStarParams(1, 9, 0.0, 0.5)
    s = diagonalize(build_block(p))
    fz = field_diagonal(1, 9)
    assert s.eigenvalues[2] - s.eigenvalues[1] < 1e-10
    for i in (1, 2):
        v = s.eigenvectors[:, i]
        assert np.linalg.norm(fz * v - (v @ (fz * v)) * v) < 1e-10
    again = diagonalize(build_block(p))
    np.testing.assert_array_equal(again.eigenvectors, s.eigenvectors)
