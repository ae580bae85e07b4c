import numpy as np
import pytest

from dicke_star import oracle
from dicke_star.hamiltonian import SpinStarParams, build_block
from dicke_star.spectra import diagonalize, solve


def test_size_cap():
    with pytest.raises(oracle.OracleSizeError):
        oracle.full_hamiltonian(SpinStarParams(1, 11))


def test_hamiltonian_is_real_symmetric():
    H = oracle.full_hamiltonian(SpinStarParams(2, 3, 0.4, 0.3, h=0.5))
    np.testing.assert_array_equal(H, H.T)


@pytest.mark.parametrize("n0,np_", [(1, 3), (2, 2), (1, 6)])
def test_commutes_with_peripheral_swaps(n0, np_):
    p = SpinStarParams(n0, np_, 0.3, 0.7)
    H = oracle.full_hamiltonian(p)
    n = n0 + np_
    P = oracle.swap_sites(n, n0, n - 1)
    np.testing.assert_allclose(P @ H @ P.T, H, atol=1e-14)


def test_spin_flip_symmetry():
    p = SpinStarParams(1, 4, 0.6, 0.2)
    H = oracle.full_hamiltonian(p)
    X = oracle.spin_flip(5)
    np.testing.assert_allclose(X @ H @ X, H, atol=1e-14)


def test_block_lives_in_symmetric_subspace():
    p = SpinStarParams(1, 3, 0.25, 0.45)
    H = oracle.full_hamiltonian(p)
    basis = np.column_stack([np.kron(oracle.dicke_vector(1, a), oracle.dicke_vector(3, b))
                             for a in range(2) for b in range(4)])
    np.testing.assert_allclose(basis.T @ H @ basis, build_block(p).matrix, atol=1e-13)


@pytest.mark.parametrize("n0,np_", [(1, 2), (1, 5), (2, 3), (3, 3)])
def test_ground_state_in_symmetric_sector(n0, np_):
    p = SpinStarParams(n0, np_, 0.4, 0.6)
    w = np.linalg.eigvalsh(oracle.full_hamiltonian(p))
    assert w[0] == pytest.approx(diagonalize(build_block(p)).eigenvalues[0], abs=1e-12)


def test_pipelines():
    p = SpinStarParams(1, 5, 0.0, 0.4)
    w, rho = oracle.ground_object(p)
    assert np.trace(rho @ rho) == pytest.approx(1.0)  # ND: pure
    _, rho_t = oracle.ground_object(p, "tgs")
    assert np.trace(rho_t @ rho_t) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        oracle.ground_object(p, "other")


def test_full_entanglement_matches_pipeline():
    from dicke_star.entanglement import Bipartition, log_negativity, trace_out_center
    p = SpinStarParams(1, 6, 0.3, 0.2)
    ours = log_negativity(trace_out_center(solve(p).density(), p), Bipartition(6, 3)).log_negativity
    assert oracle.full_entanglement(p, 3) == pytest.approx(ours, abs=1e-10)


def test_dicke_vector():
    v = oracle.dicke_vector(4, 2)
    assert np.count_nonzero(v) == 6
    assert np.linalg.norm(v) == pytest.approx(1.0)
