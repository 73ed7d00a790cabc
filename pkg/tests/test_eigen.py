import numpy as np
import pytest

from oracles import charpoly_roots
from probcast.eigen import balance, eigenvalues, hessenberg, spectral_radius
from probcast.errors import EigenConvergenceError


def _match(a, b):
    """Max distance after greedy pairing of two eigenvalue multisets."""
    b = list(b)
    worst = 0.0
    for z in a:
        k = int(np.argmin([abs(z - w) for w in b]))
        worst = max(worst, abs(z - b.pop(k)))
    return worst


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_matches_characteristic_polynomial(n):
    rng = np.random.default_rng(n)
    for _ in range(200):
        M = rng.standard_normal((n, n))
        roots = charpoly_roots(M) if n > 1 else np.array([M[0, 0]])
        assert _match(eigenvalues(M), roots) < 1e-8
        assert abs(spectral_radius(M) - np.max(np.abs(roots))) < 1e-8


def test_complex_pair_rotation():
    R = np.array([[0.0, -2.0], [2.0, 0.0]])
    assert np.allclose(sorted(eigenvalues(R), key=lambda z: z.imag), [-2j, 2j])


@pytest.mark.parametrize("n", [10, 60, 150])
def test_against_lapack(n):
    rng = np.random.default_rng(n)
    M = rng.standard_normal((n, n)) / np.sqrt(n)
    assert _match(eigenvalues(M), np.linalg.eigvals(M)) < 1e-8


def test_hessenberg_is_similar():
    rng = np.random.default_rng(0)
    M = rng.standard_normal((8, 8))
    H = hessenberg(M)
    assert np.allclose(np.tril(H, -2), 0)
    assert np.isclose(np.trace(H), np.trace(M))
    assert np.allclose(np.linalg.norm(H), np.linalg.norm(M))  # orthogonal similarity


def test_balance_preserves_spectrum():
    M = np.array([[1.0, 1e6, 0.0], [1e-6, 2.0, 1e4], [0.0, 1e-4, 3.0]])
    B = balance(M)
    assert np.linalg.norm(B) < np.linalg.norm(M)
    assert _match(eigenvalues(B), np.linalg.eigvals(M)) < 1e-8


def test_defective_and_repeated():
    J = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]])
    assert np.allclose(eigenvalues(J), 1.0, atol=1e-5)
    assert np.allclose(eigenvalues(np.zeros((4, 4))), 0.0)


def test_non_convergence_is_reported():
    rng = np.random.default_rng(1)
    with pytest.raises(EigenConvergenceError) as info:
        eigenvalues(rng.standard_normal((30, 30)), max_its=0)
    assert info.value.iterations == 0
