import numpy as np
import pytest

from conftest import random_connected
from oracles import charpoly_roots, expected_by_enumeration, round_matrix_loops
from probcast.errors import MixingError
from probcast.graph import Graph, erdos_renyi, max_degree, path_graph
from probcast.mixing import (
    base_mixing_matrix,
    default_epsilon,
    expected_matrix,
    projected_spectral_radius,
    round_matrix,
    verify_convergence_conditions,
    write_matrix_csv,
)
from probcast.scheduler import schedule
from probcast.streams import Stream


def test_base_matrix_examples(single_edge, W_path3):
    assert np.allclose(base_mixing_matrix(single_edge, 0.5), 0.5)
    third = 1 / 3
    assert np.allclose(W_path3, [[2 * third, third, 0], [third, third, third], [0, third, 2 * third]])
    with pytest.raises(MixingError, match="1/max_degree"):
        base_mixing_matrix(path_graph(3), 0.6)
    with pytest.raises(MixingError):
        base_mixing_matrix(path_graph(3), 0.5)  # bound is strict


def test_default_epsilon(reference_graph):
    assert default_epsilon(reference_graph) == 1 / (max_degree(reference_graph) + 1)


def test_round_matrix_examples(W_path3):
    assert np.array_equal(round_matrix(W_path3, np.ones(3, int)), W_path3)
    third = 1 / 3
    assert np.allclose(round_matrix(W_path3, np.array([1, 0, 1])), [[1, 0, 0], [third, third, third], [0, 0, 1]])
    assert np.array_equal(round_matrix(W_path3, np.zeros(3, int)), np.eye(3))
    with pytest.raises(MixingError):
        round_matrix(W_path3, np.ones(4, int))


def test_round_matrix_matches_loops():
    rng = np.random.default_rng(0)
    g = random_connected(7, rng)
    W = base_mixing_matrix(g)
    for _ in range(20):
        v = rng.integers(0, 2, 7)
        assert np.allclose(round_matrix(W, v), round_matrix_loops(W, v), atol=1e-15)


def test_round_matrix_invariants_random():
    rng = np.random.default_rng(1)
    for _ in range(50):
        g = random_connected(int(rng.integers(3, 30)), rng, 0.3)
        W = base_mixing_matrix(g)
        v = rng.integers(0, 2, g.n)
        R = round_matrix(W, v)
        assert np.allclose(R.sum(axis=1), 1, atol=1e-12, rtol=0)
        assert np.all(np.diag(R) > 0)
        adj = W != 0
        off = (R != 0) & ~np.eye(g.n, dtype=bool)
        i, j = np.nonzero(off)
        assert np.all(v[j] == 1) and np.all(adj[i, j])


def test_expected_matrix_examples(W_path3):
    p = np.array([0.5, 1, 0.5])
    E = expected_matrix(W_path3, p)
    assert np.allclose(E, [[2 / 3, 1 / 3, 0], [1 / 6, 2 / 3, 1 / 6], [0, 1 / 3, 2 / 3]])
    assert np.array_equal(expected_matrix(W_path3, np.ones(3)), W_path3)


def test_expected_matrix_exhaustive():
    rng = np.random.default_rng(2)
    for n in range(2, 8):
        g = random_connected(n, rng)
        W = base_mixing_matrix(g)
        p = rng.uniform(0.05, 1.0, n)
        assert np.allclose(expected_matrix(W, p), expected_by_enumeration(W, p), atol=1e-12, rtol=0)


def test_expected_matrix_monte_carlo(W_path3):
    p = np.array([0.3, 0.9, 0.6])
    s = Stream(5, "mc")
    u = s.uniform(0, 3 * 100_000).reshape(-1, 3)
    V = (u < p).astype(float)
    # mean of the round matrices, accumulated through the mean schedule
    mean = np.mean([round_matrix(W_path3, v) for v in V[:2000].astype(int)], axis=0)
    assert np.allclose(mean, expected_matrix(W_path3, p), atol=0.02)
    # all 1e5 draws via linearity of the round matrix in v
    assert np.allclose(round_matrix_loops(W_path3, V.mean(axis=0)), expected_matrix(W_path3, p), atol=0.01)


def test_projected_spectral_radius_examples(W_path3):
    assert projected_spectral_radius(W_path3) == pytest.approx(2 / 3, abs=1e-12)
    E = expected_matrix(W_path3, np.array([0.5, 1, 0.5]))
    assert projected_spectral_radius(E) == pytest.approx(2 / 3, abs=1e-12)
    assert projected_spectral_radius(np.full((5, 5), 0.2)) == pytest.approx(0, abs=1e-12)


def test_projected_spectral_radius_small_oracle():
    rng = np.random.default_rng(3)
    for n in (2, 3, 4):
        for _ in range(50):
            M = rng.uniform(0, 1, (n, n))
            M /= M.sum(axis=1, keepdims=True)
            ref = np.max(np.abs(charpoly_roots(M - 1 / n)))
            assert abs(projected_spectral_radius(M) - ref) < 1e-8


def test_verify_conditions(W_path3):
    rep = verify_convergence_conditions(W_path3)
    assert rep.all_hold and rep.rho == pytest.approx(2 / 3)
    bad = verify_convergence_conditions(np.eye(2))
    assert bad.row_stochastic and bad.column_stochastic and not bad.contracting
    assert bad.rho == pytest.approx(1.0)
    assert "condition_3_rho_lt_1=False" in bad.to_text()


def test_verify_conditions_random_graphs():
    rng = np.random.default_rng(4)
    for _ in range(20):
        g = random_connected(int(rng.integers(2, 40)), rng, 0.3)
        eps = rng.uniform(0.05, 0.999) / max_degree(g)
        assert verify_convergence_conditions(base_mixing_matrix(g, eps)).all_hold


def test_expected_matrix_is_not_symmetric_for_nonuniform_p(W_path3):
    E = expected_matrix(W_path3, np.array([0.5, 1, 0.5]))
    assert not np.allclose(E, E.T)
    assert np.allclose(E.sum(axis=1), 1)


def test_matrix_csv(tmp_path, W_path3):
    write_matrix_csv(W_path3, tmp_path / "w.csv")
    back = np.loadtxt(tmp_path / "w.csv", delimiter=",")
    assert np.array_equal(back, W_path3)
