import numpy as np
import pytest

from conftest import random_connected
from probcast.calibrate import (
    AlphaWeights,
    alpha_cache_key,
    corrected_run,
    estimate_alpha,
    estimate_alpha_by_columns,
    load_alpha,
    precompensate,
    save_alpha,
)
from probcast.engine import StopRule, run_consensus
from probcast.errors import CalibrationError, DegenerateAlphaError
from probcast.graph import Graph
from probcast.mixing import base_mixing_matrix
from probcast.scheduler import ScheduleStream


def test_full_communication_alpha_is_uniform(reference_graph):
    W = base_mixing_matrix(reference_graph)
    a = estimate_alpha(W, np.ones(100), ScheduleStream(0))
    assert np.allclose(a.alpha, 0.01, atol=1e-10, rtol=0)
    assert a.slots == 100 * a.rounds


def test_single_node():
    a = estimate_alpha(np.ones((1, 1)), np.ones(1), ScheduleStream(0))
    assert a.alpha.tolist() == [1.0] and a.rounds == 0


def test_path3_alpha_matches_separate_runs(W_path3):
    p = np.array([0.5, 1.0, 0.5])
    stream = ScheduleStream(11)
    a = estimate_alpha(W_path3, p, stream)
    assert abs(a.alpha.sum() - 1) < 1e-8 and np.all(a.alpha > 0)
    cols = estimate_alpha_by_columns(W_path3, p, stream, a.rounds)
    assert np.array_equal(cols.mean(axis=0), a.alpha)


def test_matrix_form_equals_vector_runs_exactly():
    rng = np.random.default_rng(5)
    for n in range(2, 9):
        g = random_connected(n, rng)
        W = base_mixing_matrix(g)
        p = rng.uniform(0.1, 1.0, n)
        stream = ScheduleStream(int(rng.integers(10_000)))
        a = estimate_alpha(W, p, stream, StopRule(tol=1e-10))
        cols = estimate_alpha_by_columns(W, p, stream, a.rounds)
        assert np.array_equal(cols.mean(axis=0), a.alpha)


def test_calibration_failure_reports_spread(W_path3):
    with pytest.raises(CalibrationError) as info:
        estimate_alpha(W_path3, np.array([0.5, 1.0, 0.5]), ScheduleStream(0), StopRule(tol=1e-12, max_rounds=3))
    assert info.value.spread > 1e-12


def test_precompensate():
    a = AlphaWeights(np.full(4, 0.25), 0, "s", 0, 0.0, 0)
    x0 = np.array([1.0, -2.0, 3.5, 0.0])
    assert np.array_equal(precompensate(x0, a), x0)
    assert np.allclose(precompensate(np.array([2.0, 4.0]), np.array([0.25, 0.75])), [4.0, 8 / 3])
    with pytest.raises(DegenerateAlphaError):
        precompensate(np.ones(2), np.array([0.0, 1.0]))


def test_corrected_single_edge(single_edge):
    W = base_mixing_matrix(single_edge, 0.5)
    res = corrected_run(W, np.array([0.0, 2.0]), np.ones(2), ScheduleStream(0))
    assert np.array_equal(res.trajectory.final, [1.0, 1.0])


def test_corrected_path3(W_path3):
    p = np.array([0.5, 1.0, 0.5])
    x0 = np.array([3.0, 0.0, 0.0])
    res = corrected_run(W_path3, x0, p, ScheduleStream(17))
    assert np.allclose(res.trajectory.final, 1.0, atol=1e-6)
    biased = run_consensus(W_path3, x0, p, ScheduleStream(17))
    assert abs(biased.final.mean() - 1.0) > 1e-3


def test_mismatched_seed_leaves_bias(reference_graph):
    W = base_mixing_matrix(reference_graph)
    p = np.clip(np.linspace(0.3, 1.2, 100), 0, 1)
    x0 = np.random.default_rng(0).standard_normal(100)
    alpha = estimate_alpha(W, p, ScheduleStream(1))
    misses = 0
    for seed in range(2, 7):
        res = corrected_run(W, x0, p, ScheduleStream(seed), alpha=alpha)
        misses += abs(res.trajectory.final.mean() - x0.mean()) > 1e-6
    assert misses >= 4


def test_alpha_file_roundtrip(tmp_path, W_path3):
    p = np.array([0.5, 1.0, 0.5])
    a = estimate_alpha(W_path3, p, ScheduleStream(3))
    save_alpha(a, tmp_path / "a.txt", "abc", p)
    b, meta = load_alpha(tmp_path / "a.txt")
    assert np.array_equal(a.alpha, b.alpha)
    assert (b.seed, b.label, b.rounds, b.spread, b.slots) == (a.seed, a.label, a.rounds, a.spread, a.slots)
    assert meta["graph"] == "abc"
    assert alpha_cache_key("abc", p, 3, "schedule") != alpha_cache_key("abc", p, 4, "schedule")


def test_slot_accounting(W_path3):
    p = np.array([0.5, 1.0, 0.5])
    a = estimate_alpha(W_path3, p, ScheduleStream(3))
    assert a.separate_run_slots == 3 * a.slots
    assert a.nominal_slots(2.0) == a.rounds * 2.0 * 3
