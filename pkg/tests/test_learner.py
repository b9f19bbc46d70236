import itertools

import numpy as np
import pytest

from learnmotifs.errors import ConfigError, NonFiniteValue, TooFewSegments
from learnmotifs.learner import (
    LearnConfig,
    learn_motifs,
    learn_with_restarts,
    restart_seed,
    select_restart,
)
from learnmotifs.objective import hard_frequency


@pytest.fixture
def small_segments(rng):
    base = rng.standard_normal((3, 6))
    rows = [base[i % 3] + 0.05 * rng.standard_normal(6) for i in range(30)]
    return np.array(rows)


def _same(a, b):
    assert a.motifs.tobytes() == b.motifs.tobytes()
    assert a.hard.per_motif.tolist() == b.hard.per_motif.tolist()
    assert a.hard.matches == b.hard.matches
    assert a.init_segment_indices == b.init_segment_indices
    assert a.hard_violation_final == b.hard_violation_final


def test_config_validation():
    with pytest.raises(ConfigError):
        LearnConfig(threshold=0.0, n_motifs=1, length=2)
    with pytest.raises(ConfigError):
        LearnConfig(threshold=1.0, n_motifs=1, length=2, iters=0)
    with pytest.raises(ConfigError):
        LearnConfig(threshold=1.0, n_motifs=1, length=2, alpha=-1)


def test_restart_seed_stable():
    assert restart_seed(0, 0) == restart_seed(0, 0)
    assert restart_seed(0, 0) != restart_seed(0, 1)
    assert restart_seed(1, 0) != restart_seed(0, 1)
    assert 0 <= restart_seed(123, 45) < 2**63


def test_deterministic(small_segments):
    cfg = LearnConfig(1.0, 2, 6, iters=30, trace=True)
    a = learn_motifs(small_segments, cfg, 99)
    b = learn_motifs(small_segments, cfg, 99)
    _same(a, b)
    assert a.objective_trace.tobytes() == b.objective_trace.tobytes()


def test_trace_lengths(small_segments):
    res = learn_motifs(small_segments, LearnConfig(1.0, 2, 6, iters=17, trace=True), 1)
    for tr in (res.objective_trace, res.smooth_freq_trace, res.smooth_viol_trace):
        assert len(tr) == 17
    np.testing.assert_allclose(res.objective_trace, res.smooth_freq_trace - res.smooth_viol_trace)


def test_init_distinct(small_segments):
    for seed in range(20):
        res = learn_motifs(small_segments, LearnConfig(1.0, 5, 6, iters=1), seed)
        assert len(set(res.init_segment_indices)) == 5


def test_tiny_eta_keeps_init(small_segments):
    res = learn_motifs(small_segments, LearnConfig(1.0, 2, 6, eta=1e-12, iters=5), 4)
    init = small_segments[res.init_segment_indices]
    assert np.max(np.abs(res.motifs - init)) <= 5 * 1e-12 + 1e-15


def test_first_step_has_size_eta(small_segments):
    cfg = LearnConfig(0.5, 2, 6, eta=0.01, iters=1)
    res = learn_motifs(small_segments, cfg, 7)
    step = np.abs(res.motifs - small_segments[res.init_segment_indices])
    moved = step[step > 0]
    np.testing.assert_allclose(moved, 0.01, rtol=1e-9)


def test_steps_bounded_by_eta(small_segments):
    for iters in (1, 2, 5, 10):
        cfg = LearnConfig(1.0, 3, 6, eta=0.02, iters=iters)
        res = learn_motifs(small_segments, cfg, 3)
        drift = np.abs(res.motifs - small_segments[res.init_segment_indices])
        assert np.all(drift <= iters * 0.02 * (1 + 1e-12))


def test_too_few_segments():
    with pytest.raises(TooFewSegments):
        learn_motifs(np.zeros((2, 3)), LearnConfig(1.0, 3, 3, iters=1), 0)


def test_non_finite_detected(small_segments):
    with pytest.raises(NonFiniteValue):
        learn_motifs(small_segments, LearnConfig(1.0, 2, 6, eta=float("inf"), iters=3), 0)


def test_recovers_repeated_pattern():
    rng = np.random.default_rng(5)
    centre = np.array([1.0, -1.0])
    rows = []
    for i in range(20):
        rows.append(centre + 0.1 * rng.standard_normal(2))
        rows.append(rng.uniform(3, 8, 2) * rng.choice([-1, 1], 2))
    s = np.array(rows)
    t = 0.2
    # exhaustive grid around the common segment: the best reachable count
    grid = np.linspace(-0.5, 0.5, 101)
    best = max(hard_frequency([centre + [dx, dy]], s, t).total
               for dx, dy in itertools.product(grid, grid))
    res = learn_with_restarts(s, LearnConfig(t, 1, 2, alpha=2, eta=0.05, iters=300, restarts=5))
    assert best == 20
    assert res.total == best


def test_single_restart_equals_learn_motifs(small_segments):
    cfg = LearnConfig(1.0, 2, 6, iters=20, restarts=1, seed=11)
    _same(learn_with_restarts(small_segments, cfg), learn_motifs(small_segments, cfg, restart_seed(11, 0)))


def test_selection_is_argmax(small_segments):
    cfg = LearnConfig(1.0, 2, 6, iters=20, restarts=6, seed=2)
    best = learn_with_restarts(small_segments, cfg)
    runs = [learn_motifs(small_segments, cfg, restart_seed(2, r), r) for r in range(6)]
    clean = [r for r in runs if r.hard_violation_final == 0] or runs
    assert best.total == max(r.total for r in clean)
    assert best.restart_index == min(r.restart_index for r in clean if r.total == best.total)
    assert best.restart_totals == [r.total for r in runs]


class _Fake:
    def __init__(self, total, viol, idx):
        self.total, self.hard_violation_final, self.restart_index = total, viol, idx


def test_selection_prefers_zero_violation():
    runs = [_Fake(10, 0.2, 0), _Fake(5, 0.0, 1), _Fake(5, 0.0, 2)]
    best = select_restart(runs)
    assert best.restart_index == 1
    assert not best.nonzero_violation


def test_selection_fallback_flags():
    runs = [_Fake(3, 0.2, 0), _Fake(7, 0.1, 1)]
    best = select_restart(runs)
    assert best.restart_index == 1
    assert best.nonzero_violation


def test_parallel_matches_sequential(small_segments):
    cfg = LearnConfig(1.0, 2, 6, iters=15, restarts=4, seed=8)
    _same(learn_with_restarts(small_segments, cfg, workers=1),
          learn_with_restarts(small_segments, cfg, workers=2))
