import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from johnson_drift.chain import build_chain
from johnson_drift.errors import DomainError
from johnson_drift.shells import JohnsonParams, shell_distribution
from johnson_drift.walker import (
    SubsetState,
    WalkConfig,
    distance,
    empirical_drift,
    occupancy,
    simulate_batch,
    simulate_lumped,
    step,
    substream_seed,
)

J52 = JohnsonParams(5, 2)
J73 = JohnsonParams(7, 3)


def test_distance_examples():
    assert distance(SubsetState(5, [0, 1]), SubsetState(5, [0, 1])) == 0
    assert distance(SubsetState(5, [0, 2]), SubsetState(5, [0, 1])) == 1
    assert distance(SubsetState(5, [2, 3]), SubsetState(5, [0, 1])) == 2
    with pytest.raises(DomainError):
        distance(SubsetState(5, [0, 1]), SubsetState(6, [0, 1]))


def test_state_validation():
    with pytest.raises(DomainError):
        SubsetState(5, [0, 0])
    with pytest.raises(DomainError):
        SubsetState(5, [0, 5])


def test_at_distance():
    target = SubsetState.target(JohnsonParams(9, 4))
    for m in range(5):
        assert distance(SubsetState.at_distance(target, m), target) == m


def test_step_preserves_size_and_moves_one_shell():
    rng = np.random.default_rng(3)
    target = SubsetState.target(J73)
    state = SubsetState.at_distance(target, 2)
    for _ in range(2000):
        before = distance(state, target)
        previous = state.copy()
        step(state, 0.7, target, rng)
        assert state.k == 3 and len(set(state.members)) == 3
        assert abs(distance(state, target) - before) <= 1
        assert len(set(previous.members) - set(state.members)) <= 1


def test_step_statistics_at_j52():
    # from d=1 on J(5,2): q=1/6, p=1/3 at beta=0, p=1/3*e^-1 at beta=1
    target = SubsetState.target(J52)
    for beta in (0.0, 1.0):
        rng = np.random.default_rng(11)
        trials = 60_000
        moves = {-1: 0, 0: 0, 1: 0}
        for _ in range(trials):
            s = SubsetState.at_distance(target, 1)
            step(s, beta, target, rng)
            moves[distance(s, target) - 1] += 1
        for delta, prob in ((-1, 1 / 6), (1, math.exp(-beta) / 3)):
            sigma = math.sqrt(prob * (1 - prob) / trials)
            assert abs(moves[delta] / trials - prob) < 3 * sigma


def test_substream_seeds_distinct():
    seeds = {substream_seed(0, i) for i in range(10_000)}
    assert len(seeds) == 10_000
    assert substream_seed(1, 0) != substream_seed(0, 1)


def test_config_validation():
    with pytest.raises(DomainError):
        WalkConfig(J52, start_distance=3)
    with pytest.raises(DomainError):
        WalkConfig(J52, beta=-1)
    with pytest.raises(DomainError):
        WalkConfig(J52, mode="other")
    with pytest.raises(DomainError):
        WalkConfig(J52, steps=0)


def test_batch_shapes_and_seed_determinism():
    cfg = WalkConfig(J73, beta=0.5, steps=40, trajectories=30, base_seed=9, start_distance=2)
    a = simulate_batch(cfg)
    b = simulate_batch(cfg)
    assert a.distances.shape == (30, 41)
    assert (a.distances[:, 0] == 2).all()
    assert np.array_equal(a.distances, b.distances)
    assert np.array_equal(a.mean_path, b.mean_path)
    assert np.abs(np.diff(a.distances.astype(int), axis=1)).max() <= 1
    c = simulate_batch(WalkConfig(J73, beta=0.5, steps=40, trajectories=30, base_seed=10, start_distance=2))
    assert not np.array_equal(a.distances, c.distances)


def test_worker_count_does_not_change_results():
    cfg = WalkConfig(J73, steps=60, trajectories=50, base_seed=4, workers=1)
    one = simulate_batch(cfg)
    three = simulate_batch(WalkConfig(J73, steps=60, trajectories=50, base_seed=4, workers=3))
    assert np.array_equal(one.distances, three.distances)
    assert np.array_equal(one.mean_path, three.mean_path)
    assert np.array_equal(one.std_path, three.std_path)
    assert one.hit_times == three.hit_times
    assert np.array_equal(one.transition_counts, three.transition_counts)


def test_prefix_of_trajectories_is_stable():
    small = simulate_batch(WalkConfig(J73, steps=30, trajectories=5, base_seed=1))
    large = simulate_batch(WalkConfig(J73, steps=30, trajectories=20, base_seed=1))
    assert np.array_equal(small.distances, large.distances[:5])


def test_mean_and_population_std():
    batch = simulate_batch(WalkConfig(J73, steps=20, trajectories=40, base_seed=2))
    paths = batch.distances.astype(float)
    assert np.allclose(batch.mean_path, paths.mean(axis=0))
    assert np.allclose(batch.std_path, paths.std(axis=0, ddof=0))


def test_absorbing_mode():
    batch = simulate_batch(WalkConfig(J52, steps=300, trajectories=200, base_seed=5, absorbing=True))
    for row, hit in zip(batch.distances, batch.hit_times):
        assert hit is not None and hit >= 1
        assert row[hit] == 0 and (row[hit:] == 0).all()
        assert (row[:hit] > 0).all()


def test_start_at_target():
    cfg = WalkConfig(J52, steps=10, trajectories=3, start_distance=0, absorbing=True)
    batch = simulate_batch(cfg)
    assert batch.hit_times == [0, 0, 0]
    assert (batch.distances == 0).all()
    lumped = simulate_lumped(cfg, build_chain(J52))
    assert lumped.hit_times == [0, 0, 0]


def test_lumped_requires_matching_chain():
    with pytest.raises(DomainError):
        simulate_lumped(WalkConfig(J52, beta=1.0), build_chain(J52))
    with pytest.raises(DomainError):
        simulate_lumped(WalkConfig(J52), build_chain(J73))
    with pytest.raises(DomainError):
        simulate_batch(WalkConfig(J52, mode="lumped"))


def test_custom_target():
    target = SubsetState(7, [4, 5, 6])
    batch = simulate_batch(WalkConfig(J73, steps=3000, trajectories=20, base_seed=3, absorbing=True), target)
    assert all(h is not None for h in batch.hit_times)
    with pytest.raises(DomainError):
        simulate_batch(WalkConfig(J73), SubsetState(8, [0, 1, 2]))


def test_empirical_drift_matches_closed_form():
    params = JohnsonParams(200, 40)
    batch = simulate_batch(WalkConfig(params, steps=60, trajectories=2000, base_seed=8, start_distance=16,
                                      store_paths=False))
    est = {e.d: e for e in empirical_drift(batch)}
    assert est[16].count >= 2000
    expected = 1 - 200 * 16 / (40 * 160)
    se = math.sqrt(est[16].variance / est[16].count)
    assert abs(est[16].mean - expected) < 4 * se


def test_transition_frequencies_match_shell_law():
    params = J73
    for beta in (0.0, 1.0):
        chain = build_chain(params, beta)
        p, q, _ = chain.as_floats()
        batch = simulate_batch(WalkConfig(params, beta=beta, steps=400, trajectories=200, base_seed=6,
                                          store_paths=False))
        for d, (down, stay, up) in enumerate(batch.transition_counts.reshape(-1, 3).tolist()):
            total = down + stay + up
            if total < 2000:
                continue
            for count, prob in ((down, q[d]), (up, p[d])):
                sigma = math.sqrt(prob * (1 - prob) / total)
                assert abs(count / total - prob) < 4 * sigma + 1e-12


def test_occupancy_approaches_hypergeometric():
    params = JohnsonParams(10, 4)
    batch = simulate_batch(WalkConfig(params, steps=1_000_000, trajectories=1, base_seed=12))
    occ = occupancy(batch.distances[0], params.d_max, burn_in=10_000)
    law = np.array([float(x) for x in shell_distribution(params)])
    assert 0.5 * np.abs(occ - law).sum() <= 0.02


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 12).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n - 1))),
       st.floats(0, 3), st.integers(0, 2**64 - 1))
def test_paths_are_lazy_birth_death(nk, beta, seed):
    params = JohnsonParams(*nk)
    batch = simulate_batch(WalkConfig(params, beta=beta, steps=50, trajectories=4, base_seed=seed,
                                      start_distance=params.d_max))
    paths = batch.distances.astype(int)
    assert np.abs(np.diff(paths, axis=1)).max() <= 1
    assert paths.min() >= 0 and paths.max() <= params.d_max
