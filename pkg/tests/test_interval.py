import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stochdisc.interval import (
    RunningDiscrepancyTracker,
    Transcript,
    bruteforce_running_series,
    compress,
    decomposition_bound,
    derive_params,
    discrepancy_profile,
    embed_point,
    embed_points,
    final_interval_discrepancy_bruteforce,
    interval_discrepancy_bruteforce,
    offline_alternating_coloring,
    run_online_interval,
)

# coarse grids produce repeated positions
grid_positions = st.lists(st.integers(0, 12).map(lambda k: k / 12), min_size=1, max_size=60)
any_positions = st.lists(st.floats(0, 1), min_size=1, max_size=60)


@pytest.mark.parametrize(
    "n,h,m",
    [(16, 2, 3), (1024, 3, 6), (65536, 4, 10), (2**18, 4, 13), (4, 1, 2)],
)
def test_derive_params(n, h, m):
    p = derive_params(n)
    assert (p.height, p.arity) == (h, m)
    assert p.arity ** (p.height + 1) >= n > (p.arity - 1) ** (p.height + 1)


def test_derive_params_rejects_bad_input():
    with pytest.raises(ValueError):
        derive_params(3)
    with pytest.raises(ValueError):
        derive_params(100, C=0)
    assert derive_params(65536, C=2.0).height == 2


def test_embed_point_edges():
    p = derive_params(16)  # 9 leaves
    assert embed_point(0, p) == 0
    assert embed_point(1, p) == 8
    assert embed_point(Fraction(1, 3), p) == 3  # boundaries go right
    assert embed_point(0.999, p) == 8
    with pytest.raises(ValueError):
        embed_point(1.5, p)
    assert embed_points(np.array([0.0, 1 / 3, 1.0]), p).tolist() == [0, 3, 8]


def test_compress_shares_ranks():
    ranks, k = compress(np.array([0.5, 0.1, 0.5, 0.9]))
    assert ranks.tolist() == [1, 0, 1, 2] and k == 3
    ranks, k = compress([Fraction(1, 2), Fraction(1, 4), Fraction(1, 2)])
    assert ranks.tolist() == [1, 0, 1] and k == 2


def test_bruteforce_small_example():
    t = Transcript([0.1, 0.2, 0.3, 0.15], [1, 1, -1, 1])
    # after 4 arrivals the interval [0.1, 0.2] holds +3
    assert interval_discrepancy_bruteforce(t) == 3
    assert interval_discrepancy_bruteforce(t, 2) == 2
    assert final_interval_discrepancy_bruteforce(t.positions, t.signs) == 3


@given(st.one_of(grid_positions, any_positions), st.data())
def test_tracker_matches_bruteforce(positions, data):
    signs = data.draw(st.lists(st.sampled_from([-1, 1]), min_size=len(positions), max_size=len(positions)))
    tracker = RunningDiscrepancyTracker(positions)
    t = Transcript(positions, signs)
    expected = bruteforce_running_series(t)
    for i, s in enumerate(signs):
        tracker.add(i, s)
        assert tracker.running == expected[i] == interval_discrepancy_bruteforce(t, i + 1)
    prof = discrepancy_profile(positions, signs)
    assert prof.running == tracker.running
    assert prof.final == final_interval_discrepancy_bruteforce(positions, signs) == tracker.current


@given(st.lists(st.integers(0, 2**60), min_size=1, max_size=40), st.data())
def test_tracker_on_fractions(nums, data):
    positions = [Fraction(k, 2**60) for k in nums]
    signs = data.draw(st.lists(st.sampled_from([-1, 1]), min_size=len(nums), max_size=len(nums)))
    assert discrepancy_profile(positions, signs).running == interval_discrepancy_bruteforce(Transcript(positions, signs))


@given(st.one_of(grid_positions, any_positions))
def test_offline_alternating_has_discrepancy_at_most_one(positions):
    signs = offline_alternating_coloring(positions)
    assert final_interval_discrepancy_bruteforce(positions, signs) <= 1


@given(st.integers(4, 3000), st.integers(0, 2**32))
def test_interval_run_respects_decomposition_bound(n, seed):
    rng = np.random.default_rng(seed)
    params = derive_params(n)
    run = run_online_interval(rng.random(n), params)
    assert run.final_discrepancy <= run.running_discrepancy <= decomposition_bound(run)
    assert run.profile.current.shape == (n,)


def test_potential_beats_random_at_moderate_n():
    n = 8192
    params = derive_params(n)
    xs = np.random.default_rng(0).random(n)
    pot = run_online_interval(xs, params).running_discrepancy
    rnd = run_online_interval(xs, params, algorithm="random", rng=np.random.default_rng(1)).running_discrepancy
    assert pot < rnd / 2


def test_run_notes_and_errors():
    params = derive_params(64)
    run = run_online_interval(np.linspace(0, 1, 10), params)
    assert run.notes and "n=64" in run.notes[0]
    with pytest.raises(ValueError):
        run_online_interval([0.5], params, algorithm="random")
    with pytest.raises(ValueError):
        run_online_interval([0.5], params, algorithm="nope")
    with pytest.raises(ValueError):
        run_online_interval([math.nan], params)


def test_tracker_current_and_extremes():
    tr = RunningDiscrepancyTracker([0.2, 0.4, 0.6])
    tr.add(1, 1)
    tr.add(0, -1)
    # F over sorted positions: -1, 0, 0
    assert (tr.max_f, tr.min_f, tr.current, tr.running) == (0, -1, 1, 1)
    tr.add(2, -1)
    assert (tr.total, tr.current, tr.running_min_f) == (-1, 1, -1)
