import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stochdisc import _kernels
from stochdisc.envy import (
    cardinal_envy,
    distinct_ranks,
    empirical_cdf_online,
    ordinal_discrepancy,
    ordinal_envy_cancellation,
    ordinal_envy_prefix,
    run_online_envy,
    two_player_envy,
    worst_consistent_valuation,
)
from stochdisc.interval import derive_params


@st.composite
def instances(draw, max_n=20):
    n = draw(st.integers(1, max_n))
    v = draw(st.lists(st.floats(0, 1), min_size=n, max_size=n, unique=True))
    S = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    return np.array(v), np.array(S)


def test_small_example():
    v = np.array([0.9, 0.5, 0.1])
    S = [0]
    assert ordinal_envy_prefix(v, S) == 1
    assert ordinal_envy_cancellation(v, S) == 1
    assert cardinal_envy(v, S) == 0.0
    assert cardinal_envy(v, [2]) == pytest.approx(1.3)
    assert ordinal_discrepancy(v, S) == 2
    # player 2 holds 0.5 + 0.1 and envies the 0.9
    assert two_player_envy(v, v, S) == pytest.approx(0.3)


def test_all_items_owned_or_none():
    v = np.array([0.3, 0.2, 0.1])
    assert ordinal_envy_prefix(v, np.ones(3, bool)) == 0
    assert ordinal_envy_prefix(v, np.zeros(3, bool)) == 3
    assert ordinal_envy_cancellation(v, np.zeros(3, bool)) == 3


@pytest.mark.parametrize("n", range(1, 6))
def test_prefix_equals_cancellation_exhaustively(n):
    v = np.arange(1, n + 1) / (n + 1)
    for perm in itertools.permutations(range(n)):
        vp = v[list(perm)]
        for bits in itertools.product([False, True], repeat=n):
            S = np.array(bits)
            assert ordinal_envy_prefix(vp, S) == ordinal_envy_cancellation(vp, S)


@given(instances())
def test_prefix_equals_cancellation(inst):
    v, S = inst
    assert ordinal_envy_prefix(v, S) == ordinal_envy_cancellation(v, S)


@given(instances())
def test_worst_case_sandwich_and_chain(inst):
    v, S = inst
    n = len(v)
    eps = 1e-9
    e = ordinal_envy_prefix(v, S)
    w = worst_consistent_valuation(v, S, eps)
    # same ranking, and within n^2 eps of the ordinal envy
    assert np.array_equal(np.argsort(-w, kind="stable"), np.argsort(-v, kind="stable"))
    assert e - n * n * eps - 1e-12 <= cardinal_envy(w, S) <= e + 1e-12
    assert ordinal_discrepancy(v, S) >= e >= cardinal_envy(v, S) - 1e-12


@given(instances(max_n=30))
def test_kernel_row_matches_python(inst):
    v, S = inst
    n = len(v)
    best, left, disc, card, wcard = _kernels.envy_row(
        v, S, 1e-9, np.empty(n, np.int64), np.empty(n, np.bool_), np.empty(n)
    )
    assert best == ordinal_envy_prefix(v, S)
    assert left == ordinal_envy_cancellation(v, S)
    assert disc == ordinal_discrepancy(v, S)
    assert card == pytest.approx(cardinal_envy(v, S), abs=1e-12)
    assert wcard == pytest.approx(cardinal_envy(worst_consistent_valuation(v, S, 1e-9), S), abs=1e-12)


def test_exhaustive_kernel_counts():
    counts = _kernels.envy_exhaustive(5, 1e-9)
    assert counts.tolist() == [120 * 32, 0, 0, 0]


def test_input_validation():
    with pytest.raises(ValueError):
        ordinal_envy_prefix([0.5, 0.5], [0])
    with pytest.raises(ValueError):
        worst_consistent_valuation([0.1, 0.2], [0], epsilon=0.5)
    with pytest.raises(ValueError):
        cardinal_envy([0.1], [3])
    with pytest.raises(ValueError):
        run_online_envy([[0.5, 2.0]], derive_params(4))


def test_distinct_ranks_break_ties_by_arrival():
    ranks, k = distinct_ranks(np.array([0.5, 0.2, 0.5, 0.2]))
    assert ranks.tolist() == [2, 0, 3, 1] and k == 4


def test_empirical_cdf_stays_inside_unit_interval():
    vals = np.random.default_rng(0).random(200)
    u = empirical_cdf_online(vals)
    assert np.all((u > 0) & (u < 1))
    assert u[0] == 0.5


@given(st.integers(4, 400), st.integers(0, 2**32), st.sampled_from(["potential", "random"]))
def test_online_envy_chain(n, seed, algorithm):
    rng = np.random.default_rng(seed)
    items = rng.random((n, 2))
    run = run_online_envy(items, derive_params(n), algorithm=algorithm, rng=rng)
    assert run.chain_ok
    S = run.in_S
    assert run.cardinal_final[0] == pytest.approx(cardinal_envy(items[:, 0], S), abs=1e-9)
    assert run.cardinal_final[1] == pytest.approx(cardinal_envy(items[:, 1], ~S), abs=1e-9)
    assert run.ordinal_final[0] == ordinal_envy_prefix(items[:, 0], S)
    assert run.ordinal_final[1] == ordinal_envy_prefix(items[:, 1], ~S)
    assert max(run.cardinal_final) <= run.stripe_discrepancy


def test_online_envy_empirical_cdfs():
    items = np.random.default_rng(1).random((300, 2)) ** 3
    run = run_online_envy(items, derive_params(300), cdfs="empirical")
    assert run.heuristic_cdf and run.chain_ok
