"""End-to-end acceptance checks, one test per criterion.

Each test appends a PASS/FAIL line to the session log, printed in the
terminal summary; the assertion then decides the test outcome.
"""

import math
import time

import numpy as np
import pytest

from stochdisc import _kernels
from stochdisc.adversary import ReplayGuesses, run_adaptive_game, run_oblivious_trials
from stochdisc.algorithms import PotentialColorer
from stochdisc.harness.config import ExperimentConfig
from stochdisc.harness.runner import run_experiment, sweep
from stochdisc.harness.verify import (
    adversary_colorers,
    envy_instance_checks,
    random_envy_instances,
    signs_separated,
    tracker_matches_bruteforce,
)
from stochdisc.interval import (
    derive_params,
    discrepancy_profile,
    interval_discrepancy_bruteforce,
    offline_alternating_coloring,
    run_online_interval,
)
from stochdisc.separation import facts_sweep, separation_tightness_fixture
from stochdisc.stripe import project_transcript, run_online_stripe

pytestmark = pytest.mark.slow

SEEDS = tuple(range(1, 21))
GROWTH_NS = [2**k for k in range(10, 19)]


@pytest.fixture
def record(acceptance_log):
    def _record(number: int, title: str, passed: bool, detail: str):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} -- {detail}"
        acceptance_log.append(line)
        print(line)
        return passed

    return _record


@pytest.fixture(scope="module")
def interval_growth():
    start = time.perf_counter()
    result = sweep(ExperimentConfig("interval", GROWTH_NS[0], SEEDS), GROWTH_NS, ["potential", "random"])
    return result, time.perf_counter() - start


def _median(rows, field):
    return float(np.median([getattr(r, field) for r in rows]))


def test_criterion_01_tracker_oracle(record):
    start = time.perf_counter()
    ok = 0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        n = 300 if seed % 2 else int(rng.integers(1, 301))
        xs = rng.integers(0, 60, n) / 60 if seed % 3 == 0 else rng.random(n)
        if seed % 2:
            signs = rng.choice([-1, 1], n)
        else:
            signs = run_online_interval(xs, derive_params(max(n, 4))).transcript.signs
        ok += tracker_matches_bruteforce(xs, signs)
    elapsed = time.perf_counter() - start
    passed = ok == 50 and elapsed < 120
    assert record(1, "running tracker == brute force at every step", passed, f"{ok}/50 transcripts, {elapsed:.1f}s")


def test_criterion_02_ordinal_envy_equivalence(record):
    start = time.perf_counter()
    counts = np.zeros(4, dtype=np.int64)
    for n in range(1, 9):
        counts += _kernels.envy_exhaustive(n, 1e-9)
    expected = sum(math.factorial(n) * 2**n for n in range(1, 9))
    bad = np.zeros(3, dtype=np.int64)
    for v, S in random_envy_instances(10_000, 64, np.random.default_rng(2)):
        bad += np.logical_not(envy_instance_checks(v, S, 1e-9))
    elapsed = time.perf_counter() - start
    passed = counts[0] == expected and not counts[1:].any() and not bad.any() and elapsed < 60
    detail = (
        f"exhaustive {counts[0]} instances, mismatch/sandwich/chain failures {counts[1:].tolist()}; "
        f"10^4 random: {bad.tolist()}; {elapsed:.1f}s"
    )
    assert record(2, "prefix == cancellation, sandwich, dominance chain", passed, detail)


def test_criterion_03_adaptive_lower_bound(record):
    worst_margin = math.inf
    ok = True
    for n in (10, 100, 500):
        for name, make in adversary_colorers(n, np.random.default_rng(n)).items():
            run = run_adaptive_game(make(), n)
            again = run_adaptive_game(make(), n) if name != "random" else run
            ok &= run.discrepancy >= math.ceil(n / 2) and signs_separated(run.transcript)
            ok &= again.discrepancy == run.discrepancy
            worst_margin = min(worst_margin, run.discrepancy - math.ceil(n / 2))
    assert record(3, "adaptive adversary forces ceil(n/2)", ok, f"min slack over 12 games = {worst_margin}")


def test_criterion_04_offline_alternating(record):
    rng = np.random.default_rng(4)
    worst = 0
    for k in range(1000):
        n = int(rng.integers(1, 10_001))
        xs = rng.integers(0, max(n // 4, 1), n) / max(n // 4, 1) if k % 4 == 0 else rng.random(n)
        worst = max(worst, discrepancy_profile(xs, offline_alternating_coloring(xs)).final)
    assert record(4, "offline alternating coloring", worst <= 1, f"max final discrepancy {worst} over 1000 instances")


def test_criterion_05_beats_random(record, interval_growth):
    result, elapsed = interval_growth
    at = [r for r in result.rows if r.n == 65536]
    pot = _median([r for r in at if r.algorithm == "potential"], "running_interval_disc")
    rnd = _median([r for r in at if r.algorithm == "random"], "running_interval_disc")
    s_pot, s_rnd = result.slopes["potential"], result.slopes["random"]
    passed = pot <= 0.25 * rnd and s_pot <= 0.35 and 0.4 <= s_rnd <= 0.6 and elapsed < 600
    detail = (
        f"n=65536 medians {pot:g} vs {rnd:g} (ratio {pot / rnd:.3f}); "
        f"slopes potential {s_pot:.3f}, random {s_rnd:.3f}; sweep {elapsed:.0f}s"
    )
    assert record(5, "potential vs random interval discrepancy", passed, detail)


def test_criterion_06_tree_node_bound(record, interval_growth):
    result, _ = interval_growth
    n = 2**18
    bound = 5 * math.log(n) ** 2
    rows = [r for r in result.rows if r.n == n and r.algorithm == "potential"]
    within = sum(r.tree_disc <= bound for r in rows)
    worst = max(r.tree_disc for r in rows)
    assert len(rows) == 20
    assert record(6, "max node imbalance <= 5 (ln n)^2", within >= 19, f"{within}/20 seeds, worst {worst} vs {bound:.1f}")


def test_criterion_07_stripe(record):
    pot = run_experiment(ExperimentConfig("stripe", 65536, SEEDS))
    rnd = run_experiment(ExperimentConfig("stripe", 65536, SEEDS, algorithm="random"))
    mp, mr = _median(pot, "stripe_disc"), _median(rnd, "stripe_disc")
    oracle_ok = 0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 201))
        run = run_online_stripe(rng.random((n, 2)), derive_params(n))
        oracle_ok += all(
            d == interval_discrepancy_bruteforce(project_transcript(run.transcript, ax))
            for d, ax in ((run.disc_x, "x"), (run.disc_y, "y"))
        )
    passed = mp <= 0.35 * mr and oracle_ok == 20
    detail = f"medians {mp:g} vs {mr:g} (ratio {mp / mr:.3f}); per-axis oracle {oracle_ok}/20"
    assert record(7, "joint potential stripe discrepancy", passed, detail)


def test_criterion_08_envy(record):
    pot = run_experiment(ExperimentConfig("envy", 65536, SEEDS))
    rnd = run_experiment(ExperimentConfig("envy", 65536, SEEDS, algorithm="random"))
    chain = all(r.chain_ok and max(r.envy_p1, r.envy_p2) <= r.stripe_disc for r in pot + rnd)
    mp, mr = _median(pot, "envy_final"), _median(rnd, "envy_final")
    passed = chain and mp <= 0.25 * mr
    detail = f"chain holds in all 40 runs: {chain}; median envy {mp:.3f} vs {mr:.3f} (ratio {mp / mr:.4f})"
    assert record(8, "online envy via stripe coloring", passed, detail)


def test_criterion_09_oblivious(record):
    n = 400
    rng = np.random.default_rng(9)
    pot = run_oblivious_trials(lambda script: PotentialColorer.for_n(n), n, 200, rng)
    cheat = run_oblivious_trials(ReplayGuesses, n, 200, rng)
    frac = float(np.mean(pot >= math.sqrt(n) / 200))
    passed = frac >= 0.20 and bool(np.all(cheat >= n / 2))
    detail = f"potential reaches 0.1 in {frac:.0%} of scripts (median {np.median(pot):g}); cheat min {cheat.min()}"
    assert record(9, "oblivious adversary", passed, detail)


def test_criterion_10_facts_and_tightness(record):
    facts = facts_sweep(2**16, 10_000, np.random.default_rng(10))
    medians = []
    for h in range(2, 7):
        ratios = [
            separation_tightness_fixture(4, h, 2**16, np.random.default_rng(1000 * h + s), samples=100_000)[1].ratio
            for s in range(10)
        ]
        medians.append(float(np.median(ratios)))
    decreasing = all(b < a for a, b in zip(medians, medians[1:]))
    passed = facts.pass_rate == 1.0 and decreasing
    detail = f"facts pass rate {facts.pass_rate:.4f} on {facts.samples}; median E|L|/E[Q] by h=2..6: " + ", ".join(
        f"{m:.4f}" for m in medians
    )
    assert record(10, "dangerous-set facts and tightness fixture", passed, detail)
