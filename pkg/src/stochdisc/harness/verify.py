"""Oracle-equivalence and invariant suites behind ``stochdisc verify``."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .. import _kernels
from ..adversary import ReplayGuesses, build_oblivious_script, play_script, run_adaptive_game
from ..algorithms import AlternatingColorer, ConstantColorer, PotentialColorer, RandomColorer
from ..envy import (
    cardinal_envy,
    ordinal_discrepancy,
    ordinal_envy_cancellation,
    ordinal_envy_prefix,
    worst_consistent_valuation,
)
from ..interval import (
    RunningDiscrepancyTracker,
    Transcript,
    bruteforce_running_series,
    derive_params,
    run_online_interval,
)
from ..separation import facts_sweep
from ..stripe import project_transcript, run_online_stripe
from ..tree import TreeShape, default_lambda, new_tree

SUITES = ("oracles", "invariants", "envy-equivalence", "adversary", "facts")


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    suite: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = ""):
        self.checks.append(Check(name, bool(passed), detail))

    def as_dict(self) -> dict:
        return {"suite": self.suite, "passed": self.passed, "checks": [asdict(c) for c in self.checks]}


# --- oracles --------------------------------------------------------------------


def tracker_matches_bruteforce(positions, signs) -> bool:
    """Compare the running tracker with direct enumeration at every time step."""
    tracker = RunningDiscrepancyTracker(positions)
    t = Transcript(positions, signs)
    expected = bruteforce_running_series(t)
    for i, s in enumerate(t.signs.tolist()):
        if tracker.add(i, s) != expected[i]:
            return False
    return True


def _oracles(report: Report, rng: np.random.Generator):
    ok = 0
    for _ in range(10):
        n = int(rng.integers(1, 80))
        # a coarse grid forces repeated positions
        xs = rng.integers(0, 20, n) / 20 if rng.random() < 0.5 else rng.random(n)
        ok += tracker_matches_bruteforce(xs, rng.choice([-1, 1], n))
    report.add("tracker == bruteforce", ok == 10, f"{ok}/10 transcripts")

    n = 400
    params = derive_params(n)
    same = 0
    for _ in range(5):
        xs = rng.random(n)
        run = run_online_interval(xs, params)
        col = PotentialColorer(params)
        same += np.array_equal([col.color(x) for x in xs], run.transcript.signs)
    report.add("python tree == compiled sweep", same == 5, f"{same}/5 streams")

    tree = new_tree(TreeShape(3, 3), default_lambda(64))
    for leaf in rng.integers(0, 27, 200).tolist():
        tree.step(leaf)
    a, b = tree.potential(), tree.potential_from_scratch()
    report.add("incremental potential", math.isclose(a, b, rel_tol=1e-9), f"{a!r} vs {b!r}")

    # computed independently (mpmath, 30 digits) and frozen
    frozen = [
        (math.sinh(0.3), 0.30452029344714261),
        (math.sinh(-0.2), -0.20133600254109399),
        (math.cosh(1.0), 1.5430806348152437),
    ]
    report.add("hyperbolic reference values", all(math.isclose(x, y, rel_tol=1e-12) for x, y in frozen))


# --- invariants -----------------------------------------------------------------


def _invariants(report: Report, rng: np.random.Generator):
    n = 2000
    params = derive_params(n)
    m, h = params.arity, params.height
    leaves = (rng.random(n) * params.leaf_count).astype(np.int64).reshape(-1, 1)
    signs, d, _ = _kernels.drive_trees(leaves, m, h, default_lambda(n), np.zeros(0, np.int8), False)
    d = d[0]
    internal = params.shape.first_leaf
    child_sums = np.array([d[m * v + 1 : m * v + m + 1].sum() for v in range(internal)])
    report.add("node imbalance = sum over children", np.array_equal(child_sums, d[:internal]))
    report.add("root imbalance = sum of signs", int(d[0]) == int(signs.astype(np.int64).sum()))

    run = run_online_interval(rng.random(n), params)
    report.add("running >= final discrepancy", run.running_discrepancy >= run.final_discrepancy)

    pts = rng.random((300, 2))
    srun = run_online_stripe(pts, derive_params(300))
    per_axis = (srun.disc_x, srun.disc_y)
    ok = all(_replay(project_transcript(srun.transcript, ax)) == per_axis[k] for k, ax in enumerate("xy"))
    report.add("stripe axes = 1-d trackers on projections", ok)


def _replay(t: Transcript) -> int:
    tracker = RunningDiscrepancyTracker(t.positions)
    for i, s in enumerate(t.signs.tolist()):
        tracker.add(i, s)
    return tracker.running


# --- envy -----------------------------------------------------------------------


def envy_instance_checks(v, S, epsilon: float = 1e-9) -> tuple[bool, bool, bool]:
    """(prefix == cancellation, worst-case sandwich, disc >= ordinal >= cardinal) for one instance."""
    v = np.asarray(v, dtype=np.float64)
    n = len(v)
    e_pre = ordinal_envy_prefix(v, S)
    equal = e_pre == ordinal_envy_cancellation(v, S)
    w = cardinal_envy(worst_consistent_valuation(v, S, epsilon), S)
    sandwich = e_pre - n * n * epsilon - 1e-12 <= w <= e_pre + 1e-12
    chain = ordinal_discrepancy(v, S) >= e_pre and e_pre + 1e-12 >= cardinal_envy(v, S)
    return equal, sandwich, chain


def random_envy_instances(count: int, max_n: int, rng: np.random.Generator):
    for _ in range(count):
        n = int(rng.integers(1, max_n + 1))
        v = rng.permutation(n).astype(np.float64) / n + rng.random(n) / (2 * n)
        yield v, rng.random(n) < 0.5


def _envy(report: Report, rng: np.random.Generator, max_n: int = 8, random_count: int = 10_000):
    total = np.zeros(4, dtype=np.int64)
    for n in range(1, max_n + 1):
        total += _kernels.envy_exhaustive(n, 1e-9)
    expected = sum(math.factorial(n) * 2**n for n in range(1, max_n + 1))
    report.add(f"exhaustive n <= {max_n}: all (ranking, S) visited", total[0] == expected, f"{total[0]} instances")
    report.add("exhaustive: prefix == cancellation", total[1] == 0, f"{total[1]} mismatches")
    report.add("exhaustive: worst-case sandwich", total[2] == 0, f"{total[2]} failures")
    report.add("exhaustive: disc >= ordinal >= cardinal", total[3] == 0, f"{total[3]} failures")

    bad = np.zeros(3, dtype=np.int64)
    for v, S in random_envy_instances(random_count, 64, rng):
        bad += np.logical_not(envy_instance_checks(v, S))
    report.add(f"{random_count} random instances: prefix == cancellation", bad[0] == 0, f"{bad[0]} mismatches")
    report.add("random instances: worst-case sandwich", bad[1] == 0, f"{bad[1]} failures")
    report.add("random instances: disc >= ordinal >= cardinal", bad[2] == 0, f"{bad[2]} failures")


# --- adversary ------------------------------------------------------------------


def signs_separated(t: Transcript) -> bool:
    """Every +1 lies left of every -1 (exact comparison, positions may be Fractions)."""
    plus = [p for p, s in zip(t.positions, t.signs.tolist()) if s > 0]
    minus = [p for p, s in zip(t.positions, t.signs.tolist()) if s < 0]
    return not plus or not minus or max(plus) < min(minus)


def adversary_colorers(n: int, rng: np.random.Generator) -> dict[str, Callable]:
    return {
        "potential": lambda: PotentialColorer.for_n(n),
        "random": lambda: RandomColorer(rng),
        "constant": lambda: ConstantColorer(1),
        "alternating": AlternatingColorer,
    }


def _adversary(report: Report, rng: np.random.Generator):
    for n in (10, 100, 500):
        for name, make in adversary_colorers(n, rng).items():
            run = run_adaptive_game(make(), n)
            report.add(
                f"adaptive n={n} vs {name}",
                run.discrepancy >= math.ceil(n / 2) and signs_separated(run.transcript),
                f"disc={run.discrepancy}",
            )
    worst = min(play_script(ReplayGuesses(s), s).discrepancy for s in (build_oblivious_script(400, rng) for _ in range(20)))
    report.add("oblivious replay of guesses", worst >= 200, f"min disc={worst}")


# --- facts ----------------------------------------------------------------------


def _facts(report: Report, rng: np.random.Generator, samples: int = 10_000):
    for n in (2**10, 2**16):
        s = facts_sweep(n, samples, rng)
        report.add(f"dangerous-set facts n={n}", s.failures == 0 and s.precondition_violations == 0, f"pass rate {s.pass_rate}")


_RUNNERS = {
    "oracles": _oracles,
    "invariants": _invariants,
    "envy-equivalence": _envy,
    "adversary": _adversary,
    "facts": _facts,
}


def verify(suite: str, seed: int = 0) -> list[Report]:
    """Run one suite (or "all") and return its reports."""
    names = SUITES if suite == "all" else (suite,)
    for name in names:
        if name not in _RUNNERS:
            raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES + ('all',))}")
    reports = []
    for k, name in enumerate(names):
        report = Report(name)
        _RUNNERS[name](report, np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k,))))
        reports.append(report)
    return reports
