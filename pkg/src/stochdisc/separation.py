"""Numeric probes of the dangerous-set facts and the separation-tightness tree."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tree import BalancedTree, TreeShape, new_tree

LOG10 = math.log(10.0)
RATIO_BOUND = 11.0
CANCEL_FRACTION = 8.0 / 9.0


def dangerous_interval(x: float, lam: float) -> tuple[float, float]:
    w = LOG10 / lam
    return -x - w, -x + w


def is_dangerous(y: float, x: float, lam: float) -> bool:
    lo, hi = dangerous_interval(x, lam)
    return lo <= y <= hi


@dataclass(frozen=True)
class FactsReport:
    x: float
    y: float
    dangerous: bool
    precondition_ok: bool
    reason: str
    # dangerous case: max of cosh and |sinh| ratios; otherwise |sum| / max|sinh|
    cosh_ratio: float = math.nan
    sinh_ratio: float = math.nan
    cancel_ratio: float = math.nan
    passed: bool = False


def dangerous_set_facts_check(x: float, y: float, lam: float, n: int) -> FactsReport:
    """Check the ratio fact (y dangerous for x) or the no-cancellation fact.

    A violated precondition (|x| < ln n / lambda) comes back with
    ``precondition_ok=False`` and ``passed=False``.
    """
    threshold = math.log(n) / lam
    dangerous = is_dangerous(y, x, lam)
    if abs(x) < threshold:
        return FactsReport(x, y, dangerous, False, f"|x| < ln(n)/lambda = {threshold:.6g}")
    a, b = lam * x, lam * y
    if dangerous:
        ca, cb = math.cosh(a), math.cosh(b)
        sa, sb = abs(math.sinh(a)), abs(math.sinh(b))
        cosh_ratio = max(ca / cb, cb / ca)
        sinh_ratio = max(sa / sb, sb / sa) if sa > 0 and sb > 0 else math.inf
        ok = cosh_ratio <= RATIO_BOUND and sinh_ratio <= RATIO_BOUND
        return FactsReport(x, y, True, True, "dangerous", cosh_ratio, sinh_ratio, passed=ok)
    sa, sb = math.sinh(a), math.sinh(b)
    biggest = max(abs(sa), abs(sb))
    cancel = abs(sa + sb) / biggest
    return FactsReport(
        x, y, False, True, "not dangerous", cancel_ratio=cancel, passed=cancel >= CANCEL_FRACTION
    )


def sample_facts_inputs(n: int, lam: float, count: int, rng: np.random.Generator, dangerous: bool):
    """Random (x, y) pairs meeting one of the two hypotheses."""
    t = math.log(n) / lam
    w = LOG10 / lam
    x = rng.uniform(t, 3 * t, count) * rng.choice([-1.0, 1.0], count)
    if dangerous:
        y = -x + rng.uniform(-w, w, count)
    else:
        # rejection sample outside the dangerous window from a wide range
        y = np.empty(count)
        for i in range(count):
            while True:
                c = rng.uniform(-5 * t, 5 * t)
                if not is_dangerous(c, x[i], lam):
                    y[i] = c
                    break
    return x, y


@dataclass
class FactsSweep:
    samples: int
    failures: int
    precondition_violations: int

    @property
    def pass_rate(self) -> float:
        return 1.0 - self.failures / self.samples if self.samples else 1.0


def facts_sweep(n: int, samples: int, rng: np.random.Generator, lam: float | None = None) -> FactsSweep:
    """Run both facts on ``samples`` random inputs each."""
    lam = 1.0 / math.log(n) if lam is None else lam
    failures = violations = 0
    for dangerous in (True, False):
        xs, ys = sample_facts_inputs(n, lam, samples, rng, dangerous)
        for x, y in zip(xs.tolist(), ys.tolist()):
            rep = dangerous_set_facts_check(x, y, lam, n)
            if not rep.precondition_ok:
                violations += 1
            if rep.dangerous != dangerous or not rep.passed:
                failures += 1
    return FactsSweep(2 * samples, failures, violations)


# --- tightness construction --------------------------------------------------


@dataclass
class TightnessReport:
    arity: int
    height: int
    n: int
    lam: float
    root_imbalance: float
    d_minus: np.ndarray
    d_plus: np.ndarray
    p: np.ndarray
    positive_children: np.ndarray
    mean_abs_L: float = math.nan
    mean_Q: float = math.nan
    samples: int = 0

    @property
    def ratio(self) -> float:
        return self.mean_abs_L / self.mean_Q


class InfeasibleFixture(ValueError):
    pass


def tightness_parameters(h: int, n: int):
    """Root imbalance and per-depth imbalance pair (d_{i,-}, d_{i,+}), i = 1..h."""
    ln = math.log(n)
    lam = 1.0 / ln
    d_root = 5.0 * ln / lam
    growth = (1.0 + 1.0 / ln) ** np.arange(h)
    sinh_root = math.sinh(lam * d_root)
    d_minus = -np.arcsinh(growth * sinh_root) / lam
    d_plus = np.arcsinh(growth * sinh_root / ln) / lam
    p = np.abs(d_minus) / (np.abs(d_plus) + np.abs(d_minus))
    return lam, d_root, d_minus, d_plus, p


def separation_tightness_fixture(
    m: int,
    h: int,
    n: int,
    rng: np.random.Generator | None = None,
    samples: int = 100_000,
    max_nodes: int = 20_000_000,
) -> tuple[BalancedTree, TightnessReport]:
    """Build the tree on which |L| cancels on every path except the all-positive one.

    Children of a positive node at depth i-1 get d_{i,+} (a fraction ~p_i of
    them) or d_{i,-}; subtrees under a negative node are left empty.  When an
    rng is given, E|L| and E[Q] are estimated over ``samples`` uniform
    root-leaf paths.  Imbalances are real-valued here so that the cancellation
    is exact rather than up to rounding.
    """
    if m < 2 or h < 1:
        raise InfeasibleFixture(f"need m >= 2 and h >= 1, got m={m}, h={h}")
    if n < 3:
        raise InfeasibleFixture(f"need n >= 3, got {n}")
    lam, d_root, d_minus, d_plus, p = tightness_parameters(h, n)
    if lam * abs(d_minus[-1]) > 700:
        raise InfeasibleFixture(f"cosh(lambda * d) overflows for n={n}, h={h}")
    nodes = (m ** (h + 1) - 1) // (m - 1)
    if nodes > max_nodes:
        raise InfeasibleFixture(f"{nodes} nodes exceeds max_nodes={max_nodes}")
    shape = TreeShape(m, h)
    k = np.clip(np.rint(p * m).astype(np.int64), 1, m - 1)

    tree = new_tree(shape, lam, dtype=np.float64)
    d = tree.imbalance
    d[0] = d_root
    positive = np.array([0], dtype=np.int64)
    for i in range(1, h + 1):
        kids = m * positive[:, None] + 1 + np.arange(m)[None, :]
        d[kids[:, : k[i - 1]]] = d_plus[i - 1]
        d[kids[:, k[i - 1] :]] = d_minus[i - 1]
        positive = kids[:, : k[i - 1]].ravel()
    tree._phi = float(np.sum(np.cosh(lam * d)))

    report = TightnessReport(m, h, n, lam, d_root, d_minus, d_plus, p, k)
    if rng is not None:
        report.mean_abs_L, report.mean_Q = estimate_path_sums(tree, rng, samples)
        report.samples = samples
    return tree, report


def estimate_path_sums(tree: BalancedTree, rng: np.random.Generator, samples: int):
    """Monte Carlo estimates of E|L| and E[Q] over uniform root-leaf paths."""
    m, h = tree.arity, tree.height
    lam = tree.lam
    d = tree.imbalance
    v = np.zeros(samples, dtype=np.int64)
    L = np.sinh(lam * d[v])
    Q = np.cosh(lam * d[v])
    for _ in range(h):
        v = m * v + 1 + rng.integers(0, m, samples)
        L += np.sinh(lam * d[v])
        Q += np.cosh(lam * d[v])
    return float(np.mean(np.abs(L))), float(np.mean(Q))
