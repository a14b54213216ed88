"""Online interval discrepancy on [0, 1] via the tree embedding."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .tree import TreeShape, default_lambda


@dataclass(frozen=True)
class EmbeddingParams:
    n: int
    C: float
    height: int
    arity: int

    @property
    def shape(self) -> TreeShape:
        return TreeShape(self.arity, self.height)

    @property
    def leaf_count(self) -> int:
        return self.arity**self.height


def _int_root_ceil(n: int, k: int) -> int:
    """Smallest integer m with m**k >= n."""
    m = max(1, math.ceil(n ** (1.0 / k)))
    while m**k < n:
        m += 1
    while m > 1 and (m - 1) ** k >= n:
        m -= 1
    return m


def derive_params(n: int, C: float = 1.0) -> EmbeddingParams:
    """h = max(1, floor(log2(log2 n) / C)), m = ceil(n^(1/(h+1)))."""
    if n < 4:
        raise ValueError(f"n must be >= 4 to embed into a tree, got {n}")
    if not C > 0:
        raise ValueError(f"C must be positive, got {C}")
    h = max(1, math.floor(math.log2(math.log2(n)) / C))
    m = _int_root_ceil(n, h + 1)
    if m < 2 or m**h > n:
        raise ValueError(f"n={n}, C={C} gives infeasible tree m={m}, h={h}")
    return EmbeddingParams(n, float(C), h, m)


def embed_point(x, params: EmbeddingParams) -> int:
    """Leaf index of position x; boundaries go right, x = 1 to the last leaf."""
    if not 0 <= x <= 1:
        raise ValueError(f"position {x} outside [0, 1]")
    k = params.leaf_count
    return min(math.floor(x * k), k - 1)


def embed_points(xs: np.ndarray, params: EmbeddingParams) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64)
    if xs.size and (xs.min() < 0 or xs.max() > 1):
        raise ValueError("positions must lie in [0, 1]")
    k = params.leaf_count
    return np.minimum(np.floor(xs * k).astype(np.int64), k - 1)


@dataclass
class Transcript:
    """Arrival positions and assigned signs, in arrival order."""

    positions: Sequence
    signs: np.ndarray

    def __post_init__(self):
        self.signs = np.asarray(self.signs, dtype=np.int8)
        if len(self.positions) != len(self.signs):
            raise ValueError("positions and signs differ in length")

    def __len__(self) -> int:
        return len(self.signs)


def compress(positions) -> tuple[np.ndarray, int]:
    """Dense ranks of positions (equal positions share a rank) and the rank count."""
    if isinstance(positions, np.ndarray) and positions.dtype != object:
        uniq, inv = np.unique(positions, return_inverse=True)
        return inv.astype(np.int64).ravel(), len(uniq)
    uniq = sorted(set(positions))
    index = {p: i for i, p in enumerate(uniq)}
    return np.fromiter((index[p] for p in positions), dtype=np.int64, count=len(positions)), len(uniq)


def _pow2_at_least(k: int) -> int:
    return 1 << max(0, (k - 1).bit_length())


class RunningDiscrepancyTracker:
    """Exact interval discrepancy maintained arrival by arrival.

    Positions are coordinate-compressed up front.  The structure holds the
    prefix-sum function F(x) = sum of signs at positions <= x over the
    compressed coordinates; the largest interval imbalance at any moment is
    max F - min F with the empty prefix 0 among the candidates.
    """

    def __init__(self, positions=None, ranks=None, size=None):
        if ranks is None:
            ranks, size = compress(positions if positions is not None else [])
        self.ranks = np.asarray(ranks, dtype=np.int64)
        self.size = _pow2_at_least(max(int(size), 1))
        self._hi = np.zeros(2 * self.size, dtype=np.int64)
        self._lo = np.zeros(2 * self.size, dtype=np.int64)
        self._tag = np.zeros(self.size, dtype=np.int64)
        self.total = 0
        self.steps = 0
        self.running = 0
        self.running_max_f = 0
        self.running_min_f = 0

    def add(self, index: int, sign: int) -> int:
        """Record arrival ``index`` (into the compressed position list) with ``sign``."""
        _kernels.tracker_add(self._hi, self._lo, self._tag, self.size, int(self.ranks[index]), sign)
        self.total += sign
        self.steps += 1
        self.running = max(self.running, self.current)
        self.running_max_f = max(self.running_max_f, self.max_f)
        self.running_min_f = min(self.running_min_f, self.min_f)
        return self.running

    @property
    def max_f(self) -> int:
        return max(int(self._hi[1]), 0)

    @property
    def min_f(self) -> int:
        return min(int(self._lo[1]), 0)

    @property
    def current(self) -> int:
        return self.max_f - self.min_f


@dataclass
class DiscrepancyProfile:
    """Per-step max/min of the prefix-sum function and running total."""

    max_f: np.ndarray
    min_f: np.ndarray
    total: np.ndarray

    @property
    def current(self) -> np.ndarray:
        return self.max_f - self.min_f

    @property
    def running(self) -> int:
        return int(self.current.max()) if len(self.total) else 0

    @property
    def final(self) -> int:
        return int(self.current[-1]) if len(self.total) else 0


def discrepancy_profile(positions, signs, ranks=None, size=None) -> DiscrepancyProfile:
    """Run the tracker over a whole transcript in one compiled pass."""
    if ranks is None:
        ranks, size = compress(positions)
    signs = np.asarray(signs, dtype=np.int8)
    fmax, fmin, total = _kernels.tracker_profile(
        np.asarray(ranks, dtype=np.int64), signs, _pow2_at_least(max(int(size), 1))
    )
    return DiscrepancyProfile(fmax, fmin, total)


def bruteforce_running_series(transcript: Transcript, up_to_time: int | None = None) -> list[int]:
    """Running interval discrepancy after each of the first ``up_to_time`` arrivals.

    Direct enumeration: at each time, sort the arrivals so far, group equal
    positions, and take every pair of group-boundary prefix sums.
    """
    T = len(transcript) if up_to_time is None else min(up_to_time, len(transcript))
    best = 0
    series = []
    positions = list(transcript.positions)
    signs = transcript.signs.tolist()
    for t in range(1, T + 1):
        order = sorted(range(t), key=lambda i: positions[i])
        groups = []
        prev = object()
        for i in order:
            if groups and positions[i] == prev:
                groups[-1] += signs[i]
            else:
                groups.append(signs[i])
                prev = positions[i]
        pre = np.concatenate([[0], np.cumsum(groups)])
        diff = np.abs(pre[None, :] - pre[:, None])
        best = max(best, int(diff.max()))
        series.append(best)
    return series


def interval_discrepancy_bruteforce(transcript: Transcript, up_to_time: int | None = None) -> int:
    """Max over times t <= up_to_time and all intervals of |signed count|."""
    series = bruteforce_running_series(transcript, up_to_time)
    return series[-1] if series else 0


def final_interval_discrepancy_bruteforce(positions, signs) -> int:
    """Discrepancy of the final coloring only, by enumeration of all intervals."""
    order = sorted(range(len(signs)), key=lambda i: positions[i])
    groups = []
    prev = object()
    for i in order:
        if groups and positions[i] == prev:
            groups[-1] += int(signs[i])
        else:
            groups.append(int(signs[i]))
            prev = positions[i]
    pre = np.concatenate([[0], np.cumsum(groups)])
    best = 0
    for i in range(len(pre)):
        best = max(best, int(np.abs(pre[i + 1 :] - pre[i]).max(initial=0)))
    return best


def offline_alternating_coloring(positions) -> np.ndarray:
    """+1, -1, +1, ... by sorted rank (ties by arrival index)."""
    n = len(positions)
    order = sorted(range(n), key=lambda i: (positions[i], i))
    signs = np.empty(n, dtype=np.int8)
    for rank, i in enumerate(order):
        signs[i] = 1 if rank % 2 == 0 else -1
    return signs


def random_coloring(arrivals, rng: np.random.Generator) -> Transcript:
    signs = (rng.integers(0, 2, len(arrivals)) * 2 - 1).astype(np.int8)
    return Transcript(arrivals, signs)


@dataclass
class IntervalRun:
    transcript: Transcript
    params: EmbeddingParams
    lam: float
    tree_discrepancy: int
    running_discrepancy: int
    final_discrepancy: int
    profile: DiscrepancyProfile = field(repr=False)
    notes: list[str] = field(default_factory=list)


def _check_positions(arr: np.ndarray):
    if arr.size and (not np.all(np.isfinite(arr)) or arr.min() < 0 or arr.max() > 1):
        raise ValueError("arrivals must lie in [0, 1]")


def run_online_interval(
    arrivals,
    params: EmbeddingParams,
    lam: float | None = None,
    algorithm: str = "potential",
    rng: np.random.Generator | None = None,
) -> IntervalRun:
    """Color a stream of points in [0, 1] and measure tree and interval discrepancy.

    ``algorithm`` is "potential" (greedy on the embedded tree), "random"
    (needs ``rng``) or "alternating-offline" (sees the whole stream).  Tree
    discrepancy is reported for whatever coloring results.
    """
    xs = np.asarray(arrivals, dtype=np.float64)
    _check_positions(xs)
    lam = default_lambda(params.n) if lam is None else lam
    leaves = embed_points(xs, params).reshape(-1, 1)
    if algorithm == "potential":
        fixed, use_fixed = np.zeros(0, dtype=np.int8), False
    elif algorithm == "random":
        if rng is None:
            raise ValueError("random coloring needs an rng")
        fixed, use_fixed = random_coloring(xs, rng).signs, True
    elif algorithm == "alternating-offline":
        fixed, use_fixed = offline_alternating_coloring(xs), True
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    signs, _, max_abs = _kernels.drive_trees(
        leaves, params.arity, params.height, float(lam), fixed, use_fixed
    )
    profile = discrepancy_profile(xs, signs)
    notes = []
    if len(xs) != params.n:
        notes.append(f"tree sized for n={params.n}, stream had {len(xs)} arrivals")
    return IntervalRun(
        Transcript(xs, signs),
        params,
        float(lam),
        int(max_abs[0]),
        profile.running,
        profile.final,
        profile,
        notes,
    )


def decomposition_bound(run: IntervalRun) -> int:
    """2*m*h*(max node imbalance) + (max leaf occupancy) for a finished run."""
    p = run.params
    leaves = embed_points(run.transcript.positions, p)
    occupancy = int(np.bincount(leaves, minlength=p.leaf_count).max()) if len(leaves) else 0
    return 2 * p.arity * p.height * run.tree_discrepancy + occupancy


def as_fraction_list(xs) -> list[Fraction]:
    return [x if isinstance(x, Fraction) else Fraction(x) for x in xs]
