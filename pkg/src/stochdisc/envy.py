"""Two-player online envy minimization through ordinal envy and stripe discrepancy.

Sign convention: an item colored -1 goes to player 1 (the set S), an item
colored +1 goes to player 2 (the complement).
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .interval import EmbeddingParams, discrepancy_profile
from .stripe import StripeRun, run_online_stripe


def _mask(S, n: int) -> np.ndarray:
    S = np.asarray(S)
    if S.dtype == bool:
        if S.shape != (n,):
            raise ValueError("boolean allocation mask has wrong length")
        return S
    mask = np.zeros(n, dtype=bool)
    idx = S.astype(np.int64).ravel()
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise ValueError("allocation index out of range")
    mask[idx] = True
    return mask


def _check_distinct(v: np.ndarray):
    if len(np.unique(v)) != len(v):
        raise ValueError("valuations must be pairwise distinct")


def cardinal_envy(v, S) -> float:
    """max{v(not S) - v(S), 0} for the player who received S."""
    v = np.asarray(v, dtype=np.float64)
    mask = _mask(S, len(v))
    return max(float(v[~mask].sum() - v[mask].sum()), 0.0)


def two_player_envy(v1, v2, S) -> float:
    """Envy of the allocation (S to player 1, the rest to player 2)."""
    mask = _mask(S, len(v1))
    return max(cardinal_envy(v1, mask), cardinal_envy(v2, ~mask))


def ordinal_envy_prefix(v, S) -> int:
    """Largest (#not-S minus #S) over the top-t items by value, t = 0..n."""
    v = np.asarray(v, dtype=np.float64)
    _check_distinct(v)
    mask = _mask(S, len(v))
    order = np.argsort(-v, kind="stable")
    steps = np.where(mask[order], -1, 1)
    return int(max(0, np.cumsum(steps).max(initial=0)))


def ordinal_envy_cancellation(v, S) -> int:
    """Size of the unallocated set left after the cancellation procedure.

    Each owned item, from most to least valuable, cancels the most valuable
    remaining unowned item that is worth less than it; if none is cheaper,
    nothing is cancelled.
    """
    v = np.asarray(v, dtype=np.float64)
    _check_distinct(v)
    mask = _mask(S, len(v))
    remaining = sorted(v[~mask].tolist())
    for vi in sorted(v[mask].tolist(), reverse=True):
        k = bisect.bisect_left(remaining, vi)
        if k:
            del remaining[k - 1]
    return len(remaining)


ordinal_envy = ordinal_envy_prefix


def worst_consistent_valuation(v, S, epsilon: float) -> np.ndarray:
    """An order-consistent valuation whose cardinal envy is within n^2 eps of the ordinal envy.

    The top t* items (t* attaining the prefix maximum) are valued 1 - i*eps by
    rank i; the rest get distinct values below eps.
    """
    v = np.asarray(v, dtype=np.float64)
    n = len(v)
    if n and not 0 < epsilon < 1.0 / n**2:
        raise ValueError(f"epsilon must lie in (0, 1/n^2), got {epsilon}")
    _check_distinct(v)
    mask = _mask(S, n)
    order = np.argsort(-v, kind="stable")
    prefix = np.concatenate([[0], np.cumsum(np.where(mask[order], -1, 1))])
    t_star = int(np.argmax(prefix))
    ranks = np.arange(1, n + 1, dtype=np.float64)
    worst = np.where(ranks <= t_star, 1.0 - ranks * epsilon, (n + 1 - ranks) * epsilon / n)
    out = np.empty(n)
    out[order] = worst
    return out


def ordinal_discrepancy(v, S) -> int:
    """Interval discrepancy of the coloring -1 on S, +1 elsewhere, placed at the values."""
    v = np.asarray(v, dtype=np.float64)
    _check_distinct(v)
    mask = _mask(S, len(v))
    return discrepancy_profile(v, np.where(mask, -1, 1).astype(np.int8)).final


# --- online driver ------------------------------------------------------------


def distinct_ranks(values: np.ndarray) -> tuple[np.ndarray, int]:
    """Ranks with ties broken by arrival index (a later item counts as slightly larger)."""
    order = np.lexsort((np.arange(len(values)), values))
    ranks = np.empty(len(values), dtype=np.int64)
    ranks[order] = np.arange(len(values))
    return ranks, len(values)


def empirical_cdf_online(values: np.ndarray) -> np.ndarray:
    """Mid-rank of each value among the items seen so far (heuristic CDF)."""
    seen: list[float] = []
    out = np.empty(len(values))
    for j, x in enumerate(values.tolist()):
        lo = bisect.bisect_left(seen, x)
        hi = bisect.bisect_right(seen, x)
        out[j] = (lo + (hi - lo) / 2 + 0.5) / (j + 1)
        seen.insert(hi, x)
    return out


@dataclass
class EnvyRun:
    values: np.ndarray  # (n, 2)
    in_S: np.ndarray  # True where player 1 got the item
    stripe: StripeRun = field(repr=False)
    cardinal_running: tuple[float, float]
    cardinal_final: tuple[float, float]
    ordinal_running: tuple[int, int]
    ordinal_final: tuple[int, int]
    chain_ok: bool
    heuristic_cdf: bool = False

    @property
    def envy_final(self) -> float:
        return max(self.cardinal_final)

    @property
    def envy_running(self) -> float:
        return max(self.cardinal_running)

    @property
    def stripe_discrepancy(self) -> int:
        return self.stripe.stripe_discrepancy


def run_online_envy(
    items,
    params: EmbeddingParams,
    lam: float | None = None,
    cdfs: tuple[Callable, Callable] | str = "uniform",
    algorithm: str = "potential",
    rng: np.random.Generator | None = None,
) -> EnvyRun:
    """Allocate items online by coloring (F1(v1_j), F2(v2_j)) in the unit square.

    ``cdfs`` is a pair of strictly increasing CDFs, "uniform" (identity) or
    "empirical" (ranks among items seen so far; a heuristic when the value
    distributions are unknown).
    """
    vals = np.asarray(items, dtype=np.float64).reshape(-1, 2)
    if vals.size and (not np.all(np.isfinite(vals)) or vals.min() < 0 or vals.max() > 1):
        raise ValueError("valuations must lie in [0, 1]")
    heuristic = False
    if isinstance(cdfs, str):
        if cdfs == "uniform":
            pts = vals
        elif cdfs == "empirical":
            pts = np.stack([empirical_cdf_online(vals[:, 0]), empirical_cdf_online(vals[:, 1])], 1)
            heuristic = True
        else:
            raise ValueError(f"unknown cdf mode {cdfs!r}")
    else:
        pts = np.stack([cdfs[0](vals[:, 0]), cdfs[1](vals[:, 1])], axis=1)
    keys = (distinct_ranks(vals[:, 0]), distinct_ranks(vals[:, 1]))
    run = run_online_stripe(pts, params, lam, algorithm, rng, rank_keys=keys)

    chi = run.transcript.signs.astype(np.int64)
    px, py = run.profile_x, run.profile_y
    # player 1 holds S (sign -1); player 2 holds the rest
    gap1 = np.cumsum(vals[:, 0] * chi)  # v1(not S) - v1(S)
    gap2 = -np.cumsum(vals[:, 1] * chi)  # v2(S) - v2(not S)
    card1 = np.maximum(gap1, 0.0)
    card2 = np.maximum(gap2, 0.0)
    ord1 = px.total - px.min_f
    ord2 = py.max_f - py.total
    tol = 1e-9
    chain_ok = bool(
        np.all(px.current >= ord1)
        and np.all(py.current >= ord2)
        and np.all(ord1 + tol >= card1)
        and np.all(ord2 + tol >= card2)
    )
    n = len(vals)

    def _last(a, cast):
        return cast(a[-1]) if n else cast(0)

    def _peak(a, cast):
        return cast(a.max()) if n else cast(0)

    return EnvyRun(
        vals,
        chi < 0,
        run,
        (_peak(card1, float), _peak(card2, float)),
        (_last(card1, float), _last(card2, float)),
        (_peak(ord1, int), _peak(ord2, int)),
        (_last(ord1, int), _last(ord2, int)),
        chain_ok,
        heuristic,
    )
