"""Online stripe discrepancy on the unit square: one tree per axis, one shared sign."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .interval import (
    DiscrepancyProfile,
    EmbeddingParams,
    RunningDiscrepancyTracker,
    Transcript,
    compress,
    discrepancy_profile,
    embed_point,
    embed_points,
)
from .tree import _sinh_sum_sign, default_lambda, new_tree


@dataclass
class Transcript2D:
    xs: np.ndarray
    ys: np.ndarray
    signs: np.ndarray

    def __len__(self) -> int:
        return len(self.signs)


def project_transcript(transcript: Transcript2D, axis: str) -> Transcript:
    if axis == "x":
        return Transcript(transcript.xs, transcript.signs)
    if axis == "y":
        return Transcript(transcript.ys, transcript.signs)
    raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")


class StripeState:
    """Incremental joint-greedy state; positions are compressed up front."""

    def __init__(self, points, params: EmbeddingParams, lam: float | None = None):
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        _check_square(pts)
        self.params = params
        self.lam = default_lambda(params.n) if lam is None else lam
        self.points = pts
        self.tree_x = new_tree(params.shape, self.lam)
        self.tree_y = new_tree(params.shape, self.lam)
        self.tracker_x = RunningDiscrepancyTracker(pts[:, 0])
        self.tracker_y = RunningDiscrepancyTracker(pts[:, 1])
        self.signs: list[int] = []

    def paths(self, t: int):
        x, y = self.points[t]
        return (
            self.tree_x.root_leaf_path(embed_point(x, self.params)),
            self.tree_y.root_leaf_path(embed_point(y, self.params)),
        )

    def choose_sign(self, t: int) -> int:
        px, py = self.paths(t)
        ds = [self.tree_x.imbalance[v].item() for v in px]
        ds += [self.tree_y.imbalance[v].item() for v in py]
        return -1 if _sinh_sum_sign(ds, self.lam) > 0 else 1

    def step(self) -> int:
        t = len(self.signs)
        sign = self.choose_sign(t)
        x, y = self.points[t]
        self.tree_x.apply_arrival(embed_point(x, self.params), sign)
        self.tree_y.apply_arrival(embed_point(y, self.params), sign)
        self.tracker_x.add(t, sign)
        self.tracker_y.add(t, sign)
        self.signs.append(sign)
        return sign

    @property
    def stripe_discrepancy(self) -> int:
        return max(self.tracker_x.running, self.tracker_y.running)


@dataclass
class StripeRun:
    transcript: Transcript2D
    params: EmbeddingParams
    lam: float
    tree_discrepancy_x: int
    tree_discrepancy_y: int
    profile_x: DiscrepancyProfile = field(repr=False)
    profile_y: DiscrepancyProfile = field(repr=False)

    @property
    def disc_x(self) -> int:
        return self.profile_x.running

    @property
    def disc_y(self) -> int:
        return self.profile_y.running

    @property
    def stripe_discrepancy(self) -> int:
        return max(self.disc_x, self.disc_y)

    @property
    def final_stripe_discrepancy(self) -> int:
        return max(self.profile_x.final, self.profile_y.final)


def _check_square(pts: np.ndarray):
    if pts.size and (not np.all(np.isfinite(pts)) or pts.min() < 0 or pts.max() > 1):
        raise ValueError("points must lie in the unit square")


def stripe_signs(
    pts: np.ndarray,
    params: EmbeddingParams,
    lam: float,
    algorithm: str = "potential",
    rng: np.random.Generator | None = None,
):
    """Signs for points in the square plus per-axis tree discrepancy."""
    leaves = np.stack([embed_points(pts[:, 0], params), embed_points(pts[:, 1], params)], axis=1)
    if algorithm == "potential":
        fixed, use_fixed = np.zeros(0, dtype=np.int8), False
    elif algorithm == "random":
        if rng is None:
            raise ValueError("random coloring needs an rng")
        fixed, use_fixed = (rng.integers(0, 2, len(pts)) * 2 - 1).astype(np.int8), True
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    signs, _, max_abs = _kernels.drive_trees(
        leaves, params.arity, params.height, float(lam), fixed, use_fixed
    )
    return signs, int(max_abs[0]), int(max_abs[1])


def run_online_stripe(
    points,
    params: EmbeddingParams,
    lam: float | None = None,
    algorithm: str = "potential",
    rng: np.random.Generator | None = None,
    cdfs: tuple[Callable, Callable] | None = None,
    rank_keys=None,
) -> StripeRun:
    """Color points of the unit square; stripe discrepancy is the max over both axes.

    ``cdfs`` optionally maps each coordinate through its marginal CDF first,
    which turns any product distribution into the uniform square.
    ``rank_keys`` overrides coordinate compression with precomputed
    ((ranks_x, size_x), (ranks_y, size_y)).
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if cdfs is not None:
        pts = np.stack([cdfs[0](pts[:, 0]), cdfs[1](pts[:, 1])], axis=1)
    _check_square(pts)
    lam = default_lambda(params.n) if lam is None else lam
    signs, tdx, tdy = stripe_signs(pts, params, lam, algorithm, rng)
    if rank_keys is None:
        rank_keys = (compress(pts[:, 0]), compress(pts[:, 1]))
    (rx, sx), (ry, sy) = rank_keys
    px = discrepancy_profile(None, signs, rx, sx)
    py = discrepancy_profile(None, signs, ry, sy)
    return StripeRun(Transcript2D(pts[:, 0], pts[:, 1], signs), params, float(lam), tdx, tdy, px, py)
