"""Complete m-ary trees with signed node imbalances and the cosh-potential greedy rule.

Nodes are stored in implicit heap order: the root is node 0 and the children
of node ``i`` are ``m*i + 1 .. m*i + m``.  Leaves are numbered left to right
from 0 to ``m**h - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import EXP_LIMIT

# Potential reported in place of a float once any |lambda * d_v| exceeds EXP_LIMIT.
OVERFLOW = "overflow"

MAX_NODES = 2**31 - 1


@dataclass(frozen=True)
class TreeShape:
    arity: int
    height: int

    def __post_init__(self):
        if self.arity < 2:
            raise ValueError(f"arity must be >= 2, got {self.arity}")
        if self.height < 0:
            raise ValueError(f"height must be >= 0, got {self.height}")
        if self.node_count > MAX_NODES:
            raise OverflowError(
                f"tree with m={self.arity}, h={self.height} has {self.node_count} nodes"
            )

    @property
    def node_count(self) -> int:
        return (self.arity ** (self.height + 1) - 1) // (self.arity - 1)

    @property
    def leaf_count(self) -> int:
        return self.arity**self.height

    @property
    def first_leaf(self) -> int:
        return (self.arity**self.height - 1) // (self.arity - 1)


@dataclass(frozen=True)
class DriftConstants:
    """Constants of the drift argument: beta and f(h) = 4 * (200 beta)^h."""

    beta: int = 100

    def f(self, h: int) -> int:
        return 4 * (200 * self.beta) ** h


def default_lambda(n: int) -> float:
    """lambda = 1 / ln n (natural log)."""
    if n < 2:
        raise ValueError("lambda = 1/ln n needs n >= 2")
    return 1.0 / math.log(n)


def _sinh_sum_sign(ds, lam: float) -> int:
    """Sign of sum(sinh(lam * d)) over imbalances ``ds``.

    Opposite imbalances cancel exactly before any rounding happens, which
    keeps ties (L = 0) exact; the compiled sweep uses the same order of
    evaluation so both agree bit for bit.
    """
    net: dict = {}
    for d in ds:
        a = abs(d)
        net[a] = net.get(a, 0) + (d > 0) - (d < 0)
    big = lam * max(net, default=0)
    s = 0.0
    for a in sorted(net):
        c = net[a]
        if c:
            x = lam * a
            if big <= EXP_LIMIT:
                s += c * math.sinh(x)
            else:
                s += c * (math.exp(x - big) - math.exp(-x - big))
    return (s > 0) - (s < 0)


@dataclass
class BalancedTree:
    shape: TreeShape
    lam: float
    imbalance: np.ndarray = field(repr=False)
    max_abs_seen: int = 0
    arrivals_seen: int = 0
    _phi: float = field(default=0.0, repr=False)
    _overflow: bool = field(default=False, repr=False)

    @property
    def arity(self) -> int:
        return self.shape.arity

    @property
    def height(self) -> int:
        return self.shape.height

    def root_leaf_path(self, leaf: int) -> list[int]:
        """Node ids from the root down to ``leaf``."""
        if not 0 <= leaf < self.shape.leaf_count:
            raise IndexError(f"leaf {leaf} out of range [0, {self.shape.leaf_count})")
        m = self.shape.arity
        v = self.shape.first_leaf + leaf
        path = [v]
        while v:
            v = (v - 1) // m
            path.append(v)
        path.reverse()
        return path

    def path_sinh_sum(self, path) -> float:
        """L = sum of sinh(lambda * d_v) along ``path``."""
        d = self.imbalance
        return math.fsum(math.sinh(self.lam * float(d[v])) for v in path)

    def path_cosh_sum(self, path) -> float:
        """Q = sum of cosh(lambda * d_v) along ``path``."""
        d = self.imbalance
        return math.fsum(math.cosh(self.lam * float(d[v])) for v in path)

    def choose_sign(self, path) -> int:
        """Greedy color: -sign(L), with L = 0 resolved to +1.

        Only the sign of L matters, since
        dPhi(+1) - dPhi(-1) = 2 sinh(lambda) L.
        """
        s = _sinh_sum_sign([self.imbalance[v].item() for v in path], self.lam)
        return -1 if s > 0 else 1

    def apply_arrival(self, leaf: int, sign: int) -> list[int]:
        if sign not in (-1, 1):
            raise ValueError(f"sign must be -1 or +1, got {sign}")
        path = self.root_leaf_path(leaf)
        d = self.imbalance
        lam = self.lam
        for v in path:
            old = d[v].item()
            new = old + sign
            d[v] = new
            if abs(new) > self.max_abs_seen:
                self.max_abs_seen = abs(new)
            if lam * abs(new) > EXP_LIMIT:
                self._overflow = True
            if not self._overflow:
                self._phi += math.cosh(lam * new) - math.cosh(lam * old)
        self.arrivals_seen += 1
        return path

    def step(self, leaf: int) -> int:
        """Color one arrival at ``leaf`` greedily and apply it."""
        sign = self.choose_sign(self.root_leaf_path(leaf))
        self.apply_arrival(leaf, sign)
        return sign

    @property
    def overflow(self) -> bool:
        return self._overflow or bool(
            self.lam * float(np.max(np.abs(self.imbalance))) > EXP_LIMIT
        )

    def potential(self):
        """Incrementally maintained Phi, or OVERFLOW once cosh would blow up."""
        if self.overflow:
            return OVERFLOW
        return self._phi

    def potential_from_scratch(self):
        if self.overflow:
            return OVERFLOW
        return math.fsum(np.cosh(self.lam * self.imbalance.astype(np.float64)).tolist())

    def log_potential(self) -> float:
        """log Phi, finite even when Phi itself is not representable."""
        a = np.abs(self.lam * self.imbalance.astype(np.float64))
        big = float(a.max())
        # cosh(a) = e^a (1 + e^{-2a}) / 2
        return big + math.log(float(np.sum(np.exp(a - big) * (1 + np.exp(-2 * a)) / 2)))

    def discrepancy(self) -> int:
        """Running max of |d_v| over all nodes and all arrivals so far."""
        return self.max_abs_seen

    def children(self, v: int) -> range:
        m = self.shape.arity
        if v >= self.shape.first_leaf:
            return range(0)
        return range(m * v + 1, m * v + m + 1)


def new_tree(shape: TreeShape, lam: float, dtype=np.int64) -> BalancedTree:
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    tree = BalancedTree(shape, float(lam), np.zeros(shape.node_count, dtype=dtype))
    tree._phi = float(shape.node_count)
    return tree


def delta_potential(tree: BalancedTree, path, sign: int) -> float:
    """Directly evaluated change in Phi if ``sign`` were applied on ``path``."""
    lam = tree.lam
    d = tree.imbalance
    return math.fsum(
        math.cosh(lam * (float(d[v]) + sign)) - math.cosh(lam * float(d[v])) for v in path
    )
