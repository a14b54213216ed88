"""Point-at-a-time colorers, for settings where arrivals depend on past colors."""

from __future__ import annotations

from typing import Protocol

import numpy as np

from .interval import EmbeddingParams, derive_params, embed_point
from .tree import default_lambda, new_tree


class Colorer(Protocol):
    def color(self, x) -> int: ...


class PotentialColorer:
    """Greedy cosh-potential coloring on the embedded tree."""

    name = "potential"

    def __init__(self, params: EmbeddingParams, lam: float | None = None):
        self.params = params
        self.tree = new_tree(params.shape, default_lambda(params.n) if lam is None else lam)

    @classmethod
    def for_n(cls, n: int, C: float = 1.0, lam: float | None = None) -> "PotentialColorer":
        return cls(derive_params(max(n, 4), C), lam)

    def color(self, x) -> int:
        return self.tree.step(embed_point(x, self.params))


class RandomColorer:
    name = "random"

    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    def color(self, x) -> int:
        return 1 if self.rng.integers(0, 2) else -1


class ConstantColorer:
    name = "constant"

    def __init__(self, sign: int = 1):
        self.sign = sign

    def color(self, x) -> int:
        return self.sign


class AlternatingColorer:
    """+1, -1, +1, ... by arrival time, ignoring positions."""

    name = "alternating"

    def __init__(self):
        self.t = 0

    def color(self, x) -> int:
        self.t += 1
        return 1 if self.t % 2 else -1
