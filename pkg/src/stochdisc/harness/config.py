"""Experiment configuration and seed-spec parsing."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path

KINDS = (
    "interval",
    "stripe",
    "envy",
    "adversary-adaptive",
    "adversary-oblivious",
    "tightness",
    "facts-check",
)
# constant and alternating are only meaningful against the adversaries
ALGORITHMS = ("potential", "random", "alternating-offline", "constant", "alternating")
FORMATS = ("csv", "json")
OUT_DIR_ENV = "STOCHDISC_OUT_DIR"

_ONLINE = {"potential", "random"}
_ALLOWED = {
    "interval": {"potential", "random", "alternating-offline"},
    "stripe": _ONLINE,
    "envy": _ONLINE,
    "adversary-adaptive": {"potential", "random", "constant", "alternating"},
    "adversary-oblivious": {"potential", "random", "constant", "alternating"},
    "tightness": {"potential"},
    "facts-check": {"potential"},
}


class ConfigError(ValueError):
    pass


def parse_seeds(spec: str) -> list[int]:
    """Seeds from "3", "1,2,7", "1..5" (inclusive) or "20@100" (20 seeds from 100)."""
    spec = spec.strip()
    if m := re.fullmatch(r"(\d+)\s*\.\.\s*(\d+)", spec):
        a, b = int(m[1]), int(m[2])
        if b < a:
            raise ConfigError(f"empty seed range {spec!r}")
        return list(range(a, b + 1))
    if m := re.fullmatch(r"(\d+)\s*@\s*(\d+)", spec):
        count, base = int(m[1]), int(m[2])
        if count < 1:
            raise ConfigError("seed count must be >= 1")
        return list(range(base, base + count))
    try:
        seeds = [int(s) for s in spec.split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"bad seed spec {spec!r}") from None
    if not seeds or min(seeds) < 0:
        raise ConfigError(f"bad seed spec {spec!r}")
    return seeds


def default_out_dir() -> Path:
    return Path(os.environ.get(OUT_DIR_ENV, "."))


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    n: int
    seeds: tuple[int, ...]
    algorithm: str = "potential"
    C: float = 1.0
    lam: float | None = None
    out: Path | None = None
    format: str = "csv"
    # tightness fixture shape
    height: int = 4
    arity: int = 4
    # facts-check sample count, tightness path samples
    samples: int | None = None
    timing: bool = False
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "seeds", tuple(self.seeds))
        self.validate()

    def validate(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown kind {self.kind!r}; choose from {', '.join(KINDS)}")
        if self.algorithm not in _ALLOWED[self.kind]:
            raise ConfigError(f"algorithm {self.algorithm!r} not available for kind {self.kind!r}")
        if self.n < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")
        if self.kind in ("interval", "stripe", "envy", "tightness", "facts-check") and self.n < 4:
            raise ConfigError(f"kind {self.kind!r} needs n >= 4")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if self.lam is not None and not self.lam > 0:
            raise ConfigError(f"lambda must be positive, got {self.lam}")
        if not self.C > 0:
            raise ConfigError(f"C must be positive, got {self.C}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.height < 1 or self.arity < 2:
            raise ConfigError("tightness fixture needs height >= 1 and arity >= 2")
        if self.samples is not None and self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
