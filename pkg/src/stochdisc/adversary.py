"""Adaptive and oblivious adversaries for online interval coloring, and the
stochastic probe for small adversarial patterns hiding inside uniform arrivals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .algorithms import Colorer
from .interval import Transcript, discrepancy_profile


class PrecisionExhausted(ArithmeticError):
    """The float gap between the last +1 and the first -1 collapsed."""


@dataclass
class AdaptiveAdversaryState:
    """lo: rightmost point colored +1 so far (0 if none); hi: leftmost -1 (1 if none)."""

    lo: Fraction | float = Fraction(0)
    hi: Fraction | float = Fraction(1)

    @classmethod
    def fresh(cls, exact: bool = True) -> "AdaptiveAdversaryState":
        if exact:
            return cls(Fraction(0), Fraction(1))
        return cls(0.0, 1.0)


def adaptive_next(state: AdaptiveAdversaryState):
    """Midpoint of the open gap between the +1 block and the -1 block."""
    mid = (state.lo + state.hi) / 2
    if not state.lo < mid < state.hi:
        raise PrecisionExhausted(f"no float strictly between {state.lo!r} and {state.hi!r}")
    return mid


def adaptive_observe(state: AdaptiveAdversaryState, position, sign: int) -> AdaptiveAdversaryState:
    if sign == 1:
        state.lo = position
    elif sign == -1:
        state.hi = position
    else:
        raise ValueError(f"sign must be -1 or +1, got {sign}")
    return state


@dataclass
class AdversaryRun:
    transcript: Transcript
    discrepancy: int


def _measure(positions, signs) -> int:
    return discrepancy_profile(positions, np.asarray(signs, dtype=np.int8)).running


def run_adaptive_game(algorithm: Colorer, n: int, exact: bool = True) -> AdversaryRun:
    """Play n rounds of the adaptive adversary against ``algorithm``.

    Positions are exact dyadic rationals by default; with ``exact=False``
    they are floats and the game raises PrecisionExhausted once midpoints
    stop being representable (typically after ~50 rounds).
    """
    state = AdaptiveAdversaryState.fresh(exact)
    positions, signs = [], []
    for _ in range(n):
        x = adaptive_next(state)
        s = algorithm.color(x)
        adaptive_observe(state, x, s)
        positions.append(x)
        signs.append(s)
    return AdversaryRun(Transcript(positions, signs), _measure(positions, signs))


@dataclass
class ObliviousScript:
    guesses: np.ndarray
    positions: list

    def __len__(self) -> int:
        return len(self.guesses)


def script_positions(guesses, exact: bool = True) -> list:
    """Positions the adaptive adversary would produce against the coloring ``guesses``.

    The i-th position only reads guesses[:i].
    """
    state = AdaptiveAdversaryState.fresh(exact)
    out = []
    for g in guesses:
        x = adaptive_next(state)
        out.append(x)
        adaptive_observe(state, x, int(g))
    return out


def build_oblivious_script(n: int, rng: np.random.Generator, exact: bool = True) -> ObliviousScript:
    if n < 1:
        raise ValueError("script length must be >= 1")
    guesses = (rng.integers(0, 2, n) * 2 - 1).astype(np.int8)
    return ObliviousScript(guesses, script_positions(guesses, exact))


def play_script(algorithm: Colorer, script: ObliviousScript) -> AdversaryRun:
    signs = [algorithm.color(x) for x in script.positions]
    return AdversaryRun(Transcript(script.positions, signs), _measure(script.positions, signs))


def run_oblivious_trials(
    make_algorithm: Callable[[ObliviousScript], Colorer],
    n: int,
    trials: int,
    rng: np.random.Generator,
    exact: bool = True,
) -> np.ndarray:
    """Running interval discrepancy of a fresh algorithm on each of ``trials`` fresh scripts."""
    out = np.empty(trials, dtype=np.int64)
    for k in range(trials):
        script = build_oblivious_script(n, rng, exact)
        out[k] = play_script(make_algorithm(script), script).discrepancy
    return out


class ReplayGuesses:
    """Test-only cheat that colors exactly as the script guessed."""

    name = "cheat"

    def __init__(self, script: ObliviousScript):
        self._it = iter(script.guesses.tolist())

    def color(self, x) -> int:
        return next(self._it)


# --- stochastic probe -----------------------------------------------------------


def follows_pattern(local, guesses) -> bool:
    """True when each point lands strictly between the last guessed +1 and first guessed -1."""
    lo, hi = 0.0, 1.0
    for u, g in zip(local, guesses):
        if not lo < u < hi:
            return False
        if g > 0:
            lo = u
        else:
            hi = u
    return True


@dataclass
class ProbeResult:
    n_pieces: int
    N: int
    guesses: np.ndarray
    pieces_with_N: np.ndarray  # per trial
    matches: np.ndarray  # per trial
    p_exact: float  # P(a given piece gets exactly N arrivals)
    pattern_prob: float  # P(N uniform points follow the pattern) = 1/N!
    subpiece_bound: float  # 2^(-N^2), the grid-pattern probability

    @property
    def expected_pieces(self) -> float:
        return self.n_pieces * self.p_exact

    @property
    def expected_matches(self) -> float:
        return self.expected_pieces * self.pattern_prob


def piece_probability(n: int, N: int) -> float:
    """C(n, N) (1/n)^N (1 - 1/n)^(n - N), evaluated in log space."""
    logp = (
        math.lgamma(n + 1)
        - math.lgamma(N + 1)
        - math.lgamma(n - N + 1)
        - N * math.log(n)
        + (n - N) * math.log1p(-1.0 / n)
    )
    return math.exp(logp)


def stochastic_lowerbound_probe(n_pieces: int, N: int, trials: int, rng: np.random.Generator) -> ProbeResult:
    """Drop n uniform points into n equal pieces and count pieces holding an adversarial pattern.

    A piece matches when it holds exactly N points which, in arrival order
    and rescaled to the piece, follow the adaptive-adversary pattern for a
    fixed guessed coloring.
    """
    if N < 1 or n_pieces < N:
        raise ValueError(f"need 1 <= N <= n_pieces, got N={N}, n_pieces={n_pieces}")
    guesses = (rng.integers(0, 2, N) * 2 - 1).astype(np.int8)
    with_n = np.zeros(trials, dtype=np.int64)
    matches = np.zeros(trials, dtype=np.int64)
    for k in range(trials):
        x = rng.random(n_pieces) * n_pieces
        piece = np.floor(x).astype(np.int64)
        local = x - piece
        counts = np.bincount(piece, minlength=n_pieces)
        with_n[k] = int(np.sum(counts == N))
        order = np.argsort(piece, kind="stable")  # arrival order kept within a piece
        starts = np.concatenate([[0], np.cumsum(counts)])
        for p in np.flatnonzero(counts == N):
            pts = local[order[starts[p] : starts[p + 1]]]
            matches[k] += follows_pattern(pts.tolist(), guesses.tolist())
    return ProbeResult(
        n_pieces,
        N,
        guesses,
        with_n,
        matches,
        piece_probability(n_pieces, N),
        1.0 / math.factorial(N),
        2.0 ** (-(N * N)),
    )
