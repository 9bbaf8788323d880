"""Seeded random walks on F2 and their boundary limits.

Steps multiply on the right (w_{k+1} = w_k * g), so prefixes of w_k settle
down and the walk converges to a boundary point. Every walk draws from its
own ``numpy.random.PCG64`` stream seeded through ``SeedSequence``; walk j of a
batch starting at ``first_seed`` is exactly ``sample_walk(first_seed + j, ...)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .boundary import (
    LOG3,
    UNIFORM,
    Cylinder,
    StepDistribution,
    cylinders_of_depth,
    eta,
)
from .words import LETTERS, ReducedWord

_INV = np.array([1, 0, 3, 2], dtype=np.int8)


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """PCG64 generator for (seed, stream); substreams are independent SeedSequence children."""
    if seed < 0:
        raise ValueError("seeds are nonnegative integers")
    if stream == 0:
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream])))


def draw_steps(rng: np.random.Generator, n: int, m: StepDistribution = UNIFORM) -> np.ndarray:
    if m == UNIFORM:
        return rng.integers(0, 4, size=n, dtype=np.int8)
    cdf = np.cumsum(m.probabilities())
    cdf[-1] = 1.0
    u = rng.random(n)
    steps = np.searchsorted(cdf, u, side="right").astype(np.int8)
    # zero-weight letters must never appear, even at float ties
    support = np.array([m.weights[x] > 0 for x in LETTERS])
    return np.where(support[steps], steps, np.argmax(support)).astype(np.int8)


@dataclass(frozen=True)
class WalkPath:
    """A sampled walk. Positions are reconstructed on demand from the step record."""

    steps: np.ndarray  # int8 letters
    lengths: np.ndarray  # |w_k| for k = 0..n
    seed: int
    final: ReducedWord

    @property
    def n(self) -> int:
        return len(self.steps)

    def position(self, k: int) -> ReducedWord:
        if not 0 <= k <= self.n:
            raise IndexError(k)
        if k == self.n:
            return self.final
        stack, _ = _run_stack(self.steps[:k])
        return ReducedWord._trusted(tuple(stack))

    def positions(self):
        """Yield w_0, ..., w_n (quadratic in n if materialized; iterate instead)."""
        stack: list[int] = []
        yield ReducedWord._trusted(())
        for x in self.steps.tolist():
            if stack and stack[-1] == x ^ 1:
                stack.pop()
            else:
                stack.append(x)
            yield ReducedWord._trusted(tuple(stack))


def _run_stack(steps: np.ndarray) -> tuple[list[int], np.ndarray]:
    stack: list[int] = []
    lengths = [0]
    push, pop = stack.append, stack.pop
    for x in steps.tolist():
        if stack and stack[-1] == x ^ 1:
            pop()
        else:
            push(x)
        lengths.append(len(stack))
    return stack, np.asarray(lengths, dtype=np.int64)


def sample_walk(seed: int, n: int, m: StepDistribution = UNIFORM) -> WalkPath:
    if n < 0:
        raise ValueError("n must be >= 0")
    steps = draw_steps(make_rng(seed), n, m)
    stack, lengths = _run_stack(steps)
    return WalkPath(steps, lengths, seed, ReducedWord._trusted(tuple(stack)))


@dataclass(frozen=True)
class PrefixStabilization:
    depth: int
    stable_from: int
    prefix: ReducedWord


@dataclass(frozen=True)
class NotStabilized:
    depth: int
    reason: str

    def __bool__(self) -> bool:
        return False


def default_window(n: int) -> int:
    return max(1, n // 10)


def _last_below(lengths: np.ndarray, bound: int) -> int:
    """Last index k with lengths[k] < bound, or -1."""
    low = np.flatnonzero(lengths < bound)
    return int(low[-1]) if len(low) else -1


def boundary_limit_prefix(
    path: WalkPath, depth: int, stability_window: Optional[int] = None
) -> Union[PrefixStabilization, NotStabilized]:
    """Depth-``depth`` prefix shared by all positions in the final window.

    Stabilized means |w_k| > depth throughout the window. Letters below the
    top of the stack only change when the walk backs over them, so the prefix
    is then fixed from ``stable_from`` = one past the last time |w_k| < depth.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if stability_window is None:
        stability_window = default_window(path.n)
    if stability_window > path.n:
        return NotStabilized(depth, "window longer than the walk")
    if _last_below(path.lengths, depth + 1) >= path.n - stability_window:
        return NotStabilized(depth, f"|w_k| <= {depth} inside the final {stability_window} steps")
    stable_from = _last_below(path.lengths, depth) + 1
    return PrefixStabilization(depth, stable_from, path.final.prefix(depth))


# -- batched walks ---------------------------------------------------------


@dataclass
class WalkBatch:
    """Final stacks of many independent walks of equal horizon."""

    first_seed: int
    stacks: np.ndarray  # (walks, n+1) int8; row j valid up to final_lengths[j]
    final_lengths: np.ndarray
    min_tail_lengths: np.ndarray  # min |w_k| over the final window

    def prefixes(self, depth: int) -> np.ndarray:
        return self.stacks[:, :depth]

    def stabilized(self, depth: int) -> np.ndarray:
        return self.min_tail_lengths > depth


def simulate_batch(
    walks: int,
    n: int,
    first_seed: int = 0,
    m: StepDistribution = UNIFORM,
    window: Optional[int] = None,
) -> WalkBatch:
    """Run ``walks`` walks of horizon n, seeds first_seed, first_seed+1, ...

    The stack update is vectorized across walks; per-walk step streams are
    identical to ``sample_walk`` so results do not depend on batching.
    """
    if window is None:
        window = default_window(n)
    steps = np.empty((walks, n), dtype=np.int8)
    for j in range(walks):
        steps[j] = draw_steps(make_rng(first_seed + j), n, m)
    stacks = np.zeros((walks, n + 1), dtype=np.int8)
    lengths = np.zeros(walks, dtype=np.int64)
    min_tail = np.full(walks, np.iinfo(np.int64).max, dtype=np.int64)
    rows = np.arange(walks)
    tail_start = n - window
    if tail_start <= 0:
        min_tail[:] = 0
    for k in range(n):
        x = steps[:, k]
        top = stacks[rows, np.maximum(lengths - 1, 0)]
        cancel = (lengths > 0) & (top == _INV[x])
        grow = ~cancel
        stacks[rows[grow], lengths[grow]] = x[grow]
        lengths += np.where(cancel, -1, 1)
        if k + 1 >= tail_start:
            np.minimum(min_tail, lengths, out=min_tail)
    return WalkBatch(first_seed, stacks, lengths.copy(), min_tail)


def empirical_cylinder_freq(
    seeds: int,
    n: int,
    depth: int,
    first_seed: int = 0,
    m: StepDistribution = UNIFORM,
    window: Optional[int] = None,
) -> tuple[dict[Cylinder, float], int]:
    """Frequencies of depth-``depth`` limit prefixes over stabilized walks.

    Returns (frequencies, number of stabilized walks). Cylinders that never
    occur are still listed with frequency 0.
    """
    batch = simulate_batch(seeds, n, first_seed, m, window)
    counts = prefix_counts(batch, depth)
    total = sum(counts.values())
    freq = {c: (k / total if total else 0.0) for c, k in counts.items()}
    return freq, total


def prefix_counts(batch: WalkBatch, depth: int) -> dict[Cylinder, int]:
    ok = batch.stabilized(depth)
    codes = _encode(batch.prefixes(depth)[ok])
    uniq, k = np.unique(codes, return_counts=True)
    found = dict(zip(uniq.tolist(), k.tolist()))
    out = {}
    for c in cylinders_of_depth(depth):
        out[c] = found.get(_encode(np.array([c.prefix.letters], dtype=np.int8))[0], 0)
    return out


def _encode(prefixes: np.ndarray) -> np.ndarray:
    codes = np.zeros(len(prefixes), dtype=np.int64)
    for col in range(prefixes.shape[1]):
        codes = codes * 4 + prefixes[:, col]
    return codes


def cylinder_z_scores(freq: dict[Cylinder, float], total: int) -> dict[Cylinder, float]:
    """(empirical - eta) / sqrt(eta (1 - eta) / N) per cylinder."""
    out = {}
    for c, f in freq.items():
        p = float(eta(c))
        sigma = math.sqrt(p * (1 - p) / total) if total else float("nan")
        out[c] = (f - p) / sigma if sigma else 0.0
    return out


def drift_estimate(seed: int, n: int, m: StepDistribution = UNIFORM) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    path = sample_walk(seed, n, m)
    return int(path.lengths[-1]) / n


def sample_harmonic_prefixes(rng: np.random.Generator, size: int, depth: int) -> np.ndarray:
    """Direct draws from eta restricted to depth-``depth`` prefixes.

    First letter uniform on four, each later letter uniform on the three
    letters that do not cancel. This is the exit law of the uniform walk; the
    walk-based estimators check it independently.
    """
    out = np.empty((size, depth), dtype=np.int8)
    if depth == 0:
        return out
    out[:, 0] = rng.integers(0, 4, size=size, dtype=np.int8)
    for j in range(1, depth):
        r = rng.integers(0, 3, size=size, dtype=np.int8)
        # skip over the cancelling letter
        banned = _INV[out[:, j - 1]]
        out[:, j] = r + (r >= banned)
    return out


@dataclass
class MeanAccumulator:
    """Mergeable running mean/variance (Chan et al. pairwise update)."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @classmethod
    def of(cls, values: np.ndarray) -> "MeanAccumulator":
        values = np.asarray(values, dtype=np.float64)
        if len(values) == 0:
            return cls()
        mu = float(values.mean())
        return cls(len(values), mu, float(((values - mu) ** 2).sum()))

    def merge(self, other: "MeanAccumulator") -> "MeanAccumulator":
        if other.count == 0:
            return MeanAccumulator(self.count, self.mean, self.m2)
        if self.count == 0:
            return MeanAccumulator(other.count, other.mean, other.m2)
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return MeanAccumulator(n, mean, m2)

    @property
    def std_error(self) -> float:
        if self.count < 2:
            return 0.0
        return math.sqrt(self.m2 / (self.count - 1) / self.count)


def boundary_integrand(first_letters: np.ndarray, m: StepDistribution = UNIFORM) -> np.ndarray:
    """-sum_g m(g) k(g, xi) log 3 for generators g, from the first letter of xi."""
    acc = np.zeros(len(first_letters), dtype=np.float64)
    for x, p in m.items():
        k = np.where(first_letters == int(x), 1.0, -1.0)
        acc -= float(p) * k
    return acc * LOG3


def entropy_boundary_mc(
    samples: int,
    seed: int,
    n: int = 200,
    window: Optional[int] = None,
    chunk: int = 20_000,
) -> tuple[float, float, int]:
    """Monte Carlo boundary entropy using walk limits as boundary samples.

    Walks that do not stabilize at depth 1 are discarded. Returns
    (estimate, std_error, used samples).
    """
    acc = MeanAccumulator()
    for start in range(0, samples, chunk):
        size = min(chunk, samples - start)
        batch = simulate_batch(size, n, seed + start, UNIFORM, window)
        ok = batch.stabilized(1)
        acc = acc.merge(MeanAccumulator.of(boundary_integrand(batch.prefixes(1)[ok, 0])))
    return acc.mean, acc.std_error, acc.count


def birth_death_drift(up: Fraction = Fraction(3, 4)) -> Fraction:
    """Speed of the length process away from 0: up - (1 - up)."""
    return up - (1 - up)
