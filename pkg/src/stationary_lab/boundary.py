"""The boundary of F2: right-infinite reduced words with the harmonic measure.

Boundary points are never materialized; every operation takes a finite
prefix and states how deep it must be. Measures are exact ``Fraction``s and
Radon-Nikodym derivatives are integer exponents of 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional

from .words import (
    IDENTITY,
    LETTERS,
    Letter,
    ReducedWord,
    cancellation,
    common_prefix_len,
    inverse,
    multiply,
    words_of_length,
    words_up_to,
)

LOG3 = math.log(3.0)


class InsufficientDepth(ValueError):
    """A boundary prefix is too short for the requested computation; extend it."""


@dataclass(frozen=True, order=True)
class Cylinder:
    """C(u1..un): boundary words starting with ``prefix``; the empty prefix is all of Z."""

    prefix: ReducedWord = IDENTITY

    @property
    def depth(self) -> int:
        return len(self.prefix)

    def contains(self, xi: ReducedWord) -> bool:
        """Whether every boundary word extending ``xi`` lies in the cylinder."""
        if len(xi) < self.depth:
            raise InsufficientDepth(f"prefix {xi} shorter than cylinder depth {self.depth}")
        return xi.startswith(self.prefix)

    def children(self) -> list["Cylinder"]:
        last = self.prefix.letters[-1] if self.depth else None
        return [
            Cylinder(self.prefix.extend(x))
            for x in LETTERS
            if last is None or x != last ^ 1
        ]

    def __str__(self) -> str:
        return f"C({self.prefix})"


def cylinders_of_depth(n: int) -> Iterable[Cylinder]:
    return (Cylinder(w) for w in words_of_length(n))


def cylinders_up_to(n: int) -> Iterable[Cylinder]:
    return (Cylinder(w) for w in words_up_to(n))


@dataclass(frozen=True)
class StepDistribution:
    """A step law m on the four generators, exact rational weights."""

    weights: Mapping[Letter, Fraction] = field(
        default_factory=lambda: {x: Fraction(1, 4) for x in LETTERS}
    )

    def __post_init__(self):
        w = {Letter(k): Fraction(v) for k, v in self.weights.items()}
        if any(v < 0 for v in w.values()):
            raise ValueError("step weights must be nonnegative")
        if sum(w.values()) != 1:
            raise ValueError(f"step weights sum to {sum(w.values())}, not 1")
        object.__setattr__(self, "weights", {x: w.get(x, Fraction(0)) for x in LETTERS})

    def items(self):
        return ((x, p) for x, p in self.weights.items() if p)

    def probabilities(self) -> list[float]:
        return [float(self.weights[x]) for x in LETTERS]

    def __hash__(self):
        return hash(tuple(self.weights[x] for x in LETTERS))


UNIFORM = StepDistribution()


@dataclass(frozen=True)
class EntropyValue:
    """An entropy h = coefficient * log 3 (natural log)."""

    coefficient: Fraction

    @property
    def value(self) -> float:
        return float(self.coefficient) * LOG3


def eta(c: Cylinder) -> Fraction:
    n = c.depth
    if n == 0:
        return Fraction(1)
    return Fraction(1, 4 * 3 ** (n - 1))


def eta_union(cs: Iterable[Cylinder]) -> Fraction:
    return sum((eta(c) for c in cs), Fraction(0))


def act_boundary(g: ReducedWord, prefix: ReducedWord, out_depth: int) -> ReducedWord:
    """First ``out_depth`` letters of ``g·z`` for any boundary word z extending ``prefix``."""
    if len(prefix) < out_depth + len(g):
        raise InsufficientDepth(
            f"need prefix length >= {out_depth + len(g)}, got {len(prefix)}"
        )
    return multiply(g, prefix).prefix(out_depth)


def act_boundary_max(g: ReducedWord, prefix: ReducedWord) -> ReducedWord:
    """The longest prefix of ``g·z`` determined by ``prefix``.

    Determined exactly when cancellation leaves at least one letter of the
    prefix; then ``g·prefix`` is itself the answer.
    """
    c = cancellation(g, prefix)
    if c >= len(prefix) and len(g) > 0:
        raise InsufficientDepth(f"{g} cancels all of prefix {prefix}")
    return multiply(g, prefix)


def _translate_restricted(r: ReducedWord, forbid: Optional[int]) -> list[Cylinder]:
    # Cylinders partitioning {r·z : z in Z, z_1 != forbid}.
    out: list[Cylinder] = []
    last = r.letters[-1] if len(r) else None
    for x in LETTERS:
        if x == forbid:
            continue
        if last is not None and x == last ^ 1:
            # r·(x z'') = r[:-1]·z'' where z''_1 != inverse(x) = last
            out.extend(_translate_restricted(r.prefix(len(r) - 1), last))
        else:
            out.append(Cylinder(r.extend(x)))
    return out


def translate_cylinder(h: ReducedWord, c: Cylinder) -> list[Cylinder]:
    """Disjoint cylinders whose union is the image ``h·C``."""
    if c.depth == 0:
        return [Cylinder()]
    u = c.prefix
    k = cancellation(h, u)
    if k < len(u):
        return [Cylinder(multiply(h, u))]
    # u is swallowed: h = r·u^-1, tails z' of C avoid inverse(u_n) = h[len(r)]
    r = h.prefix(len(h) - len(u))
    return _translate_restricted(r, h.letters[len(r)])


def preimage_cylinder(g: ReducedWord, c: Cylinder) -> list[Cylinder]:
    """Disjoint cylinders whose union is {z : g·z in C}."""
    return translate_cylinder(inverse(g), c)


def rn_exponent(g: ReducedWord, xi_prefix: ReducedWord) -> int:
    """k with d(g eta)/d eta (xi) = 3**k.

    Cocycle rule in this convention: ``k(gh, xi) = k(g, xi) + k(h, g^-1 xi)``.
    """
    if len(xi_prefix) < len(g):
        raise InsufficientDepth(f"need prefix length >= {len(g)}, got {len(xi_prefix)}")
    return 2 * common_prefix_len(g, xi_prefix) - len(g)


@dataclass
class StationarityReport:
    passed: bool
    checked: int
    worst: Optional[object] = None
    worst_residual: Fraction = Fraction(0)

    def as_record(self) -> dict:
        return {
            "passed": self.passed,
            "checked": self.checked,
            "worst": None if self.worst is None else str(self.worst),
            "worst_residual": str(self.worst_residual),
        }


def check_stationarity(depth: int, m: StepDistribution = UNIFORM) -> StationarityReport:
    """Exact check of sum_g m(g) eta(g^-1 C) = eta(C) for all cylinders of depth <= depth."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    gens = [(ReducedWord([x]), p) for x, p in m.items()]
    report = StationarityReport(passed=True, checked=0)
    for c in cylinders_up_to(depth):
        lhs = sum((p * eta_union(preimage_cylinder(g, c)) for g, p in gens), Fraction(0))
        residual = abs(lhs - eta(c))
        report.checked += 1
        if residual > report.worst_residual:
            report.worst, report.worst_residual = c, residual
    report.passed = report.worst_residual == 0
    return report


def entropy_boundary_exact(
    m: StepDistribution = UNIFORM,
    exponent: Callable[[ReducedWord, ReducedWord], int] = rn_exponent,
) -> EntropyValue:
    """m-entropy of (Z, eta) as an exact multiple of log 3.

    For a single-letter g the exponent is constant on depth-1 cylinders, so
    the integral is a finite sum.
    """
    q = Fraction(0)
    for x, p in m.items():
        g = ReducedWord([x])
        for c in cylinders_of_depth(1):
            q -= p * eta(c) * exponent(g, c.prefix)
    return EntropyValue(q)
