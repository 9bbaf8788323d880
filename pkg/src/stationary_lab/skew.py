"""Bernoulli-driven skew product X = {0,1}^Z x Z over the F2 boundary.

Generators act by

    a(w, z)    = (shift w,    a^{w_0} z)
    a^-1(w, z) = (shift^-1 w, a^{-w_{-1}} z)

and likewise for b, so the bit under the "driving coordinate" (0 for a, b and
-1 for their inverses) decides whether the boundary coordinate moves. The
measure nu_t is Bernoulli(t) on bits times the harmonic measure on Z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import product
from typing import Iterable, Optional, Union

import numpy as np

from .boundary import (
    LOG3,
    UNIFORM,
    Cylinder,
    EntropyValue,
    InsufficientDepth,
    StationarityReport,
    StepDistribution,
    act_boundary_max,
    cylinders_of_depth,
    cylinders_up_to,
    entropy_boundary_exact,
    eta,
    preimage_cylinder,
    rn_exponent,
)
from .walk import MeanAccumulator, make_rng, sample_harmonic_prefixes
from .words import LETTERS, Letter, ReducedWord

Rational = Union[Fraction, int]

#: Coordinate of w read by the action of each generator.
ACT_COORD = {Letter.a: 0, Letter.b: 0, Letter.A: -1, Letter.B: -1}
#: Shift applied to w by each generator.
SHIFT = {Letter.a: 1, Letter.b: 1, Letter.A: -1, Letter.B: -1}
#: Coordinate that decides the derivative d(g nu)/d nu at a point. It is the
#: action coordinate of g^-1, read at g^-1 p, pulled back to p.
RN_COORD = {Letter.a: -1, Letter.b: -1, Letter.A: 0, Letter.B: 0}


class OutOfRange(ValueError):
    """Requested entropy lies outside [0, h_max]."""


def bernoulli_param(t) -> Fraction:
    t = Fraction(t)
    if not 0 <= t <= 1:
        raise ValueError(f"Bernoulli parameter {t} outside [0, 1]")
    return t


def _extension_bit(seed: int, coord: int, t) -> int:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, coord + (1 << 62)])))
    if isinstance(t, Fraction):
        return int(rng.integers(t.denominator) < t.numerator)
    return int(rng.random() < t)


@dataclass(frozen=True)
class BinaryWindow:
    """Finite stored stretch of w in {0,1}^Z with deterministic lazy extension.

    Stored bits live at absolute positions ``lo .. lo+len(bits)-1``; the
    current view reads coordinate j at absolute position ``j + offset``, so
    shifting only moves ``offset``. Reads outside the stored stretch draw a
    Bernoulli(t) bit from (extension_seed, absolute position), which makes
    them repeatable.
    """

    bits: tuple[int, ...] = ()
    lo: int = 0
    offset: int = 0
    extension_seed: int = 0
    t: Union[Fraction, float] = Fraction(1, 2)

    @classmethod
    def from_bits(cls, bits: dict[int, int], **kw) -> "BinaryWindow":
        lo, hi = min(bits), max(bits)
        missing = set(range(lo, hi + 1)) - set(bits)
        if missing:
            raise ValueError(f"window has gaps at {sorted(missing)}")
        return cls(tuple(int(bits[j]) for j in range(lo, hi + 1)), lo, **kw)

    @property
    def hi(self) -> int:
        return self.lo + len(self.bits) - 1

    def covers(self, j: int) -> bool:
        return self.lo <= j + self.offset <= self.hi

    def __getitem__(self, j: int) -> int:
        a = j + self.offset
        if self.lo <= a <= self.hi:
            return self.bits[a - self.lo]
        return _extension_bit(self.extension_seed, a, self.t)

    def shift(self, k: int = 1) -> "BinaryWindow":
        """View of shift^k w, where (shift w)_j = w_{j+1}."""
        return replace(self, offset=self.offset + k)

    def view(self) -> dict[int, int]:
        """Stored bits in current view coordinates."""
        return {a - self.offset: b for a, b in zip(range(self.lo, self.hi + 1), self.bits)}


@dataclass(frozen=True)
class SkewPoint:
    omega: BinaryWindow
    z: ReducedWord


@dataclass(frozen=True)
class ProductCylinder:
    """Finitely many constraints w_j = bit, times a boundary cylinder."""

    omega: tuple[tuple[int, int], ...] = ()
    z: Cylinder = field(default_factory=Cylinder)

    def __post_init__(self):
        items = self.omega.items() if isinstance(self.omega, dict) else self.omega
        items = tuple(sorted((int(j), int(b)) for j, b in items))
        coords = [j for j, _ in items]
        if len(set(coords)) != len(coords):
            raise ValueError("duplicate coordinate constraints")
        if any(b not in (0, 1) for _, b in items):
            raise ValueError("bits must be 0 or 1")
        object.__setattr__(self, "omega", items)

    @property
    def constraints(self) -> dict[int, int]:
        return dict(self.omega)

    def contains(self, p: SkewPoint) -> bool:
        return all(p.omega[j] == b for j, b in self.omega) and self.z.contains(p.z)

    def __str__(self) -> str:
        bits = ",".join(f"w{j}={b}" for j, b in self.omega)
        return f"[{bits}]x{self.z}"


def act_skew(g: Letter, p: SkewPoint) -> SkewPoint:
    """Apply one generator. The boundary prefix is kept as long as it stays determined."""
    g = Letter(g)
    bit = p.omega[ACT_COORD[g]]
    z = act_boundary_max(ReducedWord([g]), p.z) if bit else p.z
    return SkewPoint(p.omega.shift(SHIFT[g]), z)


def act_skew_word(w: ReducedWord, p: SkewPoint) -> SkewPoint:
    """Apply w = g1 g2 ... gL as g1(g2(...(gL p)))."""
    for g in reversed(list(w)):
        p = act_skew(g, p)
    return p


def _mu(constraints: Iterable[tuple[int, int]], t: Fraction) -> Fraction:
    out = Fraction(1)
    for _, b in constraints:
        out *= t if b else 1 - t
    return out


def nu_measure(pc: ProductCylinder, t: Rational) -> Fraction:
    t = bernoulli_param(t)
    return _mu(pc.omega, t) * eta(pc.z)


def preimage_product_cylinder(g: Letter, pc: ProductCylinder) -> list[ProductCylinder]:
    """Disjoint product cylinders whose union is {p : g p in pc}."""
    g = Letter(g)
    s, drive = SHIFT[g], ACT_COORD[g]
    # (shift^s w)_j = w_{j+s}
    moved = {j + s: b for j, b in pc.omega}
    out = []
    for bit in (0, 1):
        if moved.get(drive, bit) != bit:
            continue
        cons = dict(moved)
        cons[drive] = bit
        zs = preimage_cylinder(ReducedWord([g]), pc.z) if bit else [pc.z]
        out.extend(ProductCylinder(tuple(cons.items()), z) for z in zs)
    return out


def preimage_product_word(w: ReducedWord, pc: ProductCylinder) -> list[ProductCylinder]:
    """{p : w p in pc} for w acting letter by letter (rightmost letter first)."""
    pieces = [pc]
    for g in w:
        pieces = [q for piece in pieces for q in preimage_product_cylinder(g, piece)]
    return pieces


def _omega_patterns(depth: int):
    coords = range(-depth, depth + 1)
    for choice in product((None, 0, 1), repeat=len(coords)):
        yield tuple((j, b) for j, b in zip(coords, choice) if b is not None)


def check_stationarity_skew(
    t: Rational, depth: int, m: StepDistribution = UNIFORM
) -> StationarityReport:
    """Exact check of sum_g m(g) nu_t(g^-1 A) = nu_t(A).

    A ranges over product cylinders with boundary depth <= depth and any
    partial assignment of bits on coordinates -depth..depth.

    Works on integers over the common denominator
    lcm(m) * den(t)^(2 depth + 2) * 4 * 3^depth. Each g^-1 A splits on the
    decisive bit exactly as in ``preimage_product_cylinder``; only the bit
    counts and the boundary masses are needed, so those are cached.
    """
    t = bernoulli_param(t)
    if depth < 1:
        raise ValueError("depth must be >= 1")
    p, q = t.numerator, t.denominator
    max_bits = 2 * depth + 2
    eta_scale = 4 * 3**depth
    mu_s = [[p**n1 * (q - p) ** n0 * q ** (max_bits - n1 - n0) for n0 in range(max_bits + 1)]
            for n1 in range(max_bits + 1)]
    gens = [(g, w) for g, w in m.items()]
    lcm_m = math.lcm(*(w.denominator for _, w in gens))
    m_s = {g: int(w * lcm_m) for g, w in gens}

    zcyls = list(cylinders_up_to(depth))
    eta_s = {c: int(eta(c) * eta_scale) for c in zcyls}
    pre_s = {
        (g, c): sum(int(eta(piece) * eta_scale) for piece in preimage_cylinder(ReducedWord([g]), c))
        for g, _ in gens
        for c in zcyls
    }

    report = StationarityReport(passed=True, checked=0)
    for pattern in _omega_patterns(depth):
        n1 = sum(b for _, b in pattern)
        n0 = len(pattern) - n1
        # per generator: (weight for z unchanged, weight for z pulled back)
        branches = []
        for g, _ in gens:
            s, drive = SHIFT[g], ACT_COORD[g]
            fixed = next((b for j, b in pattern if j + s == drive), None)
            stay = mu_s[n1][n0 + 1] if fixed is None else (mu_s[n1][n0] if fixed == 0 else 0)
            move = mu_s[n1 + 1][n0] if fixed is None else (mu_s[n1][n0] if fixed == 1 else 0)
            branches.append((m_s[g], g, stay, move))
        base = lcm_m * mu_s[n1][n0]
        for zc in zcyls:
            lhs = sum(w * (stay * eta_s[zc] + move * pre_s[g, zc]) for w, g, stay, move in branches)
            rhs = base * eta_s[zc]
            report.checked += 1
            if lhs != rhs:
                residual = Fraction(abs(lhs - rhs), lcm_m * q**max_bits * eta_scale)
                if residual > report.worst_residual:
                    report.worst = ProductCylinder(pattern, zc)
                    report.worst_residual = residual
    report.passed = report.worst_residual == 0
    return report


def rn_exponent_skew(g: Letter, p: SkewPoint) -> int:
    """k with d(g nu_t)/d nu_t (p) = 3**k, for 0 < t <= 1."""
    g = Letter(g)
    if len(p.z) < 1:
        raise InsufficientDepth("boundary prefix must have length >= 1")
    if not p.omega[RN_COORD[g]]:
        return 0
    return rn_exponent(ReducedWord([g]), p.z)


def rn_exponent_skew_word(w: ReducedWord, p: SkewPoint) -> int:
    """Exponent for a word via k(gh, p) = k(g, p) + k(h, g^-1 p)."""
    total = 0
    for g in w:
        total += rn_exponent_skew(g, p)
        p = act_skew(g.inverse, p)
    return total


def boundary_entropy_coefficient(m: StepDistribution = UNIFORM) -> Fraction:
    return entropy_boundary_exact(m).coefficient


def entropy_skew_exact(t: Rational, m: StepDistribution = UNIFORM) -> EntropyValue:
    """Exact entropy of (X, nu_t) as a multiple of log 3.

    The derivative of each generator is constant on the 8 cells
    {decisive bit} x {first boundary letter}, so the integral is a finite sum.
    """
    t = bernoulli_param(t)
    q = Fraction(0)
    for g, w in m.items():
        for bit in (0, 1):
            weight = t if bit else 1 - t
            for c in cylinders_of_depth(1):
                k = rn_exponent(ReducedWord([g]), c.prefix) if bit else 0
                q -= w * weight * eta(c) * k
    return EntropyValue(q)


def skew_integrand(
    bit_back: np.ndarray, bit_here: np.ndarray, first: np.ndarray, m: StepDistribution = UNIFORM
) -> np.ndarray:
    """-sum_g m(g) k(g, p) log 3 from bits w_{-1}, w_0 and the first boundary letter."""
    acc = np.zeros(len(first), dtype=np.float64)
    for g, w in m.items():
        bits = bit_back if RN_COORD[g] == -1 else bit_here
        k = np.where(first == int(g), 1.0, -1.0) * bits
        acc -= float(w) * k
    return acc * LOG3


def entropy_skew_mc(
    t,
    samples: int,
    seed: int,
    m: StepDistribution = UNIFORM,
    chunk: int = 250_000,
) -> tuple[float, float]:
    """Monte Carlo entropy of nu_t; returns (estimate, std_error).

    Chunk c draws from substream (seed, c + 1); chunk statistics are merged
    in index order, so the result depends only on (t, samples, seed, chunk).
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    tf = float(t)
    if not 0 <= tf <= 1:
        raise ValueError(f"Bernoulli parameter {t} outside [0, 1]")
    acc = MeanAccumulator()
    for c, start in enumerate(range(0, samples, chunk)):
        size = min(chunk, samples - start)
        rng = make_rng(seed, c + 1)
        bits = (rng.random((2, size)) < tf).astype(np.float64)
        first = sample_harmonic_prefixes(rng, size, 1)[:, 0]
        acc = acc.merge(MeanAccumulator.of(skew_integrand(bits[0], bits[1], first, m)))
    return acc.mean, acc.std_error


def realize_entropy(q: Rational, m: StepDistribution = UNIFORM) -> Fraction:
    """Bernoulli parameter t whose skew product has entropy q * log 3."""
    q = Fraction(q)
    top = boundary_entropy_coefficient(m)
    if not 0 <= q <= top:
        raise OutOfRange(f"coefficient {q} outside [0, {top}]")
    return q / top


def entropy_record(
    t, coefficient: Optional[Fraction], value: float, method: str,
    samples: Optional[int] = None, std_error: Optional[float] = None, seed: Optional[int] = None,
) -> dict:
    return {
        "t": None if t is None else str(t),
        "coefficient_num": None if coefficient is None else coefficient.numerator,
        "coefficient_den": None if coefficient is None else coefficient.denominator,
        "value_float": value,
        "method": method,
        "samples": samples,
        "std_error": std_error,
        "seed": seed,
    }


# -- ergodicity diagnostic (statistical only) --------------------------------


def sample_skew_point(
    rng: np.random.Generator, t, half_width: int, z_depth: int, extension_seed: int = 0
) -> SkewPoint:
    bits = tuple(int(b) for b in (rng.random(2 * half_width + 1) < float(t)))
    omega = BinaryWindow(bits, -half_width, 0, extension_seed, t)
    z = ReducedWord._trusted(tuple(sample_harmonic_prefixes(rng, 1, z_depth)[0].tolist()))
    return SkewPoint(omega, z)


def birkhoff_diagnostic(t, seed: int, steps: int, z_depth: int = 64) -> dict[str, float]:
    """Averages of two observables along one random-walk orbit p, g1 p, g2 g1 p, ...

    For a stationary ergodic measure these converge to the nu_t-means
    (t for the bit w_0, 1/4 for "z starts with a").
    """
    rng = make_rng(seed)
    p = sample_skew_point(rng, t, steps + 1, z_depth, extension_seed=seed)
    gens = rng.integers(0, 4, size=steps)
    bit_sum = first_a = 0
    for g in gens.tolist():
        p = act_skew(LETTERS[g], p)
        if len(p.z) > 2 * z_depth:
            # a shorter prefix of the same point; keeps steps O(1)
            p = SkewPoint(p.omega, p.z.prefix(z_depth))
        bit_sum += p.omega[0]
        first_a += p.z.letters[0] == Letter.a
    return {"mean_bit": bit_sum / steps, "mean_first_a": first_a / steps}
