"""SL(2,Z) acting on the 2-torus, and the torus with periodic orbits blown up.

Blowing up a periodic point replaces it by the projective line of directions
through it. A sequence of regular points converges to the fiber point (b, l)
when it converges to b and its chord directions from b converge to l.

Generator words use ``s``/``S`` for S and S^-1 and ``t``/``T`` for T and T^-1,
with S = [[0,-1],[1,0]] and T = [[1,1],[0,1]].
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np


@dataclass(frozen=True)
class IntMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.det != 1:
            raise ValueError(f"determinant {self.det} != 1; not in SL(2,Z)")

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "IntMatrix":
        return IntMatrix(self.d, -self.b, -self.c, self.a)

    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.a, self.b), (self.c, self.d))

    def to_array(self) -> np.ndarray:
        return np.array(self.rows(), dtype=np.float64)


IDENTITY = IntMatrix(1, 0, 0, 1)
S = IntMatrix(0, -1, 1, 0)
T = IntMatrix(1, 1, 0, 1)
GENERATORS: dict[str, IntMatrix] = {"s": S, "S": S.inverse(), "t": T, "T": T.inverse()}
GENERATOR_ORDER = "sStT"


def matrix_of_word(word: str) -> IntMatrix:
    """Product M = g1 g2 ... gL; applying M means applying gL first."""
    out = IDENTITY
    for ch in word:
        out = out @ GENERATORS[_gen(ch)]
    return out


def _gen(ch: str) -> str:
    if ch not in GENERATORS:
        raise ValueError(f"unknown generator {ch!r}; use s, S, t, T")
    return ch


@dataclass(frozen=True, order=True)
class TorusPointRational:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x) % 1)
        object.__setattr__(self, "y", Fraction(self.y) % 1)

    @property
    def denominator(self) -> int:
        return math.lcm(self.x.denominator, self.y.denominator)

    def as_floats(self) -> tuple[float, float]:
        return float(self.x), float(self.y)

    def __str__(self) -> str:
        return f"({self.x},{self.y})"


@dataclass(frozen=True)
class TorusPointReal:
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x) % 1.0)
        object.__setattr__(self, "y", float(self.y) % 1.0)

    def as_floats(self) -> tuple[float, float]:
        return self.x, self.y


TorusPoint = Union[TorusPointRational, TorusPointReal]


def apply_torus(M: IntMatrix, p: TorusPoint) -> TorusPoint:
    x, y = p.x, p.y
    return type(p)(M.a * x + M.b * y, M.c * x + M.d * y)


# -- periodic orbits ---------------------------------------------------------


@dataclass(frozen=True)
class PeriodicOrbit:
    points: tuple[TorusPointRational, ...]

    @classmethod
    def of(cls, pts: Iterable[TorusPointRational]) -> "PeriodicOrbit":
        return cls(tuple(sorted(set(pts))))

    def __contains__(self, p) -> bool:
        return p in self._index

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def _index(self) -> dict[TorusPointRational, int]:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {p: i for i, p in enumerate(self.points)}
            object.__setattr__(self, "_idx", idx)
        return idx

    def index(self, p: TorusPointRational) -> int:
        return self._index[p]

    @property
    def denominator(self) -> int:
        return max(p.denominator for p in self.points)


def enumerate_orbit(p: TorusPointRational) -> PeriodicOrbit:
    """Breadth-first closure of {p} under S, T and their inverses."""
    seen = {p}
    queue = deque([p])
    while queue:
        cur = queue.popleft()
        for M in GENERATORS.values():
            nxt = apply_torus(M, cur)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return PeriodicOrbit.of(seen)


def rational_points(q: int) -> list[TorusPointRational]:
    """Points with exact denominator q, lexicographic by numerators."""
    return [
        TorusPointRational(Fraction(i, q), Fraction(j, q))
        for i in range(q)
        for j in range(q)
        if math.gcd(math.gcd(i, j), q) == 1
    ]


def enumerate_periodic_orbits(count: int) -> list[PeriodicOrbit]:
    """First ``count`` orbits, ordered by denominator, then lexicographically."""
    out: list[PeriodicOrbit] = []
    seen: set[TorusPointRational] = set()
    q = 1
    while len(out) < count:
        for p in rational_points(q):
            if p not in seen:
                orb = enumerate_orbit(p)
                seen.update(orb.points)
                out.append(orb)
                if len(out) == count:
                    break
        q += 1
    return out


# -- projective lines --------------------------------------------------------


@dataclass(frozen=True)
class ProjLine:
    """A line through the origin, stored as a unit vector with first nonzero entry > 0."""

    u: float
    v: float

    def __post_init__(self):
        u, v = float(self.u), float(self.v)
        r = math.hypot(u, v)
        if r == 0 or not math.isfinite(r):
            raise ValueError("a line needs a nonzero finite direction")
        u, v = u / r, v / r
        if u < 0 or (u == 0 and v < 0):
            u, v = -u, -v
        object.__setattr__(self, "u", u + 0.0)
        object.__setattr__(self, "v", v + 0.0)

    @property
    def angle(self) -> float:
        """Angle in [0, pi)."""
        return math.atan2(self.v, self.u) % math.pi

    def embed(self) -> tuple[float, float]:
        """(cos 2theta, sin 2theta): a continuous injective image of P^1 in the plane."""
        th = 2 * self.angle
        return math.cos(th), math.sin(th)


def apply_proj(M: IntMatrix, line: ProjLine) -> ProjLine:
    return ProjLine(M.a * line.u + M.b * line.v, M.c * line.u + M.d * line.v)


def line_angle(l1: ProjLine, l2: ProjLine) -> float:
    """Angle between two lines, in [0, pi/2]."""
    return math.acos(min(1.0, abs(l1.u * l2.u + l1.v * l2.v)))


# -- the blown-up space ------------------------------------------------------


class RegularOnBlownOrbit(ValueError):
    """A regular point sits exactly on a blown-up orbit; it must be a fiber point."""


@dataclass(frozen=True)
class Regular:
    point: TorusPoint


@dataclass(frozen=True)
class Fiber:
    orbit_id: int
    base: TorusPointRational
    line: ProjLine


BlowupPoint = Union[Regular, Fiber]


@dataclass
class BlowupSpace:
    """Torus with the registered periodic orbits blown up; fibers over orbit n have diameter 2^-n.

    Only finitely many orbits are registered; invariance and witness checks
    are per orbit so the truncation does not affect them.
    """

    orbits: list[PeriodicOrbit]
    cutoff: float = 0.25
    _tables: dict = field(default_factory=dict, repr=False)

    @classmethod
    def first(cls, count: int = 2, **kw) -> "BlowupSpace":
        return cls(enumerate_periodic_orbits(count), **kw)

    def epsilon(self, n: int) -> float:
        return 2.0**-n

    def orbit_of(self, p: TorusPointRational) -> Optional[int]:
        for n, orb in enumerate(self.orbits):
            if p in orb:
                return n
        return None

    def fiber(self, base: TorusPointRational, line: ProjLine) -> Fiber:
        n = self.orbit_of(base)
        if n is None:
            raise ValueError(f"{base} is not on a registered orbit")
        return Fiber(n, base, line)

    def permutation_table(self, n: int) -> np.ndarray:
        """table[g, i] = index of generator g applied to point i of orbit n (exact).

        Raises ValueError if some generator leaves the orbit.
        """
        if n not in self._tables:
            orb = self.orbits[n]
            table = np.empty((4, len(orb)), dtype=np.int64)
            for gi, ch in enumerate(GENERATOR_ORDER):
                for i, p in enumerate(orb.points):
                    image = apply_torus(GENERATORS[ch], p)
                    if image not in orb:
                        raise ValueError(f"orbit {n} not closed: {ch}{p} = {image}")
                    table[gi, i] = orb.index(image)
            self._tables[n] = table
        return self._tables[n]


def _exact_torus_point(p: TorusPoint) -> TorusPointRational:
    return p if isinstance(p, TorusPointRational) else TorusPointRational(Fraction(p.x), Fraction(p.y))


def apply_blowup(M: IntMatrix, p: BlowupPoint, space: BlowupSpace) -> BlowupPoint:
    if isinstance(p, Regular):
        if space.orbit_of(_exact_torus_point(p.point)) is not None:
            raise RegularOnBlownOrbit(f"{p.point} lies on a blown-up orbit")
        return Regular(apply_torus(M, p.point))
    return Fiber(p.orbit_id, apply_torus(M, p.base), apply_proj(M, p.line))


def factor_map(p: BlowupPoint) -> TorusPoint:
    return p.point if isinstance(p, Regular) else p.base


def torus_displacement(p: tuple[float, float], q: tuple[float, float]) -> tuple[float, float]:
    """Shortest vector from p to q on R^2/Z^2."""
    dx = (q[0] - p[0] + 0.5) % 1.0 - 0.5
    dy = (q[1] - p[1] + 0.5) % 1.0 - 0.5
    return dx, dy


def torus_distance(p: tuple[float, float], q: tuple[float, float]) -> float:
    return math.hypot(*torus_displacement(p, q))


def _blowup_coordinate(p: BlowupPoint, b: TorusPointRational, cutoff: float) -> tuple[float, float]:
    # Continuous map X -> closed unit disc: the embedded line for points of the
    # fiber over b, the chord direction scaled by (1 - r/cutoff)+ elsewhere.
    if isinstance(p, Fiber) and p.base == b:
        return p.line.embed()
    here = factor_map(p).as_floats()
    dx, dy = torus_displacement(b.as_floats(), here)
    r = math.hypot(dx, dy)
    if r >= cutoff:
        return 0.0, 0.0
    if r == 0:
        # only reachable for Regular points aliasing b, which are rejected upstream
        raise RegularOnBlownOrbit(f"{here} coincides with blown-up point {b}")
    w = 1.0 - r / cutoff
    e = ProjLine(dx, dy).embed()
    return w * e[0], w * e[1]


def blowup_metric(p: BlowupPoint, q: BlowupPoint, space: BlowupSpace) -> float:
    """Torus distance of the bases plus, for each orbit n, eps_n times the largest
    half-distance between blow-up coordinates at its points.

    Each summand is a pseudometric, so the sum satisfies the triangle
    inequality; base distance separates different bases and the fiber term
    separates lines over a common base. Orthogonal lines in one fiber are at
    distance exactly eps_n.
    """
    if p == q:
        return 0.0
    d = torus_distance(factor_map(p).as_floats(), factor_map(q).as_floats())
    for n, orb in enumerate(space.orbits):
        worst = 0.0
        for b in orb.points:
            u = _blowup_coordinate(p, b, space.cutoff)
            v = _blowup_coordinate(q, b, space.cutoff)
            worst = max(worst, 0.5 * math.hypot(u[0] - v[0], u[1] - v[1]))
        d += space.epsilon(n) * worst
    return d


# -- invariance checks -------------------------------------------------------


MatrixLike = Union[IntMatrix, Sequence[Sequence[int]]]


def _rows(M: MatrixLike) -> tuple[tuple[int, int], tuple[int, int]]:
    if isinstance(M, IntMatrix):
        return M.rows()
    (a, b), (c, d) = M
    return (int(a), int(b)), (int(c), int(d))


@dataclass
class InvarianceReport:
    passed: bool
    checked: int
    failures: list = field(default_factory=list)

    def as_record(self) -> dict:
        return {"passed": self.passed, "checked": self.checked, "failures": [str(f) for f in self.failures[:10]]}


def check_lebesgue_invariance(M: MatrixLike, max_freq: int) -> InvarianceReport:
    """Lebesgue measure is M-invariant iff every nonzero character pulls back to a nonzero one.

    chi_k(Mx) = chi_{kM}(x), and a character integrates to 0 unless its index is 0.
    Accepts any integer matrix so that degenerate fixtures can be checked too.
    """
    (a, b), (c, d) = _rows(M)
    rep = InvarianceReport(True, 0)
    for m in range(-max_freq, max_freq + 1):
        for n in range(-max_freq, max_freq + 1):
            if m == 0 and n == 0:
                continue
            rep.checked += 1
            if m * a + n * c == 0 and m * b + n * d == 0:
                rep.failures.append((m, n))
    rep.passed = not rep.failures
    return rep


def check_orbit_measure_invariance(orbit: Iterable[TorusPointRational]) -> InvarianceReport:
    """Uniform measure on a finite set is invariant iff each generator permutes the set."""
    pts = set(orbit)
    rep = InvarianceReport(True, 0)
    for ch in GENERATOR_ORDER:
        image = {apply_torus(GENERATORS[ch], p) for p in pts}
        rep.checked += 1
        if image != pts:
            rep.failures.append(ch)
    rep.passed = not rep.failures
    return rep


# -- non-minimality witness --------------------------------------------------


@dataclass
class WitnessReport:
    stays_in_fiber: bool
    orbit_id: int
    steps: int
    visited_bases: list

    def as_record(self) -> dict:
        return {
            "stays_in_fiber": self.stays_in_fiber,
            "orbit_id": self.orbit_id,
            "steps": self.steps,
            "visited_bases": sorted(str(b) for b in set(self.visited_bases)),
        }


def nonminimality_witness(space: BlowupSpace, word: str, start: Fiber) -> WitnessReport:
    """Apply the letters of ``word`` one at a time and check every point stays
    a fiber point over the same registered orbit.

    The union of fibers over one periodic orbit is closed, invariant and
    proper, so a passing report exhibits a non-dense orbit.
    """
    if not isinstance(start, Fiber):
        raise TypeError("start must be a Fiber point")
    orb = space.orbits[start.orbit_id]
    p: BlowupPoint = start
    ok = start.base in orb
    visited = [start.base]
    for ch in word:
        p = apply_blowup(GENERATORS[_gen(ch)], p, space)
        ok = ok and isinstance(p, Fiber) and p.orbit_id == start.orbit_id and p.base in orb
        visited.append(p.base)
    return WitnessReport(ok, start.orbit_id, len(word), visited)


def nonminimality_witness_batch(
    space: BlowupSpace, words: np.ndarray, start: Fiber
) -> tuple[bool, np.ndarray, np.ndarray]:
    """Vectorized witness for many words (rows of generator indices into ``sStT``).

    Bases move by the exact permutation table of the orbit; building the table
    is the closure check. Returns (all stayed, final base indices, final lines
    as unit vectors).
    """
    table = space.permutation_table(start.orbit_id)  # raises if not closed
    orb = space.orbits[start.orbit_id]
    n_words, length = words.shape
    idx = np.full(n_words, orb.index(start.base), dtype=np.int64)
    mats = np.stack([GENERATORS[ch].to_array() for ch in GENERATOR_ORDER])
    vec = np.tile([start.line.u, start.line.v], (n_words, 1))
    for k in range(length):
        g = words[:, k]
        idx = table[g, idx]
        vec = np.einsum("nij,nj->ni", mats[g], vec)
        vec /= np.linalg.norm(vec, axis=1, keepdims=True)
    stayed = bool(np.all((idx >= 0) & (idx < len(orb))))
    return stayed, idx, vec


def random_words(seed: int, count: int, length: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.integers(0, 4, size=(count, length), dtype=np.int64)


def word_text(row: Iterable[int]) -> str:
    return "".join(GENERATOR_ORDER[int(i)] for i in row)


# -- equidistribution evidence ----------------------------------------------


def character_walk_average(
    seed: int,
    steps: int,
    start: Union[TorusPointReal, TorusPointRational],
    char_index: tuple[int, int],
    walk_m: Optional[Sequence[Fraction]] = None,
) -> float:
    """|mean of exp(2 pi i (m x_k + n y_k))| along a random walk x_{k+1} = g_k x_k, k = 1..steps.

    Float coordinates lose the true orbit after a few dozen hyperbolic steps;
    the average is statistical evidence only. A rational start stays exact.
    """
    m, n = char_index
    if m == 0 and n == 0:
        raise ValueError("the trivial character is excluded")
    weights = [Fraction(1, 4)] * 4 if walk_m is None else [Fraction(w) for w in walk_m]
    if sum(weights) != 1 or any(w < 0 for w in weights):
        raise ValueError("walk weights must be a probability vector on s, S, t, T")
    rng = np.random.Generator(np.random.PCG64(seed))
    cdf = np.cumsum([float(w) for w in weights])
    gens = np.searchsorted(cdf, rng.random(steps), side="right").clip(0, 3)
    mats = [GENERATORS[ch] for ch in GENERATOR_ORDER]
    exact = isinstance(start, TorusPointRational)
    x, y = start.x, start.y
    total = 0j
    for g in gens.tolist():
        M = mats[g]
        x, y = (M.a * x + M.b * y) % 1, (M.c * x + M.d * y) % 1
        phase = 2 * math.pi * float((m * x + n * y) % 1 if exact else m * x + n * y)
        total += complex(math.cos(phase), math.sin(phase))
    return abs(total) / steps
