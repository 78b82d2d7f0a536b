"""Rational frequency sets, major arcs and the level-s approximation points.

All arithmetic on fractions is exact (``fractions.Fraction``); floats enter
only through the query point lambda, which is converted exactly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import ParameterError, SizeError


def _gcd_all(*vals) -> int:
    g = 0
    for v in vals:
        g = math.gcd(g, int(v))
    return g


@dataclass(frozen=True, order=True)
class ReducedRational:
    a: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise ParameterError("denominator must be positive")
        if math.gcd(self.a, self.q) != 1:
            raise ParameterError(f"{self.a}/{self.q} is not in lowest terms")

    @property
    def value(self) -> Fraction:
        return Fraction(self.a, self.q)

    def __float__(self):
        return self.a / self.q

    def to_json(self) -> dict:
        return {"a": self.a, "q": self.q}


@dataclass(frozen=True, order=True)
class RationalFreqPoint:
    """(a/q, b/q) with gcd(a, b_1, ..., b_n, q) = 1 and 0 <= a, b_i < q."""

    q: int
    a: int
    b: tuple

    def __post_init__(self):
        b = tuple(int(v) for v in self.b)
        object.__setattr__(self, "b", b)
        if self.q < 1 or not (0 <= self.a < self.q) or any(not (0 <= v < self.q) for v in b):
            raise ParameterError(f"({self.a}, {b}) / {self.q} outside the canonical range")
        if _gcd_all(self.a, *b, self.q) != 1:
            raise ParameterError(f"gcd(a, b, q) != 1 for ({self.a}, {b}) / {self.q}")

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.a, self.q)

    @property
    def beta(self) -> tuple:
        return tuple(Fraction(v, self.q) for v in self.b)

    @property
    def beta_float(self) -> tuple:
        return tuple(v / self.q for v in self.b)

    @property
    def level(self) -> int:
        """The s with q in [2^(s-1), 2^s)."""
        return self.q.bit_length()

    def to_json(self) -> dict:
        return {"a": self.a, "b": list(self.b), "q": self.q}


def _check_level(s: int):
    if s < 1:
        raise ParameterError(f"level s must be >= 1, got {s}")


def enumerate_Rs(s: int, n: int = 1, budget: int = 10**6) -> list[RationalFreqPoint]:
    """All points of level s in dimension n, ordered by (q, a, b)."""
    _check_level(s)
    if n < 1:
        raise ParameterError("dimension must be >= 1")
    qs = range(2 ** (s - 1), 2**s)
    work = sum(q ** (n + 1) for q in qs)
    if work > budget:
        raise SizeError(f"enumerating level {s} in dimension {n} needs {work} candidates > budget {budget}")
    return list(_enumerate(s, n))


@lru_cache(maxsize=64)
def _enumerate(s, n):
    import itertools

    out = []
    for q in range(2 ** (s - 1), 2**s):
        for a in range(q):
            ga = math.gcd(a, q)
            for b in itertools.product(range(q), repeat=n):
                if _gcd_all(ga, *b) == 1:
                    out.append(RationalFreqPoint(q, a, b))
    return tuple(out)


def A_s(points) -> list[Fraction]:
    """Distinct alpha values among the points, sorted."""
    return sorted({p.alpha for p in points})


def B_s(points, alpha) -> list[RationalFreqPoint]:
    """Points whose alpha equals ``alpha`` (as a rational number)."""
    alpha = Fraction(alpha)
    return [p for p in points if p.alpha == alpha]


def alpha_set(s: int) -> frozenset:
    """A_s for any n >= 1: every a/q with q in [2^(s-1), 2^s) and 0 <= a < q."""
    _check_level(s)
    return _alpha_set(s)


@lru_cache(maxsize=64)
def _alpha_set(s):
    return frozenset(Fraction(a, q) for q in range(2 ** (s - 1), 2**s) for a in range(q))


# -- major arcs ------------------------------------------------------------

@dataclass(frozen=True)
class MajorArcParams:
    eps1: float
    j: int
    d: int = 1

    def __post_init__(self):
        if self.d < 1:
            raise ParameterError("degree d must be >= 1")
        if not (0 < self.eps1 <= 1.0 / (4 * self.d)):
            raise ParameterError(f"eps1 must lie in (0, 1/(4d)] = (0, {1 / (4 * self.d)}], got {self.eps1}")
        if self.j < 0:
            raise ParameterError("scale index j must be >= 0")

    @property
    def max_denominator(self) -> int:
        """floor(2^(eps1 j)), at least 1."""
        return max(1, int(math.floor(2.0 ** (self.eps1 * self.j) + 1e-12)))

    @property
    def radius(self) -> float:
        return 2.0 ** (-2 * self.d * self.j + self.eps1 * self.j)


def major_arc_membership(lam: float, p: MajorArcParams) -> ReducedRational | None:
    """Closest reduced a/q with q <= 2^(eps1 j) if within the arc radius, else None.

    The best approximation with bounded denominator comes from the
    continued-fraction convergents and semiconvergents of lambda
    (``Fraction.limit_denominator``).
    """
    x = Fraction(lam)
    best = x.limit_denominator(p.max_denominator)
    if abs(x - best) <= Fraction(p.radius):
        return ReducedRational(best.numerator, best.denominator)
    return None


def farey_scan(lam: float, p: MajorArcParams) -> ReducedRational | None:
    """Exhaustive oracle: scan all reduced a/q, q <= max_denominator, near lambda."""
    x = Fraction(lam)
    radius = Fraction(p.radius)
    best, dist = None, None
    lo, hi = math.floor(x) - 1, math.ceil(x) + 1
    for q in range(1, p.max_denominator + 1):
        for a in range(lo * q, hi * q + 1):
            if math.gcd(a, q) != 1:
                continue
            d = abs(x - Fraction(a, q))
            if dist is None or d < dist:
                best, dist = (a, q), d
    if dist is not None and dist <= radius:
        return ReducedRational(*best)
    return None


def wrap_unit(x: Fraction) -> Fraction:
    """Representative of x mod 1 in [-1/2, 1/2)."""
    return x - math.floor(x + Fraction(1, 2))


def alpha_of_x(lam: float, s: int) -> Fraction | None:
    """The unique alpha in A_s within 2^(-3s) of lambda mod 1, else None."""
    _check_level(s)
    x = Fraction(lam)
    radius = Fraction(1, 2 ** (3 * s))
    found = None
    for q in range(2 ** (s - 1), 2**s):
        a0 = math.floor(x * q)
        for a in (a0 - 1, a0, a0 + 1, a0 + 2):
            if abs(wrap_unit(x - Fraction(a, q))) <= radius:
                cand = Fraction(a % q, q)
                if found is not None and found != cand:
                    raise ParameterError(f"two level-{s} centres within 2^(-3s) of {lam}")
                found = cand
    return found


def arc_table(p: MajorArcParams) -> list[dict]:
    """The arcs [a/q - radius, a/q + radius] meeting [0, 1]."""
    rows = []
    for q in range(1, p.max_denominator + 1):
        for a in range(0, q + 1):
            if math.gcd(a, q) == 1:
                c = a / q
                rows.append({"a": a, "q": q, "center": c, "lo": c - p.radius, "hi": c + p.radius})
    rows.sort(key=lambda r: (r["center"], r["q"]))
    return rows


def write_csv(rows: list[dict], path) -> None:
    if not rows:
        open(path, "w").close()
        return
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        w.writeheader()
        w.writerows(rows)
