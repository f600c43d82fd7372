"""Z_n arithmetic: gcd classes, unit subgroups, and subgroup projection.

The interesting structure lives in the multiplicative group Z_n^x and its
subgroups.  Subgroup enumeration is certificate-style closure search rather
than structure theory; at the size bound (n <= 512 by default) that is plenty.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import gcd

from .errors import LemmaViolation, SizeBoundExceeded

DEFAULT_MAX_N = 512


def units(n: int) -> list[int]:
    return [a for a in range(1, n) if gcd(a, n) == 1]


def proper_divisors(n: int) -> list[int]:
    return [d for d in range(1, n) if n % d == 0]


def _is_unit_subgroup(n: int, members) -> bool:
    ms = set(members)
    if 1 not in ms:
        return False
    for a in ms:
        if gcd(a, n) != 1 or not 0 < a < n:
            return False
        for b in ms:
            if (a * b) % n not in ms:
                return False
    return True


@dataclass(frozen=True)
class RingSpec:
    """Z_n together with a chosen multiplicative subgroup G of Z_n^x."""

    n: int
    G: tuple[int, ...]

    kind = "ring"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        object.__setattr__(self, "G", tuple(sorted(set(int(g) for g in self.G))))
        if not _is_unit_subgroup(self.n, self.G):
            raise ValueError(f"G = {self.G} is not a subgroup of Z_{self.n}^x")

    @property
    def size(self) -> int:
        return self.n

    def elements(self):
        return range(self.n)

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.n

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.n

    def neg(self, a: int) -> int:
        return (-a) % self.n

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.n

    def render(self, a: int) -> str:
        return str(a)

    def describe(self) -> str:
        return f"Z_{self.n}"

    def to_json(self) -> dict:
        return {"n": self.n, "G": list(self.G)}

    @classmethod
    def from_json(cls, obj: dict) -> "RingSpec":
        return cls(obj["n"], tuple(obj["G"]))


@dataclass(frozen=True)
class GcdClass:
    """All a in Z_n with gcd(a, n) = d, for a proper divisor d."""

    d: int
    members: tuple[int, ...]


def gcd_classes(n: int) -> list[GcdClass]:
    """One class per proper divisor, ascending by d.  {0} is not a class
    (gcd(0, n) = n is not proper) and is reported separately by callers."""
    if n < 2:
        raise ValueError("n must be >= 2")
    buckets: dict[int, list[int]] = {}
    for a in range(1, n):
        buckets.setdefault(gcd(a, n), []).append(a)
    return [GcdClass(d, tuple(buckets.get(d, ()))) for d in proper_divisors(n)]


def enumerate_subgroups(n: int, max_n: int = DEFAULT_MAX_N) -> list[tuple[int, ...]]:
    """All subgroups of Z_n^x, canonically ordered by (size, members).

    Breadth-first closure: every known subgroup is extended by every unit and
    closed under multiplication; duplicates are dropped.  Since Z_n^x is
    abelian, <H, x> = union of the cosets H, Hx, Hx^2, ...
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if n > max_n:
        raise SizeBoundExceeded(f"n = {n} exceeds enumeration bound {max_n}")
    us = units(n)
    trivial = frozenset([1])
    found = {trivial}
    queue = [trivial]
    while queue:
        H = queue.pop()
        for x in us:
            if x in H:
                continue
            K = set(H)
            y = x
            while y not in K:
                K.update((h * y) % n for h in H)
                y = (y * x) % n
            K = frozenset(K)
            if K not in found:
                found.add(K)
                queue.append(K)
    return sorted((tuple(sorted(H)) for H in found), key=lambda t: (len(t), t))


@dataclass(frozen=True)
class ProjectionReport:
    """G_n mod d collapsed to a subgroup of Z_d^x with uniform multiplicity."""

    d: int
    base_subgroup: tuple[int, ...]
    multiplicity: int


def project_subgroup(spec: RingSpec, d: int) -> ProjectionReport:
    """Reduce the subgroup mod d (a divisor of n, d > 1).

    The residue multiset must be an exact k-fold cover of a subgroup of
    Z_d^x; anything else raises LemmaViolation, which signals a bug, not a
    property of the input.
    """
    if d <= 1 or spec.n % d != 0:
        raise ValueError(f"d = {d} must be a divisor of n = {spec.n} greater than 1")
    counts = Counter(g % d for g in spec.G)
    mults = set(counts.values())
    if len(mults) != 1:
        raise LemmaViolation(
            f"non-uniform cover: G mod {d} has multiplicities {sorted(mults)}"
        )
    base = tuple(sorted(counts))
    if not _is_unit_subgroup(d, base) and d > 1:
        raise LemmaViolation(f"G mod {d} = {base} is not a subgroup of Z_{d}^x")
    return ProjectionReport(d, base, mults.pop())
