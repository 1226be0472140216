"""Exact geometric kernel.

Points and lines of the complex plane with Gaussian-rational
coordinates, their incidence and intersection predicates, and the
identification of the complex plane with real 4-space that turns a
complex line into an affine 2-flat.

Every predicate here is exact: coordinates are Fractions and nothing in
this module touches floating point.  Incidence is an equality test, so
rounding anywhere would silently corrupt downstream counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

Rational = Fraction

RationalLike = Union[Fraction, int]


class GeometryError(ValueError):
    """Contract violation in the exact kernel."""


class IdenticalLines(GeometryError):
    pass


class EqualPoints(GeometryError):
    pass


class DegenerateFlat(GeometryError):
    pass


def _frac(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError("expected int or Fraction, got %s" % type(x).__name__)


@dataclass(frozen=True)
class GaussianRational:
    """A complex number with rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", _frac(self.re))
        object.__setattr__(self, "im", _frac(self.im))

    def __add__(self, other: "GaussianRational") -> "GaussianRational":
        other = as_gaussian(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other: "GaussianRational") -> "GaussianRational":
        other = as_gaussian(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other) -> "GaussianRational":
        return as_gaussian(other).__sub__(self)

    def __mul__(self, other) -> "GaussianRational":
        other = as_gaussian(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "GaussianRational":
        other = as_gaussian(other)
        q = other.abs2()
        if q == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / q,
            (self.im * other.re - self.re * other.im) / q,
        )

    def __rtruediv__(self, other) -> "GaussianRational":
        return as_gaussian(other).__truediv__(self)

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Squared modulus, an exact nonnegative rational."""
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def sort_key(self) -> Tuple[Fraction, Fraction]:
        return (self.re, self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        return "GaussianRational(%s, %s)" % (self.re, self.im)


def as_gaussian(x) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(_frac(x), Fraction(0))
    if isinstance(x, tuple) and len(x) == 2:
        return GaussianRational(_frac(x[0]), _frac(x[1]))
    raise TypeError("cannot interpret %r as GaussianRational" % (x,))


GR_ZERO = GaussianRational(0, 0)
GR_ONE = GaussianRational(1, 0)
GR_I = GaussianRational(0, 1)


@dataclass(frozen=True)
class ComplexPoint:
    z1: GaussianRational
    z2: GaussianRational

    def __post_init__(self) -> None:
        object.__setattr__(self, "z1", as_gaussian(self.z1))
        object.__setattr__(self, "z2", as_gaussian(self.z2))

    def sort_key(self):
        return self.z1.sort_key() + self.z2.sort_key()


@dataclass(frozen=True)
class ComplexLine:
    """A complex line, either y = a*x + b (slope a) or vertical x = c.

    The canonical parametrization keeps equality structural: a slanted
    line is never representable as a vertical one and vice versa, so
    dicts and sets can hash lines directly.
    """

    a: Optional[GaussianRational]  # None marks the vertical case
    b: GaussianRational  # intercept, or the abscissa c when vertical

    def __post_init__(self) -> None:
        if self.a is not None:
            object.__setattr__(self, "a", as_gaussian(self.a))
        object.__setattr__(self, "b", as_gaussian(self.b))

    @classmethod
    def slanted(cls, a, b) -> "ComplexLine":
        return cls(as_gaussian(a), as_gaussian(b))

    @classmethod
    def vertical(cls, c) -> "ComplexLine":
        return cls(None, as_gaussian(c))

    @property
    def is_vertical(self) -> bool:
        return self.a is None

    @property
    def c(self) -> GaussianRational:
        if not self.is_vertical:
            raise GeometryError("slanted line has no vertical abscissa")
        return self.b

    def sort_key(self):
        if self.is_vertical:
            return (1,) + self.b.sort_key() + (Fraction(0), Fraction(0))
        return (0,) + self.a.sort_key() + self.b.sort_key()


def incident(p: ComplexPoint, l: ComplexLine) -> bool:
    """Exact membership of a point on a complex line."""
    if l.is_vertical:
        return p.z1 == l.b
    return p.z2 == l.a * p.z1 + l.b


def intersect_lines(l1: ComplexLine, l2: ComplexLine) -> Optional[ComplexPoint]:
    """Common point of two distinct complex lines, or None when parallel.

    Raises IdenticalLines when the canonical forms coincide.
    """
    if l1 == l2:
        raise IdenticalLines("lines coincide")
    if l1.is_vertical and l2.is_vertical:
        return None  # distinct verticals are parallel
    if l1.is_vertical:
        return ComplexPoint(l1.b, l2.a * l1.b + l2.b)
    if l2.is_vertical:
        return ComplexPoint(l2.b, l1.a * l2.b + l1.b)
    if l1.a == l2.a:
        return None  # equal slopes, distinct intercepts
    z1 = (l2.b - l1.b) / (l1.a - l2.a)
    return ComplexPoint(z1, l1.a * z1 + l1.b)


def line_through(p: ComplexPoint, q: ComplexPoint) -> ComplexLine:
    """The unique complex line incident to two distinct points."""
    if p == q:
        raise EqualPoints("points coincide")
    if p.z1 == q.z1:
        return ComplexLine.vertical(p.z1)
    a = (q.z2 - p.z2) / (q.z1 - p.z1)
    return ComplexLine.slanted(a, p.z2 - a * p.z1)


# -- real 4-space ----------------------------------------------------------


@dataclass(frozen=True)
class RVector4:
    x1: Fraction
    x2: Fraction
    x3: Fraction
    x4: Fraction

    def __post_init__(self) -> None:
        for name in ("x1", "x2", "x3", "x4"):
            object.__setattr__(self, name, _frac(getattr(self, name)))

    @classmethod
    def of(cls, coords: Sequence[RationalLike]) -> "RVector4":
        if len(coords) != 4:
            raise ValueError("RVector4 needs 4 coordinates")
        return cls(*[_frac(c) for c in coords])

    def as_tuple(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.x1, self.x2, self.x3, self.x4)

    def __add__(self, o: "RVector4") -> "RVector4":
        return RVector4(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3, self.x4 + o.x4)

    def __sub__(self, o: "RVector4") -> "RVector4":
        return RVector4(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3, self.x4 - o.x4)

    def scale(self, k: RationalLike) -> "RVector4":
        k = _frac(k)
        return RVector4(self.x1 * k, self.x2 * k, self.x3 * k, self.x4 * k)

    def dot(self, o: "RVector4") -> Fraction:
        return self.x1 * o.x1 + self.x2 * o.x2 + self.x3 * o.x3 + self.x4 * o.x4

    def norm2(self) -> Fraction:
        return self.dot(self)


def _rank_of_rows(rows) -> int:
    """Rank of a small rational matrix by fraction-exact elimination."""
    m = [list(r) for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    col = 0
    while rank < len(m) and col < ncols:
        piv = None
        for r in range(rank, len(m)):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pv = m[rank][col]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col] / pv
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        rank += 1
        col += 1
    return rank


@dataclass(frozen=True)
class Flat2:
    """An affine 2-flat of R^4 given by a base point and two directions.

    Two Flat2 values compare equal iff they describe the same affine
    flat, irrespective of the chosen base and spanning vectors.
    """

    base: RVector4
    dir1: RVector4
    dir2: RVector4

    def __post_init__(self) -> None:
        if _rank_of_rows([self.dir1.as_tuple(), self.dir2.as_tuple()]) != 2:
            raise DegenerateFlat("spanning directions are dependent")

    def contains(self, v: RVector4) -> bool:
        d = v - self.base
        return (
            _rank_of_rows(
                [self.dir1.as_tuple(), self.dir2.as_tuple(), d.as_tuple()]
            )
            == 2
        )

    def same_direction(self, other: "Flat2") -> bool:
        rows = [
            self.dir1.as_tuple(),
            self.dir2.as_tuple(),
            other.dir1.as_tuple(),
            other.dir2.as_tuple(),
        ]
        return _rank_of_rows(rows) == 2

    def __eq__(self, other) -> bool:
        if not isinstance(other, Flat2):
            return NotImplemented
        return self.same_direction(other) and self.contains(other.base)

    __hash__ = None  # geometric equality is incompatible with field hashing


def embed_r4(p: ComplexPoint) -> RVector4:
    """tau: (z1, z2) -> (Re z1, Im z1, Re z2, Im z2)."""
    return RVector4(p.z1.re, p.z1.im, p.z2.re, p.z2.im)


def embed_flat(l: ComplexLine) -> Flat2:
    """Image of a complex line under the identification with R^4.

    A point lies on the flat iff the corresponding complex point is
    incident to the line.
    """
    if l.is_vertical:
        return Flat2(
            RVector4(l.b.re, l.b.im, Fraction(0), Fraction(0)),
            RVector4(0, 0, 1, 0),
            RVector4(0, 0, 0, 1),
        )
    a = l.a
    return Flat2(
        RVector4(Fraction(0), Fraction(0), l.b.re, l.b.im),
        RVector4(Fraction(1), Fraction(0), a.re, a.im),
        RVector4(Fraction(0), Fraction(1), -a.im, a.re),
    )


@dataclass(frozen=True)
class FlatMeet:
    """Classification of the intersection of two affine 2-flats."""

    kind: str  # "point" | "empty" | "line" | "coincide"
    point: Optional[RVector4] = None

    POINT = "point"
    EMPTY = "empty"
    LINE = "line"
    COINCIDE = "coincide"


def flat_intersect(f1: Flat2, f2: Flat2) -> FlatMeet:
    """Exact classification of the intersection of two 2-flats in R^4.

    Solves base1 + s*d1 + t*d2 = base2 + u*e1 + v*e2 by rational
    elimination and classifies by rank and consistency.
    """
    d1, d2 = f1.dir1.as_tuple(), f1.dir2.as_tuple()
    e1, e2 = f2.dir1.as_tuple(), f2.dir2.as_tuple()
    rhs = (f2.base - f1.base).as_tuple()
    # augmented system rows: [d1 d2 -e1 -e2 | rhs]
    aug = [
        [d1[i], d2[i], -e1[i], -e2[i], rhs[i]]
        for i in range(4)
    ]
    m = [row[:] for row in aug]
    pivots = []
    rank = 0
    for col in range(4):
        piv = None
        for r in range(rank, 4):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pv = m[rank][col]
        m[rank] = [x / pv for x in m[rank]]
        for r in range(4):
            if r != rank and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        pivots.append(col)
        rank += 1
    for r in range(rank, 4):
        if m[r][4] != 0:
            return FlatMeet(FlatMeet.EMPTY)
    if rank == 4:
        sol = [Fraction(0)] * 4
        for r, col in enumerate(pivots):
            sol[col] = m[r][4]
        s, t = sol[0], sol[1]
        pt = f1.base + f1.dir1.scale(s) + f1.dir2.scale(t)
        return FlatMeet(FlatMeet.POINT, pt)
    if rank == 3:
        return FlatMeet(FlatMeet.LINE)
    # rank 2 and consistent: identical direction spaces and shared point
    return FlatMeet(FlatMeet.COINCIDE)
