"""Exact incidence counting and the counting applications built on it.

The counting engine keeps two routes to the same number: a full
point-by-line predicate sweep, and an indexed path that groups points
by line-evaluation keys.  Both are exact; the sweep is the baseline the
indexed path is checked against.  The sweep drops to plain integer
arithmetic whenever every coordinate is integral, which is what makes
million-pair brute-force runs affordable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Set, Tuple

from .exact import (
    ComplexLine,
    ComplexPoint,
    GaussianRational,
    GeometryError,
    incident,
    line_through,
)


class DuplicateInput(GeometryError):
    pass


class ZeroElement(GeometryError):
    pass


class TooSmallPattern(GeometryError):
    pass


@dataclass(frozen=True)
class IncidenceReport:
    I: int
    n: int
    e: int
    st_bound: float  # C * n^(2/3) e^(2/3) + 3n + 3e
    ratio: float  # I / st_bound, 0 when the bound degenerates
    violated: bool


@dataclass(frozen=True)
class RichLine:
    line: ComplexLine
    count: int


def _check_unique(items: Iterable, what: str) -> None:
    seen = set()
    for it in items:
        if it in seen:
            raise DuplicateInput("duplicate %s: %r" % (what, it))
        seen.add(it)


def _all_integral(points: Sequence[ComplexPoint], lines: Sequence[ComplexLine]) -> bool:
    for p in points:
        for f in (p.z1.re, p.z1.im, p.z2.re, p.z2.im):
            if f.denominator != 1:
                return False
    for l in lines:
        coeffs = (l.b.re, l.b.im) if l.is_vertical else (l.a.re, l.a.im, l.b.re, l.b.im)
        for f in coeffs:
            if f.denominator != 1:
                return False
    return True


def count_naive(points: Sequence[ComplexPoint], lines: Sequence[ComplexLine]) -> int:
    """Full n*e sweep of the incidence predicate, exact."""
    if _all_integral(points, lines):
        pts = [
            (p.z1.re.numerator, p.z1.im.numerator, p.z2.re.numerator, p.z2.im.numerator)
            for p in points
        ]
        total = 0
        for l in lines:
            if l.is_vertical:
                cr, ci = l.b.re.numerator, l.b.im.numerator
                for x1, y1, _, _ in pts:
                    if x1 == cr and y1 == ci:
                        total += 1
            else:
                ar, ai = l.a.re.numerator, l.a.im.numerator
                br, bi = l.b.re.numerator, l.b.im.numerator
                for x1, y1, x2, y2 in pts:
                    if x2 == ar * x1 - ai * y1 + br and y2 == ar * y1 + ai * x1 + bi:
                        total += 1
        return total
    pts = [(p.z1.re, p.z1.im, p.z2.re, p.z2.im) for p in points]
    total = 0
    for l in lines:
        if l.is_vertical:
            cr, ci = l.b.re, l.b.im
            for x1, y1, _, _ in pts:
                if x1 == cr and y1 == ci:
                    total += 1
        else:
            ar, ai = l.a.re, l.a.im
            br, bi = l.b.re, l.b.im
            for x1, y1, x2, y2 in pts:
                if x2 == ar * x1 - ai * y1 + br and y2 == ar * y1 + ai * x1 + bi:
                    total += 1
    return total


def count_indexed(points: Sequence[ComplexPoint], lines: Sequence[ComplexLine]) -> int:
    """Group points by line-evaluation keys, one pass per distinct slope.

    For slope a the key of a point is z2 - a*z1; a line y = a*x + b
    then carries exactly the points whose key equals b.  Verticals key
    on z1.  Cost is O(n * #slopes + e) instead of O(n * e).
    """
    # integer-tuple keys: hashing Fractions costs a modular inverse each,
    # plain int tuples do not
    def key_of(g: GaussianRational):
        return (g.re.numerator, g.re.denominator, g.im.numerator, g.im.denominator)

    slopes: Set[GaussianRational] = set()
    has_vertical = False
    for l in lines:
        if l.is_vertical:
            has_vertical = True
        else:
            slopes.add(l.a)
    tables: Dict[object, Dict[object, int]] = {}
    for a in slopes:
        tab: Dict[object, int] = {}
        for p in points:
            k = key_of(p.z2 - a * p.z1)
            tab[k] = tab.get(k, 0) + 1
        tables[key_of(a)] = tab
    vert_tab: Dict[object, int] = {}
    if has_vertical:
        for p in points:
            k = key_of(p.z1)
            vert_tab[k] = vert_tab.get(k, 0) + 1
    total = 0
    for l in lines:
        if l.is_vertical:
            total += vert_tab.get(key_of(l.b), 0)
        else:
            total += tables[key_of(l.a)].get(key_of(l.b), 0)
    return total


def count_incidences(
    points: Sequence[ComplexPoint],
    lines: Sequence[ComplexLine],
    C: float = 1e70,
    method: str = "indexed",
) -> IncidenceReport:
    """Exact incidence count of a duplicate-free system, plus the bound."""
    _check_unique(points, "point")
    _check_unique(lines, "line")
    if method == "indexed":
        count = count_indexed(points, lines)
    elif method == "naive":
        count = count_naive(points, lines)
    else:
        raise ValueError("unknown method %r" % method)
    n, e = len(points), len(lines)
    bound = C * (n ** (2.0 / 3.0)) * (e ** (2.0 / 3.0)) + 3.0 * n + 3.0 * e
    ratio = count / bound if bound > 0 else 0.0
    return IncidenceReport(count, n, e, bound, ratio, violated=count > bound)


def rich_lines(points: Sequence[ComplexPoint], t: int) -> List[RichLine]:
    """Every complex line incident to at least t input points, t >= 2.

    Enumerates lines through point pairs, deduplicates on canonical
    form, and counts incident points per candidate by key grouping.
    Output is sorted by canonical form, so it is deterministic.
    """
    if t < 2:
        raise ValueError("t must be at least 2")
    _check_unique(points, "point")

    def key_of(g: GaussianRational):
        return (g.re.numerator, g.re.denominator, g.im.numerator, g.im.denominator)

    seen = set()
    by_slope: Dict[object, List[ComplexLine]] = {}
    n = len(points)
    for i in range(n):
        for j in range(i + 1, n):
            l = line_through(points[i], points[j])
            k = (None if l.is_vertical else key_of(l.a), key_of(l.b))
            if k in seen:
                continue
            seen.add(k)
            by_slope.setdefault(k[0], []).append(l)
    out: List[RichLine] = []
    for ka, group in by_slope.items():
        tab: Dict[object, int] = {}
        if ka is None:
            for p in points:
                pk = key_of(p.z1)
                tab[pk] = tab.get(pk, 0) + 1
        else:
            a = group[0].a
            for p in points:
                pk = key_of(p.z2 - a * p.z1)
                tab[pk] = tab.get(pk, 0) + 1
        for l in group:
            cnt = tab.get(key_of(l.b), 0)
            if cnt >= t:
                out.append(RichLine(l, cnt))
    out.sort(key=lambda r: r.line.sort_key())
    return out


@dataclass(frozen=True)
class RichBoundReport:
    t: int
    n: int
    rich_count: int
    bound: float  # c * (n^2/t^3 + n/t)
    violated: bool


def check_bounds(
    points: Sequence[ComplexPoint], lines: Sequence[ComplexLine], C: float
) -> IncidenceReport:
    return count_incidences(points, lines, C=C)


def check_rich_bound(points: Sequence[ComplexPoint], t: int, c: float) -> RichBoundReport:
    rich = rich_lines(points, t)
    n = len(points)
    bound = c * (n * n / t**3 + n / t)
    return RichBoundReport(t, n, len(rich), bound, violated=len(rich) > bound)


def beck_stats(points: Sequence[ComplexPoint]) -> Tuple[int, int]:
    """(number of connecting lines, max point count on one of them)."""
    if len(points) < 2:
        raise ValueError("need at least 2 points")
    rich = rich_lines(points, 2)
    return len(rich), max(r.count for r in rich)


def sum_product(
    values: Iterable[GaussianRational], allow_zero: bool = False
) -> Tuple[int, int]:
    """Exact |A+A| and |A*A| over all ordered pairs (x + x included).

    Strict mode rejects 0 in A; the relaxed variant tolerates it, which
    only matters for the product set.
    """
    a = list(values)
    _check_unique(a, "element")
    if not allow_zero and any(x.is_zero() for x in a):
        raise ZeroElement("0 is not allowed in strict mode")
    sums = set()
    prods = set()
    for i, x in enumerate(a):
        for y in a[i:]:
            sums.add(x + y)
            prods.add(x * y)
    return len(sums), len(prods)


def similar_copies(
    pattern: Sequence[GaussianRational], ground: Sequence[GaussianRational]
) -> int:
    """Number of subsets of ``ground`` similar to ``pattern``.

    Planar points are read as complex numbers; a similarity is
    z -> u*z + v with u != 0 (translation, rotation, scaling, no
    reflection).  Fix two pattern points; every ordered pair of ground
    points determines the candidate map, whose image is then tested
    against the ground set by exact hashed membership.  Copies are
    counted as unordered subsets.
    """
    if len(pattern) < 2:
        raise TooSmallPattern("pattern needs at least 2 points")
    _check_unique(pattern, "pattern point")
    _check_unique(ground, "ground point")
    a1, a2 = pattern[0], pattern[1]
    ground_set = set(ground)
    found: Set[frozenset] = set()
    for b1 in ground:
        for b2 in ground:
            if b1 == b2:
                continue
            u = (b2 - b1) / (a2 - a1)
            v = b1 - u * a1
            image = [u * x + v for x in pattern]
            if all(z in ground_set for z in image):
                found.add(frozenset(image))
    return len(found)
