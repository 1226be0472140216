"""Measurable direction-space diagnostics over point-line systems.

These operations probe how the directions of a system's lines sit on
the direction sphere: splitting the line set across the two closed
hemispheres bounded by the unit-modulus circle, classifying points by
how their incident lines distribute over the split, testing whether a
point's incident directions concentrate in a small disk around a
boundary direction, squeezing direction clusters along meridians until
arc quotas balance, one round of the bisecting-plane refinement, and
the final squeeze that carries two separated clusters onto a pair of
orthogonal directions.

They are diagnostics over arbitrary systems; no global minimality
assumptions are made or used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .exact import (
    ComplexLine,
    ComplexPoint,
    GaussianRational,
    GeometryError,
    Rational,
    _frac,
    line_through,
)
from .directions import (
    ComplexLinearMap,
    Direction,
    apply_mobius,
    direction_of,
    dist_deg,
    gamma_arg,
    pi_lambda,
    scaling_map,
    shear_map,
    to_sphere,
    unit_direction_from_angle,
)


class Unbalanceable(GeometryError):
    pass


class MonotonicityViolation(GeometryError):
    pass


class EmptySelection(GeometryError):
    pass


class TooClose(GeometryError):
    pass


class SplitFailed(GeometryError):
    pass


# -- systems -----------------------------------------------------------------


@dataclass
class SystemView:
    """A point set, a line set, and the incidence index between them."""

    points: List[ComplexPoint]
    lines: List[ComplexLine]
    incident_lines: List[List[int]]  # per point, ascending line ids

    @classmethod
    def build(cls, points: Sequence[ComplexPoint], lines: Sequence[ComplexLine]) -> "SystemView":
        by_slope: Dict[object, Dict[GaussianRational, List[int]]] = {}
        for li, l in enumerate(lines):
            key = None if l.is_vertical else l.a
            by_slope.setdefault(key, {}).setdefault(l.b, []).append(li)
        index: List[List[int]] = []
        for p in points:
            mine: List[int] = []
            for a, table in by_slope.items():
                val = p.z1 if a is None else p.z2 - a * p.z1
                mine.extend(table.get(val, ()))
            index.append(sorted(mine))
        return cls(list(points), list(lines), index)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def e(self) -> int:
        return len(self.lines)

    def incidence_count(self) -> int:
        return sum(len(ls) for ls in self.incident_lines)

    def average_point_degree(self) -> Fraction:
        if not self.points:
            return Fraction(0)
        return Fraction(self.incidence_count(), self.n)

    def directions(self) -> List[Direction]:
        return [direction_of(l) for l in self.lines]


def apply_map_system(sys: SystemView, m: ComplexLinearMap) -> SystemView:
    """Image system under an invertible linear map; incidences are
    preserved, so the index carries over unchanged."""
    pts = [ComplexPoint(*m.apply_vector(p.z1, p.z2)) for p in sys.points]
    lines = []
    for l in sys.lines:
        if l.is_vertical:
            p0, p1 = ComplexPoint(l.b, GaussianRational(0)), ComplexPoint(l.b, GaussianRational(1))
        else:
            p0 = ComplexPoint(GaussianRational(0), l.b)
            p1 = ComplexPoint(GaussianRational(1), l.a + l.b)
        q0 = ComplexPoint(*m.apply_vector(p0.z1, p0.z2))
        q1 = ComplexPoint(*m.apply_vector(p1.z1, p1.z2))
        lines.append(line_through(q0, q1))
    return SystemView(pts, lines, [list(ls) for ls in sys.incident_lines])


# -- parameters and arcs -------------------------------------------------------


@dataclass(frozen=True)
class DiagnosticParams:
    """Thresholds shared by the point classifiers.

    d_a is the average point degree I/n of the host system; the big
    constant m_const only enters through the concentration allowance
    d_a / (na_divisor * m_const).
    """

    d_a: Fraction
    m_const: int = 10**10
    neighborhood_deg: float = 10.0
    p0_divisor: int = 100
    na_divisor: int = 200

    def __post_init__(self) -> None:
        if self.d_a < 0 or self.m_const <= 0 or self.neighborhood_deg <= 0:
            raise ValueError("parameters must be positive")

    @property
    def p0_threshold(self) -> Fraction:
        return self.d_a / self.p0_divisor

    @property
    def na_allowance(self) -> Fraction:
        return self.d_a / (self.na_divisor * self.m_const)


@dataclass(frozen=True)
class ArcSpec:
    """A closed arc of the unit-modulus circle, by angles in degrees.

    May wrap through 180: ArcSpec(135, -135) is the short arc around
    the negative real axis.
    """

    lo: float
    hi: float

    def length(self) -> float:
        span = (self.hi - self.lo) % 360.0
        return 360.0 if span == 0 else span

    def contains(self, theta: float) -> bool:
        t = (theta - self.lo) % 360.0
        return t <= self.length()

    def midpoint_deg(self) -> float:
        mid = self.lo + self.length() / 2.0
        mid = (mid + 180.0) % 360.0 - 180.0
        return 180.0 if mid == -180.0 else mid


ARC_A1 = ArcSpec(-90.0, 90.0)
ARC_A2 = ArcSpec(-180.0, -90.0)
ARC_A3 = ArcSpec(90.0, 180.0)
ARC_B1 = ArcSpec(135.0, -135.0)
ARC_B2 = ArcSpec(-135.0, 0.0)
ARC_B3 = ArcSpec(0.0, 135.0)
ARCS_A = (ARC_A1, ARC_A2, ARC_A3)
ARCS_B = (ARC_B1, ARC_B2, ARC_B3)


# -- hemisphere split ----------------------------------------------------------


def _try_threshold_split(
    mods: List[Optional[Fraction]], slopes: List[Optional[GaussianRational]], e: int
):
    """Search for a modulus threshold splitting floor/ceil across |a|=1.

    Returns (c_kind, payload) where c_kind is "identity", "between"
    (payload: open interval for c^2) or "onto" (payload: the class
    slope to rotate onto the circle), or None when no threshold fits.
    """
    lo_target = e // 2
    finite_vals = sorted({m for m in mods if m is not None})
    classes_at: Dict[Fraction, Set[GaussianRational]] = {}
    count_at: Dict[Fraction, int] = {}
    for m, a in zip(mods, slopes):
        if m is None:
            continue
        classes_at.setdefault(m, set()).add(a)
        count_at[m] = count_at.get(m, 0) + 1
    less = 0
    # prefer keeping the frame: a workable cut at modulus 1 first
    for i, v in enumerate(finite_vals):
        below = sum(count_at[w] for w in finite_vals[:i])
        if v == 1 and len(classes_at[v]) == 1 and below <= lo_target <= below + count_at[v]:
            return ("identity", None)
    prev = Fraction(0)
    running = 0
    for v in finite_vals:
        if running == lo_target and prev < 1 < v:
            return ("identity", None)
        running += count_at[v]
        prev = v
    if running == lo_target and prev < 1:
        return ("identity", None)
    # exact cut at a single-class modulus
    running = 0
    for v in finite_vals:
        if len(classes_at[v]) == 1 and running <= lo_target <= running + count_at[v]:
            a_star = next(iter(classes_at[v]))
            if not a_star.is_zero():
                return ("onto", a_star)
        running += count_at[v]
    # cut strictly between consecutive moduli
    running = 0
    prev = Fraction(0)
    for v in finite_vals + [None]:
        if running == lo_target:
            hi = v if v is not None else prev + 1
            if prev < hi:
                return ("between", (prev, hi))
        if v is None:
            break
        running += count_at[v]
        prev = v
    return None


def _rational_sqrt_between(lo: Fraction, hi: Fraction) -> Fraction:
    """A rational c with c*c strictly inside (lo, hi); bisection on c."""
    c_lo = Fraction(0)
    c_hi = max(Fraction(1), hi)
    while c_hi * c_hi < hi:
        c_hi *= 2
    for _ in range(20000):
        c = (c_lo + c_hi) / 2
        c2 = c * c
        if c2 <= lo:
            c_lo = c
        elif c2 >= hi:
            c_hi = c
        else:
            return c
    raise SplitFailed("no rational threshold found in (%s, %s)" % (lo, hi))


_FIX_MAPS = [
    ComplexLinearMap(1, Fraction(1, 2), Fraction(1, 2), 1),
    shear_map(1),
    shear_map(GaussianRational(0, 1)),
    ComplexLinearMap(1, Fraction(1, 3), Fraction(1, 3), 1),
    shear_map(2),
    shear_map(GaussianRational(0, 2)),
    shear_map(GaussianRational(1, 1)),
    shear_map(GaussianRational(1, 2)),
    shear_map(GaussianRational(2, 1)),
    shear_map(3),
    shear_map(GaussianRational(0, 3)),
    shear_map(GaussianRational(1, 3)),
    shear_map(GaussianRational(3, 1)),
]


def hemisphere_split(
    sys: SystemView,
) -> Tuple[Set[int], Set[int], ComplexLinearMap]:
    """Split the lines half and half across the unit-modulus circle.

    Finds a linear transformation after which floor(e/2) line
    directions have modulus at most 1 and the rest at least 1, with at
    most one parallel class landing exactly on the circle.  A modulus
    threshold (a slope scaling) almost always suffices; degenerate tie
    patterns are broken by a small deterministic pool of shears and
    squeezes first.
    """
    if sys.e < 2:
        raise ValueError("need at least two lines")
    transform = ComplexLinearMap.identity()
    dirs = sys.directions()
    for attempt in range(len(_FIX_MAPS) + 1):
        slopes = [None if d.is_infinite else d.a for d in dirs]
        mods = [None if a is None else a.abs2() for a in slopes]
        found = _try_threshold_split(mods, slopes, sys.e)
        if found is not None:
            kind, payload = found
            if kind == "identity":
                scale = ComplexLinearMap.identity()
            elif kind == "onto":
                scale = scaling_map(payload)
            else:
                scale = scaling_map(_rational_sqrt_between(*payload))
            total = scale.compose(transform)
            final = [apply_mobius(total, d) for d in sys.directions()]
            e1: Set[int] = set()
            e2: Set[int] = set()
            boundary: List[int] = []
            for i, d in enumerate(final):
                if d.is_infinite:
                    e2.add(i)
                    continue
                m2 = d.a.abs2()
                if m2 < 1:
                    e1.add(i)
                elif m2 > 1:
                    e2.add(i)
                else:
                    boundary.append(i)
            take = sys.e // 2 - len(e1)
            if take < 0 or take > len(boundary):
                raise SplitFailed("threshold bookkeeping failed")
            e1.update(boundary[:take])
            e2.update(boundary[take:])
            return e1, e2, total
        if attempt == len(_FIX_MAPS):
            break
        fix = _FIX_MAPS[attempt]
        # a squeeze has a pole: skip it when a direction sits there
        dirs2 = [apply_mobius(fix, d) for d in sys.directions()]
        transform_cand = fix.compose(transform)
        dirs = [apply_mobius(transform_cand, d) for d in sys.directions()]
        del dirs2
        transform = transform_cand
    raise SplitFailed("no transform in the candidate pool balanced the split")


# -- point classification ---------------------------------------------------------


def classify_points(
    sys: SystemView,
    e1: Set[int],
    e2: Set[int],
    params: DiagnosticParams,
) -> Tuple[Set[int], Set[int], Set[int]]:
    """Partition points by their incident-line profile across a split.

    P0 holds points meeting at least d_a / 100 lines on both sides;
    the rest go to P1 when the first side dominates strictly, else P2.
    """
    p0: Set[int] = set()
    p1: Set[int] = set()
    p2: Set[int] = set()
    thr = params.p0_threshold
    for pi, ls in enumerate(sys.incident_lines):
        c1 = sum(1 for li in ls if li in e1)
        c2 = sum(1 for li in ls if li in e2)
        if c1 >= thr and c2 >= thr:
            p0.add(pi)
        elif c1 > c2:
            p1.add(pi)
        else:
            p2.add(pi)
    return p0, p1, p2


def is_na_point(
    p: int,
    sys: SystemView,
    e1: Set[int],
    e2: Set[int],
    center: Direction,
    params: DiagnosticParams,
) -> bool:
    """Does the point's incidence concentrate near one boundary direction?

    True when, on each side of the split, all incident lines except an
    allowance of d_a / (200 M) have their directions inside the open
    10-degree disk around the center.
    """
    allowance = params.na_allowance
    radius = params.neighborhood_deg
    for side in (e1, e2):
        mine = [li for li in sys.incident_lines[p] if li in side]
        close = sum(
            1 for li in mine if dist_deg(direction_of(sys.lines[li]), center) < radius
        )
        if Fraction(close) < len(mine) - allowance:
            return False
    return True


def is_gamma_point(p: int, sys: SystemView, arc: ArcSpec) -> bool:
    """Does a third of the point's incident directions project into the arc?

    The meridian projection is undefined at 0 and infinity; lines with
    those directions never count toward the quota but stay in the
    denominator.  Points of degree zero fail by convention.
    """
    ls = sys.incident_lines[p]
    if not ls:
        return False
    hits = 0
    for li in ls:
        d = direction_of(sys.lines[li])
        if d.is_infinite or d.a.is_zero():
            continue
        if arc.contains(gamma_arg(d)):
            hits += 1
    return 3 * hits >= len(ls)


def gamma_count(sys: SystemView, arc: ArcSpec, transform: Optional[ComplexLinearMap] = None) -> int:
    """Number of points whose transformed directions meet the arc quota."""
    if transform is None:
        return sum(1 for p in range(sys.n) if is_gamma_point(p, sys, arc))
    dirs = [apply_mobius(transform, direction_of(l)) for l in sys.lines]
    count = 0
    for ls in sys.incident_lines:
        if not ls:
            continue
        hits = 0
        for li in ls:
            d = dirs[li]
            if d.is_infinite or d.a.is_zero():
                continue
            if arc.contains(gamma_arg(d)):
                hits += 1
        if 3 * hits >= len(ls):
            count += 1
    return count


# -- meridian balancing -----------------------------------------------------------


def balance_lambda(
    sys: SystemView,
    target_k: int,
    axis_center: Direction,
    precision: int = 64,
    arc: ArcSpec = ARC_A1,
) -> Tuple[Fraction, ComplexLinearMap]:
    """Smallest dyadic squeeze parameter meeting an arc quota.

    Returns the least lambda on the 2^-precision grid for which at
    least target_k points meet the one-third arc quota after the
    squeeze toward axis_center, together with the squeeze itself.  The
    search is a bisection; the count at the grid point below the
    result is certified to miss the target.
    """
    if target_k > sys.n:
        raise Unbalanceable("target exceeds the number of points")
    seen: List[Tuple[Fraction, int]] = []

    def count_at(lam: Fraction) -> int:
        c = gamma_count(sys, arc, pi_lambda(axis_center, lam))
        seen.append((lam, c))
        return c

    if count_at(Fraction(0)) >= target_k:
        return Fraction(0), ComplexLinearMap.identity()
    step = Fraction(1, 2**precision)
    hi = 1 - step
    if count_at(hi) < target_k:
        raise Unbalanceable("quota unreachable even at the largest squeeze")
    lo = Fraction(0)
    while hi - lo > step:
        mid = (lo + hi) / 2
        if count_at(mid) >= target_k:
            hi = mid
        else:
            lo = mid
    for l1, c1 in seen:
        for l2, c2 in seen:
            if l1 < l2 and c1 >= target_k > c2:
                raise MonotonicityViolation(
                    "quota dropped between lambda=%s and %s" % (l1, l2)
                )
    return hi, pi_lambda(axis_center, hi)


# -- one refinement round ----------------------------------------------------------


@dataclass(frozen=True)
class SparseInvariant:
    """The bookkeeping tuple carried across refinement rounds."""

    j: int
    n_j: Fraction
    e_j: Fraction
    t_j: Fraction

    @classmethod
    def initial(cls, n: int, e: int, d_a: Fraction, m_const: int) -> "SparseInvariant":
        return cls(0, Fraction(n, 10), Fraction(e), d_a / 200)

    def advance(self, d_a: Fraction, m_const: int) -> "SparseInvariant":
        j = self.j + 1
        return SparseInvariant(
            j,
            self.n_j * (1 - Fraction(3, m_const)) / 3,
            self.e_j / 2,
            d_a / 200 * (1 - Fraction(j, m_const)),
        )


@dataclass
class RefineResult:
    o_new: Set[int]
    u_new: Set[int]
    v_new: Set[int]
    case: str  # "plane-avoids-arc" or "largest-b-class"
    arc_index: int
    invariant: SparseInvariant


def _na_arc_point(
    p: int,
    sys: SystemView,
    e1: Set[int],
    e2: Set[int],
    arc: ArcSpec,
    params: DiagnosticParams,
    step_deg: float = 2.0,
) -> bool:
    """Concentration near some boundary direction within 10 degrees of
    the arc, decided over a deterministic angle grid."""
    lo = arc.lo - params.neighborhood_deg
    span = arc.length() + 2 * params.neighborhood_deg
    steps = int(span / step_deg) + 1
    for k in range(steps + 1):
        theta = lo + min(k * step_deg, span)
        center = unit_direction_from_angle(theta)
        if is_na_point(p, sys, e1, e2, center, params):
            return True
    return False


def _bisecting_constant(dirs_xyz: np.ndarray, normal: np.ndarray) -> Tuple[float, np.ndarray]:
    """Median projection of the direction multiset onto the normal; the
    normal is nudged deterministically until at most one direction
    lies on the plane."""
    for attempt in range(64):
        if attempt:
            ang = attempt * 1e-9
            c, s = math.cos(ang), math.sin(ang)
            rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
            nrm = rot @ normal
        else:
            nrm = normal
        proj = dirs_xyz @ nrm
        srt = np.sort(proj)
        k = len(srt)
        if k % 2 == 1:
            cval = float(srt[k // 2])
        else:
            cval = float((srt[k // 2 - 1] + srt[k // 2]) / 2)
        if np.count_nonzero(np.abs(proj - cval) < 1e-12) <= 1:
            return cval, nrm
    return cval, nrm


def refine_step(
    o: Set[int],
    u: Set[int],
    v: Set[int],
    sys: SystemView,
    params: DiagnosticParams,
    invariant: SparseInvariant,
    arcs_a: Tuple[ArcSpec, ArcSpec, ArcSpec] = ARCS_A,
    arcs_b: Tuple[ArcSpec, ArcSpec, ArcSpec] = ARCS_B,
) -> RefineResult:
    """One refinement round over a system slice.

    For each of the three arcs, a plane normal to the arc midpoint
    bisects the multiset of line directions of u and v.  If some plane
    misses the 10-degree neighborhood of its arc, the concentrated
    points of that arc and the lines on the arc's side survive; if
    every plane cuts its neighborhood, the richest complementary-arc
    class is selected instead.
    """
    if not u or not v:
        raise ValueError("u and v must be nonempty")
    line_ids = sorted(u) + sorted(v)
    dirs_xyz = np.array(
        [to_sphere(direction_of(sys.lines[li])).v for li in line_ids]
    )

    def side_filter(ids: Iterable[int], nrm: np.ndarray, cval: float, want_positive: bool) -> Set[int]:
        out = set()
        for li in ids:
            x = float(np.dot(to_sphere(direction_of(sys.lines[li])).v, nrm))
            if (x > cval) == want_positive and x != cval:
                out.add(li)
        return out

    planes = []
    for arc in arcs_a:
        normal = np.array(to_sphere(unit_direction_from_angle(arc.midpoint_deg())).v)
        cval, nrm = _bisecting_constant(dirs_xyz, normal)
        threshold = math.cos(math.radians(arc.length() / 2 + params.neighborhood_deg))
        planes.append((arc, cval, nrm, cval >= threshold))

    nxt = invariant.advance(params.d_a, params.m_const)
    for k, (arc, cval, nrm, intersects) in enumerate(planes):
        if intersects:
            continue
        o_new = {
            p for p in o if _na_arc_point(p, sys, u, v, arc, params)
        }
        if not o_new:
            raise EmptySelection("no concentrated points for arc %d" % (k + 1))
        u_new = side_filter(u, nrm, cval, want_positive=True)
        v_new = side_filter(v, nrm, cval, want_positive=True)
        return RefineResult(o_new, u_new, v_new, "plane-avoids-arc", k, nxt)

    best_m, best_pts = None, None
    for m, arc_b in enumerate(arcs_b):
        pts = {p for p in o if _na_arc_point(p, sys, u, v, arc_b, params)}
        if best_pts is None or len(pts) > len(best_pts):
            best_m, best_pts = m, pts
    if not best_pts:
        raise EmptySelection("no concentrated points for any complementary arc")
    arc_b = arcs_b[best_m]
    _, cval, nrm, _ = planes[best_m]
    mid_b = np.array(to_sphere(unit_direction_from_angle(arc_b.midpoint_deg())).v)
    want_positive = bool(np.dot(mid_b, nrm) > cval)
    u_new = side_filter(u, nrm, cval, want_positive)
    v_new = side_filter(v, nrm, cval, want_positive)
    return RefineResult(best_pts, u_new, v_new, "largest-b-class", best_m, nxt)


# -- squeeze to orthogonal ----------------------------------------------------------


def _rotation_taking_one_to(target: np.ndarray, max_den: int = 10**6) -> ComplexLinearMap:
    """A rational sphere rotation taking the direction 1 to the target
    vector (approximately; rotations here are exact maps, the target
    is matched to float accuracy)."""
    tx, ty, tz = (float(x) for x in target)
    beta = math.atan2(ty, tx)
    gamma = math.atan2(tz, math.hypot(tx, ty))
    # the Moebius matrix (cos a, sin a) turns the sphere by 2a about the
    # +-i axis, so a quarter-angle tangent realizes the tilt gamma
    t = Fraction(math.tan(gamma / 4)).limit_denominator(max_den)
    c, s = 1 - t * t, 2 * t
    tilt = ComplexLinearMap(c, -s, s, c)
    w = Fraction(math.tan(beta / 2)).limit_denominator(max_den)
    den = 1 + w * w
    u = GaussianRational((1 - w * w) / den, 2 * w / den)
    spin = ComplexLinearMap(1, 0, 0, u)  # rotation about the 0-infinity axis
    return spin.compose(tilt)


def _cluster_stats(dirs: Sequence[Direction], m: Optional[ComplexLinearMap]) -> Tuple[np.ndarray, float]:
    vecs = []
    for d in dirs:
        img = d if m is None else apply_mobius(m, d)
        vecs.append(to_sphere(img).v)
    arr = np.array(vecs)
    center = arr.mean(axis=0)
    nrm = np.linalg.norm(center)
    if nrm < 1e-12:
        center = arr[0]
        nrm = 1.0
    center = center / nrm
    worst = 0.0
    for a in range(len(arr)):
        for b in range(a + 1, len(arr)):
            dd = float(np.linalg.norm(arr[a] - arr[b]))
            ss = float(np.linalg.norm(arr[a] + arr[b]))
            worst = max(worst, math.degrees(2 * math.atan2(dd, ss)))
    return center, worst


def _center_angle(c1: np.ndarray, c2: np.ndarray) -> float:
    dd = float(np.linalg.norm(c1 - c2))
    ss = float(np.linalg.norm(c1 + c2))
    return math.degrees(2 * math.atan2(dd, ss))


def separate_to_orthogonal(
    d1: Sequence[Direction], d2: Sequence[Direction]
) -> ComplexLinearMap:
    """Squeeze two separated direction clusters toward an antipodal pair.

    The squeeze axis points away from the midpoint of the two cluster
    centers, so the clusters straddle the repelling pole and drift
    apart along meridians; the parameter is tuned until the image
    centers are antipodal.  Representatives closer than 5 degrees are
    rejected.
    """
    if not d1 or not d2:
        raise ValueError("need nonempty direction samples")
    c1, _ = _cluster_stats(d1, None)
    c2, _ = _cluster_stats(d2, None)
    sep = _center_angle(c1, c2)
    if sep < 5.0:
        raise TooClose("cluster centers only %.3f degrees apart" % sep)
    if sep >= 179.0:
        return ComplexLinearMap.identity()
    axis = -(c1 + c2)
    axis = axis / np.linalg.norm(axis)
    rot = _rotation_taking_one_to(axis)
    rot_inv = rot.inverse()

    def quality(lam: Fraction) -> float:
        m = rot.compose(pi_lambda(Direction.finite(1), lam)).compose(rot_inv)
        a1, _ = _cluster_stats(d1, m)
        a2, _ = _cluster_stats(d2, m)
        return _center_angle(a1, a2)

    # coarse scan, then dyadic refinement around the best parameter
    grid = [Fraction(k, 256) for k in range(256)]
    best = max(grid, key=quality)
    lo = max(Fraction(0), best - Fraction(1, 256))
    hi = min(Fraction(255, 256), best + Fraction(1, 256))
    for _ in range(64):
        m1 = lo + (hi - lo) / 4
        m2 = hi - (hi - lo) / 4
        if quality(m1) < quality(m2):
            lo = m1
        else:
            hi = m2
    lam = (lo + hi) / 2
    return rot.compose(pi_lambda(Direction.finite(1), lam)).compose(rot_inv)
