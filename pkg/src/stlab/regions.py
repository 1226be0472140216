"""Region builder for near-orthogonal bundles of 2-flats in R^4.

Input: anchor points, and per anchor two families of 2-flats whose
directions stay within 10 degrees of a fixed orthogonal pair of
2-subspaces.  Output: pairwise non-overlapping compact regions, each
with an r-point subset of anchors, such that for any two chosen
anchors p, q at least one of the two mixed crossing families (flats of
p from the first family against flats of q from the second, or the
swap) lands entirely in the region's interior.

Construction: cover the anchors with cubes at parameter 27r and
kappa = 1, keep the cubes of shift-graph out-degree at most one, and
attach to each either its shifted copy (out-degree zero) or a box
union, possibly clipped by a coordinate halfspace (out-degree one).
The two crossings of a pair p, q with exactly orthogonal flats are
antipodal on the sphere with diameter pq, which pins at least one of
them deep inside the cube; small direction tilts displace a crossing
by a fraction of dist(p, q).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .covering import (
    Box,
    CoveringError,
    FreeCube,
    InvalidParams,
    SignedPermutation,
    bott,
    boxes_overlap_interior,
    build_shift_graph,
    normalize_points,
    point_in_box_closed,
    point_in_box_open,
    run_covering,
    shift_cube,
)
from .directions import Subspace2, gr_dist_deg
from .exact import Flat2, FlatMeet, RVector4, Rational, _frac, flat_intersect

Point4 = Tuple[Fraction, Fraction, Fraction, Fraction]


class TooFewPoints(CoveringError):
    pass


CANONICAL_SPANS = (
    ((0, 1, 1, 1), (1, 0, -1, 1)),
    ((1, 1, 0, -1), (1, -1, 1, 0)),
)


def canonical_frame() -> Tuple[Subspace2, Subspace2]:
    """The fixed orthogonal pair of 2-subspaces all bundles refer to."""
    (u1, u2), (v1, v2) = CANONICAL_SPANS
    return Subspace2.from_span(u1, u2), Subspace2.from_span(v1, v2)


def canonical_flat(anchor: Sequence[Rational], family: int) -> Flat2:
    """A flat of exactly canonical direction through the anchor."""
    s1, s2 = CANONICAL_SPANS[family]
    return Flat2(
        RVector4.of([_frac(x) for x in anchor]),
        RVector4.of(s1),
        RVector4.of(s2),
    )


@dataclass(frozen=True)
class Halfspace:
    """The closed set normal . x >= offset."""

    normal: Tuple[Fraction, Fraction, Fraction, Fraction]
    offset: Fraction

    def contains_open(self, p: Point4, margin: Fraction = Fraction(0)) -> bool:
        return sum(n * x for n, x in zip(self.normal, p)) > self.offset + margin

    def box_side(self, box: Box) -> int:
        """1 when the box is inside the open halfspace, -1 when outside
        the closed one, 0 when the boundary cuts through."""
        lo = sum(n * (b[0] if n > 0 else b[1]) for n, b in zip(self.normal, box))
        hi = sum(n * (b[1] if n > 0 else b[0]) for n, b in zip(self.normal, box))
        if lo > self.offset:
            return 1
        if hi < self.offset:
            return -1
        return 0

    def clip_axis(self) -> Optional[Tuple[int, int, Fraction]]:
        """(axis, sign, cut) when the normal is axis-aligned, else None."""
        nz = [(i, n) for i, n in enumerate(self.normal) if n != 0]
        if len(nz) != 1:
            return None
        ax, n = nz[0]
        return ax, (1 if n > 0 else -1), self.offset / n


@dataclass(frozen=True)
class Region:
    """A union of axis-aligned boxes; the optional halfspace clips the
    last box only (the out-degree-one case (b))."""

    boxes: Tuple[Box, ...]
    halfspace: Optional[Halfspace] = None

    def _pieces(self) -> List[Tuple[Box, Optional[Halfspace]]]:
        out: List[Tuple[Box, Optional[Halfspace]]] = []
        for i, b in enumerate(self.boxes):
            hs = self.halfspace if (self.halfspace and i == len(self.boxes) - 1) else None
            if hs is not None:
                cut = hs.clip_axis()
                if cut is not None:
                    # axis-aligned clip folds into the box, keeping the
                    # pairwise overlap test exact
                    ax, sign, c = cut
                    lo, hi = b[ax]
                    lo, hi = (max(lo, c), hi) if sign > 0 else (lo, min(hi, c))
                    if lo >= hi:
                        continue
                    b = b[:ax] + ((lo, hi),) + b[ax + 1 :]
                    hs = None
            out.append((b, hs))
        return out

    def contains_interior(
        self, p: Sequence[Rational], margin: Fraction = Fraction(0)
    ) -> bool:
        """Strict interior membership; margin is relative to box side."""
        q = tuple(_frac(x) for x in p)
        for box, hs in self._pieces():
            m = margin * (box[0][1] - box[0][0])
            if point_in_box_open(q, box, m) and (hs is None or hs.contains_open(q, m)):
                return True
        return False

    def overlaps(self, other: "Region") -> bool:
        for b1, h1 in self._pieces():
            for b2, h2 in other._pieces():
                if not boxes_overlap_interior(b1, b2):
                    continue
                inter = tuple(
                    (max(l1, l2), min(u1, u2)) for (l1, u1), (l2, u2) in zip(b1, b2)
                )
                if h1 is not None and h1.box_side(inter) < 0:
                    continue
                if h2 is not None and h2.box_side(inter) < 0:
                    continue
                return True
        return False


@dataclass(frozen=True)
class RegionAssignment:
    region: Region
    point_ids: Tuple[int, ...]  # indices into the anchor list, exactly r


@dataclass
class FlatBundle:
    """Anchors plus the two per-anchor flat families."""

    anchors: List[Point4]
    family1: List[List[Flat2]]
    family2: List[List[Flat2]]

    def __post_init__(self) -> None:
        if not (len(self.anchors) == len(self.family1) == len(self.family2)):
            raise InvalidParams("bundle lists must align with anchors")

    def check_alignment(self) -> float:
        """Worst Grassmann distance of any flat direction to its pole."""
        l1, l2 = canonical_frame()
        worst = 0.0
        for flats, pole in ((self.family1, l1), (self.family2, l2)):
            for fl in flats:
                for f in fl:
                    s = Subspace2.from_span(f.dir1.as_tuple(), f.dir2.as_tuple())
                    worst = max(worst, gr_dist_deg(s, pole))
        return worst


@dataclass
class CombineDetail:
    cover_k: int = 0
    kept: int = 0
    out_degree0: int = 0
    out_degree1: int = 0
    waived_precondition: bool = False


def _intersect_boxes(a: Box, b: Box) -> Box:
    return tuple((max(l1, l2), min(u1, u2)) for (l1, u1), (l2, u2) in zip(a, b))


def _lateral_cells(lat_q1: Box, lat_q2: Box) -> List[Box]:
    """Partition of the footprint of Q1 by the face planes of the
    footprint of Q2: at most 27 full-dimensional boxes."""
    segs = []
    for (ql, qh), (bl, bh) in zip(lat_q1, lat_q2):
        cuts = sorted({ql, qh, *(x for x in (bl, bh) if ql < x < qh)})
        segs.append(list(zip(cuts, cuts[1:])))
    return [tuple(combo) for combo in itertools.product(*segs)]


def _separating_halfspace(cell: Box, lat_q2: Box) -> Halfspace:
    """Axis halfspace containing the cell, its boundary plane in the
    middle of the gap to the successor footprint.  The axis with the
    widest gap wins, ties by axis index."""
    best = None
    for ax, ((clo, chi), (blo, bhi)) in enumerate(zip(cell, lat_q2)):
        if clo >= bhi:  # cell above the footprint on this axis
            gap = clo - bhi
            normal = [Fraction(0)] * 4
            normal[ax + 1] = Fraction(1)
            cand = (gap, -ax, Halfspace(tuple(normal), (clo + bhi) / 2))
        elif chi <= blo:
            gap = blo - chi
            normal = [Fraction(0)] * 4
            normal[ax + 1] = Fraction(-1)
            cand = (gap, -ax, Halfspace(tuple(normal), -(chi + blo) / 2))
        else:
            continue
        if best is None or (cand[0], cand[1]) > (best[0], best[1]):
            best = cand
    if best is None:
        raise CoveringError("no coordinate plane separates the cell")
    return best[2]


def combine(
    anchors: Sequence[Sequence[Rational]],
    bundle: FlatBundle,
    r: int,
    detail: Optional[CombineDetail] = None,
) -> List[RegionAssignment]:
    """Build region assignments for a near-orthogonal bundle.

    Runs the covering at parameter 27r with kappa 1 in the normalized
    frame and maps the regions back, so the output is exact rational
    geometry in the anchor coordinates.  The formal hypothesis
    r <= 1e-8 * n is waived at desk scale (27r <= n is what the
    construction actually needs); the detail record notes the waiver.
    """
    if r < 1:
        raise InvalidParams("r must be at least 1")
    pts = [tuple(_frac(x) for x in p) for p in anchors]
    n = len(pts)
    if 27 * r > n:
        raise TooFewPoints("need at least 27*r anchors, got %d" % n)
    normalized, tr = normalize_points(pts)
    cover = run_covering(normalized, 4, 1, 27 * r)
    if not cover.K:
        raise TooFewPoints("covering produced no usable cube")
    amap = cover.axis_map
    work_pts = [amap.apply_point(p) for p in normalized]

    graph = build_shift_graph(cover.K, kappa=1)
    out_deg = graph.out_degrees()
    succ: Dict[int, int] = {a: b for a, b in graph.edges}

    assignments: List[RegionAssignment] = []
    n0 = n1 = 0
    for qi, cube in enumerate(cover.K):
        if out_deg[qi] > 1:
            continue
        bq = bott(cube, 1).box()
        inside = [i for i, p in enumerate(work_pts) if point_in_box_closed(p, bq)]
        qbox = cube.box()
        shifted = shift_cube(cube).box()
        if out_deg[qi] == 0:
            region = Region((shifted,))
            pool = inside
            n0 += 1
        else:
            q2 = cover.K[succ[qi]]
            lat_q1, lat_q2 = qbox[1:], q2.box()[1:]
            best_cell = None
            best_ids: List[int] = []
            for cell in _lateral_cells(lat_q1, lat_q2):
                ids = [
                    i
                    for i in inside
                    if all(
                        lo <= work_pts[i][ax + 1] <= hi
                        for ax, (lo, hi) in enumerate(cell)
                    )
                ]
                if len(ids) >= r and len(ids) > len(best_ids):
                    best_cell, best_ids = cell, ids
            if best_cell is None:
                raise CoveringError("pigeonhole failed: no lateral cell holds r points")
            core = _intersect_boxes(qbox, shifted)
            if best_cell == tuple(lat_q2):
                # case (a): prism below Q1 over the chosen cell, one tenth
                # of the successor side deep
                depth = q2.side / 10
                prism = ((qbox[0][0] - depth, qbox[0][0]),) + best_cell
                region = Region((core, prism))
            else:
                # case (b): clip shift(Q1) by the halfspace separating the
                # chosen cell from the successor footprint
                hs = _separating_halfspace(best_cell, lat_q2)
                region = Region((core, shifted), hs)
            pool = best_ids
            n1 += 1
        interior = [
            i for i in pool if region.contains_interior(work_pts[i])
        ]
        chosen = (interior if len(interior) >= r else pool)[:r]
        assignments.append(RegionAssignment(region, tuple(chosen)))

    mapped = [_map_back(asg, amap, tr) for asg in assignments]
    if detail is not None:
        detail.cover_k = len(cover.K)
        detail.kept = len(mapped)
        detail.out_degree0 = n0
        detail.out_degree1 = n1
        detail.waived_precondition = Fraction(r) > Fraction(n, 10**8)
    return mapped


def _map_back(
    asg: RegionAssignment, amap: SignedPermutation, tr
) -> RegionAssignment:
    """Pull a work-frame region back into the anchor frame."""
    d = len(amap.perm)
    inv = SignedPermutation(
        tuple(amap.perm.index(i) for i in range(d)),
        tuple(amap.signs[amap.perm.index(i)] for i in range(d)),
    )
    boxes = []
    for b in asg.region.boxes:
        back = inv.apply_box(b)
        boxes.append(
            tuple(
                ((lo - tr.offset) / tr.scale, (hi - tr.offset) / tr.scale)
                for lo, hi in back
            )
        )
    hs = asg.region.halfspace
    if hs is not None:
        # n . y >= c with y_i = scale * x_i + offset pulls back along the
        # inverse axis map and the similarity
        normal = inv.apply_point(hs.normal)
        c = (hs.offset - tr.offset * sum(normal)) / tr.scale
        hs = Halfspace(tuple(normal), c)
    return RegionAssignment(Region(tuple(boxes), hs), asg.point_ids)


# -- verification ------------------------------------------------------------


@dataclass
class RegionCheck:
    region_index: int
    size_ok: bool
    interior_ok: bool
    pair_failures: List[Tuple[int, int]] = field(default_factory=list)


@dataclass
class RegionsReport:
    disjoint_ok: bool
    overlap_witness: Optional[Tuple[int, int]]
    checks: List[RegionCheck]
    r: int

    @property
    def all_ok(self) -> bool:
        return self.disjoint_ok and all(
            c.size_ok and c.interior_ok and not c.pair_failures for c in self.checks
        )


def crossing_points(f1s: Sequence[Flat2], f2s: Sequence[Flat2]) -> List[RVector4]:
    """All single-point intersections between the two flat lists."""
    out = []
    for f1 in f1s:
        for f2 in f2s:
            meet = flat_intersect(f1, f2)
            if meet.kind == FlatMeet.POINT:
                out.append(meet.point)
    return out


def count_crossings(f1s: Sequence[Flat2], f2s: Sequence[Flat2]) -> int:
    """Number of pairs meeting in exactly one point, exact."""
    return len(crossing_points(f1s, f2s))


def verify_regions(
    assignments: Sequence[RegionAssignment],
    bundle: FlatBundle,
    r: int,
    margin: Fraction = Fraction(0),
) -> RegionsReport:
    """Exact check of the structural region guarantees.

    Regions must be pairwise non-overlapping and carry exactly r
    anchors in their interiors, and for every anchor pair p, q of a
    region all crossings of at least one of the two mixed families
    must lie in the open region (margin relative to box side).
    """
    overlap_witness = None
    for i in range(len(assignments)):
        for j in range(i + 1, len(assignments)):
            if assignments[i].region.overlaps(assignments[j].region):
                overlap_witness = (i, j)
                break
        if overlap_witness:
            break

    checks: List[RegionCheck] = []
    for idx, asg in enumerate(assignments):
        chk = RegionCheck(
            idx,
            size_ok=len(asg.point_ids) == r,
            interior_ok=all(
                asg.region.contains_interior(bundle.anchors[i], margin)
                for i in asg.point_ids
            ),
        )
        ids = asg.point_ids
        for a in range(len(ids)):
            for b in range(a + 1, len(ids)):
                p, q = ids[a], ids[b]
                fam_a = crossing_points(bundle.family1[p], bundle.family2[q])
                fam_b = crossing_points(bundle.family1[q], bundle.family2[p])
                ok_a = all(
                    asg.region.contains_interior(z.as_tuple(), margin) for z in fam_a
                )
                ok_b = all(
                    asg.region.contains_interior(z.as_tuple(), margin) for z in fam_b
                )
                if not (ok_a or ok_b):
                    chk.pair_failures.append((p, q))
        checks.append(chk)
    return RegionsReport(
        disjoint_ok=overlap_witness is None,
        overlap_witness=overlap_witness,
        checks=checks,
        r=r,
    )
