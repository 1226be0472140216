"""Hierarchical cube covers of point sets in R^d.

Given n points, an integer kappa and a target r, the covering
algorithm selects non-overlapping axis-aligned cubes such that the
bottom side-cube of every selected cube holds at least r of the
original points, the number of selected cubes is proportional to n/r,
and the directed "shift graph" on the selection has in-degree at most
one everywhere.

The algorithm runs over a hierarchy of lattice subdivisions whose side
ratio is rho = 4*kappa + 1 per axis (each parent cell consists of
rho^d child cells).  Cubes are processed bottom-up through six states;
the labels green, yellow, blue and selected drive the bookkeeping, and
points inside blue or yellow cubes are deleted permanently at the end
of each phase.  Only occupied or label-carrying cells are ever
materialized, so dimension 4 stays affordable.

Everything geometric is exact rational arithmetic; floats appear only
as conservative prefilters in the pair loops of the verifier and the
shift-graph builder, and every float-positive pair is re-checked
exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .exact import Rational, _frac

Point = Tuple[Fraction, ...]
Box = Tuple[Tuple[Fraction, Fraction], ...]  # per-axis closed [lo, hi]


class CoveringError(ValueError):
    pass


class InvalidParams(CoveringError):
    pass


class DuplicatePoints(CoveringError):
    pass


class NotNested(CoveringError):
    pass


class OverlappingInput(CoveringError):
    pass


# -- basic box algebra -------------------------------------------------------


def box_from_corner(corner: Sequence[Rational], side: Rational) -> Box:
    side = _frac(side)
    return tuple((_frac(c), _frac(c) + side) for c in corner)


def boxes_overlap_interior(a: Box, b: Box) -> bool:
    return all(max(la, lb) < min(ha, hb) for (la, ha), (lb, hb) in zip(a, b))


def box_inside(inner: Box, outer: Box) -> bool:
    return all(lo >= lb and hi <= hb for (lo, hi), (lb, hb) in zip(inner, outer))


def point_in_box_halfopen(p: Point, b: Box) -> bool:
    return all(lo <= x < hi for x, (lo, hi) in zip(p, b))


def point_in_box_closed(p: Point, b: Box) -> bool:
    return all(lo <= x <= hi for x, (lo, hi) in zip(p, b))


def point_in_box_open(p: Point, b: Box, margin: Rational = Fraction(0)) -> bool:
    return all(lo + margin < x < hi - margin for x, (lo, hi) in zip(p, b))


@dataclass(frozen=True)
class FreeCube:
    """An axis-aligned cube with exact rational corner and side."""

    corner: Tuple[Fraction, ...]
    side: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "corner", tuple(_frac(c) for c in self.corner))
        object.__setattr__(self, "side", _frac(self.side))
        if self.side <= 0:
            raise InvalidParams("cube side must be positive")

    @property
    def d(self) -> int:
        return len(self.corner)

    def box(self) -> Box:
        return box_from_corner(self.corner, self.side)


@dataclass(frozen=True)
class GridCube:
    """A lattice cube: level 1 cells are unit cubes, each level-(l+1)
    cell is a ratio^d block of level-l cells, and level 0 refines the
    unit cells by the same ratio."""

    level: int
    origin: Tuple[int, ...]
    d: int
    ratio: int = 5

    def __post_init__(self) -> None:
        if self.level < 0 or self.d < 1 or self.ratio < 5 or self.ratio % 2 == 0:
            raise InvalidParams("bad grid cube parameters")
        if len(self.origin) != self.d:
            raise InvalidParams("origin dimension mismatch")

    @property
    def side(self) -> Fraction:
        return Fraction(self.ratio) ** (self.level - 1)

    def box(self) -> Box:
        s = self.side
        return tuple((o * s, (o + 1) * s) for o in self.origin)

    def free(self) -> FreeCube:
        s = self.side
        return FreeCube(tuple(o * s for o in self.origin), s)


def side_cube(q: FreeCube, orientation: Tuple[int, int], kappa: int) -> FreeCube:
    """The kappa-side-cube of q along the face given by (axis, sign).

    Central scaling toward the face center with ratio 1/(2*kappa + 1):
    the result hugs that face, centered laterally.
    """
    axis, sign = orientation
    if sign not in (-1, 1) or not (0 <= axis < q.d):
        raise InvalidParams("bad orientation %r" % (orientation,))
    h = q.side / (2 * kappa + 1)
    corner = list(q.corner)
    for i in range(q.d):
        if i == axis:
            corner[i] = q.corner[i] if sign < 0 else q.corner[i] + q.side - h
        else:
            corner[i] = q.corner[i] + (q.side - h) / 2
    return FreeCube(tuple(corner), h)


def shift_cube(q: FreeCube) -> FreeCube:
    """Translate by -(side/10) along the first axis."""
    corner = list(q.corner)
    corner[0] = corner[0] - q.side / 10
    return FreeCube(tuple(corner), q.side)


def bott(q: FreeCube, kappa: int) -> FreeCube:
    return side_cube(q, (0, -1), kappa)


# -- complement covers (cube minus nested cube) ------------------------------


def _complement_boxes(qbox: Box, bbox: Box) -> List[Box]:
    """The <=3^d - 1 boxes cut from qbox minus bbox by the faces of bbox."""
    d = len(qbox)
    segs: List[List[Tuple[Fraction, Fraction]]] = []
    for (ql, qh), (bl, bh) in zip(qbox, bbox):
        segs.append([(ql, bl), (bl, bh), (bh, qh)])
    out: List[Box] = []
    for combo in itertools.product(range(3), repeat=d):
        if all(c == 1 for c in combo):
            continue
        box = tuple(segs[i][c] for i, c in enumerate(combo))
        if any(lo >= hi for lo, hi in box):
            continue
        out.append(box)
    return out


def _encapsulate(r: Box, qbox: Box, mid_axes: Set[int]) -> Box:
    """Grow a dissection box to a cube inside qbox avoiding the middle.

    The longest edge of r is always achieved on a non-middle axis
    because the gaps around a nested grid cube are multiples of its
    side; the cube keeps r's interval there (so it stays on one side of
    the removed cube) and stretches the other axes within qbox.
    """
    lens = [hi - lo for lo, hi in r]
    q = max(lens)
    axis = None
    for i, ln in enumerate(lens):
        if i not in mid_axes and ln == q:
            axis = i
            break
    if axis is None:
        raise CoveringError("dissection box has no extreme non-middle axis")
    cube = []
    for i, (lo, hi) in enumerate(r):
        if i == axis:
            cube.append((lo, hi))
            continue
        ql, qh = qbox[i]
        new_lo = min(lo, qh - q)
        if new_lo < ql:
            new_lo = ql
        cube.append((new_lo, new_lo + q))
    return tuple(cube)


def _complement_cubes(qbox: Box, bbox: Box) -> List[Box]:
    out = []
    for r in _complement_boxes(qbox, bbox):
        mid = {
            i
            for i, ((lo, hi), (bl, bh)) in enumerate(zip(r, bbox))
            if lo == bl and hi == bh
        }
        out.append(_encapsulate(r, qbox, mid))
    return out


def complement_cover(q: GridCube, b: GridCube) -> List[FreeCube]:
    """Cover q minus b by at most 3^d - 1 cubes avoiding the interior of b.

    b must be a grid cube of a finer subdivision lying inside q;
    b == q yields the empty cover.
    """
    if q.d != b.d or q.ratio != b.ratio:
        raise NotNested("incompatible grids")
    qbox, bbox = q.box(), b.box()
    if qbox == bbox:
        return []
    if b.level >= q.level or not box_inside(bbox, qbox):
        raise NotNested("b must be a strictly finer grid cube inside q")
    cubes = []
    for cb in _complement_cubes(qbox, bbox):
        side = cb[0][1] - cb[0][0]
        cubes.append(FreeCube(tuple(lo for lo, _ in cb), side))
    return cubes


# -- normalization -----------------------------------------------------------

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


@dataclass(frozen=True)
class NormalizeTransform:
    scale: Fraction
    offset: Fraction  # same shift on every axis

    def apply(self, p: Sequence[Rational]) -> Point:
        return tuple(self.scale * _frac(x) + self.offset for x in p)

    def invert(self, p: Sequence[Rational]) -> Point:
        return tuple((_frac(x) - self.offset) / self.scale for x in p)


def normalize_points(
    points: Sequence[Sequence[Rational]],
) -> Tuple[List[Point], NormalizeTransform]:
    """Similarity making the minimal distance exceed the unit-cube diameter.

    Scales so that the smallest pairwise distance is greater than
    sqrt(d), then shifts by 1/p for the first prime p that leaves no
    coordinate an integer.  The nearest pair is located with a float
    k-d tree; its reported distance, shrunk by a 1e-6 relative margin,
    is the bound the exact integer scale factor is derived from.
    """
    pts = [tuple(_frac(x) for x in p) for p in points]
    if len(set(pts)) != len(pts):
        raise DuplicatePoints("points must be pairwise distinct")
    if not pts:
        return [], NormalizeTransform(Fraction(1), Fraction(1, 2))
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise InvalidParams("mixed dimensions")
    if len(pts) >= 2:
        from scipy.spatial import cKDTree

        arr = np.array([[float(x) for x in p] for p in pts])
        dist, _ = cKDTree(arr).query(arr, k=2)
        dmin = float(dist[:, 1].min())
        dlow2 = Fraction(dmin * dmin) * Fraction(1 - Fraction(1, 10**6))
        if dlow2 <= 0:
            raise DuplicatePoints("nearest pair too close to separate")
        need = Fraction(d) / dlow2  # scale^2 must exceed d / dmin^2
        s = Fraction(math.isqrt(int(need)) + 1)
    else:
        s = Fraction(1)
    scaled = [tuple(s * x for x in p) for p in pts]
    for prime in _PRIMES:
        off = Fraction(1, prime)
        if all((x + off).denominator != 1 for p in scaled for x in p):
            tr = NormalizeTransform(s, off)
            return [tuple(x + off for x in p) for p in scaled], tr
    raise CoveringError("no shift candidate avoided the integer lattice")


# -- signed axis permutations -------------------------------------------------


@dataclass(frozen=True)
class SignedPermutation:
    """y_i = signs[i] * x[perm[i]]; an orthogonal map taking boxes to boxes."""

    perm: Tuple[int, ...]
    signs: Tuple[int, ...]

    @classmethod
    def identity(cls, d: int) -> "SignedPermutation":
        return cls(tuple(range(d)), (1,) * d)

    @property
    def is_identity(self) -> bool:
        return self.perm == tuple(range(len(self.perm))) and all(
            s == 1 for s in self.signs
        )

    def apply_point(self, p: Sequence[Rational]) -> Point:
        return tuple(self.signs[i] * _frac(p[self.perm[i]]) for i in range(len(self.perm)))

    def apply_box(self, b: Box) -> Box:
        out = []
        for i in range(len(self.perm)):
            lo, hi = b[self.perm[i]]
            out.append((lo, hi) if self.signs[i] > 0 else (-hi, -lo))
        return tuple(out)

    def apply_cube(self, c: FreeCube) -> FreeCube:
        b = self.apply_box(c.box())
        return FreeCube(tuple(lo for lo, _ in b), c.side)

    @classmethod
    def sending_to_bottom(cls, orientation: Tuple[int, int], d: int) -> "SignedPermutation":
        """Map whose image of the orientation vector is -e1."""
        axis, sign = orientation
        perm = [axis] + [i for i in range(d) if i != axis]
        signs = [-sign] + [1] * (d - 1)
        return cls(tuple(perm), tuple(signs))


# -- algorithm state ----------------------------------------------------------


class CubeState:
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    A4 = "A4"
    A5 = "A5"
    A6 = "A6"


_YELLOW_STATES = (CubeState.A2, CubeState.A3)
_CARRIER_STATES = (CubeState.A4, CubeState.A5, CubeState.A6)


@dataclass
class _CellInfo:
    state: str
    green: Optional[Box] = None  # A2/A3: the green cube inside
    maxblue: Optional[Box] = None  # A3/A4/A5/A6: maximal blue within
    avoid: Optional[Box] = None  # A3: the carrier subcell it was built around


@dataclass
class _Selected:
    cube: FreeCube
    green: Box
    orientation: Tuple[int, int]


@dataclass
class PhaseStats:
    level: int
    processed: int = 0
    assigned: Dict[str, int] = field(default_factory=dict)
    yellows: int = 0
    central: int = 0
    deleted: int = 0


@dataclass
class CoverStats:
    phases: List[PhaseStats] = field(default_factory=list)
    s: int = 0
    b: int = 0
    g: int = 0
    orientation_counts: Dict[Tuple[int, int], int] = field(default_factory=dict)


@dataclass
class ShiftGraph:
    nodes: int
    edges: List[Tuple[int, int]]

    def in_degrees(self) -> List[int]:
        deg = [0] * self.nodes
        for _, j in self.edges:
            deg[j] += 1
        return deg

    def out_degrees(self) -> List[int]:
        deg = [0] * self.nodes
        for i, _ in self.edges:
            deg[i] += 1
        return deg


@dataclass
class CoverResult:
    K: List[FreeCube]  # uniform orientation: bott at the bottom
    axis_map: SignedPermutation
    stats: CoverStats


class _CoverRun:
    def __init__(self, points: List[Point], d: int, kappa: int, r: int, debug: bool):
        self.d = d
        self.kappa = kappa
        self.r = r
        self.debug = debug
        self.rho = 4 * kappa + 1
        self.m = self.rho**d
        self.points_by_id: Dict[int, Point] = dict(enumerate(points))
        self.active: Dict[int, Point] = dict(self.points_by_id)
        self.base_cell = {
            i: tuple(int(math.floor(x)) for x in p) for i, p in self.points_by_id.items()
        }
        self.offsets: Dict[int, Tuple[int, ...]] = {1: (0,) * d}
        self.states: Dict[int, Dict[Tuple[int, ...], _CellInfo]] = {0: {}}
        self.selected: List[_Selected] = []
        self.stats = CoverStats()
        self.level = 0

    # cell geometry ---------------------------------------------------------

    def cell_index(self, pid: int, level: int) -> Tuple[int, ...]:
        k1 = self.base_cell[pid]
        if level == 1:
            return k1
        off = self.offsets[level]
        side = self.rho ** (level - 1)
        return tuple((k - o) // side for k, o in zip(k1, off))

    def _all_cells(self, level: int) -> Set[Tuple[int, ...]]:
        """Level cells of every input point, deleted or not."""
        return {self.cell_index(pid, level) for pid in self.base_cell}

    def cell_box(self, idx: Tuple[int, ...], level: int) -> Box:
        off = self.offsets[level]
        side = Fraction(self.rho) ** (level - 1)
        return tuple(
            (o + k * side, o + (k + 1) * side) for k, o in zip(idx, off)
        )

    def child_shift(self, level: int) -> Tuple[int, ...]:
        """Offset of level-(level-1) cell indices under level-level cells."""
        if level == 1:
            return (0,) * self.d
        o_hi = self.offsets[level]
        o_lo = self.offsets[level - 1]
        side = self.rho ** (level - 2)
        return tuple((a - b) // side for a, b in zip(o_hi, o_lo))

    def parent_index(self, child: Tuple[int, ...], level: int) -> Tuple[int, ...]:
        t = self.child_shift(level)
        return tuple((c - ti) // self.rho for c, ti in zip(child, t))

    # phase machinery ---------------------------------------------------------

    def all_in_single_cell(self) -> bool:
        # termination watches the input points, not the surviving ones:
        # deletions silence counting but pending labels must still ripen
        if len(self.base_cell) <= 1:
            return True
        if self.level == 0:
            cells = {
                tuple(math.floor(x * self.rho) for x in p)
                for p in self.points_by_id.values()
            }
            return len(cells) <= 1
        return len(self._all_cells(self.level)) <= 1

    def run(self) -> None:
        # keep going past the single-cube point while a yellow is still
        # pending: its green deserves the selection phase it would get in
        # a larger input (a yellow phase deletes points, so this ends)
        while True:
            done = self.all_in_single_cell()
            pending = any(
                info.state in _YELLOW_STATES
                for info in self.states.get(self.level, {}).values()
            )
            if done and not pending:
                break
            self.level += 1
            self.run_phase(self.level)

    def run_phase(self, level: int) -> None:
        ps = PhaseStats(level=level)
        cell_pts: Dict[Tuple[int, ...], List[int]] = {}
        for pid in self.active:
            cell_pts.setdefault(self.cell_index(pid, level), []).append(pid)
        parent_specials: Dict[Tuple[int, ...], List[Tuple[Tuple[int, ...], _CellInfo]]] = {}
        for child, info in self.states[level - 1].items():
            parent_specials.setdefault(self.parent_index(child, level), []).append(
                (child, info)
            )
        new_states: Dict[Tuple[int, ...], _CellInfo] = {}
        yellows: List[Tuple[int, ...]] = []
        new_blues: Set[Tuple[int, ...]] = set()
        for cell in sorted(set(cell_pts) | set(parent_specials)):
            pts = cell_pts.get(cell, [])
            specials = parent_specials.get(cell, [])
            info = self.process_cell(cell, level, pts, specials, ps)
            ps.processed += 1
            ps.assigned[info.state] = ps.assigned.get(info.state, 0) + 1
            if info.state != CubeState.A1:
                new_states[cell] = info
            if info.state in _YELLOW_STATES:
                yellows.append(cell)
            if info.state in (CubeState.A5, CubeState.A6):
                new_blues.add(cell)
            if self.debug:
                self._assert_state(info, len(pts))
        ps.yellows = len(yellows)
        # step 3: next-level offset by the central-position pigeonhole
        t = self.choose_offset(yellows, level)
        self.offsets[level + 1] = tuple(
            o + ti * self.rho ** (level - 1) for o, ti in zip(self.offsets[level], t)
        )
        # step 4: permanent deletion inside yellow and newly blue cells
        for cell in set(yellows) | new_blues:
            for pid in cell_pts.get(cell, ()):
                if pid in self.active:
                    del self.active[pid]
                    ps.deleted += 1
        # step 5: unlabel yellows that did not land in central position
        for cell in yellows:
            if all((c - ti - 2 * self.kappa) % self.rho == 0 for c, ti in zip(cell, t)):
                ps.central += 1
                continue
            info = new_states[cell]
            if info.state == CubeState.A2:
                del new_states[cell]
            else:  # A3 -> A4, the enclosed blue stays
                info.state = CubeState.A4
                info.green = None
        self.states[level] = new_states
        self.stats.phases.append(ps)

    def choose_offset(self, yellows: List[Tuple[int, ...]], level: int) -> Tuple[int, ...]:
        if yellows:
            # each yellow is central for exactly one offset; some offset
            # therefore meets the 1/rho^d quota, pick the smallest such
            votes: Dict[Tuple[int, ...], int] = {}
            for cell in yellows:
                t = tuple((c - 2 * self.kappa) % self.rho for c in cell)
                votes[t] = votes.get(t, 0) + 1
            quota = Fraction(len(yellows), self.m)
            return sorted(t for t, v in votes.items() if v >= quota)[0]
        # unconstrained phase: align the blocks to the occupied range so
        # the levels keep coalescing (any fixed offset could leave a grid
        # plane between two point clusters forever)
        cells = self._all_cells(level)
        mins = [min(c[ax] for c in cells) for ax in range(self.d)]
        return tuple(mn % self.rho for mn in mins)

    def process_cell(
        self,
        cell: Tuple[int, ...],
        level: int,
        pts: List[int],
        specials: List[Tuple[Tuple[int, ...], _CellInfo]],
        ps: PhaseStats,
    ) -> _CellInfo:
        yellow = [(c, i) for c, i in specials if i.state in _YELLOW_STATES]
        carriers = [(c, i) for c, i in specials if i.state in _CARRIER_STATES]
        if len(yellow) > 1:
            raise CoveringError("two yellow subcells in one cell; offsets broken")
        n = len(pts)
        r = self.r
        if not specials:
            if n < r:
                return _CellInfo(CubeState.A1)
            self.stats.g += 1
            return _CellInfo(CubeState.A2, green=self.cell_box(cell, level))
        if yellow and yellow[0][1].state == CubeState.A2:
            gcell, ginfo = yellow[0]
            gbox = self.cell_box(gcell, level - 1)
            if not carriers:
                self._place_selected(cell, level, gbox, avoid=None)
                self.stats.b += 1
                self.stats.s += 1
                return _CellInfo(CubeState.A5, maxblue=self.cell_box(cell, level))
            if len(carriers) == 1:
                dbox = self.cell_box(carriers[0][0], level - 1)
                self._place_selected(cell, level, gbox, avoid=dbox)
                self.stats.b += 2
                self.stats.s += 1
                return _CellInfo(CubeState.A6, maxblue=self.cell_box(cell, level))
            self.stats.b += 1
            return _CellInfo(CubeState.A6, maxblue=self.cell_box(cell, level))
        if yellow:  # the A3 case
            ycell, yinfo = yellow[0]
            if not carriers:
                self._place_selected(cell, level, yinfo.green, avoid=yinfo.avoid)
                self.stats.b += 2
                self.stats.s += 1
                return _CellInfo(CubeState.A6, maxblue=self.cell_box(cell, level))
            self.stats.b += 1
            return _CellInfo(CubeState.A6, maxblue=self.cell_box(cell, level))
        if len(carriers) >= 2:
            self.stats.b += 1
            return _CellInfo(CubeState.A6, maxblue=self.cell_box(cell, level))
        # exactly one carrier subcell, no yellow
        dcell, dinfo = carriers[0]
        dbox = self.cell_box(dcell, level - 1)
        maxblue = dinfo.maxblue if dinfo.state == CubeState.A4 else dbox
        threshold = (3**self.d - 1) * r
        if n >= threshold:
            qbox = self.cell_box(cell, level)
            coords = [self.active[pid] for pid in pts]
            for cand in _complement_cubes(qbox, dbox):
                cnt = sum(1 for p in coords if point_in_box_halfopen(p, cand))
                if cnt >= r:
                    self.stats.g += 1
                    return _CellInfo(
                        CubeState.A3, green=cand, maxblue=maxblue, avoid=dbox
                    )
            # no complement cube is r-heavy (points hide in the carrier):
            # fall back to the unlabeled state
        return _CellInfo(CubeState.A4, maxblue=maxblue)

    def _place_selected(
        self,
        cell: Tuple[int, ...],
        level: int,
        gbox: Box,
        avoid: Optional[Box],
    ) -> FreeCube:
        """Build the selected cube whose kappa-side-cube is the green gbox."""
        qbox = self.cell_box(cell, level)
        gside = gbox[0][1] - gbox[0][0]
        big = (2 * self.kappa + 1) * gside
        best = None
        for axis in range(self.d):
            for sign in (-1, 1):
                corner = []
                ok = True
                for i in range(self.d):
                    lo, hi = gbox[i]
                    if i == axis:
                        c = lo if sign < 0 else hi - big
                    else:
                        c = lo - (big - gside) / 2
                    if c < qbox[i][0] or c + big > qbox[i][1]:
                        ok = False
                        break
                    corner.append(c)
                if not ok:
                    continue
                cand = tuple((c, c + big) for c in corner)
                if avoid is not None and boxes_overlap_interior(cand, avoid):
                    continue
                if sign < 0:
                    clearance = qbox[axis][1] - cand[axis][1]
                else:
                    clearance = cand[axis][0] - qbox[axis][0]
                key = (-clearance, axis, sign)
                if best is None or key < best[0]:
                    best = (key, corner, (axis, sign))
        if best is None:
            raise CoveringError("no room for a selected cube; geometry broken")
        _, corner, orientation = best
        cube = FreeCube(tuple(corner), big)
        self.selected.append(_Selected(cube, gbox, orientation))
        return cube

    def _assert_state(self, info: _CellInfo, n: int) -> None:
        m, r = self.m, self.r
        st = info.state
        if st == CubeState.A1:
            assert n < r
        elif st == CubeState.A2:
            assert r <= n < m * r and info.green is not None
        elif st == CubeState.A3:
            assert n < 2 * m * r and info.green is not None and info.maxblue is not None
        elif st == CubeState.A4:
            assert n < 2 * m * r
        elif st == CubeState.A5:
            assert n < m * r
        elif st == CubeState.A6:
            assert n < 2 * m * m * r

    def result(self) -> CoverResult:
        counts: Dict[Tuple[int, int], int] = {}
        for sel in self.selected:
            counts[sel.orientation] = counts.get(sel.orientation, 0) + 1
        self.stats.orientation_counts = counts
        if self.debug:
            assert self.stats.b <= 2 * max(self.stats.s, 1)
        if not self.selected:
            return CoverResult([], SignedPermutation.identity(self.d), self.stats)
        best = max(sorted(counts), key=lambda o: counts[o])
        amap = (
            SignedPermutation.identity(self.d)
            if best == (0, -1)
            else SignedPermutation.sending_to_bottom(best, self.d)
        )
        K = [amap.apply_cube(s.cube) for s in self.selected if s.orientation == best]
        return CoverResult(K, amap, self.stats)


def run_covering(
    points: Sequence[Sequence[Rational]],
    d: int,
    kappa: int,
    r: int,
    debug: bool = False,
) -> CoverResult:
    """Run the covering algorithm on normalized points.

    Points must already be normalized (no integer coordinate, minimal
    distance above the unit-cube diameter); see normalize_points.
    Deterministic for a fixed input order.
    """
    if r < 1 or kappa < 1 or d < 1:
        raise InvalidParams("need r >= 1, kappa >= 1, d >= 1")
    pts = [tuple(_frac(x) for x in p) for p in points]
    if any(len(p) != d for p in pts):
        raise InvalidParams("point dimension mismatch")
    if len(set(pts)) != len(pts):
        raise DuplicatePoints("points must be distinct")
    if any(x.denominator == 1 for p in pts for x in p):
        raise InvalidParams("integer coordinate: input is not normalized")
    run = _CoverRun(pts, d, kappa, r, debug)
    run.run()
    return run.result()


# -- shift graph --------------------------------------------------------------


def _float_bounds(boxes: Sequence[Box], pad: float) -> np.ndarray:
    # pad is relative: each bound moves outward by pad * (1 + |value|),
    # which dominates the Fraction-to-float rounding error
    arr = np.empty((len(boxes), len(boxes[0]), 2), dtype=float)
    for i, b in enumerate(boxes):
        for j, (lo, hi) in enumerate(b):
            flo, fhi = float(lo), float(hi)
            arr[i, j, 0] = flo - pad * (1.0 + abs(flo))
            arr[i, j, 1] = fhi + pad * (1.0 + abs(fhi))
    return arr


def _overlap_candidates(a: np.ndarray, b: np.ndarray):
    """Index pairs whose padded float boxes overlap; superset of the truth.

    Sweeps sorted first-axis intervals so the quadratic mask never
    materializes; remaining axes are checked vectorized per window.
    """
    order = np.argsort(b[:, 0, 0], kind="stable")
    b_lo0 = b[order, 0, 0]
    wmax = float((b[:, 0, 1] - b[:, 0, 0]).max()) if len(b) else 0.0
    pairs = []
    for i in range(a.shape[0]):
        lo, hi = a[i, 0, 0], a[i, 0, 1]
        j0 = np.searchsorted(b_lo0, lo - wmax, side="left")
        j1 = np.searchsorted(b_lo0, hi, side="right")
        if j0 >= j1:
            continue
        window = order[j0:j1]
        sub = b[window]
        ok = sub[:, 0, 1] > lo
        for ax in range(1, a.shape[1]):
            ok &= (sub[:, ax, 0] < a[i, ax, 1]) & (sub[:, ax, 1] > a[i, ax, 0])
        for j in window[ok]:
            pairs.append((i, int(j)))
    return pairs


def _check_non_overlapping(boxes: List[Box]) -> Optional[Tuple[int, int]]:
    if len(boxes) < 2:
        return None
    arr = _float_bounds(boxes, 1e-12)
    for i, j in _overlap_candidates(arr, arr):
        if i < j and boxes_overlap_interior(boxes[i], boxes[j]):
            return (int(i), int(j))
    return None


def _corridor_open(
    base: List[Tuple[Fraction, Fraction]],
    blockers: List[List[Tuple[Fraction, Fraction]]],
) -> bool:
    """Is any lateral point of base outside every (closed) blocker box?

    Exact decision by coordinate compression: the uncovered set changes
    only at blocker boundaries, so testing the critical coordinates and
    the midpoints between consecutive ones decides emptiness.
    """
    if not base:  # one-dimensional ambient space: the corridor is a point
        return not blockers
    axes_cands: List[List[Fraction]] = []
    for ax, (lo, hi) in enumerate(base):
        crit = {lo, hi}
        for bl in blockers:
            bl_lo, bl_hi = bl[ax]
            if lo <= bl_lo <= hi:
                crit.add(bl_lo)
            if lo <= bl_hi <= hi:
                crit.add(bl_hi)
        vals = sorted(crit)
        cands = list(vals)
        for a, b in zip(vals, vals[1:]):
            cands.append((a + b) / 2)
        axes_cands.append(sorted(cands))
    for combo in itertools.product(*axes_cands):
        if not any(
            all(bl[ax][0] <= x <= bl[ax][1] for ax, x in enumerate(combo))
            for bl in blockers
        ):
            return True
    return False


def _edge_condition2(
    k: Sequence[FreeCube], i: int, j: int, kappa: int
) -> bool:
    """A vertical segment from the bottom of bott(K[i]) to the top of K[j]
    avoiding every other cube of K."""
    bi = bott(k[i], kappa).box()
    bj = k[j].box()
    base = []
    for ax in range(1, len(bi)):
        lo = max(bi[ax][0], bj[ax][0])
        hi = min(bi[ax][1], bj[ax][1])
        if lo > hi:
            return False
        base.append((lo, hi))
    seg_lo = min(bi[0][0], bj[0][1])
    seg_hi = max(bi[0][0], bj[0][1])
    blockers = []
    for t, cube in enumerate(k):
        if t in (i, j):
            continue
        cb = cube.box()
        if cb[0][1] < seg_lo or cb[0][0] > seg_hi:
            continue
        lat = [cb[ax] for ax in range(1, len(cb))]
        if any(l[0] > b[1] or l[1] < b[0] for l, b in zip(lat, base)):
            continue
        blockers.append(lat)
    return _corridor_open(base, blockers)


def _worker_count() -> int:
    import os

    try:
        return max(1, int(os.environ.get("STLAB_WORKERS", "1")))
    except ValueError:
        return 1


def _condition2_chunk(args):
    cubes, pairs, kappa = args
    return [(i, j) for i, j in pairs if _edge_condition2(cubes, i, j, kappa)]


def build_shift_graph(k: Sequence[FreeCube], kappa: int = 1) -> ShiftGraph:
    """Exact shift graph of a family of non-overlapping cubes.

    Edge (Q1, Q2) iff the below-spill of the shifted bottom side-cube
    of Q1 meets shift(Q2) in a common interior point and an unblocked
    vertical segment joins bott(Q1) to the top of Q2.  The corridor
    checks fan out over STLAB_WORKERS processes when that is set above
    one and enough candidate pairs survive the overlap prefilter.
    """
    cubes = list(k)
    boxes = [c.box() for c in cubes]
    bad = _check_non_overlapping(boxes)
    if bad is not None:
        raise OverlappingInput("cubes %d and %d overlap" % bad)
    if len(cubes) < 2:
        return ShiftGraph(len(cubes), [])
    shift_bott = [shift_cube(bott(c, kappa)).box() for c in cubes]
    bott_boxes = [bott(c, kappa).box() for c in cubes]
    shifts = [shift_cube(c).box() for c in cubes]
    pad = 1e-9
    cand = _overlap_candidates(_float_bounds(shift_bott, pad), _float_bounds(shifts, pad))
    survivors = []
    for i, j in cand:
        i, j = int(i), int(j)
        if i == j:
            continue
        inter = tuple(
            (max(la, lb), min(ha, hb))
            for (la, ha), (lb, hb) in zip(shift_bott[i], shifts[j])
        )
        if any(lo >= hi for lo, hi in inter):
            continue
        # spill outside bott(Q1): the open intersection must not sit inside it
        if all(
            bl <= lo and hi <= bh
            for (lo, hi), (bl, bh) in zip(inter, bott_boxes[i])
        ):
            continue
        survivors.append((i, j))
    workers = _worker_count()
    if workers > 1 and len(survivors) >= 4 * workers:
        from concurrent.futures import ProcessPoolExecutor

        chunks = [
            (cubes, survivors[w::workers], kappa) for w in range(workers)
        ]
        edges: List[Tuple[int, int]] = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_condition2_chunk, chunks):
                edges.extend(part)
    else:
        edges = [(i, j) for i, j in survivors if _edge_condition2(cubes, i, j, kappa)]
    return ShiftGraph(len(cubes), sorted(edges))


# -- verification --------------------------------------------------------------


@dataclass
class VerificationReport:
    n: int
    k_count: int
    non_overlap_ok: bool
    bott_ok: bool
    bott_failures: List[int]
    precondition_met: bool
    count_bound: float
    count_ok: bool
    edges: int
    edges_ok: bool
    max_in_degree: int
    in_degree_ok: bool

    @property
    def all_ok(self) -> bool:
        return (
            self.non_overlap_ok
            and self.bott_ok
            and self.count_ok
            and self.edges_ok
            and self.in_degree_ok
        )


def _count_in_box_exact(points: List[Point], box: Box) -> int:
    return sum(1 for p in points if point_in_box_closed(p, box))


def verify_cover(
    points: Sequence[Sequence[Rational]],
    result: CoverResult,
    kappa: int,
    r: int,
) -> VerificationReport:
    """Check the three cover guarantees plus the shift-graph degree bound.

    Points are the ones handed to run_covering; the verifier applies
    the result's axis map itself.  The cube-count bound is only
    asserted when its precondition r <= n / (4 rho^(2d)) holds; the
    report records whether it did.
    """
    pts = [result.axis_map.apply_point(tuple(_frac(x) for x in p)) for p in points]
    n = len(pts)
    K = result.K
    d = len(pts[0]) if pts else (K[0].d if K else 1)
    rho = 4 * kappa + 1

    boxes = [c.box() for c in K]
    non_overlap_ok = _check_non_overlapping(boxes) is None if K else True

    bott_failures: List[int] = []
    if K:
        bott_boxes = [bott(c, kappa).box() for c in K]
        arr = np.array([[float(x) for x in p] for p in pts]) if pts else np.empty((0, d))
        order = np.argsort(arr[:, 0], kind="stable") if n else np.empty(0, dtype=int)
        xs = arr[order, 0] if n else np.empty(0)
        for i, bb in enumerate(bott_boxes):
            cnt = 0
            if n:
                lo = np.array([float(l) - 1e-9 * (1 + abs(float(l))) for l, _ in bb])
                hi = np.array([float(h) + 1e-9 * (1 + abs(float(h))) for _, h in bb])
                j0 = np.searchsorted(xs, lo[0], side="left")
                j1 = np.searchsorted(xs, hi[0], side="right")
                window = order[j0:j1]
                sub = arr[window]
                ok = np.ones(len(window), dtype=bool)
                for ax in range(1, d):
                    ok &= (sub[:, ax] >= lo[ax]) & (sub[:, ax] <= hi[ax])
                for idx in window[ok]:
                    if point_in_box_closed(pts[int(idx)], bb):
                        cnt += 1
                        if cnt >= r:
                            break
            if cnt < r:
                bott_failures.append(i)
    bott_ok = not bott_failures

    precondition_met = Fraction(r) <= Fraction(n, 4 * rho ** (2 * d)) if n else False
    bound = Fraction(n, 32 * d * rho ** (2 * d) * r)
    count_ok = (len(K) > bound) if precondition_met else True

    if K and non_overlap_ok:
        graph = build_shift_graph(K, kappa)
    else:
        graph = ShiftGraph(len(K), [])
    in_deg = graph.in_degrees()
    max_in = max(in_deg) if in_deg else 0

    return VerificationReport(
        n=n,
        k_count=len(K),
        non_overlap_ok=non_overlap_ok,
        bott_ok=bott_ok,
        bott_failures=bott_failures,
        precondition_met=precondition_met,
        count_bound=float(bound),
        count_ok=count_ok,
        edges=len(graph.edges),
        edges_ok=len(graph.edges) <= len(K),
        max_in_degree=max_in,
        in_degree_ok=max_in <= 1,
    )
