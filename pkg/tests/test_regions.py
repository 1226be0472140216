import math
import random
from fractions import Fraction

import pytest

from stlab.directions import gr_dist_deg
from stlab.exact import Flat2, FlatMeet, RVector4, flat_intersect
from stlab.generators import gen_bundle_fixture
from stlab.regions import (
    CANONICAL_SPANS,
    CombineDetail,
    FlatBundle,
    Halfspace,
    Region,
    RegionAssignment,
    TooFewPoints,
    canonical_flat,
    canonical_frame,
    combine,
    count_crossings,
    verify_regions,
)

F = Fraction


def test_canonical_frame_exact():
    (u1, u2), (v1, v2) = CANONICAL_SPANS
    # all four cross products vanish exactly
    for a in (u1, u2):
        for b in (v1, v2):
            assert sum(x * y for x, y in zip(a, b)) == 0
    # within each flat the printed spans are orthogonal too
    assert sum(x * y for x, y in zip(u1, u2)) == 0
    assert sum(x * y for x, y in zip(v1, v2)) == 0
    l1, l2 = canonical_frame()
    assert abs(gr_dist_deg(l1, l2) - 180.0) < 1e-9
    f = canonical_flat((F(1), F(2), F(3), F(4)), 0)
    assert f.contains(RVector4.of((F(1), F(2), F(3), F(4))))


def rand_anchor(rng, span=20):
    return tuple(F(rng.randint(-span, span), rng.randint(1, 7)) for _ in range(4))


def test_thales_antipodal_identity_exact():
    rng = random.Random(77)
    done = 0
    while done < 100:
        p, q = rand_anchor(rng), rand_anchor(rng)
        if p == q:
            continue
        x = flat_intersect(canonical_flat(p, 0), canonical_flat(q, 1))
        y = flat_intersect(canonical_flat(q, 0), canonical_flat(p, 1))
        assert x.kind == FlatMeet.POINT and y.kind == FlatMeet.POINT
        mid = tuple((a + b) / 2 for a, b in zip(p, q))
        d2 = sum((a - b) ** 2 for a, b in zip(p, q))
        for z in (x.point, y.point):
            r2 = sum((a - b) ** 2 for a, b in zip(z.as_tuple(), mid))
            assert r2 == d2 / 4  # exactly on the sphere over pq
        # antipodal: x + y = 2 * mid, exactly
        s = tuple(a + b for a, b in zip(x.point.as_tuple(), y.point.as_tuple()))
        assert s == tuple(2 * m for m in mid)
        done += 1


def test_perturbed_crossing_displacement():
    # tilted crossings stay within dist(p, q)/10 of the exact ones
    checked = 0
    for seed in range(8):
        anchors, bundle = gen_bundle_fixture(m=30, per_point=1, spread_deg=9.9, seed=seed)
        for i in range(0, 28, 2):
            p, q = anchors[i], anchors[i + 1]
            x = flat_intersect(canonical_flat(p, 0), canonical_flat(q, 1)).point
            z = flat_intersect(bundle.family1[i][0], bundle.family2[i + 1][0]).point
            d = math.sqrt(float(sum((a - b) ** 2 for a, b in zip(p, q))))
            dz = math.sqrt(
                float(sum((a - b) ** 2 for a, b in zip(x.as_tuple(), z.as_tuple())))
            )
            assert dz <= d / 10 + 1e-9
            checked += 1
    assert checked >= 100


def test_count_crossings():
    f1 = canonical_flat((F(0),) * 4, 0)
    f2 = canonical_flat((F(0),) * 4, 1)
    assert count_crossings([f1], [f2]) == 1
    assert count_crossings([f1], []) == 0
    # parallel translates inside one family never cross each other
    f1b = canonical_flat((F(5), F(0), F(0), F(0)), 0)
    assert count_crossings([f1], [f1b]) == 0
    lefts = [canonical_flat((F(k), F(0), F(0), F(0)), 0) for k in range(3)]
    rights = [canonical_flat((F(0), F(k), F(0), F(0)), 1) for k in range(4)]
    assert count_crossings(lefts, rights) == 12


def cluster_bundle(r, spread, seed):
    anchors, bundle = gen_bundle_fixture(27 * r, 2, spread, seed)
    return anchors, bundle


def test_combine_single_cluster():
    anchors, bundle = cluster_bundle(2, 0.0, 5)
    detail = CombineDetail()
    asg = combine(anchors, bundle, 2, detail)
    assert len(asg) >= 1
    rep = verify_regions(asg, bundle, 2)
    assert rep.all_ok
    assert detail.waived_precondition  # desk scale: r > 1e-8 n
    # spread-out single cluster gives pure shifted-box regions
    assert all(a.region.halfspace is None and len(a.region.boxes) == 1 for a in asg)


def test_combine_rejects_bad_r():
    anchors, bundle = cluster_bundle(1, 0.0, 6)
    with pytest.raises(Exception):
        combine(anchors, bundle, 0)
    with pytest.raises(TooFewPoints):
        combine(anchors, bundle, 5)  # 27*5 > 27 anchors


def stacked_anchors(r, seed, dx1=40):
    rng = random.Random(seed)
    pts, seen, t = [], set(), 0

    def cluster(center, count, spread):
        nonlocal t
        got = 0
        while got < count:
            p = tuple(
                F(center[i] + rng.randint(-spread, spread)) + F(2 * (t + i) + 1, 2**20)
                for i in range(4)
            )
            t += 4
            if p not in seen:
                seen.add(p)
                pts.append(p)
                got += 1

    cluster((0, 0, 0, 0), 27 * r, 6)
    cluster((dx1, 0, 0, 0), 27 * r, 6)
    return pts


def exact_bundle(anchors):
    return FlatBundle(
        list(anchors),
        [[canonical_flat(a, 0)] for a in anchors],
        [[canonical_flat(a, 1)] for a in anchors],
    )


def test_combine_out_degree_one_case():
    anchors = stacked_anchors(2, seed=1)
    bundle = exact_bundle(anchors)
    detail = CombineDetail()
    asg = combine(anchors, bundle, 2, detail)
    assert detail.out_degree1 >= 1
    rep = verify_regions(asg, bundle, 2)
    assert rep.all_ok


def test_verify_regions_catches_boundary_crossing():
    # a crossing exactly on the region boundary is rejected
    p = (F(0), F(0), F(0), F(0))
    q = (F(2), F(0), F(0), F(0))
    bundle = exact_bundle([p, q])
    x = flat_intersect(canonical_flat(p, 0), canonical_flat(q, 1)).point
    y = flat_intersect(canonical_flat(q, 0), canonical_flat(p, 1)).point
    hi = x.as_tuple()[0]
    # box whose top face passes through the first crossing and clips y out
    box = tuple((v - F(3), hi) if ax == 0 else (v - F(3), v + F(3)) for ax, v in enumerate(x.as_tuple()))
    bad = RegionAssignment(Region((box,)), (0, 1))
    rep = verify_regions([bad], bundle, 2)
    chk = rep.checks[0]
    assert chk.pair_failures == [(0, 1)] or not chk.interior_ok


def test_verify_regions_catches_overlap():
    b1 = tuple((F(0), F(2)) for _ in range(4))
    b2 = tuple((F(1), F(3)) for _ in range(4))
    a1 = RegionAssignment(Region((b1,)), (0,))
    a2 = RegionAssignment(Region((b2,)), (1,))
    bundle = exact_bundle([(F(1),) * 4, (F(3, 2),) * 4])
    rep = verify_regions([a1, a2], bundle, 1)
    assert not rep.disjoint_ok and rep.overlap_witness == (0, 1)
    # r = 1 regions with a single point vacuously satisfy the pair condition
    a3 = RegionAssignment(Region((tuple((F(10), F(12)) for _ in range(4)),)), (1,))
    rep2 = verify_regions([a3], bundle, 1)
    assert rep2.checks[0].pair_failures == []


def test_region_membership_and_margin():
    box = tuple((F(0), F(1)) for _ in range(4))
    region = Region((box,))
    assert region.contains_interior((F(1, 2),) * 4)
    assert not region.contains_interior((F(0), F(1, 2), F(1, 2), F(1, 2)))
    m = F(1, 10)
    assert not region.contains_interior((F(1, 20),) * 4, m)
    hs = Halfspace((F(1), F(0), F(0), F(0)), F(1, 2))
    clipped = Region((box,), hs)
    assert clipped.contains_interior((F(3, 4), F(1, 2), F(1, 2), F(1, 2)))
    assert not clipped.contains_interior((F(1, 4), F(1, 2), F(1, 2), F(1, 2)))


def test_region_overlap_respects_halfspace():
    box = tuple((F(0), F(2)) for _ in range(4))
    upper = Region((box,), Halfspace((F(1), F(0), F(0), F(0)), F(1)))
    lower = Region((box,), Halfspace((F(-1), F(0), F(0), F(0)), F(-1)))
    assert not upper.overlaps(lower)
    both = Region((box,))
    assert upper.overlaps(both)


def test_bundle_alignment_measure():
    anchors, bundle = gen_bundle_fixture(10, 2, 5.0, seed=3)
    worst = bundle.check_alignment()
    assert worst <= 5.0 + 1e-6
    anchors0, bundle0 = gen_bundle_fixture(10, 1, 0.0, seed=3)
    assert bundle0.check_alignment() < 1e-9
    from stlab.generators import SpreadTooLarge

    with pytest.raises(SpreadTooLarge):
        gen_bundle_fixture(10, 1, 15.0, seed=1)


def test_crossings_distinct_across_regions():
    # disjoint interiors force the per-region crossing sets apart
    from stlab.regions import crossing_points

    anchors = stacked_anchors(2, seed=1)
    bundle = exact_bundle(anchors)
    asg = combine(anchors, bundle, 2)
    assert len(asg) >= 2
    seen = {}
    for ridx, a in enumerate(asg):
        for p in a.point_ids:
            for q in a.point_ids:
                if p == q:
                    continue
                for z in crossing_points(bundle.family1[p], bundle.family2[q]):
                    if a.region.contains_interior(z.as_tuple()):
                        key = z.as_tuple()
                        assert seen.setdefault(key, ridx) == ridx
