import itertools
import random
from fractions import Fraction

import pytest

from stlab.exact import ComplexLine, ComplexPoint, GaussianRational, incident, line_through
from stlab.generators import gen_erdos, gen_random_system
from stlab.incidence import (
    DuplicateInput,
    TooSmallPattern,
    ZeroElement,
    beck_stats,
    check_bounds,
    check_rich_bound,
    count_incidences,
    count_indexed,
    count_naive,
    rich_lines,
    similar_copies,
    sum_product,
)

GR = GaussianRational


def grid_points(w, h):
    return [
        ComplexPoint(GR(x), GR(y)) for x in range(1, w + 1) for y in range(1, h + 1)
    ]


def oracle_count(points, lines):
    # dumb reference loop, kept separate from the engine's own sweep
    return sum(1 for l in lines for p in points if incident(p, l))


def oracle_pair_lines(points):
    lines = set()
    for p, q in itertools.combinations(points, 2):
        lines.add(line_through(p, q))
    counts = {}
    for l in lines:
        counts[l] = sum(1 for p in points if incident(p, l))
    return counts


def test_count_examples():
    p = ComplexPoint(GR(0), GR(1))
    l = ComplexLine.slanted(GR(2), GR(1))
    assert count_incidences([p], [l]).I == 1
    pts, lines = gen_erdos(2)
    assert count_incidences(pts, lines).I == oracle_count(pts, lines) == 16
    assert count_incidences(pts, []).I == 0


def test_duplicate_input_rejected():
    p = ComplexPoint(GR(1), GR(1))
    with pytest.raises(DuplicateInput):
        count_incidences([p, p], [])
    l = ComplexLine.vertical(GR(1))
    with pytest.raises(DuplicateInput):
        count_incidences([], [l, l])


def test_indexed_equals_naive_on_random_systems():
    for seed in range(30):
        n = 20 + (seed * 13) % 60
        e = 20 + (seed * 7) % 60
        pts, lines = gen_random_system(n, e, seed)
        assert count_naive(pts, lines) == count_indexed(pts, lines)


def test_rich_lines_grid():
    pts = grid_points(3, 3)
    counts = oracle_pair_lines(pts)
    expect3 = {l for l, c in counts.items() if c >= 3}
    got3 = rich_lines(pts, 3)
    assert {r.line for r in got3} == expect3
    assert len(got3) == 8  # 3 rows, 3 columns, 2 diagonals
    assert all(r.count == 3 for r in got3)
    # monotone in t, counts independent of t
    got2 = rich_lines(pts, 2)
    assert {r.line for r in got3} <= {r.line for r in got2}
    by_line = {r.line: r.count for r in got2}
    for r in got3:
        assert by_line[r.line] == r.count


def test_rich_lines_examples():
    collinear = [ComplexPoint(GR(k), GR(2 * k)) for k in range(3)]
    rich = rich_lines(collinear, 2)
    assert len(rich) == 1 and rich[0].count == 3
    general = [ComplexPoint(GR(0), GR(0)), ComplexPoint(GR(1), GR(0)), ComplexPoint(GR(0), GR(1))]
    assert rich_lines(general, 3) == []


def test_beck_stats():
    pts = grid_points(3, 3)
    counts = oracle_pair_lines(pts)
    assert beck_stats(pts) == (len(counts), max(counts.values()))
    assert beck_stats(pts) == (20, 3)
    collinear = [ComplexPoint(GR(k), GR(k)) for k in range(5)]
    assert beck_stats(collinear) == (1, 5)
    assert beck_stats(collinear[:2]) == (1, 2)


def test_check_bounds_erdos():
    pts, lines = gen_erdos(4)
    rep = check_bounds(pts, lines, C=1.0)
    assert rep.I == 4**4
    # I / (n^(2/3) e^(2/3)) is exactly 2^(-2/3)
    n, e = len(pts), len(lines)
    assert abs(rep.I / (n ** (2 / 3) * e ** (2 / 3)) - 2 ** (-2 / 3)) < 1e-12
    assert not check_bounds(pts, lines, C=1e70).violated
    one = check_bounds([ComplexPoint(GR(0), GR(0))], [ComplexLine.slanted(GR(1), GR(0))], C=1e70)
    assert one.I == 1 and not one.violated


def test_rich_bound_shape():
    pts, _ = gen_erdos(3)
    rep = check_rich_bound(pts, 3, 8.0)
    assert rep.rich_count <= rep.bound


def g(x, y=0):
    return GR(Fraction(x), Fraction(y))


def brute_sum_product(vals):
    return (
        len({x + y for x in vals for y in vals}),
        len({x * y for x in vals for y in vals}),
    )


def test_sum_product_examples():
    s, p = sum_product([g(1), g(2), g(3)])
    assert (s, p) == brute_sum_product([g(1), g(2), g(3)]) == (5, 6)
    # geometric progression: products collapse to 2n-1
    s, p = sum_product([g(1), g(2), g(4)])
    assert (s, p) == brute_sum_product([g(1), g(2), g(4)]) == (6, 5)
    assert sum_product([g(1)]) == (1, 1)
    with pytest.raises(ZeroElement):
        sum_product([g(0), g(1)])
    s, p = sum_product([g(0), g(1)], allow_zero=True)
    assert s == 3


def test_sum_progression_property():
    rng = random.Random(2)
    for trial in range(20):
        n = rng.randint(2, 12)
        start = rng.randint(1, 9)
        step = rng.randint(1, 5)
        prog = [g(start + k * step) for k in range(n)]
        s, _ = sum_product(prog)
        assert s == 2 * n - 1
        scattered = sorted({rng.randint(1, 500) for _ in range(n)})
        s2, _ = sum_product([g(v) for v in scattered])
        assert s2 >= 2 * len(scattered) - 1


def brute_similar_triangles(pattern_dists, ground):
    # every 3-subset, compared by squared-distance ratios
    hits = 0
    for s in itertools.combinations(ground, 3):
        d = sorted(
            ((a - b).abs2() for a, b in itertools.combinations(s, 2))
        )
        base = sorted(pattern_dists)
        # similar iff d is a common rational multiple of the pattern
        if all(d[i] * base[0] == d[0] * base[i] for i in range(3)):
            hits += 1
    return hits


def is_equilateral(a, b, c):
    # exact characterization: (a + wb + w^2 c)(a + w^2 b + wc) = 0 for the
    # primitive cube root w, which expands to a rational identity
    return a * a + b * b + c * c == a * b + b * c + c * a


def test_no_equilateral_in_grid():
    # an equilateral triangle has no Gaussian-rational coordinates, so the
    # zero count is certified by the exact subset sweep
    grid = [g(x, y) for x in range(3) for y in range(3)]
    assert sum(1 for s in itertools.combinations(grid, 3) if is_equilateral(*s)) == 0


def test_similar_copies_examples():
    grid = [g(x, y) for x in range(3) for y in range(3)]
    # segment pattern: every 2-subset is a copy
    for n in (2, 5, 9):
        ground = grid[:n]
        assert similar_copies([g(0), g(1)], ground) == n * (n - 1) // 2
    # identity copy always counted
    tri = [g(0), g(1), g(0, 1)]
    assert similar_copies(tri, tri) >= 1
    with pytest.raises(TooSmallPattern):
        similar_copies([g(0)], grid)


def test_similar_copies_right_triangle_grid_oracle():
    grid = [g(x, y) for x in range(3) for y in range(3)]
    tri = [g(0), g(1), g(0, 1)]  # isoceles right triangle
    pattern_dists = sorted((a - b).abs2() for a, b in itertools.combinations(tri, 2))
    assert similar_copies(tri, grid) == brute_similar_triangles(pattern_dists, grid)


def test_similar_invariance_under_common_similarity():
    rng = random.Random(7)
    pattern = [g(0), g(2), g(1, 1)]
    ground = [g(x, y) for x in range(4) for y in range(2)]
    base = similar_copies(pattern, ground)
    u = GR(Fraction(1, 2), Fraction(1, 3))
    v = GR(Fraction(-3), Fraction(5, 7))
    assert base == similar_copies([u * z + v for z in pattern], [u * z + v for z in ground])
    assert base > 0
