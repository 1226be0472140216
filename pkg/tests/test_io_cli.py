import io
import subprocess
import sys
from fractions import Fraction

import pytest

from stlab import fileio
from stlab.cli import main
from stlab.covering import normalize_points, run_covering
from stlab.exact import ComplexLine, ComplexPoint, GaussianRational
from stlab.generators import gen_bundle_fixture, gen_erdos, gen_random_system
from stlab.regions import CombineDetail, combine

GR = GaussianRational
F = Fraction


def test_rational_format_roundtrip():
    for x in (F(0), F(3), F(-7, 2), F(22, 7)):
        assert fileio.parse_rational(fileio.format_rational(x)) == x
    assert fileio.format_rational(F(4, 2)) == "2"


def test_system_roundtrip():
    pts, lines = gen_random_system(12, 15, 3)
    text = fileio.dump_system(pts, lines)
    pts2, lines2 = fileio.loads(text, fileio.load_system)
    assert pts2 == pts and lines2 == lines
    assert text.startswith("stlab system 1\n")


def test_points_roundtrip():
    pts = [(F(1, 3), F(-2)), (F(5), F(7, 11))]
    text = fileio.dump_points(pts, 2)
    pts2, d = fileio.loads(text, fileio.load_points)
    assert pts2 == pts and d == 2


def test_bundle_roundtrip():
    _, bundle = gen_bundle_fixture(5, 2, 4.0, seed=9)
    text = fileio.dump_bundle(bundle)
    b2 = fileio.loads(text, fileio.load_bundle)
    assert b2.anchors == bundle.anchors
    assert b2.family1 == bundle.family1 and b2.family2 == bundle.family2


def test_cover_roundtrip(tmp_path):
    pts = [(F(k) + F(1, 2), F(2 * k) + F(1, 3)) for k in range(6)]
    norm, _ = normalize_points(pts)
    res = run_covering(norm, 2, 1, 1)
    text = fileio.dump_cover(norm, res, 2, 1, 1)
    cf = fileio.loads(text, fileio.load_cover)
    assert cf.points == norm
    assert cf.result.K == res.K
    assert cf.result.axis_map == res.axis_map
    assert (cf.d, cf.kappa, cf.r) == (2, 1, 1)


def test_regions_roundtrip():
    anchors, bundle = gen_bundle_fixture(27, 1, 0.0, seed=2)
    asg = combine(anchors, bundle, 1)
    text = fileio.dump_regions(asg, 1)
    asg2, r = fileio.loads(text, fileio.load_regions)
    assert r == 1 and len(asg2) == len(asg)
    for a, b in zip(asg, asg2):
        assert a.region == b.region and a.point_ids == b.point_ids


def test_atomic_write(tmp_path):
    path = tmp_path / "out.txt"
    fileio.write_atomic(str(path), "hello\n")
    assert path.read_text() == "hello\n"
    fileio.write_atomic(str(path), "again\n")
    assert path.read_text() == "again\n"


# -- CLI ---------------------------------------------------------------------


def test_cli_gen_incidences_pipeline(tmp_path, capsys):
    sysfile = tmp_path / "erdos.txt"
    assert main(["gen", "erdos", "--k", "3", "--out", str(sysfile)]) == 0
    assert main(["incidences", "--in", str(sysfile)]) == 0
    out = capsys.readouterr().out
    assert "I=81 n=54 e=27" in out


def test_cli_pipe_via_subprocess():
    gen = subprocess.run(
        [sys.executable, "-m", "stlab.cli", "gen", "erdos", "--k", "3"],
        capture_output=True,
        text=True,
    )
    assert gen.returncode == 0
    cnt = subprocess.run(
        [sys.executable, "-m", "stlab.cli", "incidences"],
        input=gen.stdout,
        capture_output=True,
        text=True,
    )
    assert cnt.returncode == 0
    assert "I=81 n=54 e=27" in cnt.stdout


def test_cli_dirs(capsys):
    assert main(["dirs", "dist", "0", "inf"]) == 0
    assert abs(float(capsys.readouterr().out) - 180.0) < 1e-9
    assert main(["dirs", "orth", "1", "-1"]) == 0
    assert capsys.readouterr().out.strip() == "true"
    assert main(["dirs", "cover-sphere", "--delta", "90", "--check-samples", "20000"]) == 0
    assert "centers=" in capsys.readouterr().out


def test_cli_cover_verify_cycle(tmp_path, capsys):
    pts = [(F(k), F((7 * k) % 23)) for k in range(40)]
    ptsfile = tmp_path / "pts.txt"
    fileio.write_atomic(str(ptsfile), fileio.dump_points(pts, 2))
    coverfile = tmp_path / "cover.txt"
    assert (
        main(["cover", "--dim", "2", "--kappa", "1", "--r", "1",
              "--in", str(ptsfile), "--out", str(coverfile)]) == 0
    )
    assert main(["verify", "--cover", str(coverfile)]) == 0
    out = capsys.readouterr().out
    assert "non_overlap=True" in out and "bott=True" in out
    assert main(["shiftgraph", "--in", str(coverfile)]) == 0


def test_cli_combine_and_verify(tmp_path, capsys):
    bundlefile = tmp_path / "bundle.txt"
    assert (
        main(["gen", "bundle", "--m", "27", "--per-point", "1", "--spread", "0",
              "--seed", "4", "--out", str(bundlefile)]) == 0
    )
    regfile = tmp_path / "regions.txt"
    assert main(["combine", "--bundle", str(bundlefile), "--r", "1", "--out", str(regfile)]) == 0
    assert main(["verify", "--regions", str(regfile), "--bundle", str(bundlefile)]) == 0
    assert "disjoint=True" in capsys.readouterr().out


def test_cli_verify_selfcheck(capsys):
    assert main(["verify"]) == 0
    assert "self-check failures: 0" in capsys.readouterr().out


def test_cli_sumprod_similar_mobius(capsys):
    assert main(["sumprod", "--ints", "1;2;3"]) == 0
    assert "sums=5 products=6" in capsys.readouterr().out
    assert main(["similar", "--pattern", "0;1", "--ground", "0;1;2"]) == 0
    assert "copies=3" in capsys.readouterr().out
    assert main(["dirs", "mobius", "0", "--center", "1", "--lam", "1/2"]) == 0
    assert capsys.readouterr().out.strip() == "1/2,0"


def test_cli_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["gen", "nonsense"])
    assert exc.value.code == 2


def test_cli_beck_and_bounds(tmp_path, capsys):
    pts = [ComplexPoint(GR(x), GR(y)) for x in range(3) for y in range(3)]
    sysfile = tmp_path / "grid.txt"
    fileio.write_atomic(str(sysfile), fileio.dump_system(pts, []))
    assert main(["beck", "--in", str(sysfile)]) == 0
    assert "connecting=20 max_rich=3" in capsys.readouterr().out
    erd = tmp_path / "erd.txt"
    main(["gen", "erdos", "--k", "2", "--out", str(erd)])
    assert main(["bounds", "--C", "1e70", "--in", str(erd)]) == 0
