import pytest

from flatblock import io
from flatblock.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def test_pipeline_no(tmp_path, capsys):
    srf, cert, path = tmp_path / "p5.srf", tmp_path / "p5.cert", tmp_path / "w.path"
    assert run(capsys, "build", "ngon", 5, "-o", srf)[0] == 0
    code, out = run(capsys, "decide", srf, "-o", cert)
    assert code == 1 and "NO" in out.out
    c = io.load_certificate(cert.read_text())
    assert c.verdict == "NO" and c.ratio * c.ratio == c.ratio + 1
    code, out = run(capsys, "witness", cert, "-o", path, "--random-avoid", 5, "--seed", 3)
    assert code == 0
    rec = io.load_path(path.read_text(), c.surface.field)
    assert rec.segments


def test_pipeline_yes(tmp_path, capsys):
    srf, cert, pts = tmp_path / "t.srf", tmp_path / "t.cert", tmp_path / "b.pts"
    run(capsys, "build", "torus", "-o", srf)
    code, out = run(capsys, "decide", srf, "-o", cert)
    assert code == 0 and "YES" in out.out
    code, _ = run(capsys, "block", cert, "--O", 0, "1/5", "1/7", "--A", 0, "1/2", "1/3", "-o", pts)
    assert code == 0
    assert len(io.load_points(pts.read_text(), io.load_certificate(cert.read_text()).surface.field)) == 4
    code, _ = run(capsys, "render", srf, "--blockers", pts, "-o", tmp_path / "t.svg")
    assert code == 0 and (tmp_path / "t.svg").read_text().startswith("<svg")


def test_unknown_with_tiny_budget(tmp_path, capsys):
    srf = tmp_path / "l.srf"
    run(capsys, "build", "lshaped", 1, "sqrt(2)", "-o", srf)
    code, out = run(capsys, "decide", srf, "--saddle-length", 1, "--directions", 1, "--budget-length", 1)
    assert code == 2 and "UNKNOWN" in out.out


def test_budget_exceeded_exit(tmp_path, capsys):
    srf, cert, avoid = tmp_path / "p5.srf", tmp_path / "p5.cert", tmp_path / "a.pts"
    run(capsys, "build", "ngon", 5, "-o", srf)
    run(capsys, "decide", srf, "-o", cert)
    run(capsys, "witness", cert, "-o", tmp_path / "w0.path")
    # block the first witness at its first crossing point, then cap n at 0
    c = io.load_certificate(cert.read_text())
    rec = io.load_path((tmp_path / "w0.path").read_text(), c.surface.field)
    p, a, b = rec.segments[0]
    avoid.write_text(io.dump_points([c.surface.point(p, (a[0] + b[0]) / 2, (a[1] + b[1]) / 2)], c.surface.field))
    code, _ = run(capsys, "witness", cert, "--avoid", avoid, "--max-n", 1)
    assert code == 3


def test_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 64
    assert run(capsys, "decide", tmp_path / "missing.srf")[0] == 64
    bad = tmp_path / "bad.srf"
    bad.write_text("flatblock-surface 1\nfield QQ\n")
    assert run(capsys, "decide", bad)[0] == 64
    srf, cert = tmp_path / "t.srf", tmp_path / "t.cert"
    run(capsys, "build", "torus", "-o", srf)
    run(capsys, "decide", srf, "-o", cert)
    assert run(capsys, "witness", cert)[0] == 64


def test_geometry_commands(tmp_path, capsys):
    srf = tmp_path / "l.srf"
    run(capsys, "build", "lshaped", 1, 1, "-o", srf)
    assert run(capsys, "cylinders", srf)[0] == 0
    code, out = run(capsys, "saddles", srf, "--length", 2)
    assert code == 0 and out.out
    code, _ = run(capsys, "trace", srf, "--start", 0, "1/3", "1/7", "--direction", 3, 4, "--length", 5)
    assert code == 0
    code, out = run(capsys, "connect", srf, "--from", 0, "1/3", "1/7", "--to", 0, "1/2", "1/5", "--length", 3)
    assert code == 0 and out.out


def test_self_saddle_exit_codes(tmp_path, capsys):
    t, f = tmp_path / "t.srf", tmp_path / "f.srf"
    run(capsys, "build", "torus", "-o", t)
    run(capsys, "build", "fomin-cover", "-o", f)
    assert run(capsys, "check-self-saddle", f, "--length", 4)[0] == 0
    assert run(capsys, "check-self-saddle", t, "--length", 2)[0] == 1


def test_unfold_and_fold(tmp_path, capsys):
    srf = tmp_path / "sq.srf"
    code, _ = run(capsys, "unfold", "--square", "-o", srf)
    assert code == 0
    s = io.load_surface(srf.read_text())
    assert len(s.polygons) == 4
    path = tmp_path / "p.path"
    run(capsys, "trace", srf, "--start", 0, "1/3", "1/7", "--direction", 1, 2, "--length", 3, "-o", path)
    code, out = run(capsys, "fold", "--square", path)
    assert code == 0 and out.out
