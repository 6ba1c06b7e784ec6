import io
import json
import logging
import re
import xml.etree.ElementTree as ET

import pandas as pd
import pytest

from wagener_hull.cli import (TraceWriter, bench, emit_svg, format_output, main, read_points,
                              run, write_points)
from wagener_hull.config import HullConfig
from wagener_hull.driver import build_hood
from wagener_hull.errors import NotPowerOfTwo, PointFileError, XNotIncreasing
from wagener_hull.geom import Point2
from wagener_hull.hoodbuf import random_point_set
from wagener_hull.logger import setup_loggers

SVG_NS = "{http://www.w3.org/2000/svg}"


@pytest.fixture(autouse=True)
def isolated_env(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for name in ("HULL_LOG_DIR", "HULL_LOG_LEVEL", "HULL_STRICT", "HULL_WORKERS", "HULL_VALIDATION_SEED"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("HULL_LOG_DIR", str(tmp_path / "logs"))


def _write(path, text):
    path.write_text(text)
    return path


def _parse_output(text):
    lines = [line for line in text.splitlines() if not line.startswith('#')]
    header, count = lines[0].split()
    assert header == "points"
    n = int(count)
    hood_header, k = lines[n + 1].split()
    assert hood_header == "hood"
    hood = [tuple(map(float, line.split())) for line in lines[n + 2:n + 2 + int(k)]]
    return n, hood


def test_read_points_basic(tmp_path):
    ps = read_points(_write(tmp_path / "in.txt", "2\n0.1 0.5\n0.2 0.6\n"))
    assert ps.points == (Point2(0.1, 0.5), Point2(0.2, 0.6))


def test_read_points_ignores_comments_and_layout(tmp_path):
    text = "# four points\n4\n0.1 0.5 0.2\n# mid-file comment\n0.6\n0.6 0.9\n0.7 0.2\n"
    ps = read_points(_write(tmp_path / "in.txt", text))
    assert ps.n == 4
    assert ps.points[1] == Point2(0.2, 0.6)


def test_read_points_not_power_of_two(tmp_path):
    with pytest.raises(NotPowerOfTwo):
        read_points(_write(tmp_path / "in.txt", "3\n0.1 0.5\n0.2 0.6\n0.3 0.1\n"))


def test_read_points_missing_file(tmp_path):
    with pytest.raises(OSError):
        read_points(tmp_path / "absent.txt")


@pytest.mark.parametrize("text,line", [
    ("two\n0.1 0.5\n0.2 0.6\n", 1),
    ("2\n0.1 0.5\n0.2 oops\n", 3),
    ("2\n0.1 0.5\n", 2),
    ("2\n0.1 0.5\n0.2 0.6\n0.3\n", 4),
])
def test_read_points_parse_errors_carry_line(tmp_path, text, line):
    with pytest.raises(PointFileError) as info:
        read_points(_write(tmp_path / "in.txt", text))
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")


def test_read_points_validates(tmp_path):
    with pytest.raises(XNotIncreasing):
        read_points(_write(tmp_path / "in.txt", "2\n0.5 0.5\n0.2 0.6\n"))


def test_write_then_read_is_identity(tmp_path):
    ps = random_point_set(64, seed=12)
    write_points(ps, tmp_path / "pts.txt")
    assert read_points(tmp_path / "pts.txt") == ps


def test_format_output(e1_points):
    lines = format_output(e1_points, e1_points[:2])
    assert lines[0] == "points 4"
    assert lines[5] == "hood 2"
    assert lines[6] == "0.10000000000000001 0.5"
    assert len(lines) == 8


def test_run_e1_parallel(tmp_path, e1_points):
    write_points(e1_points, tmp_path / "e1.txt")
    out = io.StringIO()
    assert run(tmp_path / "e1.txt", out=out) == 0
    n, hood = _parse_output(out.getvalue())
    assert n == 4
    assert hood == [tuple(p) for p in e1_points]


def test_run_two_points(tmp_path):
    _write(tmp_path / "two.txt", "2\n0.25 0.75\n0.5 0.125\n")
    out = io.StringIO()
    assert run(tmp_path / "two.txt", mode="both", out=out) == 0
    assert _parse_output(out.getvalue())[1] == [(0.25, 0.75), (0.5, 0.125)]


def test_run_cup_keeps_two(tmp_path):
    pts = [Point2(x, 2.0 * (x - 0.5) ** 2) for x in (0.1, 0.2, 0.3, 0.45, 0.55, 0.7, 0.8, 0.9)]
    write_points(pts, tmp_path / "cup.txt")
    out = io.StringIO()
    assert run(tmp_path / "cup.txt", mode="both", out=out) == 0
    assert "hood 2" in out.getvalue().splitlines()


def test_run_serial_and_both_agree(tmp_path):
    write_points(random_point_set(128, seed=5), tmp_path / "pts.txt")
    serial, both = io.StringIO(), io.StringIO()
    assert run(tmp_path / "pts.txt", mode="serial", out=serial) == 0
    assert run(tmp_path / "pts.txt", mode="both", out=both) == 0
    assert serial.getvalue() == both.getvalue()


def test_run_writes_trace(tmp_path):
    ps = random_point_set(32, seed=2)
    write_points(ps, tmp_path / "pts.txt")
    run(tmp_path / "pts.txt", trace_path=tmp_path / "trace.txt", out=io.StringIO())
    lines = (tmp_path / "trace.txt").read_text().splitlines()
    assert lines[-1] == "0"
    sections = [line for line in lines if line.startswith("d ")]
    assert sections == ["d 2", "d 4", "d 8", "d 16"]
    # first section lists every input pair unchanged
    assert lines[1:4] == ["2", *(f"{p.x:.17g} {p.y:.17g}" for p in ps.points[:2])]


def test_trace_writer_on_stream(e1_buffer):
    stream = io.StringIO()
    trace = TraceWriter(stream)
    trace.show_current_hoods(e1_buffer)
    trace.finish()
    assert stream.getvalue().splitlines() == [
        "d 2", "2", "0.10000000000000001 0.5", "0.20000000000000001 0.59999999999999998",
        "2", "0.59999999999999998 0.90000000000000002", "0.69999999999999996 0.20000000000000001", "0",
    ]


def test_run_verbose_dumps_scratch(tmp_path, e1_points):
    write_points(e1_points, tmp_path / "e1.txt")
    out = io.StringIO()
    run(tmp_path / "e1.txt", verbose=True, out=out)
    lines = out.getvalue().splitlines()
    assert lines[0] == "# returned from match_and_merge, d1=2, d2=1, d=2"
    assert lines[1] == "# 1 2 2 2"
    assert lines[2] == "#newhood contents"
    assert lines[3:7] == [f"# {p.x:.17g} {p.y:.17g}" for p in e1_points]
    assert lines[7] == "points 4"


def _hood_vertices(svg_path):
    root = ET.parse(svg_path).getroot()
    path = root.find(f".//{SVG_NS}g[@id='hood']//{SVG_NS}path")
    pairs = re.findall(r"[ML]\s*(-?[\d.e+-]+)\s+(-?[\d.e+-]+)", path.get("d"))
    return root, [(float(x), float(y)) for x, y in pairs]


def test_emit_svg(tmp_path):
    ps = random_point_set(1024, seed=1)
    hood = build_hood(ps)
    emit_svg(ps.points, hood, tmp_path / "hood.svg")
    root, vertices = _hood_vertices(tmp_path / "hood.svg")
    assert root.tag == f"{SVG_NS}svg"
    dots = root.find(f".//{SVG_NS}g[@id='points']")
    assert len(dots.findall(f".//{SVG_NS}use")) == 1024
    xs = [x for x, _ in vertices]
    assert len(xs) == len(hood)
    assert xs == sorted(set(xs))


def test_emit_svg_two_points(tmp_path):
    pts = [Point2(0.2, 0.3), Point2(0.8, 0.4)]
    emit_svg(pts, pts, tmp_path / "two.svg")
    _, vertices = _hood_vertices(tmp_path / "two.svg")
    assert len(vertices) == 2
    # svg y grows downwards
    assert vertices[0][1] > vertices[1][1]


def test_bench_table_and_stats(tmp_path):
    write_points(random_point_set(64, seed=4), tmp_path / "pts.txt")
    out = io.StringIO()
    assert bench(tmp_path / "pts.txt", stats_path=tmp_path / "stats.json", out=out) == 0
    table = pd.read_csv(io.StringIO(out.getvalue()), sep='\t')
    assert len(table) == 6
    assert table['round'].tolist()[-1] == 'total'
    rounds = table.iloc[:-1]
    assert rounds['barriers'].astype(int).tolist() == [9] * 5
    assert rounds['thread_steps'].astype(int).tolist() == [32 * 9] * 5
    assert rounds['write_conflicts'].astype(int).sum() == 0
    stats = json.loads((tmp_path / "stats.json").read_text())
    assert stats['rounds'] == 5
    assert stats['barriers'] == 45
    assert stats['launches'] == 5


def test_main_generate_then_run(tmp_path, capsys):
    assert main(["generate", "16", str(tmp_path / "gen.txt"), "--seed", "3"]) == 0
    assert main(["run", str(tmp_path / "gen.txt"), "--mode", "both", "--strict", "--workers", "2"]) == 0
    n, hood = _parse_output(capsys.readouterr().out)
    assert n == 16
    assert len(hood) >= 2
    assert (tmp_path / "logs" / "hull.log").exists()


def test_main_reports_errors(tmp_path, capsys):
    _write(tmp_path / "bad.txt", "3\n0.1 0.5\n0.2 0.6\n0.3 0.1\n")
    assert main(["run", str(tmp_path / "bad.txt")]) == 1
    assert main(["run", str(tmp_path / "missing.txt")]) == 1
    assert "not a power of 2" in capsys.readouterr().err


def test_config_from_env(monkeypatch, tmp_path):
    monkeypatch.setenv("HULL_STRICT", "yes")
    monkeypatch.setenv("HULL_WORKERS", "3")
    monkeypatch.setenv("HULL_VALIDATION_SEED", "7")
    monkeypatch.setenv("HULL_LOG_LEVEL", "debug")
    config = HullConfig.from_env()
    assert config.strict and config.workers == 3
    assert config.validation_seed == 7
    assert config.log_level == "DEBUG"
    assert config.log_dir == tmp_path / "logs"


def test_config_ignores_bad_workers(monkeypatch):
    monkeypatch.setenv("HULL_WORKERS", "many")
    assert HullConfig.from_env().workers is None
    monkeypatch.setenv("HULL_WORKERS", "0")
    assert HullConfig.from_env().workers is None


def test_setup_loggers_replaces_handlers(tmp_path):
    hull_logger, psim_logger = setup_loggers(tmp_path / "a")
    first = len(hull_logger.handlers)
    hull_logger, psim_logger = setup_loggers(tmp_path / "b")
    assert len(hull_logger.handlers) == first == 2
    assert psim_logger.name == "psim"
    logging.getLogger('psim').debug("engine message")
    assert (tmp_path / "b" / "psim.log").exists()
