import json

import numpy as np
import pytest

from fractv import io
from fractv.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_PARSE, main, order_grid
from fractv.errors import ParseError
from fractv.wiener import FilterCoefficients

from conftest import random_graph


def test_signal_round_trip_is_exact(tmp_path, rng):
    X = rng.standard_normal((4, 5)) * 10.0 ** rng.integers(-20, 20, (4, 5))
    io.write_signal(tmp_path / "s.csv", X)
    np.testing.assert_array_equal(io.load_signal(tmp_path / "s.csv").values, X)


def test_coordinates_edges_coefficients_round_trip(tmp_path, rng):
    c = rng.uniform(-80, 80, (5, 2))
    io.write_coordinates(tmp_path / "c.csv", c)
    np.testing.assert_array_equal(io.load_coordinates(tmp_path / "c.csv"), c)
    g = random_graph(rng, 7)
    io.write_edge_list(tmp_path / "e.csv", g)
    np.testing.assert_array_equal(io.load_edge_list(tmp_path / "e.csv", 7).adjacency, g.adjacency)
    coef = FilterCoefficients(rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2)))
    io.write_coefficients(tmp_path / "k.csv", coef)
    np.testing.assert_array_equal(io.load_coefficients(tmp_path / "k.csv").grid, coef.grid)


@pytest.mark.parametrize("text,where", [("1,2\n3,x\n", "row 2, column 2"), ("1,2\n3\n", "row 2"),
                                        ("", "empty"), ("1,nan\n", "non-finite")])
def test_signal_parse_errors(tmp_path, text, where):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(ParseError, match=where):
        io.load_signal(p)


def test_coordinate_parse_errors(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("lat,lon\n1,2\n")
    with pytest.raises(ParseError, match="header"):
        io.load_coordinates(p)
    p.write_text("id,lat,lon\n1,2,3\n")
    with pytest.raises(ParseError, match="expected id 0"):
        io.load_coordinates(p)


def test_order_grid_cardinality():
    assert len(order_grid(0, 1, 0, 1, 0.5)) == 9
    grid = order_grid(0, 1, 0, 1, 0.1)
    assert len(grid) == 121 and (1.0, 1.0) in grid and (0.0, 0.0) in grid


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("synth")
    assert main(["synth", "--n", "12", "--t", "8", "--smoothness", "5", "--seed", "1",
                 "--noisy-snr", "0", "--out-dir", str(d)]) == 0
    return d


def run(synth_dir, out, *extra):
    return main(["denoise", "--signal", str(synth_dir / "noisy.csv"), "--clean", str(synth_dir / "signal.csv"),
                 "--coords", str(synth_dir / "coords.csv"), "--out-dir", str(out), "--p", "2", "--q", "4",
                 "--group-len", "4", "--first-stage", "median", *extra])


def test_synth_outputs(synth_dir):
    for name in ("coords.csv", "signal.csv", "edges.csv", "noisy.csv", "manifest.json"):
        assert (synth_dir / name).exists()
    assert io.load_signal(synth_dir / "signal.csv").values.shape == (12, 8)


def test_graph_command(synth_dir, tmp_path):
    assert main(["graph", "--coords", str(synth_dir / "coords.csv"), "--out-dir", str(tmp_path)]) == 0
    assert (tmp_path / "edges.csv").read_text() == (synth_dir / "edges.csv").read_text()


def test_denoise_grid_outputs(synth_dir, tmp_path):
    assert run(synth_dir, tmp_path, "--grid-step", "0.5") == 0
    rows = io.read_surface(tmp_path / "surface.csv")
    assert len(rows) == 9 and sum(r[3] for r in rows) == 1
    rep = json.loads((tmp_path / "report.json").read_text())
    for key in ("input_snr_db", "first_stage_snr_db", "second_stage_snr_db"):
        assert isinstance(rep[key], float)
    assert io.load_signal(tmp_path / "denoised.csv").values.shape == (12, 8)
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["inputs"]["signal"]["sha256"] == io.sha256(synth_dir / "noisy.csv")


def test_denoise_is_reproducible(synth_dir, tmp_path):
    for name in ("a", "b"):
        assert run(synth_dir, tmp_path / name, "--grid-step", "0.5") == 0
    for f in ("report.json", "surface.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_blind_mode(synth_dir, tmp_path):
    rc = main(["denoise", "--signal", str(synth_dir / "noisy.csv"), "--coords", str(synth_dir / "coords.csv"),
               "--out-dir", str(tmp_path), "--p", "2", "--q", "4", "--group-len", "4", "--a", "0.5"])
    assert rc == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["mode"] == "blind" and "second_stage_snr_db" not in rep
    assert (tmp_path / "surface.csv").read_text().startswith("a,b,residual,is_max")


def test_experiment_from_clean_only(synth_dir, tmp_path):
    rc = main(["grid", "--clean", str(synth_dir / "signal.csv"), "--coords", str(synth_dir / "coords.csv"),
               "--out-dir", str(tmp_path), "--p", "2", "--q", "4", "--group-len", "4", "--grid-step", "1",
               "--trials", "2", "--first-stage", "median"])
    assert rc == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert len(rep["trials"]) == 2 and len(rep["surface"]) == 4


def test_single_snapshot_static_path(tmp_path, rng):
    coords = rng.uniform(0, 30, (8, 2))
    io.write_coordinates(tmp_path / "c.csv", coords)
    X = rng.standard_normal((8, 1))
    io.write_signal(tmp_path / "x.csv", X)
    io.write_signal(tmp_path / "y.csv", X + 0.1 * rng.standard_normal((8, 1)))
    rc = main(["denoise", "--signal", str(tmp_path / "y.csv"), "--clean", str(tmp_path / "x.csv"),
               "--coords", str(tmp_path / "c.csv"), "--out-dir", str(tmp_path / "o"), "--p", "1", "--q", "3",
               "--group-len", "1", "--first-stage", "median"])
    assert rc == 0


def test_exit_codes(synth_dir, tmp_path, capsys):
    assert run(synth_dir, tmp_path, "--grid-step", "0") == EXIT_CONFIG
    assert run(synth_dir, tmp_path, "--group-len", "3") == EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(synth_dir, tmp_path, "--config", str(bad)) == EXIT_CONFIG
    bad.write_text('{"unknown_key": 1}')
    assert run(synth_dir, tmp_path, "--config", str(bad)) == EXIT_CONFIG
    broken = tmp_path / "broken.csv"
    broken.write_text("1,2\nx,3\n")
    assert main(["denoise", "--signal", str(broken), "--coords", str(synth_dir / "coords.csv"),
                 "--out-dir", str(tmp_path)]) == EXIT_PARSE
    assert main(["denoise", "--signal", str(tmp_path / "missing.csv"), "--coords",
                 str(synth_dir / "coords.csv"), "--out-dir", str(tmp_path)]) == EXIT_PARSE
    assert "error" in capsys.readouterr().err


def test_numeric_failure_exit(synth_dir, tmp_path):
    zero = tmp_path / "zero.csv"
    io.write_signal(zero, np.zeros((12, 8)))
    rc = main(["denoise", "--signal", str(synth_dir / "noisy.csv"), "--clean", str(zero),
               "--coords", str(synth_dir / "coords.csv"), "--out-dir", str(tmp_path), "--p", "2", "--q", "4",
               "--group-len", "4"])
    assert rc == EXIT_NUMERIC
