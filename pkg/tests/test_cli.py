import csv
import io
import json
import subprocess
import sys

import pytest

from sdlab import cli


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_helpers():
    assert cli.parse_complex("1.5,-2") == complex(1.5, -2)
    assert cli.parse_complex("3") == 3 + 0j
    with pytest.raises(cli.InvalidInput):
        cli.parse_complex("1,2,3")
    with pytest.raises(cli.InvalidInput):
        cli.parse_complex("x")
    assert cli.fmt_num(0.1875) == "0.1875"
    assert cli.fmt_num(1 - 2j) == "1-2i"


def test_read_config(tmp_path):
    p = tmp_path / "run.conf"
    p.write_text("# defaults\nmax-iter = 50\n\nthreads=1\n")
    assert cli.read_config(str(p)) == {"max_iter": "50", "threads": "1"}
    p.write_text("oops\n")
    with pytest.raises(cli.InvalidInput):
        cli.read_config(str(p))


def test_usage_errors_exit_with_three(capsys):
    code, _, err = run(["render-cs", "--size", "many"], capsys)
    assert code == cli.EXIT_INPUT
    assert json.loads(err)["exit"] == 3
    assert run([], capsys)[0] == cli.EXIT_INPUT
    assert run(["scan", "--grid", "0,1,0"], capsys)[0] == cli.EXIT_INPUT
    assert run(["scan", "--grid", "1,0,0,1,2,2"], capsys)[0] == cli.EXIT_INPUT
    assert run(["--tol-profile", "loose", "scan", "--grid", "0,1,0,1,2,2"], capsys)[0] == cli.EXIT_INPUT
    assert run(["--max-iter", "0", "scan", "--grid", "0,1,0,1,2,2"], capsys)[0] == cli.EXIT_INPUT


def test_solver_failures_exit_with_two(capsys):
    code, _, err = run(["chi", "--a", "5,0"], capsys)
    assert code == cli.EXIT_SOLVER
    assert json.loads(err)["error"]


def test_center(capsys):
    code, out, _ = run(["center", "--family", "s", "--period", "3", "--seed", "0.2,0"], capsys)
    assert code == 0 and out.strip() == "a=0.1875"
    code, out, _ = run(["center", "--family", "t", "--period", "2", "--seed=-0.9,0"], capsys)
    assert code == 0 and out.strip() == "c=-1"


def test_chi(capsys, tmp_path):
    out_file = tmp_path / "chi.json"
    code, out, _ = run(["--out", str(out_file), "chi", "--a", "0,0"], capsys)
    assert code == 0 and out.startswith("c=-1")
    assert json.loads(out_file.read_text())["schema"] == "sdl-1"


def test_ray_json(capsys):
    code, out, _ = run(["ray", "--family", "t", "--angle", "1/3", "--c=-1,0"], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["kind"] == "dynamical"
    assert abs(data["landing"][0] - (1 - 5 ** 0.5) / 2) < 1e-8
    code, out, _ = run(["ray", "--family", "s", "--angle", "|@1/3", "--a", "0,0", "--depth", "4"], capsys)
    assert code == 0 and json.loads(out)["angle"] == "1/3"
    assert run(["ray", "--family", "s", "--angle", "1/7"], capsys)[0] == cli.EXIT_INPUT


def test_scan_csv_is_deterministic(capsys, tmp_path):
    argv = ["--max-iter", "100", "scan", "--grid=-1,1,-0.5,0.5,5,3"]
    code, first, _ = run(argv, capsys)
    _, second, _ = run(argv, capsys)
    assert code == 0 and first == second
    rows = list(csv.reader(io.StringIO(first)))
    assert rows[0] == ["re_a", "im_a", "depth", "address", "classification"]
    assert len(rows) == 16


def test_render_writes_png(capsys, tmp_path):
    p = tmp_path / "locus.png"
    code, out, _ = run(["render-cs", "--size", "24", "--out", str(p)], capsys)
    assert code == 0 and p.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    first = p.read_bytes()
    run(["render-cs", "--size", "24", "--out", str(p)], capsys)
    assert p.read_bytes() == first


@pytest.mark.parametrize("cmd", [["render-dyn", "--a", "0.1877,0"], ["render-tricorn", "--rays", "1/3,2/3"],
                                 ["render-limb"]])
def test_other_renders(cmd, capsys, tmp_path):
    p = tmp_path / "img.png"
    code, _, err = run(cmd + ["--size", "16", "--max-iter", "50", "--out", str(p)], capsys)
    assert code == 0, err
    assert p.stat().st_size > 0


def test_lamination_outputs(capsys, tmp_path):
    code, out, _ = run(["lamination", "--which", "cs", "--max-period", "4"], capsys)
    data = json.loads(out)
    assert code == 0 and data["which"] == "CS_model" and data["schema"] == "sdl-1"
    svg = tmp_path / "lam.svg"
    assert run(["lamination", "--which", "l", "--out", str(svg)], capsys)[0] == 0
    assert svg.read_text().startswith("<svg")


def test_config_and_environment(capsys, tmp_path, monkeypatch):
    conf = tmp_path / "c.conf"
    conf.write_text("max_iter=20\n")
    monkeypatch.setenv("SDL_THREADS", "1")
    code, out, _ = run(["--config", str(conf), "scan", "--grid", "0,1,0,1,2,1"], capsys)
    assert code == 0 and out.count("\n") == 3
    monkeypatch.setenv("SDL_THREADS", "two")
    assert run(["scan", "--grid", "0,1,0,1,2,1"], capsys)[0] == cli.EXIT_INPUT


def test_index_experiment_command(capsys):
    code, out, _ = run(["index-exp"], capsys)
    data = json.loads(out)
    assert code == 0 and data["period"] == 3


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sdlab.cli", "center", "--family", "s", "--period", "2", "--seed", "0"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "a=0"
