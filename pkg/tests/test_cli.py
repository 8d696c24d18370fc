import json
import subprocess
import sys

import numpy as np
import pytest

from ctoqw.cli import main
from ctoqw.graph import parse_edge_list, transition_matrix, generate
from ctoqw.numerics import complex_from_json, complex_to_json
from ctoqw.steady import CLAW_STEADY_STATE, PATH3_STEADY_STATE


def _body(text):
    return "\n".join(line for line in text.splitlines() if not line.startswith("#"))


def _csv(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    rows = [[float(x) for x in ln.split(",")] for ln in lines[1:]]
    return header, np.array(rows)


@pytest.fixture
def graph_files(tmp_path):
    files = {}
    for name, family, size in [("path3", "path", 3), ("claw", "star", 3),
                               ("cycle3", "cycle", 3), ("cycle4", "cycle", 4),
                               ("cycle5", "cycle", 5)]:
        files[name] = tmp_path / f"{name}.txt"
        assert main(["gen", family, str(size), "--out", str(files[name])]) == 0
    files["disjoint"] = tmp_path / "disjoint.txt"
    files["disjoint"].write_text("0 1\n2 3\n")
    return files


def test_gen_path3(capsys):
    assert main(["gen", "path", "3"]) == 0
    out = capsys.readouterr().out
    assert _body(out) == "n 3\n0 1\n1 2"
    assert out.startswith("# ctoqw 0.1.0\n# config: ")
    assert "# tolerances: " in out


def test_gen_star_is_hub_zero_claw(capsys):
    assert main(["gen", "star", "3"]) == 0
    assert parse_edge_list(capsys.readouterr().out).sorted_edges() == [(0, 1), (0, 2), (0, 3)]


def test_gen_below_minimum_is_usage_error(capsys):
    assert main(["gen", "cycle", "2"]) == 1
    assert "cycle needs size >= 3" in capsys.readouterr().err


def test_gen_matrix_export(capsys):
    assert main(["gen", "star", "3", "--matrix", "transition"]) == 0
    m = np.loadtxt(_body(capsys.readouterr().out).splitlines(), delimiter=",")
    np.testing.assert_array_equal(m, transition_matrix(generate("star", 3)))


def test_argparse_errors_exit_with_one():
    with pytest.raises(SystemExit) as exc:
        main(["gen", "hexagon", "3"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1


def test_check_path3(graph_files, capsys):
    assert main(["check", str(graph_files["path3"])]) == 0
    r = json.loads(capsys.readouterr().out)
    assert r["connected"] and not r["regular"]
    assert r["commutant"] == {"dimension": 1, "trivial": True}
    assert r["span_hermitian"] and r["sum_identity"]["holds"]
    assert r["prediction"] == "unique_coherent_limit"
    assert r["meta"]["version"] == "0.1.0" and "tolerances" in r["meta"]


def test_check_cycle5(graph_files, capsys):
    assert main(["check", str(graph_files["cycle5"])]) == 0
    assert json.loads(capsys.readouterr().out)["prediction"] == "maximally_mixed"


def test_check_disjoint_edges(graph_files, capsys):
    assert main(["check", str(graph_files["disjoint"])]) == 0
    r = json.loads(capsys.readouterr().out)
    assert not r["connected"] and r["prediction"] == "unknown"
    assert r["commutant"]["dimension"] == 2


def test_check_isolated_vertex(tmp_path, capsys):
    f = tmp_path / "iso.txt"
    f.write_text("n 3\n0 1\n")
    assert main(["check", str(f)]) == 0
    r = json.loads(capsys.readouterr().out)
    assert r["prediction"] == "unknown" and "isolated" in r["note"]


def test_check_parse_error_reports_line(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("0 1\n1 1\n")
    assert main(["check", str(f)]) == 1
    assert "line 2" in capsys.readouterr().err


def test_missing_graph_file(tmp_path, capsys):
    assert main(["steady", str(tmp_path / "nope.txt")]) == 1


@pytest.mark.parametrize("name, target", [("path3", PATH3_STEADY_STATE),
                                          ("claw", CLAW_STEADY_STATE),
                                          ("cycle4", np.eye(4) / 4)])
def test_steady_json(graph_files, tmp_path, name, target):
    out = tmp_path / "steady.json"
    assert main(["steady", str(graph_files[name]), "--out", str(out)]) == 0
    r = json.loads(out.read_text())
    np.testing.assert_allclose(complex_from_json(r["rho_inf"]), target, atol=1e-10, rtol=0)
    assert r["convergence_consistent"] is True
    assert r["reference_match"]["match"] is True


def test_steady_csv(graph_files, tmp_path):
    out = tmp_path / "steady.csv"
    assert main(["steady", str(graph_files["path3"]), "--format", "csv", "-o", str(out)]) == 0
    header, rows = _csv(out)
    assert header == ["row", "col", "re", "im"]
    rho = np.zeros((3, 3), dtype=complex)
    for j, k, re, im in rows:
        rho[int(j), int(k)] = re + 1j * im
    np.testing.assert_allclose(rho, PATH3_STEADY_STATE, atol=1e-12)


def test_steady_disconnected_is_consistent(graph_files, capsys):
    assert main(["steady", str(graph_files["disjoint"])]) == 0
    r = json.loads(capsys.readouterr().out)
    assert r["classification"] == "non_unique" and r["reference_match"] is None


def test_steady_exit_code_two_on_falsification(graph_files, capsys):
    # an absurd residual tolerance makes the exact solve look inconsistent
    code = main(["steady", str(graph_files["path3"]), "--tol-residual", "1e-30"])
    assert code == 2
    assert json.loads(capsys.readouterr().out)["falsifications"]


def test_tolerance_override_must_be_positive(graph_files, capsys):
    assert main(["steady", str(graph_files["path3"]), "--tol-residual", "0"]) == 1


def test_evolve_ctrw_equipartition(graph_files, tmp_path):
    out = tmp_path / "ctrw.csv"
    assert main(["evolve", str(graph_files["path3"]), "--process", "ctrw",
                 "--initial", "vertex:0", "--t-max", "100", "-o", str(out)]) == 0
    header, rows = _csv(out)
    assert header == ["time", "p0", "p1", "p2"]
    assert rows.shape == (64, 4)
    np.testing.assert_allclose(rows[-1, 1:], [1 / 3] * 3, atol=1e-8)


def test_evolve_t_max_zero(graph_files, tmp_path):
    out = tmp_path / "zero.csv"
    assert main(["evolve", str(graph_files["path3"]), "--process", "ctrw", "--t-max", "0",
                 "-o", str(out)]) == 0
    _, rows = _csv(out)
    np.testing.assert_array_equal(rows, [[0, 1, 0, 0]])


@pytest.mark.parametrize("method", ["expm", "rk"])
def test_evolve_ctoqw_any_start(graph_files, tmp_path, method):
    out = tmp_path / "open.csv"
    assert main(["evolve", str(graph_files["path3"]), "--initial", "vertex:2",
                 "--method", method, "-o", str(out)]) == 0
    _, rows = _csv(out)
    np.testing.assert_allclose(rows[-1, 1:], [2 / 7, 3 / 7, 2 / 7], atol=1e-6)


def test_evolve_full_state_and_json(graph_files, tmp_path):
    out, states = tmp_path / "evo.json", tmp_path / "states.json"
    assert main(["evolve", str(graph_files["claw"]), "--initial", "mixed", "--t-max", "200",
                 "--samples", "5", "--format", "json", "-o", str(out),
                 "--full-state", str(states)]) == 0
    r = json.loads(out.read_text())
    assert r["times"] == [0, 50, 100, 150, 200]
    final = complex_from_json(json.loads(states.read_text())["states"][-1])
    np.testing.assert_allclose(final, CLAW_STEADY_STATE, atol=1e-8)
    np.testing.assert_allclose(r["distributions"][-1], np.diag(CLAW_STEADY_STATE).real, atol=1e-8)


def test_evolve_from_file(graph_files, tmp_path):
    state = tmp_path / "rho.json"
    state.write_text(json.dumps(complex_to_json(PATH3_STEADY_STATE)))
    out = tmp_path / "fixed.csv"
    assert main(["evolve", str(graph_files["path3"]), "--initial", f"file:{state}",
                 "--t-max", "5", "--samples", "3", "-o", str(out)]) == 0
    _, rows = _csv(out)
    np.testing.assert_allclose(rows[:, 1:], [[2 / 7, 3 / 7, 2 / 7]] * 3, atol=1e-10)

    probs = tmp_path / "p.json"
    probs.write_text("[0.5, 0.5, 0.0]")
    assert main(["evolve", str(graph_files["path3"]), "--process", "ctrw",
                 "--initial", f"file:{probs}", "--t-max", "0", "-o", str(out)]) == 0
    _, rows = _csv(out)
    np.testing.assert_array_equal(rows[0, 1:], [0.5, 0.5, 0.0])


@pytest.mark.parametrize("args, fragment", [
    (["--initial", "corner"], "invalid initial spec"),
    (["--initial", "vertex:x"], "bad vertex"),
    (["--initial", "vertex:7"], "out of range"),
    (["--process", "ctqw", "--initial", "mixed"], "no amplitude vector"),
    (["--process", "ctqw", "--initial", "random"], "no amplitude vector"),
    (["--samples", "1"], "at least 2"),
    (["--t-max", "-1"], "nonnegative"),
])
def test_evolve_input_errors(graph_files, capsys, args, fragment):
    assert main(["evolve", str(graph_files["path3"])] + args) == 1
    assert fragment in capsys.readouterr().err


def test_compare_path3(graph_files, tmp_path):
    out = tmp_path / "cmp.csv"
    assert main(["compare", str(graph_files["path3"]), "--vertex", "0", "--t-max", "100",
                 "-o", str(out)]) == 0
    header, rows = _csv(out)
    assert header[:4] == ["time", "ctoqw_p0", "ctoqw_p1", "ctoqw_p2"]
    assert np.isinf(rows[-1, 0])
    np.testing.assert_allclose(rows[-1, 1:4], [2 / 7, 3 / 7, 2 / 7], atol=1e-10)
    np.testing.assert_allclose(rows[-1, 4:7], [1 / 3] * 3, atol=1e-12)
    np.testing.assert_allclose(rows[-1, 7:], [7 / 18, 4 / 18, 7 / 18], atol=1e-12)
    # last sampled row agrees with the limits for the two relaxing walks
    np.testing.assert_allclose(rows[-2, 1:7], rows[-1, 1:7], atol=1e-6)


def test_compare_path3_middle(graph_files, capsys):
    assert main(["compare", str(graph_files["path3"]), "--vertex", "1", "--format", "json"]) == 0
    r = json.loads(capsys.readouterr().out)
    np.testing.assert_allclose(r["limit"][6:], [2 / 9, 5 / 9, 2 / 9], atol=1e-12)


def test_compare_cycle3(graph_files, tmp_path):
    out = tmp_path / "cmp.csv"
    assert main(["compare", str(graph_files["cycle3"]), "-o", str(out)]) == 0
    _, rows = _csv(out)
    np.testing.assert_allclose(rows[-2, 1:7], [1 / 3] * 6, atol=1e-8)


def test_compare_bad_vertex(graph_files):
    assert main(["compare", str(graph_files["path3"]), "--vertex", "3"]) == 1


def test_runs_are_byte_identical(graph_files, tmp_path):
    outputs = []
    for _ in range(2):
        run = []
        for args in (["evolve", str(graph_files["claw"]), "--initial", "random", "--seed", "7"],
                     ["steady", str(graph_files["path3"])],
                     ["compare", str(graph_files["path3"])]):
            out = tmp_path / "out"
            assert main(args + ["-o", str(out)]) == 0
            run.append(out.read_bytes())
        outputs.append(run)
    assert outputs[0] == outputs[1]


def test_different_seeds_differ(graph_files, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["evolve", str(graph_files["claw"]), "--initial", "random", "--seed", "1", "-o", str(a)])
    main(["evolve", str(graph_files["claw"]), "--initial", "random", "--seed", "2", "-o", str(b)])
    assert a.read_bytes() != b.read_bytes()


def test_module_entry_point(graph_files):
    proc = subprocess.run([sys.executable, "-m", "ctoqw", "check", str(graph_files["cycle4"])],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["prediction"] == "maximally_mixed"
