import json
import math

import pytest

from treecut.cli import main, render_svg


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write_tree(tmp_path, tree, name="tree.json"):
    path = tmp_path / name
    path.write_text(json.dumps(tree.to_json_data()))
    return str(path)


def test_analyze(tmp_path, capsys, t_l):
    path = write_tree(tmp_path, t_l)
    code, out, _ = run_cli(capsys, "analyze", path)
    assert code == 0
    doc = json.loads(out)
    assert doc["diameter"] == pytest.approx(2.0)
    assert doc["backbone"]["is_point"] is False


def test_analyze_missing_file(capsys):
    code, _, err = run_cli(capsys, "analyze", "/no/such/file.json")
    assert code == 2
    assert "treecut:" in err


def test_analyze_bad_json(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{broken")
    code, _, err = run_cli(capsys, "analyze", str(path))
    assert code == 2


def test_unknown_subcommand(capsys):
    assert main(["frobnicate"]) == 2


def test_evaluate_hook_useless(tmp_path, capsys, t_hook):
    path = write_tree(tmp_path, t_hook)
    sc = json.dumps({"p": {"edge": [0, 1], "lambda": 0.0},
                     "q": {"edge": [1, 2], "lambda": 1.0}})
    code, out, _ = run_cli(capsys, "evaluate", path, "--shortcut", sc)
    assert code == 0
    doc = json.loads(out)
    assert doc["usefulness"] == "useless"
    assert doc["diameter_after"] == pytest.approx(8 + 2 * math.sqrt(2),
                                                  abs=1e-9)


def test_evaluate_rejects_bad_shortcut(tmp_path, capsys, t_l):
    path = write_tree(tmp_path, t_l)
    code, _, err = run_cli(capsys, "evaluate", path, "--shortcut",
                           '{"p": {"edge": [0, 2], "lambda": 0.5},'
                           ' "q": {"edge": [1, 2], "lambda": 0.5}}')
    assert code == 2


def test_optimize_l(tmp_path, capsys, t_l):
    path = write_tree(tmp_path, t_l)
    code, out, _ = run_cli(capsys, "optimize", path)
    assert code == 0
    doc = json.loads(out)
    assert doc["useful"] is True
    assert doc["diameter_after"] == pytest.approx(1.5469182, abs=1e-6)
    assert "events" not in doc


def test_optimize_trace(tmp_path, capsys, t_l):
    path = write_tree(tmp_path, t_l)
    code, out, _ = run_cli(capsys, "optimize", path, "--trace")
    assert code == 0
    doc = json.loads(out)
    assert isinstance(doc["events"], list) and doc["events"]


def test_oracle(tmp_path, capsys, t_l):
    path = write_tree(tmp_path, t_l)
    code, out, _ = run_cli(capsys, "oracle", path, "--resolution", "0.01",
                           "--restrict-backbone")
    assert code == 0
    doc = json.loads(out)
    assert doc["best_diameter"] == pytest.approx(1.5469182, abs=4e-2)
    assert doc["restricted"] is True


def test_oracle_coarse_resolution_is_input_error(tmp_path, capsys, t_l):
    path = write_tree(tmp_path, t_l)
    code, _, err = run_cli(capsys, "oracle", path, "--resolution", "5.0")
    assert code == 2


def test_gen_round_trip(tmp_path, capsys):
    out_path = tmp_path / "gen.json"
    code, _, _ = run_cli(capsys, "gen", "--shape", "caterpillar",
                         "--seed", "2", "-n", "11",
                         "--output", str(out_path))
    assert code == 0
    raw = out_path.read_text()
    from treecut import load_tree
    from treecut.cli import _round12
    t = load_tree(raw)
    again = json.dumps(_round12(t.to_json_data()), indent=2) + "\n"
    assert raw == again


def test_gen_all_shapes(tmp_path, capsys):
    for shape in ("uniform", "caterpillar", "balanced", "straight",
                  "point", "stress"):
        out_path = tmp_path / f"{shape}.json"
        code, _, _ = run_cli(capsys, "gen", "--shape", shape, "--seed", "1",
                             "-n", "8", "--output", str(out_path))
        assert code == 0
        json.loads(out_path.read_text())


def test_stdin_input(tmp_path, capsys, monkeypatch, t_l):
    import io
    import sys
    doc = json.dumps(t_l.to_json_data())
    monkeypatch.setattr(sys, "stdin", io.StringIO(doc))
    code, out, _ = run_cli(capsys, "analyze", "-")
    assert code == 0
    assert json.loads(out)["diameter"] == pytest.approx(2.0)


def test_tolerance_scale_flag(tmp_path, capsys, t_l):
    path = write_tree(tmp_path, t_l)
    code, out, _ = run_cli(capsys, "analyze", path,
                           "--tolerance-scale", "100.0")
    assert code == 0
    code, _, _ = run_cli(capsys, "analyze", path, "--tolerance-scale", "-1")
    assert code == 2


def test_numbers_have_12_significant_digits(tmp_path, capsys, t_l):
    path = write_tree(tmp_path, t_l)
    code, out, _ = run_cli(capsys, "optimize", path)
    doc = json.loads(out)
    val = doc["diameter_after"]
    assert val == float(f"{val:.12g}")


def test_render_deterministic(tmp_path, capsys, t_forkbent):
    path = write_tree(tmp_path, t_forkbent)
    svg1 = tmp_path / "a.svg"
    svg2 = tmp_path / "b.svg"
    assert run_cli(capsys, "render", path, "--svg", str(svg1))[0] == 0
    assert run_cli(capsys, "render", path, "--svg", str(svg2))[0] == 0
    assert svg1.read_bytes() == svg2.read_bytes()
    text = svg1.read_text()
    assert text.startswith('<?xml version="1.0"')
    assert 'version="1.1"' in text
    assert text.count("<line") == len(t_forkbent.edges)


def test_render_shortcut_dashed(tmp_path, capsys, t_l):
    path = write_tree(tmp_path, t_l)
    svg = tmp_path / "s.svg"
    sc = json.dumps({"p": {"edge": [0, 1], "lambda": 0.25},
                     "q": {"edge": [1, 2], "lambda": 0.75}})
    code, _, _ = run_cli(capsys, "render", path, "--shortcut", sc,
                         "--svg", str(svg))
    assert code == 0
    assert "stroke-dasharray" in svg.read_text()


def test_render_empty_diagnosis_matches_no_diagnosis(t_forkbent):
    from treecut import AugmentedDiagnosis, backbone
    d = backbone(t_forkbent)
    plain = render_svg(t_forkbent, decomp=d)
    empty = AugmentedDiagnosis(diameter=0.0, cycle_length=0.0,
                               achieving_pairs=(), pair_state=frozenset(),
                               path_state=frozenset())
    with_empty = render_svg(t_forkbent, diagnosis=empty, decomp=d)
    assert plain == with_empty
