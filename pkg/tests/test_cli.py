import json

from weyl_closure.cli import run_cli
from weyl_closure.config import AppConfig
from weyl_closure.trace import strip_timing, validate_trace


def test_holcheck(problem_path, capsys):
    assert run_cli(["holcheck", problem_path("example_x2y3.prob")]) == 0
    assert "NOT holonomic; witness A = {x, Dx, Dy}, position 1" in capsys.readouterr().out


def test_closure_round_trip(problem_path, tmp_path, capsys):
    trace_path = tmp_path / "closure.json"
    out_path = tmp_path / "closure.prob"
    code = run_cli(["closure", problem_path("example_x2y3.prob"), "--json", str(trace_path),
                    "--output", str(out_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "f = y^3 - x^2 (auto)" in out
    assert "verdict: holonomic" in out

    trace = json.loads(trace_path.read_text(encoding="utf-8"))
    validate_trace(trace)
    assert trace["status"] == "completed"
    assert trace["result"]["trace"][-1]["holonomic"]

    assert run_cli(["holcheck", str(out_path)]) == 0
    assert capsys.readouterr().out.strip() == "holonomic"
    assert run_cli(["check-annihilates", str(out_path), "--function", "1/(x^2 - y^3)"]) == 0
    assert "generators annihilate" in capsys.readouterr().out


def test_check_annihilates_failure(problem_path, tmp_path, capsys):
    trace_path = tmp_path / "check.json"
    code = run_cli(["check-annihilates", problem_path("example_x2y3.prob"), "--function", "1/(x^2 + y^3)",
                    "--json", str(trace_path)])
    assert code == 1
    assert "does not annihilate" in capsys.readouterr().out
    trace = json.loads(trace_path.read_text(encoding="utf-8"))
    assert trace["status"] == "error"
    assert trace["result"]["failures"] == [1, 2]


def test_check_annihilates_exp(problem_path, capsys):
    assert run_cli(["check-annihilates", problem_path("exp1.prob")]) == 0
    assert "all 3 generators annihilate" in capsys.readouterr().out


def test_gb_with_certificates(problem_path, capsys):
    assert run_cli(["gb", problem_path("two_gens.prob"), "--certificates"]) == 0
    out = capsys.readouterr().out
    assert "Gröbner basis (2):" in out
    assert "certificates replay: ok" in out


def test_rank(problem_path, capsys):
    assert run_cli(["rank", problem_path("example_x2y3.prob")]) == 0
    assert "finite rank 1" in capsys.readouterr().out


def test_singlocus(problem_path, capsys):
    assert run_cli(["singlocus", problem_path("example_x2y3.prob")]) == 0
    assert "y^3 - x^2" in capsys.readouterr().out


def test_parse_error_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.prob"
    path.write_text("poly_vars: x\ngenerators:\n  Dx*z\n", encoding="utf-8")
    assert run_cli(["gb", str(path)]) == 2
    assert "line 3" in capsys.readouterr().err


def test_usage_errors(problem_path, tmp_path):
    assert run_cli(["frobnicate"]) == 2
    assert run_cli(["gb", str(tmp_path / "missing.prob")]) == 2
    assert run_cli(["gb", problem_path("two_gens.prob"), "--order", "lex(x)"]) == 2
    assert run_cli(["gb", problem_path("two_gens.prob"), "--max-pairs", "0"]) == 2


def test_budget_failure_writes_partial_trace(problem_path, tmp_path):
    trace_path = tmp_path / "budget.json"
    code = run_cli(["closure", problem_path("example_x2y3.prob"), "--max-terms", "4",
                    "--json", str(trace_path)])
    assert code == 1
    trace = json.loads(trace_path.read_text(encoding="utf-8"))
    assert trace["status"] == "budget-exceeded"
    assert trace["error"]


def test_json_is_deterministic(problem_path, tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for path in paths:
        assert run_cli(["holcheck", problem_path("example_x2y3.prob"), "--json", str(path)]) == 0
    a, b = (json.loads(p.read_text(encoding="utf-8")) for p in paths)
    assert strip_timing(a) == strip_timing(b)
    assert a["metadata"]["run_id"] == b["metadata"]["run_id"]


def test_save_writes_into_data_dir(problem_path, tmp_path):
    config = AppConfig(data_dir=str(tmp_path / "data"))
    assert run_cli(["rank", problem_path("example_x2y3.prob"), "--save"], config=config) == 0
    (saved,) = (tmp_path / "data").glob("rank_*.json")
    trace = json.loads(saved.read_text(encoding="utf-8"))
    assert saved.name == f"rank_{trace['metadata']['run_id']}.json"
    assert trace["result"] == {"finite": True, "rank": 1}
