import json

import jsonschema
import pytest

from weyl_closure.trace import build_trace, run_id, strip_timing, validate_trace, write_trace

INPUT = {"poly_vars": ["x", "y"], "rat_vars": [], "rank": 1, "field": "QQ", "order": "grevlex",
         "loc_poly": None, "generators": ["(x^2 - y^3)*Dx + 2*x"]}


def test_trace_validates():
    trace = build_trace("holcheck", "completed", INPUT, {"holonomic": False, "size": 2}, 0.25)
    validate_trace(trace)
    assert trace["metadata"]["elapsed_time"] == 0.25
    assert len(trace["metadata"]["run_id"]) == 12


def test_run_id_ignores_timing():
    a = build_trace("rank", "completed", INPUT, {"size": 1}, 0.1)
    b = build_trace("rank", "completed", INPUT, {"size": 1}, 7.5)
    c = build_trace("rank", "completed", INPUT, {"size": 2}, 0.1)
    assert a["metadata"]["run_id"] == b["metadata"]["run_id"]
    assert a["metadata"]["run_id"] != c["metadata"]["run_id"]
    assert strip_timing(a) == strip_timing(b)
    assert run_id(a) == run_id(b)


def test_strip_timing_is_deep():
    data = {"result": {"trace": [{"s": 0, "wall_time": 1.5}]}, "metadata": {"timestamp": "now", "version": "1"}}
    assert strip_timing(data) == {"result": {"trace": [{"s": 0}]}, "metadata": {"version": "1"}}
    assert data["result"]["trace"][0]["wall_time"] == 1.5


def test_write_trace(tmp_path):
    path = tmp_path / "runs" / "trace.json"
    trace = build_trace("gb", "budget-exceeded", INPUT, {"elements": [], "size": 0}, 0.0,
                        error="S-pair budget exhausted", budget={"max_pairs": 10})
    write_trace(trace, str(path))
    saved = json.loads(path.read_text(encoding="utf-8"))
    assert saved == trace


def test_rejects_unknown_status():
    trace = build_trace("gb", "exploded", INPUT, {}, 0.0)
    with pytest.raises(jsonschema.ValidationError):
        validate_trace(trace)


def test_rejects_malformed_iteration():
    trace = build_trace("closure", "completed", INPUT, {"trace": [{"s": -1}]}, 0.0)
    with pytest.raises(jsonschema.ValidationError):
        validate_trace(trace)
