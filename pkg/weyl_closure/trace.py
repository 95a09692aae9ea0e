# weyl_closure/trace.py
"""Machine-readable JSON traces of CLI runs."""
import copy
import hashlib
import json
import logging
import os
from datetime import datetime
from functools import lru_cache
from typing import Any, Dict, Optional

import jsonschema

from weyl_closure import __version__

logger = logging.getLogger(__name__)

SCHEMA_PATH = os.path.join(os.path.dirname(__file__), "schemas", "trace.schema.json")

# Keys whose values differ between otherwise identical runs
TIMING_KEYS = frozenset({"timestamp", "elapsed_time", "elapsed", "wall_time", "run_id"})


@lru_cache(maxsize=1)
def load_schema() -> Dict[str, Any]:
    with open(SCHEMA_PATH, "r", encoding="utf-8") as f:
        return json.load(f)


def strip_timing(value: Any) -> Any:
    """Deep copy without timing fields"""
    if isinstance(value, dict):
        return {k: strip_timing(v) for k, v in value.items() if k not in TIMING_KEYS}
    if isinstance(value, list):
        return [strip_timing(v) for v in value]
    return copy.deepcopy(value)


def run_id(trace: Dict[str, Any]) -> str:
    """Digest of the timing-free trace: identical runs share a run id"""
    canonical = json.dumps(strip_timing(trace), sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def build_trace(command: str, status: str, input_info: Dict[str, Any], result: Dict[str, Any],
                elapsed_time: float, error: Optional[str] = None,
                budget: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    trace = {
        "command": command,
        "status": status,
        "error": error,
        "input": input_info,
        "result": result,
        "metadata": {
            "timestamp": datetime.now().isoformat(),
            "elapsed_time": round(max(elapsed_time, 0.0), 6),
            "version": __version__,
        },
    }
    if budget is not None:
        trace["metadata"]["budget"] = budget
    trace["metadata"]["run_id"] = run_id(trace)
    return trace


def validate_trace(trace: Dict[str, Any]) -> None:
    """Raise jsonschema.ValidationError when the trace does not match the schema"""
    jsonschema.validate(instance=trace, schema=load_schema())


def write_trace(trace: Dict[str, Any], path: str) -> str:
    """Validate and save; keys are sorted so equal runs produce equal files up to timing"""
    validate_trace(trace)
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(trace, f, ensure_ascii=False, indent=2, sort_keys=True)
    logger.info(f"Trace saved to {path}")
    return path
