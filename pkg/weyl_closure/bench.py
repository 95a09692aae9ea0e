# weyl_closure/bench.py
"""
Desk-scale benchmark suites.

Every instance is rebuilt from plain data (variables, field, order and the
function whose annihilator is the input), so instances can be shipped to
worker processes.
"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from weyl_closure.algebra import AlgebraSignature
from weyl_closure.annihilators import annihilator_of_exp, annihilator_of_rational
from weyl_closure.closure import partial_weyl_closure
from weyl_closure.config import BENCHMARK_PRIME, ClosureConfig, EngineBudget
from weyl_closure.domains import FieldSpec
from weyl_closure.errors import BudgetExceededError, CertificationError, NotFiniteRankError, TruncationCapError
from weyl_closure.groebner import buchberger
from weyl_closure.holonomy import is_holonomic
from weyl_closure.orders import parse_order
from weyl_closure.parser import parse_function

logger = logging.getLogger(__name__)

SUITES = ("x2y3", "ssw2", "exp1-fp", "beukers-style-random")
COLUMNS = ["instance", "field", "order", "time", "size", "status", "holonomic", "reference"]

EXP1 = "(x1^2 + x2^2 + x3^2)*(x1^4 + x2^4 + x3^4)"
SSW2 = "(y^2 + 1)*(x^2 + 1)*t - x*y"
GL3 = "grevlex"
ELIM3 = "block(lex(x1,x2,x3),lex(Dx1,Dx2,Dx3))"


@dataclass(frozen=True)
class BenchInstance:
    """One row of a suite"""
    name: str
    task: str  # "closure" or "gb"
    poly_vars: Tuple[str, ...]
    field: str
    order: str
    function: str
    family: str  # "rational" (1/q) or "exp" (exp(g))
    reference: Optional[int] = None


def _beukers_style(rng: np.random.Generator, count: int) -> List[BenchInstance]:
    """exp(f) for f = 1 - (1 - x1 x2) x3 - c x1 x2 x3 (1 - x1)(1 - x2)(1 - x3), c random"""
    out = []
    for i, c in enumerate(rng.integers(1, 10000, size=count)):
        f = f"1 - (1 - x1*x2)*x3 - {int(c)}*x1*x2*x3*(1 - x1)*(1 - x2)*(1 - x3)"
        order = GL3 if i % 2 == 0 else ELIM3
        label = "gl" if order == GL3 else "elim"
        out.append(BenchInstance(f"beukers-c{int(c)} ({label})", "gb", ("x1", "x2", "x3"),
                                 f"Fp({BENCHMARK_PRIME})", order, f, "exp"))
    return out


def suite_instances(suite: str, seed: int = 0, count: int = 4) -> List[BenchInstance]:
    if suite == "x2y3":
        return [BenchInstance("x2y3", "closure", ("x", "y"), "QQ", "grevlex", "x^2 - y^3", "rational")]
    if suite == "ssw2":
        return [BenchInstance("ssw2", "closure", ("t", "x", "y"), "QQ", "grevlex", SSW2, "rational", reference=13)]
    if suite == "exp1-fp":
        return [BenchInstance("exp1 (gl)", "gb", ("x1", "x2", "x3"), f"Fp({BENCHMARK_PRIME})", GL3, EXP1, "exp")]
    if suite == "beukers-style-random":
        return _beukers_style(np.random.default_rng(seed), count)
    raise ValueError(f"unknown suite '{suite}', expected one of {', '.join(SUITES)}")


def run_instance(instance: BenchInstance, budget: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Run one instance; budget and cap failures become rows"""
    engine_budget = EngineBudget(**budget) if budget else EngineBudget()
    sig = AlgebraSignature(poly_vars=instance.poly_vars, field=FieldSpec.parse(instance.field))
    function = parse_function(instance.function, sig.function_ring)
    if instance.family == "rational":
        gens = annihilator_of_rational(function, sig)
    else:
        gens = annihilator_of_exp(function, sig)

    row = {"instance": instance.name, "field": instance.field, "order": instance.order, "time": None,
           "size": None, "status": "completed", "holonomic": None, "reference": instance.reference}
    start = time.monotonic()
    try:
        if instance.task == "closure":
            config = ClosureConfig(order=instance.order, budget=engine_budget)
            result = partial_weyl_closure(gens, "auto", config)
            row["size"] = len(result.generators)
            row["holonomic"] = result.trace[-1].holonomic
        else:
            gb = buchberger(gens, parse_order(instance.order), engine_budget)
            row["size"] = len(gb)
            row["holonomic"] = is_holonomic(gb)[0]
    except BudgetExceededError as e:
        row["status"] = "budget-exceeded"
        logger.warning(f"{instance.name}: {str(e)}")
    except TruncationCapError as e:
        row["status"] = "truncation-cap-hit"
        logger.warning(f"{instance.name}: {str(e)}")
    except (CertificationError, NotFiniteRankError) as e:
        row["status"] = "error"
        logger.error(f"{instance.name}: {str(e)}")
    row["time"] = round(time.monotonic() - start, 3)
    logger.info(f"bench row: {row}")
    return row


def bench(suite: str, jobs: int = 1, budget: Optional[EngineBudget] = None, seed: int = 0,
          count: int = 4) -> pd.DataFrame:
    """Table with columns instance, field, order, time, size, status, holonomic, reference"""
    instances = suite_instances(suite, seed, count)
    budget_dict = budget.model_dump() if budget is not None else None
    logger.info(f"Running bench suite {suite}: {len(instances)} instances, {jobs} job(s)")
    if jobs > 1 and len(instances) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(run_instance, instances, [budget_dict] * len(instances)))
    else:
        rows = [run_instance(instance, budget_dict) for instance in instances]
    return pd.DataFrame(rows, columns=COLUMNS)


def format_table(df: pd.DataFrame, fmt: str = "text") -> str:
    if fmt == "csv":
        return df.to_csv(index=False)
    return df.to_string(index=False, na_rep="-") + "\n"
