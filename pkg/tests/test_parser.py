import pytest

from weyl_closure.algebra import AlgebraSignature, act_on_exponential, annihilates
from weyl_closure.annihilators import annihilator_of_exp, annihilator_of_rational
from weyl_closure.domains import FieldSpec
from weyl_closure.errors import ProblemParseError, ZeroElementError
from weyl_closure.parser import (
    format_problem,
    generators_for,
    load_problem,
    parse_expression,
    parse_function,
    parse_problem,
)

CUSP_PROBLEM = """\
# annihilator of 1/(x^2 - y^3)
poly_vars: x, y
field: QQ
generators:
  Dx*(x^2 - y^3)
  Dy*(x^2 - y^3)
"""


def test_products_are_normal_ordered(sig_xy):
    assert parse_expression("Dx*(x^2 - y^3)", sig_xy) == parse_expression("x^2*Dx - y^3*Dx + 2*x", sig_xy)
    assert parse_expression("-(x*Dx)^2", sig_xy) == parse_expression("-x^2*Dx^2 - x*Dx", sig_xy)


def test_coefficient_division(sig_x):
    half = parse_expression("1/2*x", sig_x)
    assert parse_expression("x/2", sig_x) == half
    assert 2 * half == sig_x.generator("x")


@pytest.mark.parametrize("text,column", [
    ("x + z", 5),
    ("x + ", 4),
    ("1/Dx", 2),
    ("x $ y", 3),
    ("(x + y", 7),
])
def test_expression_errors_carry_columns(sig_xy, text, column):
    with pytest.raises(ProblemParseError) as info:
        parse_expression(text, sig_xy)
    assert info.value.line == 1
    assert info.value.column == column


def test_vectors():
    sig = AlgebraSignature(poly_vars=("x",), rank=2)
    v = parse_expression("[Dx, x]", sig)
    assert v.positions() == [1, 2]
    assert v.component(2) == sig.generator("x")
    with pytest.raises(ProblemParseError):
        parse_expression("[Dx]", sig)
    assert not parse_expression("[0, 0]", sig)


def test_parse_problem(sig_xy, cusp_generators):
    problem = parse_problem(CUSP_PROBLEM)
    assert problem.poly_vars == ("x", "y")
    assert problem.signature == sig_xy
    assert problem.generators == cusp_generators
    assert generators_for(problem) == cusp_generators


def test_parse_problem_with_declarations():
    text = "poly_vars: x\nrat_vars: t\nrank: 2\nfield: Fp(7)\norder: lex\nfunction: [1/x, t]\ngenerators:\n  [Dx, 0]\n  [0, Dt]\n"
    problem = parse_problem(text)
    assert problem.signature.rational_vars == ("t",)
    assert problem.field == FieldSpec.parse("Fp(7)")
    assert problem.order == "lex"
    assert len(problem.function) == 2
    assert [g.positions() for g in problem.generators] == [[1], [2]]


def test_generator_with_T():
    text = "poly_vars: x\nloc_poly: x\ngenerators:\n  x*T - 1\n"
    problem = parse_problem(text)
    (g,) = problem.generators
    assert g.signature.loc_name == "T"
    assert g.deg_T() == 1


def test_parse_errors_carry_lines():
    text = "poly_vars: x, y\nfield: QQ\ngenerators:\n  Dx*x\n  Dx*q\n"
    with pytest.raises(ProblemParseError) as info:
        parse_problem(text)
    assert info.value.line == 5
    assert info.value.column == 6


@pytest.mark.parametrize("text", [
    "poly_vars: x\nbogus: 1\n",
    "poly_vars: x\nfield: Fp(8)\n",
    "poly_vars: x, x\n",
    "poly_vars: x\nrank: 2\ngenerators:\n  Dx\n",
    "poly_vars: x\nloc_poly: 1/x\n",
    "just some words\n",
])
def test_bad_problems(text):
    with pytest.raises(ProblemParseError):
        parse_problem(text)


def test_round_trip(sig_xy, cusp_generators, cusp):
    text = format_problem(sig_xy, cusp_generators, loc_poly=cusp.monic(), order="grevlex",
                          function=parse_function("1/(x^2 - y^3)", sig_xy.function_ring), comment="cusp")
    problem = parse_problem(text)
    assert problem.generators == cusp_generators
    assert problem.loc_poly == cusp.monic()
    assert problem.order == "grevlex"


def test_round_trip_rank_two_and_rational_coefficients():
    sig = AlgebraSignature(poly_vars=("x",), rational_vars=("t",), rank=2)
    gens = [parse_expression("[1/t*Dx - 2/3, x^2*Dt]", sig), parse_expression("[0, (t + 1)/(t - 1)*x]", sig)]
    problem = parse_problem(format_problem(sig, gens))
    assert problem.generators == gens


def test_checked_in_problems(problem_path):
    for name in ("example_x2y3.prob", "two_gens.prob", "ssw2.prob", "exp1.prob", "rational_t.prob"):
        problem = load_problem(problem_path(name))
        assert problem.generators


def test_checked_in_files_agree(problem_path):
    a = load_problem(problem_path("example_x2y3.prob"))
    b = load_problem(problem_path("two_gens.prob"))
    assert a.generators == b.generators


def test_annihilator_of_rational(sig_x, op, cusp_generators, sig_xy):
    (x,) = sig_x.function_ring.gens
    assert annihilator_of_rational(x, sig_x) == [op("x*Dx + 1", sig_x).with_position(1)]
    assert cusp_generators == [op("(x^2 - y^3)*Dx + 2*x", sig_xy).with_position(1),
                               op("(x^2 - y^3)*Dy - 3*y^2", sig_xy).with_position(1)]
    with pytest.raises(ZeroElementError):
        annihilator_of_rational(sig_x.function_ring.zero, sig_x)


def test_annihilator_of_exp(sig_xy, op):
    x, y = sig_xy.function_ring.gens
    assert annihilator_of_exp(sig_xy.function_ring.zero, sig_xy) == [
        op("Dx", sig_xy).with_position(1), op("Dy", sig_xy).with_position(1)]
    g = x ** 3 * y + y
    for P in annihilator_of_exp(g, sig_xy):
        assert annihilates(P, act_on_exponential(P, g))


def test_exp1_problem_annihilates(problem_path):
    problem = load_problem(problem_path("exp1.prob"))
    assert problem.generators == annihilator_of_exp(problem.exp_function, problem.signature)
