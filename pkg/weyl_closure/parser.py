# weyl_closure/parser.py
"""
Problem files and the operator expression grammar.

A problem file is a list of ``key: value`` lines followed by a
``generators:`` block, one operator (or bracketed vector) per line::

    # the x^2 - y^3 example
    poly_vars: x, y
    field: QQ
    function: 1/(x^2 - y^3)
    generators:
      Dx*(x^2 - y^3)
      Dy*(x^2 - y^3)

``*`` is the non-commutative product, evaluated left to right in normal
order. Operators may only be divided by coefficients.
"""
import dataclasses
import logging
import re
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

from weyl_closure.algebra import AlgebraSignature, Monomial, WeylElement, convert_element, format_element
from weyl_closure.domains import FieldSpec, MultiPoly, RationalFunction, format_poly, format_rational_function
from weyl_closure.errors import ProblemParseError, SignatureMismatchError, UnknownVariableError

logger = logging.getLogger(__name__)

KEYS = ("poly_vars", "rat_vars", "derivatives", "rank", "field", "order", "position", "loc_poly",
        "function", "exp_function")

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


@dataclass
class _Token:
    kind: str
    text: str
    column: int


def _tokenize(text: str, line: int, offset: int) -> List[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            break
        number, name, other = match.groups()
        column = offset + match.start(match.lastindex) + 1
        if number is not None:
            tokens.append(_Token("number", number, column))
        elif name is not None:
            tokens.append(_Token("name", name, column))
        elif other is not None:
            if other not in "+-*/^()[],":
                raise ProblemParseError(f"unexpected character '{other}'", line, column)
            tokens.append(_Token(other, other, column))
        pos = match.end()
    tokens.append(_Token("end", "", offset + len(text.rstrip()) + 1))
    return tokens


class _OperatorBuilder:
    """Evaluates expressions to Weyl elements of one signature"""

    def __init__(self, signature: AlgebraSignature):
        self.signature = signature

    def number(self, value: int) -> WeylElement:
        return self.signature.constant(value)

    def name(self, name: str) -> WeylElement:
        return self.signature.generator(name)

    def add(self, a: WeylElement, b: WeylElement) -> WeylElement:
        return a + b

    def sub(self, a: WeylElement, b: WeylElement) -> WeylElement:
        return a - b

    def neg(self, a: WeylElement) -> WeylElement:
        return -a

    def mul(self, a: WeylElement, b: WeylElement) -> WeylElement:
        return a * b

    def div(self, a: WeylElement, b: WeylElement) -> WeylElement:
        zero = Monomial((0,) * self.signature.nvars, 0, 0)
        if set(b.terms) - {zero}:
            raise ValueError("operators can only be divided by coefficients")
        if not b.terms:
            raise ZeroDivisionError("division by zero")
        return a.scale(self.signature.coefficient_field.one / b.terms[zero])

    def power(self, a: WeylElement, n: int) -> WeylElement:
        return a ** n


class _FunctionBuilder:
    """Evaluates expressions to rational functions of one polynomial ring"""

    def __init__(self, ring):
        self.ring = ring
        self.names = [str(s) for s in ring.symbols]

    def _wrap(self, p) -> RationalFunction:
        return RationalFunction(p, self.ring.one, reduced=True)

    def number(self, value: int) -> RationalFunction:
        return self._wrap(self.ring.ground_new(value))

    def name(self, name: str) -> RationalFunction:
        if name not in self.names:
            raise UnknownVariableError(f"'{name}' is not declared")
        return self._wrap(self.ring.gens[self.names.index(name)])

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        return a / b

    def power(self, a, n: int):
        return a ** n


class _ExpressionParser:
    """Recursive descent over the token list, evaluating as it goes"""

    def __init__(self, tokens: List[_Token], builder, line: int):
        self.tokens = tokens
        self.builder = builder
        self.line = line
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        token = self.tokens[self.i]
        self.i += 1
        return token

    def error(self, message: str, token: Optional[_Token] = None) -> ProblemParseError:
        token = token or self.peek()
        return ProblemParseError(message, self.line, token.column)

    def expect(self, kind: str) -> _Token:
        if self.peek().kind != kind:
            found = self.peek().text or "end of line"
            raise self.error(f"expected '{kind}', found '{found}'")
        return self.advance()

    def _apply(self, fn: Callable, token: _Token, *args):
        try:
            return fn(*args)
        except (ValueError, ZeroDivisionError) as e:
            raise self.error(str(e), token)

    def expression(self):
        value = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.advance()
            right = self.term()
            value = self._apply(self.builder.add if op.kind == "+" else self.builder.sub, op, value, right)
        return value

    def term(self):
        value = self.unary()
        while self.peek().kind in ("*", "/"):
            op = self.advance()
            right = self.unary()
            value = self._apply(self.builder.mul if op.kind == "*" else self.builder.div, op, value, right)
        return value

    def unary(self):
        if self.peek().kind == "-":
            op = self.advance()
            return self._apply(self.builder.neg, op, self.unary())
        if self.peek().kind == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().kind == "^":
            op = self.advance()
            exponent = self.expect("number")
            return self._apply(self.builder.power, op, base, int(exponent.text))
        return base

    def atom(self):
        token = self.peek()
        if token.kind == "number":
            self.advance()
            return self.builder.number(int(token.text))
        if token.kind == "name":
            self.advance()
            try:
                return self.builder.name(token.text)
            except UnknownVariableError:
                raise self.error(f"undeclared variable '{token.text}'", token)
        if token.kind == "(":
            self.advance()
            value = self.expression()
            self.expect(")")
            return value
        raise self.error(f"unexpected '{token.text or 'end of line'}'")

    def parse(self):
        value = self.expression()
        if self.peek().kind != "end":
            raise self.error(f"unexpected '{self.peek().text}'")
        return value

    def vector(self) -> List:
        """``[e1, e2, ...]`` or a bare expression"""
        if self.peek().kind != "[":
            return [self.parse()]
        self.advance()
        entries = [self.expression()]
        while self.peek().kind == ",":
            self.advance()
            entries.append(self.expression())
        self.expect("]")
        if self.peek().kind != "end":
            raise self.error(f"unexpected '{self.peek().text}' after vector")
        return entries


def parse_expression(text: str, signature: AlgebraSignature, line: int = 1, column: int = 1) -> WeylElement:
    """One operator or vector, placed in its positions (rank-1 scalars stay scalar)"""
    parser = _ExpressionParser(_tokenize(text, line, column - 1), _OperatorBuilder(signature), line)
    bracketed = parser.peek().kind == "["
    entries = parser.vector()
    if not bracketed:
        return entries[0]
    if len(entries) != signature.rank:
        raise ProblemParseError(f"vector of length {len(entries)} in a module of rank {signature.rank}",
                                line, column)
    total = signature.zero()
    for i, entry in enumerate(entries, start=1):
        if not entry.is_scalar():
            raise ProblemParseError("vector entries must be scalar operators", line, column)
        if entry.terms:
            total = total + entry.with_position(i)
    if signature.rank == 1 and total.terms:
        total = total.component(1)
    return total


def parse_function(text: str, ring, line: int = 1, column: int = 1) -> RationalFunction:
    """A rational function of the variables of ``ring``"""
    parser = _ExpressionParser(_tokenize(text, line, column - 1), _FunctionBuilder(ring), line)
    return parser.parse()


def parse_functions(text: str, ring, line: int = 1, column: int = 1) -> List[RationalFunction]:
    parser = _ExpressionParser(_tokenize(text, line, column - 1), _FunctionBuilder(ring), line)
    return parser.vector()


@dataclass
class ProblemFile:
    """Declarations and generators read from a problem file"""
    poly_vars: Tuple[str, ...] = ()
    rat_vars: Tuple[str, ...] = ()
    derivatives: Optional[Tuple[str, ...]] = None
    rank: int = 1
    field: FieldSpec = dataclasses.field(default_factory=FieldSpec)
    generators: List[WeylElement] = dataclasses.field(default_factory=list)
    loc_poly: Optional[MultiPoly] = None
    order: Optional[str] = None
    position: Optional[str] = None
    function: Optional[List[RationalFunction]] = None
    exp_function: Optional[MultiPoly] = None
    signature: Optional[AlgebraSignature] = None

    def to_dict(self):
        return {
            "poly_vars": list(self.poly_vars),
            "rat_vars": list(self.rat_vars),
            "rank": self.rank,
            "field": self.field.syntax(),
            "order": self.order,
            "loc_poly": format_poly(self.loc_poly) if self.loc_poly is not None else None,
            "generators": [str(g) for g in self.generators],
        }


def _names(value: str) -> Tuple[str, ...]:
    value = value.strip()
    if value.startswith("[") and value.endswith("]"):
        value = value[1:-1]
    return tuple(v.strip() for v in value.split(",") if v.strip())


def parse_problem(text: str) -> ProblemFile:
    """Parse a problem file; errors carry line and column"""
    values = {}
    positions = {}
    generator_lines: List[Tuple[int, int, str]] = []
    in_generators = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        if in_generators and (indent > 0 or ":" not in line):
            generator_lines.append((lineno, indent + 1, line.strip()))
            continue
        if ":" not in line:
            raise ProblemParseError("expected 'key: value'", lineno, indent + 1)
        key, value = line.split(":", 1)
        key = key.strip()
        if key == "generators":
            in_generators = True
            if value.strip():
                generator_lines.append((lineno, line.index(":") + 2 + (len(value) - len(value.lstrip())),
                                        value.strip()))
            continue
        if key not in KEYS:
            raise ProblemParseError(f"unknown key '{key}'", lineno, indent + 1)
        if in_generators:
            raise ProblemParseError(f"'{key}' after the generators block", lineno, indent + 1)
        values[key] = value.strip()
        positions[key] = (lineno, line.index(":") + 2 + (len(value) - len(value.lstrip())))

    problem = ProblemFile()
    try:
        problem.poly_vars = _names(values.get("poly_vars", ""))
        problem.rat_vars = _names(values.get("rat_vars", ""))
        if "derivatives" in values:
            problem.derivatives = _names(values["derivatives"])
        if "field" in values:
            problem.field = FieldSpec.parse(values["field"])
        if "rank" in values:
            problem.rank = int(values["rank"])
        sig = AlgebraSignature(poly_vars=problem.poly_vars, rational_vars=problem.rat_vars,
                               derivative_vars=problem.derivatives, rank=problem.rank, field=problem.field)
    except ValueError as e:
        key = next((k for k in ("poly_vars", "rat_vars", "derivatives", "field", "rank") if k in values), None)
        line, column = positions.get(key, (1, 1))
        raise ProblemParseError(str(e), line, column)
    problem.signature = sig
    problem.order = values.get("order")
    problem.position = values.get("position")

    ring = sig.function_ring
    if "loc_poly" in values:
        line, column = positions["loc_poly"]
        f = parse_function(values["loc_poly"], ring, line, column)
        if not f.is_polynomial():
            raise ProblemParseError("loc_poly must be a polynomial", line, column)
        problem.loc_poly = f.numer
    if "function" in values:
        line, column = positions["function"]
        problem.function = parse_functions(values["function"], ring, line, column)
    if "exp_function" in values:
        line, column = positions["exp_function"]
        g = parse_function(values["exp_function"], ring, line, column)
        if not g.is_polynomial():
            raise ProblemParseError("exp_function must be a polynomial", line, column)
        problem.exp_function = g.numer

    target = sig
    if problem.loc_poly is not None and problem.loc_poly and "T" not in sig.monomial_vars + sig.rational_vars:
        target = sig.with_localization(problem.loc_poly, "T")
    generators = []
    for line, column, expression in generator_lines:
        element = parse_expression(expression, target, line, column)
        if element.terms and element.is_scalar() and sig.rank == 1:
            element = element.with_position(1)
        elif element.terms and element.is_scalar():
            raise ProblemParseError(f"scalar operator in a module of rank {sig.rank}; write a vector",
                                    line, column)
        generators.append(element)
    if target is not sig and all(g.is_T_free() for g in generators):
        generators = [convert_element(g, sig) for g in generators]
    problem.generators = generators
    logger.info(f"parsed problem: {len(generators)} generators over {sig}")
    return problem


def format_problem(signature: AlgebraSignature, generators: Sequence[WeylElement],
                   loc_poly: Optional[MultiPoly] = None, order: Optional[str] = None,
                   function: Union[None, RationalFunction, Sequence[RationalFunction]] = None,
                   exp_function: Optional[MultiPoly] = None, comment: Optional[str] = None) -> str:
    """Problem file text that ``parse_problem`` reads back to the same generators"""
    base = signature.without_localization()
    lines = []
    if comment:
        lines += [f"# {c}" for c in comment.splitlines()]
    lines.append(f"poly_vars: {', '.join(base.poly_vars)}")
    if base.rational_vars:
        lines.append(f"rat_vars: {', '.join(base.rational_vars)}")
    if base.derivative_vars != base.poly_vars + base.rational_vars:
        lines.append(f"derivatives: {', '.join(base.derivative_vars)}")
    if base.rank != 1:
        lines.append(f"rank: {base.rank}")
    lines.append(f"field: {base.field.syntax()}")
    if order:
        lines.append(f"order: {order}")
    if loc_poly is not None:
        lines.append(f"loc_poly: {format_poly(loc_poly)}")
    if function is not None:
        if isinstance(function, RationalFunction):
            lines.append(f"function: {format_rational_function(function)}")
        else:
            lines.append(f"function: [{', '.join(format_rational_function(h) for h in function)}]")
    if exp_function is not None:
        lines.append(f"exp_function: {format_poly(exp_function)}")
    lines.append("generators:")
    for g in generators:
        if g.signature.has_localization and not base.has_localization and g.is_T_free():
            g = convert_element(g, base)
        lines.append(f"  {format_element(g)}")
    return "\n".join(lines) + "\n"


def load_problem(path: str) -> ProblemFile:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_problem(handle.read())


def generators_for(problem: ProblemFile) -> List[WeylElement]:
    """Nonzero generators, checked to share the problem signature"""
    out = []
    for g in problem.generators:
        if g.signature != problem.signature and not g.signature.has_localization:
            raise SignatureMismatchError("generator outside the problem signature")
        if g.terms:
            out.append(g)
    return out
