# weyl_closure/domains.py
"""
Exact coefficient arithmetic.

Polynomials are sympy sparse ``PolyElement``s over ``QQ`` or ``GF(p)`` in a
ring ordered by grevlex; rational functions are kept as reduced
numerator/denominator pairs with a monic denominator. ``CoefficientField``
wraps either the ground field K or a rational function field K(vars) behind
one interface so the Weyl layer never needs to know which one it has.
"""
import logging
from fractions import Fraction
from typing import Dict, Iterable, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, model_validator
from sympy import Symbol, isprime
from sympy.polys.domains import GF, QQ
from sympy.polys.orderings import grevlex
from sympy.polys.rings import PolyElement, PolyRing

from weyl_closure.errors import SignatureMismatchError, UnknownVariableError

logger = logging.getLogger(__name__)

# Sparse polynomial: a dict from exponent tuples to nonzero ground coefficients.
MultiPoly = PolyElement


class FieldSpec(BaseModel):
    """Coefficient field description: QQ, Fp(p) or a fraction field over one of them"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["QQ", "Fp", "frac"] = "QQ"
    modulus: Optional[int] = None
    base: Optional["FieldSpec"] = None
    variables: Tuple[str, ...] = ()

    @model_validator(mode="after")
    def _check(self) -> "FieldSpec":
        if self.kind == "Fp":
            if self.modulus is None or not (1 < self.modulus < 2 ** 63) or not isprime(self.modulus):
                raise ValueError(f"Fp modulus must be a prime below 2^63, got {self.modulus}")
        if self.kind == "frac":
            if self.base is None or self.base.kind == "frac":
                raise ValueError("fraction field needs a QQ or Fp base")
            if len(set(self.variables)) != len(self.variables):
                raise ValueError("fraction field variables must be distinct")
        return self

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """Parse ``QQ`` or ``Fp(p)``"""
        text = text.strip()
        if text == "QQ":
            return cls(kind="QQ")
        if text.startswith("Fp(") and text.endswith(")"):
            try:
                modulus = int(text[3:-1])
            except ValueError:
                raise ValueError(f"bad modulus in field '{text}'")
            return cls(kind="Fp", modulus=modulus)
        raise ValueError(f"unknown field '{text}', expected QQ or Fp(p)")

    def ground(self) -> "FieldSpec":
        return self.base if self.kind == "frac" else self

    def domain(self):
        """The sympy ground domain"""
        ground = self.ground()
        if ground.kind == "Fp":
            return GF(ground.modulus)
        return QQ

    def syntax(self) -> str:
        ground = self.ground()
        return "QQ" if ground.kind == "QQ" else f"Fp({ground.modulus})"


FieldSpec.model_rebuild()


def polynomial_ring(variables: Sequence[str], domain) -> PolyRing:
    """Sparse polynomial ring over ``domain`` in ``variables``, grevlex ordered"""
    return PolyRing([Symbol(v) for v in variables], domain, grevlex)


def ring_variable_names(ring: PolyRing) -> Tuple[str, ...]:
    return tuple(str(s) for s in ring.symbols)


def _check_same_ring(a: MultiPoly, b: MultiPoly) -> None:
    if a.ring != b.ring:
        raise SignatureMismatchError(
            f"polynomials over different rings: {ring_variable_names(a.ring)} / {a.ring.domain} "
            f"vs {ring_variable_names(b.ring)} / {b.ring.domain}")


def poly_arith(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    """Exact add/sub/mul of two polynomials over the same ring"""
    _check_same_ring(a, b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown polynomial operation '{op}'")


def poly_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """
    Greatest common divisor with leading coefficient one.

    Uses the primitive polynomial remainder sequence over the ground field,
    recursing through contents variable by variable.
    """
    _check_same_ring(a, b)
    ring = a.ring
    if not a:
        return b.monic()
    if not b:
        return a.monic()
    if ring.ngens == 0:
        return ring.one
    if a.is_ground or b.is_ground:
        return ring.one
    h = ring.dmp_ff_prs_gcd(a, b)[0]
    return h.monic()


def poly_lcm(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Least common multiple with leading coefficient one"""
    if not a or not b:
        return a.ring.zero
    return (a * b).exquo(poly_gcd(a, b)).monic()


def poly_degree(p: MultiPoly) -> int:
    """Total degree; 0 for constants and for the zero polynomial"""
    return max((sum(m) for m in p.itermonoms()), default=0)


def partial_derivative(p: MultiPoly, variable: str) -> MultiPoly:
    """Formal partial derivative with respect to a named variable"""
    names = ring_variable_names(p.ring)
    if variable not in names:
        raise UnknownVariableError(f"'{variable}' is not a variable of {names}")
    d = p.diff(p.ring.gens[names.index(variable)])
    d.strip_zero()
    return d


def embed_poly(p: MultiPoly, ring: PolyRing) -> MultiPoly:
    """Move ``p`` into another ring, matching variables by name"""
    if p.ring == ring:
        return p
    names = ring_variable_names(p.ring)
    target = ring_variable_names(ring)
    used = {names[i] for monom in p.keys() for i, e in enumerate(monom) if e}
    if used - set(target):
        raise SignatureMismatchError(f"variables {sorted(used - set(target))} are not available in the target ring")
    index = [names.index(v) if v in names else None for v in target]
    q = ring.zero
    for monom, coeff in p.items():
        expv = tuple(monom[i] if i is not None else 0 for i in index)
        q[expv] = ring.domain.convert(coeff, p.ring.domain)
    q.strip_zero()
    return q


def _ground_value(domain, value):
    """Convert an int, Fraction or ground element into ``domain``"""
    if isinstance(value, Fraction):
        return domain(value.numerator) / domain(value.denominator)
    if isinstance(value, int):
        return domain(value)
    return domain.convert(value)


class RationalFunction:
    """
    Reduced quotient of two polynomials of one ring.

    The pair is divided by its gcd and the denominator is made monic under
    grevlex, so equal values always have identical representations.
    """

    __slots__ = ("numer", "denom", "_hash")

    def __init__(self, numer: MultiPoly, denom: Optional[MultiPoly] = None, reduced: bool = False):
        if denom is None:
            denom = numer.ring.one
        else:
            _check_same_ring(numer, denom)
        if not reduced:
            numer, denom = self._canonical(numer, denom)
        self.numer = numer
        self.denom = denom
        self._hash = None

    @staticmethod
    def _canonical(numer: MultiPoly, denom: MultiPoly) -> Tuple[MultiPoly, MultiPoly]:
        ring = numer.ring
        if not denom:
            raise ZeroDivisionError("rational function with zero denominator")
        if not numer:
            return ring.zero, ring.one
        if not denom.is_ground:
            g = poly_gcd(numer, denom)
            if g != ring.one:
                numer = numer.exquo(g)
                denom = denom.exquo(g)
        lc = denom.LC
        if lc != ring.domain.one:
            numer = numer.quo_ground(lc)
            denom = denom.quo_ground(lc)
        return numer, denom

    @property
    def ring(self) -> PolyRing:
        return self.numer.ring

    @classmethod
    def from_poly(cls, p: MultiPoly) -> "RationalFunction":
        return cls(p, p.ring.one, reduced=True)

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            _check_same_ring(self.numer, other.numer)
            return other
        if isinstance(other, PolyElement):
            _check_same_ring(self.numer, other)
            return RationalFunction(other, other.ring.one, reduced=True)
        ring = self.ring
        return RationalFunction(ring.ground_new(_ground_value(ring.domain, other)), ring.one, reduced=True)

    def is_polynomial(self) -> bool:
        return self.denom == self.ring.one

    def is_constant(self) -> bool:
        return self.numer.is_ground and self.denom.is_ground

    def __bool__(self) -> bool:
        return bool(self.numer)

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalFunction):
            return self.numer == other.numer and self.denom == other.denom
        try:
            other = self._coerce(other)
        except Exception:
            return NotImplemented
        return self.numer == other.numer and self.denom == other.denom

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.numer, self.denom))
        return self._hash

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.numer, self.denom, reduced=True)

    def __add__(self, other) -> "RationalFunction":
        other = self._coerce(other)
        if not other:
            return self
        if not self:
            return other
        one = self.ring.one
        if self.denom == one and other.denom == one:
            return RationalFunction(self.numer + other.numer, one, reduced=True)
        if self.denom == other.denom:
            return RationalFunction(self.numer + other.numer, self.denom)
        return RationalFunction(self.numer * other.denom + other.numer * self.denom, self.denom * other.denom)

    __radd__ = __add__

    def __sub__(self, other) -> "RationalFunction":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RationalFunction":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RationalFunction":
        other = self._coerce(other)
        if not self or not other:
            return RationalFunction(self.ring.zero, self.ring.one, reduced=True)
        one = self.ring.one
        if self.denom == one and other.denom == one:
            return RationalFunction(self.numer * other.numer, one, reduced=True)
        return RationalFunction(self.numer * other.numer, self.denom * other.denom)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if not self:
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFunction(self.denom, self.numer)

    def __truediv__(self, other) -> "RationalFunction":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> "RationalFunction":
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "RationalFunction":
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunction(self.numer ** n, self.denom ** n, reduced=True)

    def diff(self, variable: str) -> "RationalFunction":
        """Partial derivative by the quotient rule"""
        dn = partial_derivative(self.numer, variable)
        dd = partial_derivative(self.denom, variable)
        if not dd:
            return RationalFunction(dn, self.denom)
        return RationalFunction(dn * self.denom - self.numer * dd, self.denom ** 2)

    def embed(self, ring: PolyRing) -> "RationalFunction":
        return RationalFunction(embed_poly(self.numer, ring), embed_poly(self.denom, ring))

    def __repr__(self) -> str:
        return f"RationalFunction({self})"

    def __str__(self) -> str:
        return format_rational_function(self)


def ratfun_arith(a: RationalFunction, b: RationalFunction, op: str) -> RationalFunction:
    """Exact add/sub/mul/div of rational functions over the same ring"""
    _check_same_ring(a.numer, b.numer)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown rational function operation '{op}'")


def format_ground(domain, c) -> str:
    return str(domain.to_sympy(c))


def format_poly(p: MultiPoly) -> str:
    """Polynomial in the expression syntax of the problem files, grevlex-descending"""
    if not p:
        return "0"
    names = ring_variable_names(p.ring)
    domain = p.ring.domain
    parts = []
    for monom, coeff in p.terms():
        factors = [f"{names[i]}^{e}" if e > 1 else names[i] for i, e in enumerate(monom) if e]
        text = format_ground(domain, coeff)
        negative = text.startswith("-")
        if negative:
            text = text[1:]
        if factors:
            body = "*".join(factors) if text == "1" else "*".join([text] + factors)
        else:
            body = text
        parts.append(("-" if negative else "+", body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def format_rational_function(r: RationalFunction) -> str:
    if r.is_polynomial():
        return format_poly(r.numer)
    return f"({format_poly(r.numer)})/({format_poly(r.denom)})"


class CoefficientField:
    """
    The field coefficients of Weyl elements live in.

    Either the ground field K (elements are sympy domain elements) or
    K(variables) (elements are ``RationalFunction``s). Both support the
    Python arithmetic operators, so callers only come here for constants,
    conversion and derivatives.
    """

    def __init__(self, spec: FieldSpec, variables: Sequence[str] = ()):
        self.spec = spec.ground()
        self.domain = self.spec.domain()
        self.variables = tuple(variables)
        if self.variables:
            self.ring = polynomial_ring(self.variables, self.domain)
            self.zero = RationalFunction(self.ring.zero, self.ring.one, reduced=True)
            self.one = RationalFunction(self.ring.one, self.ring.one, reduced=True)
        else:
            self.ring = None
            self.zero = self.domain.zero
            self.one = self.domain.one

    @property
    def fraction_free(self) -> bool:
        """True when reductions should clear denominators instead of dividing"""
        return bool(self.variables)

    def __eq__(self, other) -> bool:
        return isinstance(other, CoefficientField) and (self.spec, self.variables) == (other.spec, other.variables)

    def __hash__(self) -> int:
        return hash((self.spec, self.variables))

    def convert(self, value):
        if self.variables:
            if isinstance(value, RationalFunction):
                return value if value.ring == self.ring else value.embed(self.ring)
            if isinstance(value, PolyElement):
                return RationalFunction(embed_poly(value, self.ring), self.ring.one)
            return RationalFunction(self.ring.ground_new(_ground_value(self.domain, value)), self.ring.one, reduced=True)
        if isinstance(value, RationalFunction):
            if not value.is_constant():
                raise SignatureMismatchError(f"coefficient {value} is not a constant of {self.spec.syntax()}")
            return self.domain.convert(value.numer.LC) / self.domain.convert(value.denom.LC) if value else self.zero
        return _ground_value(self.domain, value)

    def monomial(self, exponents: Dict[str, int], coeff=1):
        """coeff * prod(v^e) as a field element"""
        coeff = _ground_value(self.domain, coeff)
        if not exponents or not any(exponents.values()):
            return self.convert(coeff)
        expv = tuple(exponents.get(v, 0) for v in self.variables)
        unknown = set(exponents) - set(self.variables)
        if unknown:
            raise UnknownVariableError(f"{sorted(unknown)} are not coefficient variables")
        return RationalFunction(self.ring.term_new(expv, coeff), self.ring.one, reduced=True)

    def derivative(self, c, variable: str):
        if not self.variables or variable not in self.variables:
            return self.zero
        return c.diff(variable)

    def is_constant(self, c) -> bool:
        return c.is_constant() if self.variables else True

    def bits(self, c) -> int:
        """Size of a coefficient in bits, for budget checks"""
        if self.variables:
            return max((self.bits(v) for p in (c.numer, c.denom) for v in p.values()), default=0)
        if self.domain.is_QQ:
            return max(int(self.domain.numer(c)).bit_length(), int(self.domain.denom(c)).bit_length())
        return int(self.domain.to_sympy(c)).bit_length()

    def clear_denominators(self, coeffs: Iterable[RationalFunction]) -> MultiPoly:
        """Monic lcm of the denominators"""
        common = self.ring.one
        for c in coeffs:
            if c.denom != self.ring.one:
                common = poly_lcm(common, c.denom)
        return common

    def content(self, polys: Iterable[MultiPoly]) -> MultiPoly:
        """Monic gcd of polynomial numerators"""
        g = self.ring.zero
        for p in polys:
            g = poly_gcd(g, p) if g else p.monic()
            if g == self.ring.one:
                break
        return g

    def format(self, c) -> str:
        if self.variables:
            return format_rational_function(c)
        return format_ground(self.domain, c)
