# weyl_closure/algebra.py
"""
Free modules over mixed Weyl algebras W_{t,x}(t), optionally extended by a
localization variable T standing for 1/f.

Elements are stored in normal order: a term ``c * x^a * D^b * T^j * e_i``
denotes exactly that left-to-right product, with the coefficient c taken
from K or K(t). Position 0 marks a scalar operator; module components are
numbered 1..rank.
"""
import dataclasses
import logging
import threading
from functools import cached_property
from math import comb, perm
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from sympy.polys.rings import PolyElement, PolyRing

from weyl_closure.domains import (
    CoefficientField,
    FieldSpec,
    MultiPoly,
    RationalFunction,
    embed_poly,
    format_rational_function,
    partial_derivative,
    polynomial_ring,
    ring_variable_names,
)
from weyl_closure.errors import SignatureMismatchError, UnknownVariableError, ZeroElementError

logger = logging.getLogger(__name__)

DERIVATIVE_PREFIX = "D"


class Monomial(NamedTuple):
    """Exponents over the monomial variables, the T exponent and the position"""
    exps: Tuple[int, ...]
    t: int = 0
    pos: int = 0


class DerivativeSlot(NamedTuple):
    variable: str
    index: int
    poly_index: Optional[int]


Terms = Dict[Monomial, object]


def _accumulate(acc: Terms, mono: Monomial, c) -> None:
    if not c:
        return
    old = acc.get(mono)
    if old is None:
        acc[mono] = c
        return
    s = old + c
    if s:
        acc[mono] = s
    else:
        del acc[mono]


@dataclasses.dataclass(frozen=True)
class AlgebraSignature:
    """
    Declares the algebra an element lives in.

    ``poly_vars`` are the x's (monomial variables), ``rational_vars`` the t's
    (living in the coefficient field K(t)). ``derivative_vars`` lists the base
    variables whose derivative is present (all of them by default). With no
    derivatives and no localization this is a commutative polynomial ring.
    ``loc_poly`` is f in K[t, x], denominators already cleared.
    """
    poly_vars: Tuple[str, ...] = ()
    rational_vars: Tuple[str, ...] = ()
    derivative_vars: Optional[Tuple[str, ...]] = None
    rank: int = 1
    field: FieldSpec = FieldSpec()
    loc_name: Optional[str] = None
    loc_poly: Optional[MultiPoly] = None
    _memo: dict = dataclasses.field(default_factory=dict, init=False, compare=False, hash=False, repr=False)
    _lock: threading.Lock = dataclasses.field(default_factory=threading.Lock, init=False, compare=False,
                                              hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "poly_vars", tuple(self.poly_vars))
        object.__setattr__(self, "rational_vars", tuple(self.rational_vars))
        base = self.poly_vars + self.rational_vars
        if self.derivative_vars is None:
            object.__setattr__(self, "derivative_vars", base)
        else:
            object.__setattr__(self, "derivative_vars", tuple(self.derivative_vars))

        if len(set(base)) != len(base):
            raise SignatureMismatchError(f"variable names must be distinct: {base}")
        unknown = set(self.derivative_vars) - set(base)
        if unknown:
            raise UnknownVariableError(f"derivatives of undeclared variables {sorted(unknown)}")
        if self.rank < 1:
            raise SignatureMismatchError(f"module rank must be at least 1, got {self.rank}")
        names = list(base) + [DERIVATIVE_PREFIX + v for v in self.derivative_vars]
        if self.loc_name is not None:
            names.append(self.loc_name)
        if len(set(names)) != len(names):
            raise SignatureMismatchError(f"derivative or localization names collide with variables: {names}")

        if self.loc_poly is not None:
            if self.loc_name is None:
                raise SignatureMismatchError("localization polynomial given without a variable name")
            f = embed_poly(self.loc_poly, self.function_ring)
            if not f:
                raise ZeroElementError("localization polynomial must be nonzero")
            object.__setattr__(self, "loc_poly", f)
        elif self.loc_name is not None:
            raise SignatureMismatchError(f"localization variable {self.loc_name} needs a polynomial")

    # -- layout ---------------------------------------------------------

    @cached_property
    def monomial_vars(self) -> Tuple[str, ...]:
        """x's, then D of the x's, then D of the t's"""
        dx = tuple(DERIVATIVE_PREFIX + v for v in self.poly_vars if v in self.derivative_vars)
        dt = tuple(DERIVATIVE_PREFIX + v for v in self.rational_vars if v in self.derivative_vars)
        return self.poly_vars + dx + dt

    @cached_property
    def derivative_slots(self) -> Tuple[DerivativeSlot, ...]:
        slots = []
        for i, name in enumerate(self.monomial_vars):
            if i < len(self.poly_vars):
                continue
            v = name[len(DERIVATIVE_PREFIX):]
            poly_index = self.poly_vars.index(v) if v in self.poly_vars else None
            slots.append(DerivativeSlot(v, i, poly_index))
        return tuple(slots)

    @property
    def nvars(self) -> int:
        return len(self.monomial_vars)

    @property
    def has_localization(self) -> bool:
        return self.loc_name is not None

    @property
    def is_commutative(self) -> bool:
        return not self.derivative_vars and not self.has_localization

    @cached_property
    def coefficient_field(self) -> CoefficientField:
        return CoefficientField(self.field, self.rational_vars)

    @cached_property
    def function_ring(self) -> PolyRing:
        """K[t, x], the ring f and the oracle functions are written in"""
        return polynomial_ring(self.rational_vars + self.poly_vars, self.field.domain())

    # -- derived signatures ---------------------------------------------

    def with_localization(self, f: MultiPoly, name: str = "T") -> "AlgebraSignature":
        return dataclasses.replace(self, loc_name=name, loc_poly=f)

    def without_localization(self) -> "AlgebraSignature":
        if not self.has_localization:
            return self
        return dataclasses.replace(self, loc_name=None, loc_poly=None)

    def rationalized(self) -> "AlgebraSignature":
        """Every base variable moved into the coefficient field"""
        return dataclasses.replace(self, poly_vars=(), rational_vars=self.rational_vars + self.poly_vars,
                                   derivative_vars=self.derivative_vars, loc_name=None, loc_poly=None)

    def with_rank(self, rank: int) -> "AlgebraSignature":
        if rank == self.rank:
            return self
        return dataclasses.replace(self, rank=rank)

    def with_poly_vars(self, extra: Sequence[str], front: bool = False) -> "AlgebraSignature":
        """Adjoin commuting polynomial variables without derivatives"""
        extra = tuple(extra)
        poly_vars = extra + self.poly_vars if front else self.poly_vars + extra
        return dataclasses.replace(self, poly_vars=poly_vars, derivative_vars=self.derivative_vars)

    def fresh_name(self, stem: str = "u") -> str:
        taken = set(self.poly_vars) | set(self.rational_vars) | set(self.monomial_vars)
        if self.loc_name:
            taken.add(self.loc_name)
        name, i = stem, 0
        while name in taken:
            i += 1
            name = f"{stem}{i}"
        return name

    # -- constructors ---------------------------------------------------

    def zero(self) -> "WeylElement":
        return WeylElement(self, {})

    def constant(self, c, pos: int = 0) -> "WeylElement":
        self._check_position(pos)
        c = self.coefficient_field.convert(c)
        if not c:
            return self.zero()
        return WeylElement(self, {Monomial((0,) * self.nvars, 0, pos): c})

    def one(self, pos: int = 0) -> "WeylElement":
        return self.constant(1, pos)

    def unit(self, i: int) -> "WeylElement":
        """The basis vector e_i"""
        return self.one(i)

    def generator(self, name: str, pos: int = 0) -> "WeylElement":
        """The element named by a monomial variable, a rational variable or T"""
        self._check_position(pos)
        if name in self.monomial_vars:
            exps = [0] * self.nvars
            exps[self.monomial_vars.index(name)] = 1
            return WeylElement(self, {Monomial(tuple(exps), 0, pos): self.coefficient_field.one})
        if name in self.rational_vars:
            c = self.coefficient_field.monomial({name: 1})
            return WeylElement(self, {Monomial((0,) * self.nvars, 0, pos): c})
        if self.has_localization and name == self.loc_name:
            return WeylElement(self, {Monomial((0,) * self.nvars, 1, pos): self.coefficient_field.one})
        raise UnknownVariableError(f"'{name}' is not declared in this algebra")

    def from_terms(self, terms: Dict[Monomial, object]) -> "WeylElement":
        acc: Terms = {}
        convert = self.coefficient_field.convert
        for m, c in terms.items():
            if len(m.exps) != self.nvars:
                raise SignatureMismatchError(f"monomial {m} has the wrong number of exponents")
            if m.t and not self.has_localization:
                raise SignatureMismatchError("T exponent in an algebra without localization")
            self._check_position(m.pos)
            _accumulate(acc, m, convert(c))
        return WeylElement(self, acc)

    def from_function_poly(self, p: Union[MultiPoly, RationalFunction], pos: int = 0) -> "WeylElement":
        """A polynomial of K[t, x] (or K(t)[x]) as a multiplication operator"""
        self._check_position(pos)
        if isinstance(p, RationalFunction):
            if not p.is_polynomial():
                denom = embed_poly(p.denom, self.function_ring)
                m = len(self.rational_vars)
                if any(any(monom[m:]) for monom in denom.keys()):
                    raise SignatureMismatchError(f"{p} is not a polynomial in {self.poly_vars}")
                if m:
                    inverse = self.coefficient_field.convert(denom).inverse()
                else:
                    inverse = self.field.domain().one / denom.LC
                return self.from_function_poly(p.numer, pos).scale(inverse)
            p = p.numer
        p = embed_poly(p, self.function_ring)
        return WeylElement(self, self._function_terms(p, pos))

    def _function_terms(self, p: MultiPoly, pos: int = 0) -> Terms:
        m = len(self.rational_vars)
        pad = (0,) * (self.nvars - len(self.poly_vars))
        acc: Terms = {}
        cf = self.coefficient_field
        for monom, coeff in p.items():
            exps = tuple(monom[m:]) + pad
            if m:
                c = cf.monomial(dict(zip(self.rational_vars, monom[:m])), coeff)
            else:
                c = coeff
            _accumulate(acc, Monomial(exps, 0, pos), c)
        return acc

    def _check_position(self, pos: int) -> None:
        if not 0 <= pos <= self.rank:
            raise SignatureMismatchError(f"position {pos} outside 0..{self.rank}")

    # -- T arithmetic ---------------------------------------------------

    @cached_property
    def loc_partials(self) -> Tuple[Terms, ...]:
        """f_l = df/dl for each derivative slot, as commutative terms"""
        if not self.has_localization:
            return ()
        return tuple(self._function_terms(partial_derivative(self.loc_poly, slot.variable))
                     for slot in self.derivative_slots)

    def t_normal_form(self, j: int, beta: Tuple[int, ...]) -> Terms:
        """
        Normal form of T^j * D^beta, memoized per signature.

        Uses T^j D_l = D_l T^j + j f_l T^(j+1) and recurses on |beta|.
        """
        key = (j, beta)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        slots = self.derivative_slots
        if j == 0 or not any(beta):
            exps = [0] * self.nvars
            for slot, b in zip(slots, beta):
                exps[slot.index] = b
            result = {Monomial(tuple(exps), j, 0): self.coefficient_field.one}
        else:
            ell = next(i for i, b in enumerate(beta) if b)
            rest = beta[:ell] + (beta[ell] - 1,) + beta[ell + 1:]
            result = _apply_derivative(self, slots[ell], 1, self.t_normal_form(j, rest))
            shifted = _commutative_product(self.loc_partials[ell], self.t_normal_form(j + 1, rest))
            for m, c in shifted.items():
                _accumulate(result, m, j * c)
        with self._lock:
            self._memo[key] = result
        return result

    def __repr__(self) -> str:
        parts = [f"poly_vars={self.poly_vars}", f"rational_vars={self.rational_vars}"]
        if self.derivative_vars != self.poly_vars + self.rational_vars:
            parts.append(f"derivative_vars={self.derivative_vars}")
        parts.append(f"rank={self.rank}")
        parts.append(f"field={self.field.syntax()}")
        if self.has_localization:
            parts.append(f"{self.loc_name}=1/({self.loc_poly.as_expr()})")
        return f"AlgebraSignature({', '.join(parts)})"


def _apply_derivative(sig: AlgebraSignature, slot: DerivativeSlot, k: int, terms: Terms) -> Terms:
    """Left multiplication of normal-ordered terms by D_v^k"""
    acc: Terms = {}
    cf = sig.coefficient_field
    for m, c in terms.items():
        exps = list(m.exps)
        if slot.poly_index is not None:
            a = exps[slot.poly_index]
            for i in range(min(k, a) + 1):
                e = exps[:]
                e[slot.poly_index] = a - i
                e[slot.index] += k - i
                _accumulate(acc, Monomial(tuple(e), m.t, m.pos), comb(k, i) * perm(a, i) * c)
        else:
            ci = c
            for i in range(k + 1):
                if i:
                    ci = cf.derivative(ci, slot.variable)
                    if not ci:
                        break
                e = exps[:]
                e[slot.index] += k - i
                _accumulate(acc, Monomial(tuple(e), m.t, m.pos), comb(k, i) * ci)
    return acc


def _commutative_product(left: Terms, right: Terms) -> Terms:
    """Product where every left monomial is free of D and T"""
    acc: Terms = {}
    for ml, cl in left.items():
        for mr, cr in right.items():
            exps = tuple(a + b for a, b in zip(ml.exps, mr.exps))
            _accumulate(acc, Monomial(exps, mr.t, max(ml.pos, mr.pos)), cl * cr)
    return acc


def _t_power_times(sig: AlgebraSignature, j: int, terms: Terms) -> Terms:
    if j == 0:
        return terms
    acc: Terms = {}
    slots = sig.derivative_slots
    for m, c in terms.items():
        beta = tuple(m.exps[s.index] for s in slots)
        alpha = list(m.exps)
        for s in slots:
            alpha[s.index] = 0
        for mn, cn in sig.t_normal_form(j, beta).items():
            exps = tuple(a + b for a, b in zip(alpha, mn.exps))
            _accumulate(acc, Monomial(exps, mn.t + m.t, m.pos), c * cn)
    return acc


class WeylElement:
    """
    Normal-ordered element of W^rank (or a scalar operator at position 0).

    Treated as immutable: arithmetic always builds new term dictionaries.
    """

    __slots__ = ("signature", "terms", "_hash")

    def __init__(self, signature: AlgebraSignature, terms: Terms):
        self.signature = signature
        self.terms = terms
        self._hash = None

    # -- predicates -----------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_scalar(self) -> bool:
        return all(m.pos == 0 for m in self.terms)

    def is_T_free(self) -> bool:
        return all(m.t == 0 for m in self.terms)

    def positions(self) -> List[int]:
        return sorted({m.pos for m in self.terms})

    def __len__(self) -> int:
        return len(self.terms)

    # -- comparison -----------------------------------------------------

    def _same(self, other: "WeylElement") -> AlgebraSignature:
        if self.signature is other.signature or self.signature == other.signature:
            return self.signature
        raise SignatureMismatchError(f"elements of different algebras: {self.signature} vs {other.signature}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeylElement):
            return NotImplemented
        return self.signature == other.signature and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- linear structure -----------------------------------------------

    def __neg__(self) -> "WeylElement":
        return WeylElement(self.signature, {m: -c for m, c in self.terms.items()})

    def __add__(self, other: "WeylElement") -> "WeylElement":
        if not isinstance(other, WeylElement):
            return NotImplemented
        sig = self._same(other)
        acc = dict(self.terms)
        for m, c in other.terms.items():
            _accumulate(acc, m, c)
        return WeylElement(sig, acc)

    def __sub__(self, other: "WeylElement") -> "WeylElement":
        if not isinstance(other, WeylElement):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "WeylElement":
        """Left multiplication by a coefficient"""
        c = self.signature.coefficient_field.convert(c)
        if not c:
            return self.signature.zero()
        acc: Terms = {}
        for m, v in self.terms.items():
            _accumulate(acc, m, c * v)
        return WeylElement(self.signature, acc)

    def __mul__(self, other) -> "WeylElement":
        if isinstance(other, WeylElement):
            return multiply(self, other)
        return NotImplemented

    def __rmul__(self, other) -> "WeylElement":
        return self.scale(other)

    def __pow__(self, n: int) -> "WeylElement":
        if not self.is_scalar():
            raise SignatureMismatchError("powers of module elements are undefined")
        result = self.signature.one()
        for _ in range(n):
            result = multiply(result, self)
        return result

    # -- structure ------------------------------------------------------

    def component(self, i: int) -> "WeylElement":
        """The scalar operator in position i"""
        return WeylElement(self.signature, {m._replace(pos=0): c for m, c in self.terms.items() if m.pos == i})

    def with_position(self, i: int) -> "WeylElement":
        if not self.is_scalar():
            raise SignatureMismatchError("only scalar operators can be placed in a position")
        self.signature._check_position(i)
        return WeylElement(self.signature, {m._replace(pos=i): c for m, c in self.terms.items()})

    def total_degree(self) -> int:
        if not self.terms:
            raise ZeroElementError("degree of the zero element is undefined")
        return max(sum(m.exps) for m in self.terms)

    def deg_T(self) -> int:
        if not self.signature.has_localization:
            raise SignatureMismatchError("deg_T needs an algebra with localization")
        if not self.terms:
            raise ZeroElementError("T-degree of the zero element is undefined")
        return max(m.t for m in self.terms)

    def map_terms(self, fn) -> "WeylElement":
        acc: Terms = {}
        for m, c in self.terms.items():
            nm, nc = fn(m, c)
            _accumulate(acc, nm, nc)
        return WeylElement(self.signature, acc)

    def to_expression(self) -> str:
        return format_element(self)

    def __str__(self) -> str:
        return format_element(self)

    def __repr__(self) -> str:
        return f"WeylElement({format_element(self)})"


def multiply(P: WeylElement, Q: WeylElement) -> WeylElement:
    """Normal-ordered product P*Q"""
    sig = P._same(Q)
    if not P.is_scalar() and not Q.is_scalar():
        raise SignatureMismatchError("the product of two module elements is undefined")
    if not P.terms or not Q.terms:
        return sig.zero()
    slots = sig.derivative_slots

    groups: Dict[Tuple[int, Tuple[int, ...]], List[Tuple[Monomial, object]]] = {}
    for m, c in P.terms.items():
        beta = tuple(m.exps[s.index] for s in slots)
        groups.setdefault((m.t, beta), []).append((m, c))

    acc: Terms = {}
    for (j, beta), items in groups.items():
        moved = _t_power_times(sig, j, Q.terms)
        for slot, b in zip(slots, beta):
            if b:
                moved = _apply_derivative(sig, slot, b, moved)
        for mp, cp in items:
            alpha = list(mp.exps)
            for s in slots:
                alpha[s.index] = 0
            for mq, cq in moved.items():
                exps = tuple(a + b for a, b in zip(alpha, mq.exps))
                _accumulate(acc, Monomial(exps, mq.t, max(mp.pos, mq.pos)), cp * cq)
    return WeylElement(sig, acc)


def total_degree(P: WeylElement) -> int:
    return P.total_degree()


def deg_T(P: WeylElement) -> int:
    return P.deg_T()


def left_multiply_by_T_power(P: WeylElement, i: int) -> WeylElement:
    """T^i * P, normal ordered"""
    sig = P.signature
    if not sig.has_localization:
        raise SignatureMismatchError("T is not part of this algebra")
    if i < 0:
        raise ValueError("T power must be non-negative")
    return WeylElement(sig, _t_power_times(sig, i, P.terms))


# -- convert between signatures ---------------------------------------------

def convert_element(P: WeylElement, target: AlgebraSignature) -> WeylElement:
    """
    Re-express P in another signature, matching variables by name.

    Polynomial variables may move into the coefficient field (rationalization);
    variables absent from the target must not occur.
    """
    src = P.signature
    if src is target or src == target:
        return P
    cf = target.coefficient_field
    place = []
    for name in src.monomial_vars:
        if name in target.monomial_vars:
            place.append(("mono", target.monomial_vars.index(name)))
        elif name in target.rational_vars:
            place.append(("coeff", name))
        else:
            place.append(("none", name))
    acc: Terms = {}
    for m, c in P.terms.items():
        exps = [0] * target.nvars
        coeff_exps = {}
        for e, (kind, where) in zip(m.exps, place):
            if not e:
                continue
            if kind == "mono":
                exps[where] = e
            elif kind == "coeff":
                coeff_exps[where] = e
            else:
                raise SignatureMismatchError(f"'{where}' does not exist in the target algebra")
        if m.t and not target.has_localization:
            raise SignatureMismatchError("T occurs but the target algebra has no localization")
        if m.pos > target.rank:
            raise SignatureMismatchError(f"position {m.pos} exceeds target rank {target.rank}")
        value = cf.convert(c)
        if coeff_exps:
            value = value * cf.monomial(coeff_exps)
        _accumulate(acc, Monomial(tuple(exps), m.t, m.pos), value)
    return WeylElement(target, acc)


# -- action on functions ----------------------------------------------------

FunctionLike = Union[RationalFunction, MultiPoly]


def _function_space(sig: AlgebraSignature, functions: Sequence[FunctionLike]) -> PolyRing:
    names = list(ring_variable_names(sig.function_ring))
    for g in functions:
        ring = g.ring
        for v in ring_variable_names(ring):
            if v not in names:
                names.append(v)
    if len(names) == len(sig.function_ring.symbols):
        return sig.function_ring
    return polynomial_ring(names, sig.field.domain())


def _as_rational(g: FunctionLike, ring: PolyRing) -> RationalFunction:
    if isinstance(g, RationalFunction):
        return g.embed(ring)
    if isinstance(g, PolyElement):
        return RationalFunction(embed_poly(g, ring), ring.one, reduced=True)
    raise TypeError(f"cannot act on {type(g).__name__}")


def _coefficient_in(sig: AlgebraSignature, c, ring: PolyRing) -> RationalFunction:
    if isinstance(c, RationalFunction):
        return c.embed(ring)
    return RationalFunction(ring.ground_new(c), ring.one, reduced=True)


def _apply(P: WeylElement, functions: List[RationalFunction], ring: PolyRing, derivative_step) -> List[RationalFunction]:
    sig = P.signature
    names = ring_variable_names(ring)
    zero = RationalFunction(ring.zero, ring.one, reduced=True)
    x_index = [names.index(v) for v in sig.poly_vars]
    f_inv = None
    if sig.has_localization:
        f_inv = RationalFunction(embed_poly(sig.loc_poly, ring), ring.one, reduced=True).inverse()

    def apply_term(m: Monomial, c, h: RationalFunction) -> RationalFunction:
        if m.t:
            h = h * f_inv ** m.t
        for slot in sig.derivative_slots:
            for _ in range(m.exps[slot.index]):
                h = derivative_step(h, slot.variable)
                if not h:
                    return h
        expv = [0] * len(names)
        for i, e in zip(x_index, m.exps):
            expv[i] = e
        if any(expv):
            h = h * ring.term_new(tuple(expv), ring.domain.one)
        return h * _coefficient_in(sig, c, ring)

    if P.is_scalar():
        results = []
        for h in functions:
            total = zero
            for m, c in P.terms.items():
                total = total + apply_term(m, c, h)
            results.append(total)
        return results

    if len(functions) == 1 and sig.rank > 1:
        raise SignatureMismatchError(f"module element of rank {sig.rank} needs {sig.rank} functions")
    results = [zero] * sig.rank
    for m, c in P.terms.items():
        results[m.pos - 1] = results[m.pos - 1] + apply_term(m, c, functions[m.pos - 1])
    return results


def _normalize_functions(sig: AlgebraSignature, g) -> Tuple[List[FunctionLike], bool]:
    if isinstance(g, (list, tuple)):
        return list(g), True
    return [g], False


def act_on_rational(P: WeylElement, g) -> List[RationalFunction]:
    """
    Apply P to a rational function (or a vector of them, one per position).

    x and t act by multiplication, D_v by differentiation and T by
    multiplication with 1/f. A scalar operator acts componentwise; a module
    element returns the vector of P_i(g_i), which annihilates g when the
    entries sum to zero.
    """
    functions, _ = _normalize_functions(P.signature, g)
    ring = _function_space(P.signature, functions)
    values = [_as_rational(h, ring) for h in functions]
    return _apply(P, values, ring, lambda h, v: h.diff(v))


def act_on_exponential(P: WeylElement, g: FunctionLike, h=None) -> List[RationalFunction]:
    """
    Apply P to h * exp(g) and return the cofactor of exp(g).

    Conjugation replaces D_v by D_v + dg/dv.
    """
    sig = P.signature
    hs, _ = _normalize_functions(sig, h if h is not None else sig.function_ring.one)
    ring = _function_space(sig, list(hs) + [g])
    exponent = _as_rational(g, ring)
    gradient = {v: exponent.diff(v) for v in sig.derivative_vars}
    values = [_as_rational(x, ring) for x in hs]
    return _apply(P, values, ring, lambda q, v: q.diff(v) + gradient[v] * q)


def annihilates(P: WeylElement, results: Sequence[RationalFunction]) -> bool:
    """Interpret the output of act_on_rational / act_on_exponential"""
    if P.is_scalar():
        return all(not r for r in results)
    total = results[0]
    for r in results[1:]:
        total = total + r
    return not total


# -- formatting -------------------------------------------------------------

def _display_key(m: Monomial):
    return (m.pos, -(sum(m.exps) + m.t), tuple(-e for e in m.exps), -m.t)


def _format_coefficient(sig: AlgebraSignature, c) -> Tuple[bool, str]:
    """Sign and absolute text of a coefficient"""
    if isinstance(c, RationalFunction):
        if c.is_polynomial() and len(c.numer) == 1:
            text = format_rational_function(c)
        else:
            lead = c.numer.LC
            if sig.field.domain().to_sympy(lead) < 0:
                return True, f"({format_rational_function(-c)})"
            return False, f"({format_rational_function(c)})"
    else:
        text = sig.coefficient_field.format(c)
    if text.startswith("-"):
        return True, text[1:]
    return False, text


def format_scalar(P: WeylElement) -> str:
    sig = P.signature
    if not P.terms:
        return "0"
    pieces = []
    for m in sorted(P.terms, key=_display_key):
        negative, ctext = _format_coefficient(sig, P.terms[m])
        factors = [f"{name}^{e}" if e > 1 else name for name, e in zip(sig.monomial_vars, m.exps) if e]
        if m.t:
            factors.append(f"{sig.loc_name}^{m.t}" if m.t > 1 else sig.loc_name)
        body = "*".join(factors)
        if not body:
            body = ctext
        elif ctext != "1":
            body = f"{ctext}*{body}"
        pieces.append((negative, body))
    out = ("-" if pieces[0][0] else "") + pieces[0][1]
    for negative, body in pieces[1:]:
        out += f" {'-' if negative else '+'} {body}"
    return out


def format_element(P: WeylElement) -> str:
    """Expression syntax of the problem files; vectors in brackets when rank > 1"""
    sig = P.signature
    if P.is_scalar():
        return format_scalar(P)
    if sig.rank == 1:
        return format_scalar(P.component(1))
    return "[" + ", ".join(format_scalar(P.component(i)) for i in range(1, sig.rank + 1)) + "]"


def place_scalars(gens: Iterable[WeylElement]) -> List[WeylElement]:
    """Scalar operators go to position 1 in rank-1 modules"""
    out = []
    for g in gens:
        if g.terms and g.is_scalar():
            if g.signature.rank != 1:
                raise SignatureMismatchError("scalar operators are only accepted for rank-1 modules")
            g = g.with_position(1)
        out.append(g)
    return out
