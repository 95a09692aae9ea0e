# weyl_closure/orders.py
"""
Monomial and module orders.

An order is described by a pydantic ``OrderSpec`` and compiled, per
signature, into a key function: the larger key is the larger monomial.
"""
import logging
from functools import lru_cache
from typing import Callable, Dict, List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, field_validator

from weyl_closure.algebra import AlgebraSignature, Monomial, WeylElement
from weyl_closure.errors import SignatureMismatchError, UnknownVariableError, ZeroElementError

logger = logging.getLogger(__name__)

MonomialKey = Callable[[Monomial], tuple]


class TermOrder(BaseModel):
    """Order on the exponent part of a monomial"""
    model_config = ConfigDict(frozen=True)

    kind: Literal["grevlex", "lex", "block", "weight"] = "grevlex"
    variables: Optional[Tuple[str, ...]] = None
    blocks: Tuple["TermOrder", ...] = ()
    weights: Tuple[int, ...] = ()
    tie_break: Optional["TermOrder"] = None

    @field_validator("weights")
    @classmethod
    def _non_negative(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(w < 0 for w in value):
            raise ValueError("weights must be non-negative")
        return value

    def covered(self, sig: AlgebraSignature) -> Tuple[str, ...]:
        """Variables this order compares, in its own order"""
        if self.kind == "block":
            out: Tuple[str, ...] = ()
            for b in self.blocks:
                out += b.covered(sig)
            return out
        return self.variables if self.variables is not None else sig.monomial_vars

    def syntax(self) -> str:
        if self.kind in ("grevlex", "lex"):
            if self.variables is None:
                return self.kind
            return f"{self.kind}({','.join(self.variables)})"
        if self.kind == "block":
            return f"block({','.join(b.syntax() for b in self.blocks)})"
        inner = ",".join(str(w) for w in self.weights)
        if self.tie_break is not None and self.tie_break != TermOrder():
            inner += f";{self.tie_break.syntax()}"
        return f"weight({inner})"


TermOrder.model_rebuild()


class OrderSpec(BaseModel):
    """Term order plus module layer and optional T elimination"""
    model_config = ConfigDict(frozen=True)

    term: TermOrder = TermOrder()
    layer: Literal["pot", "top"] = "pot"
    eliminate_T: bool = False

    def syntax(self) -> str:
        return self.term.syntax()


def _term_key(order: TermOrder, sig: AlgebraSignature) -> Callable[[Tuple[int, ...]], tuple]:
    names = sig.monomial_vars
    covered = order.covered(sig)
    unknown = [v for v in covered if v not in names]
    if unknown:
        raise UnknownVariableError(f"order mentions unknown variables {unknown}")
    idx = [names.index(v) for v in covered]

    if order.kind == "grevlex":
        ridx = list(reversed(idx))
        return lambda e: (sum(e[i] for i in idx), tuple(-e[i] for i in ridx))
    if order.kind == "lex":
        return lambda e: tuple(e[i] for i in idx)
    if order.kind == "block":
        subs = [_term_key(b, sig) for b in order.blocks]
        return lambda e: tuple(k(e) for k in subs)
    if len(order.weights) != len(idx):
        raise SignatureMismatchError(f"{len(order.weights)} weights given for {len(idx)} variables")
    tie = order.tie_break or TermOrder(kind="grevlex")
    if tie.variables is None:
        tie = tie.model_copy(update={"variables": tuple(covered)})
    if sorted(tie.covered(sig)) != sorted(covered):
        raise SignatureMismatchError("weight order tie-break must cover the same variables")
    tie_key = _term_key(tie, sig)
    pairs = [(i, w) for i, w in zip(idx, order.weights) if w]
    return lambda e: (sum(w * e[i] for i, w in pairs), tie_key(e))


@lru_cache(maxsize=256)
def compile_order(spec: OrderSpec, sig: AlgebraSignature) -> MonomialKey:
    """Key function for monomials of ``sig``; larger key means larger monomial"""
    covered = spec.term.covered(sig)
    if sorted(covered) != sorted(sig.monomial_vars) or len(set(covered)) != len(covered):
        raise SignatureMismatchError(
            f"order {spec.syntax()} must cover each of {sig.monomial_vars} exactly once, got {covered}")
    term = _term_key(spec.term, sig)
    cache: Dict[Monomial, tuple] = {}

    if spec.layer == "pot":
        def layered(m: Monomial) -> tuple:
            return (-m.pos, term(m.exps))
    else:
        def layered(m: Monomial) -> tuple:
            return (term(m.exps), -m.pos)

    if spec.eliminate_T:
        def full(m: Monomial) -> tuple:
            return (m.t,) + layered(m)
    else:
        def full(m: Monomial) -> tuple:
            return layered(m) + (m.t,)

    def key(m: Monomial) -> tuple:
        k = cache.get(m)
        if k is None:
            k = full(m)
            if len(cache) < 500000:
                cache[m] = k
        return k

    return key


def compare(spec: OrderSpec, a: Monomial, b: Monomial, sig: AlgebraSignature) -> int:
    """-1, 0 or 1 as a is less than, equal to or greater than b"""
    if len(a.exps) != sig.nvars or len(b.exps) != sig.nvars:
        raise SignatureMismatchError("monomials do not belong to this signature")
    key = compile_order(spec, sig)
    ka, kb = key(a), key(b)
    return (ka > kb) - (ka < kb)


def leading_monomial(P: WeylElement, spec: OrderSpec) -> Tuple[Monomial, object]:
    """The order-maximal term of P"""
    if not P.terms:
        raise ZeroElementError("the zero element has no leading monomial")
    key = compile_order(spec, P.signature)
    m = max(P.terms, key=key)
    return m, P.terms[m]


def sorted_terms(P: WeylElement, spec: OrderSpec) -> List[Tuple[Monomial, object]]:
    """Terms in decreasing order"""
    key = compile_order(spec, P.signature)
    return sorted(P.terms.items(), key=lambda item: key(item[0]), reverse=True)


# -- common orders ------------------------------------------------------------

def default_order(position: str = "pot") -> OrderSpec:
    return OrderSpec(term=TermOrder(kind="grevlex"), layer=position)


def closure_order(inner: Optional[OrderSpec] = None) -> OrderSpec:
    """T elimination on top of the inner order"""
    inner = inner or default_order()
    return inner.model_copy(update={"eliminate_T": True})


def weight_order(sig: AlgebraSignature, weights: Dict[str, int], layer: str = "top") -> OrderSpec:
    """Weight vector over the monomial variables with a grevlex tie-break"""
    w = tuple(weights.get(v, 0) for v in sig.monomial_vars)
    return OrderSpec(term=TermOrder(kind="weight", weights=w), layer=layer)


def symbol_weight_order(sig: AlgebraSignature) -> OrderSpec:
    """Weight 0 on x, 1 on every derivative"""
    return weight_order(sig, {sig.monomial_vars[s.index]: 1 for s in sig.derivative_slots})


def elimination_order(sig: AlgebraSignature, names: Sequence[str]) -> OrderSpec:
    """Any monomial involving ``names`` beats every monomial free of them"""
    return weight_order(sig, {v: 1 for v in names})


# -- syntax -------------------------------------------------------------------

class _OrderParser:

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> ValueError:
        return ValueError(f"order syntax '{self.text}', column {self.pos + 1}: {message}")

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise self.error(f"expected '{ch}'")
        self.pos += 1

    def name(self) -> str:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        if start == self.pos:
            raise self.error("expected a name")
        return self.text[start:self.pos]

    def integer(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise self.error("expected a non-negative integer weight")
        return int(self.text[start:self.pos])

    def order(self) -> TermOrder:
        kind = self.name()
        if kind in ("grevlex", "lex"):
            if self.peek() != "(":
                return TermOrder(kind=kind)
            self.expect("(")
            names = [self.name()]
            while self.peek() == ",":
                self.pos += 1
                names.append(self.name())
            self.expect(")")
            return TermOrder(kind=kind, variables=tuple(names))
        if kind == "block":
            self.expect("(")
            blocks = [self.order()]
            while self.peek() == ",":
                self.pos += 1
                blocks.append(self.order())
            self.expect(")")
            return TermOrder(kind="block", blocks=tuple(blocks))
        if kind == "weight":
            self.expect("(")
            weights = [self.integer()]
            while self.peek() == ",":
                self.pos += 1
                weights.append(self.integer())
            tie = None
            if self.peek() == ";":
                self.pos += 1
                tie = self.order()
            self.expect(")")
            return TermOrder(kind="weight", weights=tuple(weights), tie_break=tie)
        raise self.error(f"unknown order '{kind}'")

    def parse(self) -> TermOrder:
        result = self.order()
        if self.peek():
            raise self.error("trailing characters")
        return result


def parse_order(text: str, position: str = "pot") -> OrderSpec:
    """Parse ``grevlex``, ``lex(x,y)``, ``block(lex(x),lex(Dx))``, ``weight(0,1;grevlex)``"""
    return OrderSpec(term=_OrderParser(text).parse(), layer=position)
