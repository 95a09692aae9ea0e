# weyl_closure/annihilators.py
"""Annihilating operators of 1/q and exp(g) for the benchmark families."""
import logging
from typing import List, Union

from weyl_closure.algebra import DERIVATIVE_PREFIX, AlgebraSignature, WeylElement, multiply
from weyl_closure.domains import MultiPoly, RationalFunction, embed_poly, partial_derivative
from weyl_closure.errors import ZeroElementError

logger = logging.getLogger(__name__)


def _polynomial(signature: AlgebraSignature, q: Union[MultiPoly, RationalFunction]) -> MultiPoly:
    if isinstance(q, RationalFunction):
        if not q.is_polynomial():
            raise ValueError(f"{q} is not a polynomial")
        q = q.numer
    return embed_poly(q, signature.function_ring)


def annihilator_of_rational(q: Union[MultiPoly, RationalFunction], signature: AlgebraSignature) -> List[WeylElement]:
    """q*D_v + dq/dv for every derivative of the signature, in position 1"""
    q = _polynomial(signature, q)
    if not q:
        raise ZeroElementError("1/q needs a nonzero q")
    Q = signature.from_function_poly(q)
    out = []
    for v in signature.derivative_vars:
        op = multiply(Q, signature.generator(DERIVATIVE_PREFIX + v)) + signature.from_function_poly(partial_derivative(q, v))
        out.append(op.with_position(1))
    logger.debug(f"annihilator of 1/({q.as_expr()}): {len(out)} operators")
    return out


def annihilator_of_exp(g: Union[MultiPoly, RationalFunction], signature: AlgebraSignature) -> List[WeylElement]:
    """D_v - dg/dv for every derivative of the signature, in position 1"""
    g = _polynomial(signature, g)
    out = []
    for v in signature.derivative_vars:
        op = signature.generator(DERIVATIVE_PREFIX + v) - signature.from_function_poly(partial_derivative(g, v))
        out.append(op.with_position(1))
    return out
