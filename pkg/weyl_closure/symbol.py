# weyl_closure/symbol.py
"""
Principal symbols, the initial module and the singular locus.

The symbol ring is K(t)[x, xi, zeta]: derivatives D_v become commuting
variables ``xi_v`` (polynomial v) or ``zeta_t`` (rational t). Its monomial
variables are laid out exactly like those of the Weyl algebra, so an
initial form keeps its exponent vectors.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from functools import reduce
from typing import List, Optional, Sequence, Union

from sympy.polys.rings import PolyRing

from weyl_closure.algebra import AlgebraSignature, Monomial, WeylElement, convert_element, place_scalars
from weyl_closure.config import EngineBudget
from weyl_closure.domains import MultiPoly, RationalFunction, embed_poly, poly_degree, ring_variable_names
from weyl_closure.errors import NotFiniteRankError, SignatureMismatchError, ZeroElementError
from weyl_closure.groebner import buchberger
from weyl_closure.orders import elimination_order, symbol_weight_order

logger = logging.getLogger(__name__)


def symbol_name(sig: AlgebraSignature, variable: str) -> str:
    return f"xi_{variable}" if variable in sig.poly_vars else f"zeta_{variable}"


def symbol_signature(sig: AlgebraSignature) -> AlgebraSignature:
    """Commutative signature housing the initial forms of ``sig``"""
    symbols = tuple(symbol_name(sig, s.variable) for s in sig.derivative_slots)
    return AlgebraSignature(poly_vars=sig.poly_vars + symbols, rational_vars=sig.rational_vars,
                            derivative_vars=(), rank=sig.rank, field=sig.field)


def symbol_variables(sig: AlgebraSignature) -> List[str]:
    return [symbol_name(sig, s.variable) for s in sig.derivative_slots]


def _derivative_degree(sig: AlgebraSignature, m: Monomial) -> int:
    return sum(m.exps[s.index] for s in sig.derivative_slots)


def initial_form(P: WeylElement) -> WeylElement:
    """Top derivative-degree part of P with D's renamed to xi/zeta"""
    sig = P.signature
    if not P.terms:
        raise ZeroElementError("the zero element has no initial form")
    if not P.is_T_free():
        raise SignatureMismatchError("initial forms are taken of T-free elements")
    top = max(_derivative_degree(sig, m) for m in P.terms)
    ssig = symbol_signature(sig.without_localization())
    return WeylElement(ssig, {m: c for m, c in P.terms.items() if _derivative_degree(sig, m) == top})


def initial_module(S_gens: Sequence[WeylElement], budget: Optional[EngineBudget] = None) -> List[WeylElement]:
    """Initial forms of a Gröbner basis under the (0,1) weight order"""
    gens = [g for g in S_gens if g.terms]
    if not gens:
        return []
    sig = gens[0].signature.without_localization()
    gens = [convert_element(g, sig) for g in gens]
    gb = buchberger(gens, symbol_weight_order(sig), budget)
    logger.info(f"initial module from {len(gb)} basis elements")
    return [initial_form(g) for g in gb]


def _as_element(sig: AlgebraSignature, g: Union[WeylElement, MultiPoly, RationalFunction, str]) -> WeylElement:
    if isinstance(g, WeylElement):
        return convert_element(g, sig)
    if isinstance(g, str):
        return sig.generator(g)
    return sig.from_function_poly(g)


def _eliminate(sig: AlgebraSignature, gens: List[WeylElement], names: Sequence[str],
               budget: Optional[EngineBudget]) -> List[WeylElement]:
    """Basis elements free of ``names`` after an elimination-order Gröbner basis"""
    if not gens:
        return []
    gb = buchberger(gens, elimination_order(sig, names), budget, signature=sig)
    idx = [sig.monomial_vars.index(v) for v in names]
    return [g for g in gb if all(m.exps[i] == 0 for m in g.terms for i in idx)]


def saturate_commutative(A_gens: Sequence[WeylElement], g, budget: Optional[EngineBudget] = None,
                         signature: Optional[AlgebraSignature] = None) -> List[WeylElement]:
    """
    Generators of A : (g)^inf in a commutative signature.

    Adjoins u, adds (u g - 1) e_j for every position and keeps the u-free
    part of a u-elimination basis.
    """
    sig = signature or (A_gens[0].signature if A_gens else None)
    if sig is None:
        raise SignatureMismatchError("cannot infer the ring of an empty module")
    if not sig.is_commutative:
        raise SignatureMismatchError("saturation here is for commutative signatures")
    u = sig.fresh_name("u")
    esig = sig.with_poly_vars([u])
    gens = [convert_element(a, esig) for a in _positioned(sig, A_gens) if a.terms]
    rabinowitsch = esig.generator(u) * convert_element(_as_element(sig, g), esig) - esig.one()
    for j in range(1, sig.rank + 1):
        gens.append(rabinowitsch.with_position(j))
    kept = _eliminate(esig, gens, [u], budget)
    return [convert_element(h, sig) for h in kept]


def module_intersection(A_gens: Sequence[WeylElement], B_gens: Sequence[WeylElement],
                        budget: Optional[EngineBudget] = None,
                        signature: Optional[AlgebraSignature] = None) -> List[WeylElement]:
    """Generators of A ∩ B from u A + (1 - u) B, eliminating u"""
    pool = [g for g in list(A_gens) + list(B_gens)]
    sig = signature or (pool[0].signature if pool else None)
    if sig is None:
        raise SignatureMismatchError("cannot infer the ring of empty modules")
    A = [a for a in _positioned(sig, A_gens) if a.terms]
    B = [b for b in _positioned(sig, B_gens) if b.terms]
    if not A or not B:
        return []
    u = sig.fresh_name("u")
    esig = sig.with_poly_vars([u])
    U = esig.generator(u)
    V = esig.one() - U
    gens = [U * convert_element(a, esig) for a in A] + [V * convert_element(b, esig) for b in B]
    kept = _eliminate(esig, gens, [u], budget)
    return [convert_element(h, sig) for h in kept]


def _positioned(sig: AlgebraSignature, gens: Sequence[WeylElement]) -> List[WeylElement]:
    if sig.rank == 1:
        return place_scalars([g for g in gens if g.terms])
    return list(gens)


def _quotient_by_unit(sig: AlgebraSignature, N: List[WeylElement], i: int,
                      budget: Optional[EngineBudget]) -> List[WeylElement]:
    """The ideal N : e_i, read off N ∩ <e_i> and written in rank 1"""
    line = module_intersection(N, [sig.unit(i)], budget, signature=sig)
    rank_one = sig.with_rank(1)
    out = []
    for h in line:
        out.append(WeylElement(rank_one, {m._replace(pos=1): c for m, c in h.terms.items() if m.pos == i}))
    return [h for h in out if h.terms]


def _to_function_poly(sig: AlgebraSignature, h: WeylElement, ring: PolyRing) -> MultiPoly:
    """An x-only element of the symbol ring as a monic polynomial of K[t, x], denominators cleared"""
    cf = sig.coefficient_field
    names = ring_variable_names(ring)
    if cf.fraction_free:
        d = RationalFunction(cf.clear_denominators(h.terms.values()), cf.ring.one, reduced=True)
    out = ring.zero
    for m, c in h.terms.items():
        expv = [0] * len(names)
        for v, e in zip(sig.monomial_vars, m.exps):
            if e:
                expv[names.index(v)] = e
        mono = ring.term_new(tuple(expv), ring.domain.one)
        if cf.fraction_free:
            out = out + embed_poly((c * d).numer, ring) * mono
        else:
            out = out + mono.mul_ground(c)
    return out.monic()


def singular_locus(S_gens: Sequence[WeylElement], budget: Optional[EngineBudget] = None,
                   jobs: int = 1) -> List[MultiPoly]:
    """
    Generators of (ini(S) : <xi, zeta>^inf) ∩ K(t)[x], as polynomials of
    K[t, x] with denominators cleared.

    The unit ideal comes back as [1], the zero ideal as [].
    """
    gens = [g for g in S_gens if g.terms]
    if not gens:
        raise ZeroElementError("the singular locus of the zero module is the whole space")
    sig = gens[0].signature.without_localization()
    ssig = symbol_signature(sig)
    one = sig.function_ring.one
    symbols = symbol_variables(sig)
    if not symbols:
        return [one]

    N = initial_module([convert_element(g, sig) for g in gens], budget)
    N = _positioned(ssig, N)

    def saturate(var: str) -> List[WeylElement]:
        return saturate_commutative(N, var, budget, signature=ssig)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            saturated = list(pool.map(saturate, symbols))
    else:
        saturated = [saturate(v) for v in symbols]
    logger.info(f"saturated initial module by {len(symbols)} symbol variables")
    M = reduce(lambda a, b: module_intersection(a, b, budget, signature=ssig), saturated)

    if ssig.rank > 1:
        ideals = [_quotient_by_unit(ssig, M, i, budget) for i in range(1, ssig.rank + 1)]
        rank_one = ssig.with_rank(1)
        J = reduce(lambda a, b: module_intersection(a, b, budget, signature=rank_one), ideals)
        ring_sig = rank_one
    else:
        J = M
        ring_sig = ssig

    eliminated = _eliminate(ring_sig, _positioned(ring_sig, J), symbols, budget) if J else []
    if not eliminated:
        logger.info("singular locus: zero ideal")
        return []
    polys = [_to_function_poly(ring_sig, h, sig.function_ring) for h in eliminated]
    if any(p.is_ground for p in polys):
        return [one]
    return sorted(set(polys), key=lambda p: (poly_degree(p), str(p.as_expr())))


def pick_loc_poly(sing_gens: Sequence[MultiPoly]) -> MultiPoly:
    """A single polynomial vanishing on the singular locus: the product of the generators"""
    if not sing_gens:
        raise NotFiniteRankError("the singular locus is the whole space; input is not of finite rank")
    ring = sing_gens[0].ring
    if any(p.is_ground for p in sing_gens):
        return ring.one
    f = ring.one
    for p in sing_gens:
        f = f * p
    return f.monic()
