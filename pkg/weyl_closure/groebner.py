# weyl_closure/groebner.py
"""
Buchberger's algorithm for left submodules of free modules over the
algebras of ``weyl_closure.algebra``.

Multipliers are always T-free scalar monomials, so the T exponent of a
monomial behaves like part of its position: divisibility and critical pairs
require equal (T exponent, position).
"""
import heapq
import logging
import time
from bisect import insort
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Dict, List, Optional, Sequence, Tuple

from weyl_closure.algebra import (
    AlgebraSignature,
    Monomial,
    Terms,
    WeylElement,
    convert_element,
    multiply,
    place_scalars,
)
from weyl_closure.config import EngineBudget
from weyl_closure.domains import RationalFunction, poly_degree, poly_gcd
from weyl_closure.errors import BudgetExceededError, SignatureMismatchError
from weyl_closure.orders import OrderSpec, compile_order, default_order

logger = logging.getLogger(__name__)

CONTENT_STRIP_INTERVAL = 16


class _Desc:
    """Heap wrapper turning heapq into a max-heap on order keys"""
    __slots__ = ("key",)

    def __init__(self, key):
        self.key = key

    def __lt__(self, other: "_Desc") -> bool:
        return self.key > other.key

    def __eq__(self, other) -> bool:
        return self.key == other.key


@dataclass
class GroebnerBasis:
    """Reduced Gröbner basis with its order and provenance"""
    elements: List[WeylElement]
    order: OrderSpec
    signature: AlgebraSignature
    reduced: bool = True
    provenance: Dict[str, Any] = field(default_factory=dict)
    certificates: Optional[List[List[WeylElement]]] = None

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def leading_monomials(self) -> List[Monomial]:
        key = compile_order(self.order, self.signature)
        return [max(g.terms, key=key) for g in self.elements]

    def to_dict(self) -> Dict[str, Any]:
        """Convert to a JSON-friendly dictionary"""
        return {
            "size": len(self.elements),
            "order": self.order.syntax(),
            "layer": self.order.layer,
            "eliminate_T": self.order.eliminate_T,
            "reduced": self.reduced,
            "elements": [str(g) for g in self.elements],
            "provenance": dict(self.provenance),
        }


def _divides(a: Monomial, b: Monomial) -> bool:
    return a.t == b.t and a.pos == b.pos and all(x <= y for x, y in zip(a.exps, b.exps))


class GroebnerEngine:
    """
    Basis under construction plus the reduction machinery.

    Over K the basis is kept monic. Over K(t) elements are kept with
    polynomial, content-free coefficients and reductions are fraction free;
    results are made monic on the way out.
    """

    def __init__(self, signature: AlgebraSignature, order: OrderSpec,
                 budget: Optional[EngineBudget] = None, track_certificates: bool = False):
        self.signature = signature
        self.order = order
        self.key = compile_order(order, signature)
        self.budget = budget or EngineBudget()
        self.cf = signature.coefficient_field
        self.fraction_free = self.cf.fraction_free
        self.track = track_certificates
        self.elements: List[WeylElement] = []
        self.lms: List[Monomial] = []
        self.lcs: List[Any] = []
        self.certs: List[Optional[List[WeylElement]]] = []
        self._index: Dict[Tuple[int, int], List[Tuple[tuple, int]]] = {}
        self._exclude: Optional[int] = None
        self._start = time.monotonic()
        self._term_count = 0
        self.stats: Dict[str, Any] = {
            "inputs": 0,
            "pairs_processed": 0,
            "pairs_skipped_chain": 0,
            "zero_reductions": 0,
        }

    # -- helpers --------------------------------------------------------

    def _elapsed(self) -> float:
        return time.monotonic() - self._start

    def _snapshot(self) -> Dict[str, Any]:
        snap = dict(self.stats)
        snap["basis_size"] = len(self.elements)
        snap["elapsed"] = round(self._elapsed(), 6)
        return snap

    def _fail(self, message: str) -> BudgetExceededError:
        logger.warning(f"Gröbner basis budget exceeded: {message}")
        partial = [self._monic(WeylElement(self.signature, dict(g.terms)))
                   for g in self.elements if g.terms]
        return BudgetExceededError(message, partial=partial, stats=self._snapshot())

    def _check_time(self) -> None:
        if self._elapsed() > self.budget.timeout:
            raise self._fail(f"timeout of {self.budget.timeout}s reached")

    def _lead(self, terms: Terms) -> Tuple[Monomial, Any]:
        m = max(terms, key=self.key)
        return m, terms[m]

    def _find_reducer(self, m: Monomial) -> Optional[int]:
        """Index of the basis element with the smallest leading monomial dividing m"""
        for _, i in self._index.get((m.t, m.pos), ()):
            if i == self._exclude:
                continue
            if all(a <= b for a, b in zip(self.lms[i].exps, m.exps)):
                return i
        return None

    def _unit_monomial(self, exps: Tuple[int, ...]) -> WeylElement:
        return WeylElement(self.signature, {Monomial(exps, 0, 0): self.cf.one})

    def _multiple(self, i: int, exps: Tuple[int, ...]) -> Tuple[Terms, Optional[WeylElement]]:
        """Terms of x^a D^b * g_i, with the multiplier when it is not 1"""
        if not any(exps):
            return self.elements[i].terms, None
        q = self._unit_monomial(exps)
        return multiply(q, self.elements[i]).terms, q

    def _poly(self, c) -> RationalFunction:
        return c if isinstance(c, RationalFunction) else self.cf.convert(c)

    def _scale_terms(self, terms: Terms, c) -> Terms:
        return {m: c * v for m, v in terms.items()}

    def _scale_cert(self, cert: Optional[List[WeylElement]], c) -> Optional[List[WeylElement]]:
        if cert is None:
            return None
        return [x.scale(c) for x in cert]

    def _content(self, terms: Terms) -> Any:
        """Monic gcd of the (polynomial) coefficients, as a field element"""
        g = self.cf.content(c.numer for c in terms.values())
        return RationalFunction(g, g.ring.one, reduced=True)

    def _primitive(self, terms: Terms, cert) -> Tuple[Terms, Any]:
        """Clear denominators and strip content; returns the new terms and the factor applied"""
        d = self.cf.clear_denominators(terms.values())
        factor = RationalFunction(d, d.ring.one, reduced=True)
        if factor != self.cf.one:
            terms = self._scale_terms(terms, factor)
        content = self._content(terms)
        if content != self.cf.one:
            inverse = content.inverse()
            terms = {m: RationalFunction(v.numer.exquo(content.numer), v.ring.one, reduced=True)
                     for m, v in terms.items()}
            factor = factor * inverse
        return terms, factor

    def _monic(self, P: WeylElement) -> WeylElement:
        if not P.terms:
            return P
        _, lc = self._lead(P.terms)
        if lc == self.cf.one:
            return P
        return P.scale(self.cf.one / lc)

    # -- reduction ------------------------------------------------------

    def reduce(self, terms: Terms, cert: Optional[List[WeylElement]] = None,
               full: bool = True) -> Tuple[Terms, Any, Optional[List[WeylElement]]]:
        """
        Reduce against the current basis, largest monomial first.

        Returns (R, u, cert) with the true remainder equal to R/u. With
        ``full`` false only the leading term is reduced and the rest of the
        element is returned untouched once it becomes irreducible.
        """
        P = dict(terms)
        u = self.cf.one
        if self.fraction_free and P:
            P, u = self._primitive(P, cert)
            cert = self._scale_cert(cert, u)
        R: Terms = {}
        heap = [(_Desc(self.key(m)), m) for m in P]
        heapq.heapify(heap)
        steps = 0
        while heap:
            _, m = heapq.heappop(heap)
            c = P.get(m)
            if c is None:
                continue
            i = self._find_reducer(m)
            if i is None:
                if not full:
                    break
                R[m] = P.pop(m)
                continue
            a = self.lcs[i]
            if self.fraction_free:
                h = poly_gcd(a.numer, c.numer)
                a1 = RationalFunction(a.numer.exquo(h), h.ring.one, reduced=True)
                c1 = RationalFunction(c.numer.exquo(h), h.ring.one, reduced=True)
                if a1 != self.cf.one:
                    P = self._scale_terms(P, a1)
                    R = self._scale_terms(R, a1)
                    u = u * a1
                    cert = self._scale_cert(cert, a1)
            else:
                c1 = c if a == self.cf.one else c / a
            lm = self.lms[i]
            q_exps = tuple(b - e for b, e in zip(m.exps, lm.exps))
            q_terms, q = self._multiple(i, q_exps)
            for mt, ct in q_terms.items():
                old = P.get(mt)
                value = c1 * ct
                if old is None:
                    P[mt] = -value
                    heapq.heappush(heap, (_Desc(self.key(mt)), mt))
                else:
                    new = old - value
                    if new:
                        P[mt] = new
                    else:
                        del P[mt]
            if cert is not None and self.certs[i] is not None:
                cg = self.certs[i]
                cert = [x - (multiply(q, y) if q is not None else y).scale(c1) for x, y in zip(cert, cg)]
            steps += 1
            if self.fraction_free and steps % CONTENT_STRIP_INTERVAL == 0 and (P or R):
                both = dict(P)
                both.update(R)
                content = self._content(both)
                if content != self.cf.one:
                    logger.debug(f"stripping content of degree {poly_degree(content.numer)}")
                    strip = lambda v: RationalFunction(v.numer.exquo(content.numer), v.ring.one, reduced=True)
                    P = {k: strip(v) for k, v in P.items()}
                    R = {k: strip(v) for k, v in R.items()}
                    u = u / content
                    cert = self._scale_cert(cert, content.inverse())
            if steps % 64 == 0:
                self._check_time()
        if not full:
            R.update(P)
        return R, u, cert

    def remainder(self, P: WeylElement) -> WeylElement:
        """Full normal form of P in field arithmetic"""
        R, u, _ = self.reduce(P.terms, None, full=True)
        if u != self.cf.one:
            inverse = self.cf.one / u
            R = {m: c * inverse for m, c in R.items()}
        return WeylElement(self.signature, R)

    # -- basis maintenance ----------------------------------------------

    def add(self, terms: Terms, cert: Optional[List[WeylElement]] = None) -> int:
        """Normalize and append an element; returns its index"""
        if self.fraction_free:
            terms, factor = self._primitive(terms, cert)
            cert = self._scale_cert(cert, factor)
        else:
            _, lc = self._lead(terms)
            if lc != self.cf.one:
                inverse = self.cf.one / lc
                terms = self._scale_terms(terms, inverse)
                cert = self._scale_cert(cert, inverse)
        lm, lc = self._lead(terms)
        element = WeylElement(self.signature, terms)
        self._check_element(element)
        idx = len(self.elements)
        self.elements.append(element)
        self.lms.append(lm)
        self.lcs.append(lc)
        self.certs.append(cert)
        insort(self._index.setdefault((lm.t, lm.pos), []), (self.key(lm), idx))
        self._term_count += len(terms)
        return idx

    def _check_element(self, element: WeylElement) -> None:
        if self._term_count + len(element.terms) > self.budget.max_terms:
            raise self._fail(f"term budget of {self.budget.max_terms} exceeded")
        if self.budget.max_degree is not None and element.total_degree() > self.budget.max_degree:
            raise self._fail(f"element of degree {element.total_degree()} exceeds {self.budget.max_degree}")
        if self.budget.max_coeff_bits is not None:
            bits = max(self.cf.bits(c) for c in element.terms.values())
            if bits > self.budget.max_coeff_bits:
                raise self._fail(f"coefficient of {bits} bits exceeds {self.budget.max_coeff_bits}")

    def _spoly(self, i: int, j: int) -> Tuple[Terms, Optional[List[WeylElement]]]:
        lm_i, lm_j = self.lms[i], self.lms[j]
        lcm = tuple(max(a, b) for a, b in zip(lm_i.exps, lm_j.exps))
        ti, qi = self._multiple(i, tuple(l - e for l, e in zip(lcm, lm_i.exps)))
        tj, qj = self._multiple(j, tuple(l - e for l, e in zip(lcm, lm_j.exps)))
        if self.fraction_free:
            a, b = self.lcs[i], self.lcs[j]
            h = poly_gcd(a.numer, b.numer)
            ci = RationalFunction(b.numer.exquo(h), h.ring.one, reduced=True)
            cj = RationalFunction(a.numer.exquo(h), h.ring.one, reduced=True)
        else:
            ci = cj = self.cf.one
        acc = {m: ci * c for m, c in ti.items()}
        for m, c in tj.items():
            old = acc.get(m)
            new = -(cj * c) if old is None else old - cj * c
            if new:
                acc[m] = new
            elif old is not None:
                del acc[m]
        cert = None
        if self.track:
            left = [(multiply(qi, y) if qi is not None else y).scale(ci) for y in self.certs[i]]
            right = [(multiply(qj, y) if qj is not None else y).scale(cj) for y in self.certs[j]]
            cert = [x - y for x, y in zip(left, right)]
        return acc, cert

    # -- Buchberger -------------------------------------------------------

    def run(self, gens: Sequence[WeylElement]) -> GroebnerBasis:
        self._start = time.monotonic()
        inputs = [g for g in gens]
        self.stats["inputs"] = len(inputs)
        logger.info(f"Starting Gröbner basis: {len(inputs)} generators, order {self.order.syntax()}"
                    f" ({self.order.layer}{', T-elim' if self.order.eliminate_T else ''})")

        heap: List[Tuple[tuple, int, int, int]] = []
        pending = set()
        age = 0

        def add_with_pairs(terms: Terms, cert) -> None:
            nonlocal age
            idx = self.add(terms, cert)
            lm = self.lms[idx]
            for j in range(idx):
                other = self.lms[j]
                if other.t != lm.t or other.pos != lm.pos:
                    continue
                lcm = Monomial(tuple(max(a, b) for a, b in zip(other.exps, lm.exps)), lm.t, lm.pos)
                heapq.heappush(heap, (self.key(lcm), age, j, idx))
                pending.add((j, idx))
                age += 1

        identity = None
        for k, g in enumerate(inputs):
            if not g.terms:
                continue
            cert = None
            if self.track:
                identity = identity or self.signature.one()
                cert = [identity if n == k else self.signature.zero() for n in range(len(inputs))]
            R, _, cert = self.reduce(g.terms, cert, full=False)
            if R:
                add_with_pairs(R, cert)

        while heap:
            _, _, i, j = heapq.heappop(heap)
            pending.discard((i, j))
            if self._chain_criterion(i, j, pending):
                self.stats["pairs_skipped_chain"] += 1
                logger.debug(f"chain criterion skips pair ({i}, {j})")
                continue
            self.stats["pairs_processed"] += 1
            if self.stats["pairs_processed"] > self.budget.max_pairs:
                raise self._fail(f"pair budget of {self.budget.max_pairs} exceeded")
            self._check_time()
            S, cert = self._spoly(i, j)
            if not S:
                self.stats["zero_reductions"] += 1
                continue
            R, _, cert = self.reduce(S, cert, full=False)
            if R:
                add_with_pairs(R, cert)
            else:
                self.stats["zero_reductions"] += 1

        basis = self._finalize()
        logger.info(f"Gröbner basis done: {len(basis)} elements, {self.stats['pairs_processed']} pairs, "
                    f"{basis.provenance['elapsed']:.3f}s")
        return basis

    def _chain_criterion(self, i: int, j: int, pending: set) -> bool:
        lm_i, lm_j = self.lms[i], self.lms[j]
        lcm = tuple(max(a, b) for a, b in zip(lm_i.exps, lm_j.exps))
        for _, k in self._index.get((lm_i.t, lm_i.pos), ()):
            if k == i or k == j:
                continue
            if not all(a <= b for a, b in zip(self.lms[k].exps, lcm)):
                continue
            if (min(i, k), max(i, k)) in pending or (min(j, k), max(j, k)) in pending:
                continue
            return True
        return False

    def _finalize(self) -> GroebnerBasis:
        """Minimalize, tail-reduce and make monic"""
        order_idx = sorted(range(len(self.elements)), key=lambda i: (self.key(self.lms[i]), i))
        kept: List[int] = []
        for i in order_idx:
            if not any(_divides(self.lms[k], self.lms[i]) for k in kept):
                kept.append(i)
        kept_set = set(kept)
        self._index = {}
        for i in kept:
            insort(self._index.setdefault((self.lms[i].t, self.lms[i].pos), []), (self.key(self.lms[i]), i))
        for i in kept:
            self._exclude = i
            R, u, cert = self.reduce(self.elements[i].terms, self.certs[i], full=True)
            self._exclude = None
            if self.fraction_free:
                R, factor = self._primitive(R, cert)
                cert = self._scale_cert(cert, factor)
            self.elements[i] = WeylElement(self.signature, R)
            self.lcs[i] = R[self.lms[i]]
            self.certs[i] = cert
        elements, certs = [], []
        for i in kept:
            g = self.elements[i]
            lc = self.lcs[i]
            if lc != self.cf.one:
                inverse = self.cf.one / lc
                g = g.scale(inverse)
                if self.certs[i] is not None:
                    self.certs[i] = self._scale_cert(self.certs[i], inverse)
            elements.append(g)
            certs.append(self.certs[i])
        provenance = self._snapshot()
        provenance["dropped_redundant"] = len(self.elements) - len(kept_set)
        return GroebnerBasis(elements=elements, order=self.order, signature=self.signature, reduced=True,
                             provenance=provenance, certificates=certs if self.track else None)


# -- module-level operations ----------------------------------------------------

def _common_signature(elements: Sequence[WeylElement], signature: Optional[AlgebraSignature] = None) -> AlgebraSignature:
    sig = signature
    for g in elements:
        if sig is None:
            sig = g.signature
        elif g.signature is not sig and g.signature != sig:
            raise SignatureMismatchError("generators belong to different algebras")
    if sig is None:
        raise SignatureMismatchError("cannot infer the algebra of an empty generator list")
    return sig


def _prepare(elements: Sequence[WeylElement]) -> List[WeylElement]:
    if any(g.terms and g.is_scalar() for g in elements):
        return place_scalars(elements)
    return list(elements)


def normal_form(P: WeylElement, G: Sequence[WeylElement], order: OrderSpec,
                budget: Optional[EngineBudget] = None) -> WeylElement:
    """Remainder of P on division by G: P - R lies in the module of G and R is fully reduced"""
    sig = _common_signature([P] + list(G))
    engine = GroebnerEngine(sig, order, budget)
    for g in _prepare(G):
        if g.terms:
            engine.add(dict(g.terms))
    (P,) = _prepare([P])
    return engine.remainder(P)


def s_pair(g1: WeylElement, g2: WeylElement, order: OrderSpec) -> Optional[WeylElement]:
    """Critical pair of two elements, or None when their leading positions differ"""
    sig = _common_signature([g1, g2])
    g1, g2 = _prepare([g1, g2])
    engine = GroebnerEngine(sig, order)
    i = engine.add(dict(g1.terms))
    j = engine.add(dict(g2.terms))
    if engine.lms[i].pos != engine.lms[j].pos or engine.lms[i].t != engine.lms[j].t:
        return None
    S, _ = engine._spoly(i, j)
    return engine._monic(WeylElement(sig, S))


def buchberger(gens: Sequence[WeylElement], order: OrderSpec, budget: Optional[EngineBudget] = None,
               track_certificates: bool = False, signature: Optional[AlgebraSignature] = None) -> GroebnerBasis:
    """Reduced Gröbner basis of the left module generated by ``gens``"""
    sig = _common_signature(gens, signature)
    engine = GroebnerEngine(sig, order, budget, track_certificates)
    return engine.run(_prepare(gens))


def interreduce(G: Sequence[WeylElement], order: OrderSpec) -> List[WeylElement]:
    """Pairwise lm-non-divisible, tail-reduced, monic generators of the same module"""
    items = [g for g in _prepare(G) if g.terms]
    if not items:
        return []
    sig = _common_signature(items)
    key = compile_order(order, sig)
    monic = GroebnerEngine(sig, order)._monic
    items = list(dict.fromkeys(monic(g) for g in items))
    changed = True
    while changed:
        changed = False
        for i, g in enumerate(items):
            others = items[:i] + items[i + 1:]
            r = monic(normal_form(g, others, order)) if others else g
            if r != g:
                changed = True
                if r.terms and r not in others:
                    items[i] = r
                else:
                    del items[i]
                break
    return sorted(items, key=lambda g: key(max(g.terms, key=key)))


def module_membership(P: WeylElement, G: GroebnerBasis) -> bool:
    """True iff P reduces to zero modulo the basis"""
    if not P.terms:
        return True
    if not G.elements:
        return False
    return not normal_form(P, G.elements, G.order)


def replay_certificate(G: GroebnerBasis, gens: Sequence[WeylElement]) -> bool:
    """Recompute every basis element from its recorded cofactors"""
    if G.certificates is None:
        raise ValueError("basis was computed without certificates")
    gens = _prepare(gens)
    for element, cofactors in zip(G.elements, G.certificates):
        total = G.signature.zero()
        for c, g in zip(cofactors, gens):
            if c.terms and g.terms:
                total = total + multiply(c, g)
        if total != element:
            return False
    return True


def is_finite_rank(S_gens: Sequence[WeylElement], signature: AlgebraSignature,
                   budget: Optional[EngineBudget] = None) -> Tuple[bool, Optional[int]]:
    """
    Finite rank test over the fully rational algebra.

    Every base variable moves into the coefficient field; the module has
    finite rank when, in each position, each derivative has a pure power
    among the leading monomials. The rank is the size of the staircase.
    """
    rsig = signature.without_localization().rationalized()
    gens = [convert_element(g, rsig) for g in _prepare(list(S_gens)) if g.terms]
    if not gens:
        finite = not rsig.derivative_vars
        return (finite, rsig.rank if finite else None)
    gb = buchberger(gens, default_order(), budget, signature=rsig)
    lms = gb.leading_monomials()
    nd = rsig.nvars
    total = 0
    for pos in range(1, rsig.rank + 1):
        here = [m.exps for m in lms if m.pos == pos]
        if any(not any(e) for e in here):
            continue
        bounds = []
        for v in range(nd):
            powers = [e[v] for e in here if all(x == 0 for k, x in enumerate(e) if k != v) and e[v] > 0]
            if not powers:
                logger.info(f"position {pos}: no pure power of {rsig.monomial_vars[v]}, infinite rank")
                return False, None
            bounds.append(min(powers))
        for exps in product(*(range(b) for b in bounds)):
            if not any(all(a <= b for a, b in zip(e, exps)) for e in here):
                total += 1
    return True, total
