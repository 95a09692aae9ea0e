# weyl_closure/closure.py
"""
Partial Weyl closure by truncated Rabinowitsch saturation.

The input module S is extended by T standing for 1/f, where f vanishes on
the singular locus of S. For s = 0, 1, 2, ... the W-span of every T^i * h
(h an input generator or (fT - 1) e_j) of T-degree at most s is put
through Buchberger under a T-eliminating order; the T-free part of the
basis generates a module squeezed between S and S : (f)^inf. The loop
stops when that module is holonomic (or per one of the variant criteria).
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel

from weyl_closure.algebra import (
    AlgebraSignature,
    WeylElement,
    convert_element,
    left_multiply_by_T_power,
    multiply,
    place_scalars,
)
from weyl_closure.config import ClosureConfig
from weyl_closure.domains import MultiPoly, RationalFunction, embed_poly, format_poly
from weyl_closure.errors import (
    BudgetExceededError,
    CertificationError,
    NotFiniteRankError,
    SignatureMismatchError,
    TruncationCapError,
    WeylClosureError,
    ZeroElementError,
)
from weyl_closure.groebner import GroebnerBasis, buchberger, is_finite_rank, module_membership, normal_form
from weyl_closure.holonomy import is_holonomic
from weyl_closure.orders import OrderSpec, closure_order, compile_order, default_order, parse_order
from weyl_closure.symbol import pick_loc_poly, singular_locus

logger = logging.getLogger(__name__)

LocInput = Union[None, str, MultiPoly, RationalFunction]


class IterationRecord(BaseModel):
    """One pass of the closure loop"""
    s: int
    generators_fed: int
    gb_size: int
    intersected_size: int
    holonomic: bool
    witness: Optional[str] = None
    stable: bool = False
    monotone: Optional[bool] = None
    pairs_processed: int = 0
    wall_time: float = 0.0


@dataclass
class ClosureResult:
    """T-free generators of the partial closure plus how they were obtained"""
    generators: List[WeylElement]
    trace: List[IterationRecord]
    fired_criterion: Optional[str]
    status: str
    loc_poly: MultiPoly
    loc_source: str
    signature: AlgebraSignature
    order: OrderSpec
    certificates: List[int] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def basis(self) -> GroebnerBasis:
        return GroebnerBasis(elements=list(self.generators), order=self.order, signature=self.signature)

    @property
    def final_s(self) -> Optional[int]:
        return self.trace[-1].s if self.trace else None

    def to_dict(self) -> Dict[str, Any]:
        """Convert to a JSON-friendly dictionary"""
        return {
            "status": self.status,
            "fired_criterion": self.fired_criterion,
            "loc_poly": format_poly(self.loc_poly),
            "loc_source": self.loc_source,
            "order": self.order.syntax(),
            "layer": self.order.layer,
            "generators": [str(g) for g in self.generators],
            "size": len(self.generators),
            "certificates": list(self.certificates),
            "trace": [record.model_dump() for record in self.trace],
            "elapsed_time": round(self.elapsed, 6),
        }


def _loc_element(sigT: AlgebraSignature) -> WeylElement:
    """f*T - 1 as a scalar operator"""
    F = sigT.from_function_poly(sigT.loc_poly)
    return multiply(F, sigT.generator(sigT.loc_name)) - sigT.one()


def extend_generators(S_gens: Sequence[WeylElement], f: MultiPoly, s: int,
                      signature: Optional[AlgebraSignature] = None,
                      debug: bool = False) -> List[WeylElement]:
    """
    Every normal-ordered T^i * h of T-degree at most s, for h in
    S_gens and the (fT - 1) e_j.

    ``signature`` is the localized algebra; when omitted it is built from
    the generators' signature with a fresh T.
    """
    if s < 0:
        raise ValueError("truncation degree must be non-negative")
    gens = place_scalars([g for g in S_gens if g.terms])
    if signature is None:
        if not gens:
            raise ZeroElementError("cannot infer the algebra of an empty generator list")
        base = gens[0].signature
        signature = base.with_localization(f, base.fresh_name("T"))
    sigT = signature
    if any(not g.is_T_free() for g in gens):
        raise SignatureMismatchError("input generators must be T-free")

    H = [convert_element(g, sigT) for g in gens]
    loc = _loc_element(sigT)
    H += [loc.with_position(j) for j in range(1, sigT.rank + 1)]

    out: List[WeylElement] = []
    for h in H:
        i = 0
        while True:
            Th = left_multiply_by_T_power(h, i)
            if Th.deg_T() > s:
                break
            out.append(Th)
            i += 1
        if debug:
            for extra in (i + 1, i + 2):
                d = left_multiply_by_T_power(h, extra).deg_T()
                if d <= s:
                    logger.warning(f"deg_T dipped to {d} at T^{extra} after exceeding {s} at T^{i}")
    logger.debug(f"extended generators at s = {s}: {len(out)}")
    return out


def _check_elimination(G: GroebnerBasis) -> None:
    key = compile_order(G.order, G.signature)
    for g in G.elements:
        lm = max(g.terms, key=key)
        if lm.t == 0 and not g.is_T_free():
            raise WeylClosureError(f"elimination order left T in an element with T-free leading monomial: {g}")


def _resolve_loc_poly(gens: List[WeylElement], sig: AlgebraSignature, f: LocInput,
                      config: ClosureConfig) -> Tuple[MultiPoly, str]:
    if f is None or (isinstance(f, str) and f == "auto"):
        locus = singular_locus(gens, config.budget)
        chosen = pick_loc_poly(locus)
        logger.info(f"singular locus generated by {[format_poly(p) for p in locus]}; f = {format_poly(chosen)}")
        return embed_poly(chosen, sig.function_ring), "auto"
    if isinstance(f, str):
        raise ValueError(f"localization polynomial must be 'auto' or a polynomial, got '{f}'")
    if isinstance(f, RationalFunction):
        if not f.is_polynomial():
            raise ValueError("localization polynomial must be a polynomial")
        f = f.numer
    f = embed_poly(f, sig.function_ring)
    if not f:
        raise ZeroElementError("localization polynomial must be nonzero")
    return f, "user"


def _inner_order(config: ClosureConfig) -> OrderSpec:
    if config.order:
        return parse_order(config.order, config.position)
    return default_order(config.position)


def _criterion_label(config: ClosureConfig) -> str:
    if config.criterion == "holonomic-plus-extra":
        return f"holonomic-plus-extra({config.extra})"
    return config.criterion


def certify(S_gens: Sequence[WeylElement], closure_gens: Sequence[WeylElement], f: MultiPoly,
            order: OrderSpec, config: Optional[ClosureConfig] = None, jobs: int = 1) -> List[int]:
    """
    Check S ⊆ <G'> ⊆ S : (f)^inf.

    Returns, per generator of G', the least k with f^k g in S. Any failure
    raises CertificationError listing every offending element.
    """
    config = config or ClosureConfig()
    gens = place_scalars([g for g in S_gens if g.terms])
    closure_gens = place_scalars([g for g in closure_gens if g.terms])
    sig = gens[0].signature
    failures: List[str] = []

    G_closure = buchberger(closure_gens, order, config.budget, signature=sig)
    for g in gens:
        if not module_membership(g, G_closure):
            failures.append(f"input {g} is not in the closure module")

    G_input = buchberger(gens, order, config.budget, signature=sig)
    F = sig.from_function_poly(f)

    def exponent(g: WeylElement) -> Optional[int]:
        P = g
        for k in range(config.k_max + 1):
            if not normal_form(P, G_input.elements, order, config.budget):
                return k
            P = multiply(F, P)
        return None

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            ks = list(pool.map(exponent, closure_gens))
    else:
        ks = [exponent(g) for g in closure_gens]
    for g, k in zip(closure_gens, ks):
        if k is None:
            failures.append(f"f^k * ({g}) not in S for any k <= {config.k_max}")

    if failures:
        logger.error(f"certification failed for {len(failures)} element(s)")
        raise CertificationError(f"could not certify {len(failures)} inclusion(s): {failures[0]}", failures)
    logger.info(f"certified {len(closure_gens)} generators, exponents {ks}")
    return ks


def partial_weyl_closure(S_gens: Sequence[WeylElement], f: LocInput = None,
                         config: Optional[ClosureConfig] = None, jobs: int = 1) -> ClosureResult:
    """
    Generators of a module between S and cl_x(S) whose quotient is holonomic.

    ``f`` is a polynomial of K[t, x] vanishing on the singular locus, or
    None/"auto" to compute one from the symbol geometry.
    """
    config = config or ClosureConfig()
    start = time.monotonic()
    gens = place_scalars([g for g in S_gens if g.terms])
    if not gens:
        raise ZeroElementError("the closure of the zero module is not of finite rank")
    sig = gens[0].signature
    if sig.has_localization:
        raise SignatureMismatchError("input must live in an algebra without localization")
    gens = [convert_element(g, sig) for g in gens]

    if config.verify_input:
        finite, rank = is_finite_rank(gens, sig, config.budget)
        if not finite:
            raise NotFiniteRankError("input module is not of finite rank")
        logger.info(f"input has finite rank {rank}")

    f, source = _resolve_loc_poly(gens, sig, f, config)
    inner = _inner_order(config)
    Torder = closure_order(inner)
    sigT = sig.with_localization(f, sig.fresh_name("T"))
    label = _criterion_label(config)
    logger.info(f"Starting partial closure: {len(gens)} generators, f = {format_poly(f)} ({source}), "
                f"criterion {label}")

    trace: List[IterationRecord] = []
    previous: Optional[GroebnerBasis] = None
    previous_free: Optional[List[WeylElement]] = None
    first_holonomic: Optional[int] = None

    def result(status: str, generators: List[WeylElement], fired: Optional[str]) -> ClosureResult:
        return ClosureResult(generators=generators, trace=list(trace), fired_criterion=fired, status=status,
                             loc_poly=f, loc_source=source, signature=sig, order=inner,
                             elapsed=time.monotonic() - start)

    for s in range(config.max_T_degree + 1):
        t0 = time.monotonic()
        feed = extend_generators(gens, f, s, sigT, config.debug_monotonicity)
        if config.seed_previous and previous is not None:
            feed += previous.elements
        try:
            G = buchberger(feed, Torder, config.budget, signature=sigT)
        except BudgetExceededError as e:
            e.result = result("budget-exceeded", previous_free or [], None)
            raise
        _check_elimination(G)

        free = [convert_element(g, sig) for g in G.elements if g.is_T_free()]
        G_free = GroebnerBasis(elements=free, order=inner, signature=sig, provenance=dict(G.provenance))
        holonomic, witness = is_holonomic(G_free)
        stable = previous_free is not None and set(free) == set(previous_free)
        monotone = None
        if previous_free is not None:
            monotone = all(module_membership(g, G_free) for g in previous_free)
            if not monotone:
                logger.warning(f"closure module shrank between s = {s - 1} and s = {s}")

        trace.append(IterationRecord(
            s=s, generators_fed=len(feed), gb_size=len(G), intersected_size=len(free), holonomic=holonomic,
            witness=str(witness) if witness else None, stable=stable, monotone=monotone,
            pairs_processed=G.provenance.get("pairs_processed", 0), wall_time=round(time.monotonic() - t0, 6)))
        logger.info(f"s = {s}: fed {len(feed)}, basis {len(G)}, T-free {len(free)}, "
                    f"{'holonomic' if holonomic else 'not holonomic'}")

        if holonomic and first_holonomic is None:
            first_holonomic = s
            if s == 0:
                logger.info("input is already holonomic")

        fired = False
        if config.criterion == "holonomic":
            fired = holonomic
        elif config.criterion == "stable-and-holonomic":
            fired = holonomic and stable
        elif first_holonomic is not None:
            fired = s - first_holonomic >= config.extra

        previous, previous_free = G, free
        if fired:
            out = result("completed", free, label)
            out.certificates = certify(gens, free, f, inner, config, jobs)
            out.elapsed = time.monotonic() - start
            logger.info(f"Partial closure done at s = {s}: {len(free)} generators, {out.elapsed:.3f}s")
            return out

    partial = result("truncation-cap-hit", previous_free or [], None)
    raise TruncationCapError(f"criterion {label} did not fire up to T-degree {config.max_T_degree}", partial)


def saturation_approx(S_gens: Sequence[WeylElement], f: Union[MultiPoly, RationalFunction],
                      config: Optional[ClosureConfig] = None, jobs: int = 1) -> ClosureResult:
    """S : (f)^inf approximated by the closure loop with a given f"""
    if f is None or isinstance(f, str):
        raise ValueError("saturation needs an explicit polynomial f")
    return partial_weyl_closure(S_gens, f, config, jobs)
