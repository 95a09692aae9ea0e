# weyl_closure/holonomy.py
"""Leading-monomial holonomicity test."""
import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from weyl_closure.config import EngineBudget
from weyl_closure.errors import NotReducedError, SignatureMismatchError
from weyl_closure.groebner import GroebnerBasis, buchberger
from weyl_closure.orders import OrderSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HolonomyWitness:
    """A variable subset A and a position i with no leading monomial in K<A>e_i"""
    subset: Tuple[str, ...]
    position: int

    def to_dict(self) -> Dict:
        return {"subset": list(self.subset), "position": self.position}

    def __str__(self) -> str:
        return f"A = {{{', '.join(self.subset)}}}, position {self.position}"


def is_holonomic(G: GroebnerBasis) -> Tuple[bool, Optional[HolonomyWitness]]:
    """
    For every subset A of the monomial variables with |A| = n + 1 (n the
    number of polynomial variables) and every position i, some element of G
    must have its leading monomial supported on A, in position i.

    Subsets are scanned in lexicographic order; the first failure is the
    witness. The zero module is never holonomic.
    """
    if not G.reduced:
        raise NotReducedError("holonomicity is read off a reduced Gröbner basis")
    sig = G.signature
    names = sig.monomial_vars
    size = len(sig.poly_vars) + 1
    lms = G.leading_monomials()
    if any(m.t for m in lms):
        raise SignatureMismatchError("holonomicity test needs a T-free basis")

    subsets = combinations(range(len(names)), size) if size <= len(names) else None
    if not G.elements:
        first = next(subsets, ()) if subsets is not None else ()
        return False, HolonomyWitness(tuple(names[i] for i in first), 1)
    if subsets is None:
        return True, None

    supports: Dict[int, List[int]] = {pos: [] for pos in range(1, sig.rank + 1)}
    for m in lms:
        mask = 0
        for i, e in enumerate(m.exps):
            if e:
                mask |= 1 << i
        supports.setdefault(m.pos, []).append(mask)

    for subset in subsets:
        allowed = 0
        for i in subset:
            allowed |= 1 << i
        for pos in range(1, sig.rank + 1):
            if not any(s & ~allowed == 0 for s in supports[pos]):
                witness = HolonomyWitness(tuple(names[i] for i in subset), pos)
                logger.debug(f"not holonomic: {witness}")
                return False, witness
    return True, None


def holonomic_under_orders(gens: Sequence, orders: Sequence[OrderSpec],
                           budget: Optional[EngineBudget] = None) -> Dict[str, bool]:
    """Verdict per order; disagreements are logged, not raised"""
    verdicts = {}
    for order in orders:
        gb = buchberger(gens, order, budget)
        verdicts[f"{order.syntax()}/{order.layer}"] = is_holonomic(gb)[0]
    if len(set(verdicts.values())) > 1:
        logger.warning(f"holonomicity verdict depends on the order: {verdicts}")
    return verdicts
