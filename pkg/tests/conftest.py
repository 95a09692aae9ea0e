# tests/conftest.py
import os

import numpy as np
import pytest

from weyl_closure.algebra import AlgebraSignature, Monomial
from weyl_closure.annihilators import annihilator_of_rational
from weyl_closure.parser import parse_expression

PROBLEMS_DIR = os.path.join(os.path.dirname(__file__), "..", "problems")


@pytest.fixture
def problem_path():
    def path(name: str) -> str:
        return os.path.join(PROBLEMS_DIR, name)
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def sig_x():
    return AlgebraSignature(poly_vars=("x",))


@pytest.fixture
def sig_xy():
    return AlgebraSignature(poly_vars=("x", "y"))


@pytest.fixture
def sig_commutative():
    return AlgebraSignature(poly_vars=("x", "y", "z"), derivative_vars=())


@pytest.fixture
def cusp(sig_xy):
    """x^2 - y^3 in K[x, y]"""
    x, y = sig_xy.function_ring.gens
    return x ** 2 - y ** 3


@pytest.fixture
def cusp_generators(sig_xy, cusp):
    """(x^2 - y^3) Dx + 2x and (x^2 - y^3) Dy - 3y^2, in position 1"""
    return annihilator_of_rational(cusp, sig_xy)


@pytest.fixture
def op():
    def parse(text, signature):
        return parse_expression(text, signature)
    return parse


@pytest.fixture
def random_operator(rng):
    """Factory for small random elements; T powers only when the signature is localized"""
    def make(signature, nterms=3, max_exp=2, max_t=0):
        terms = {}
        for _ in range(nterms):
            exps = tuple(int(e) for e in rng.integers(0, max_exp + 1, size=signature.nvars))
            t = int(rng.integers(0, max_t + 1)) if max_t else 0
            terms[Monomial(exps, t, 0)] = int(rng.integers(1, 6)) * int(rng.choice([-1, 1]))
        return signature.from_terms(terms)
    return make


@pytest.fixture
def random_poly(rng):
    """Factory for small random nonzero polynomials of a sympy ring"""
    def make(ring, nterms=3, max_exp=2):
        p = ring.zero
        while not p:
            for _ in range(nterms):
                mono = ring.one
                for g, e in zip(ring.gens, rng.integers(0, max_exp + 1, size=ring.ngens)):
                    mono = mono * g ** int(e)
                p = p + mono * int(rng.integers(-4, 5))
        return p
    return make
