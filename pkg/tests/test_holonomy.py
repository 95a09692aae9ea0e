import pytest

from weyl_closure.algebra import AlgebraSignature
from weyl_closure.errors import NotReducedError, SignatureMismatchError
from weyl_closure.groebner import GroebnerBasis, buchberger
from weyl_closure.holonomy import HolonomyWitness, holonomic_under_orders, is_holonomic
from weyl_closure.orders import closure_order, default_order, parse_order


def test_cusp_generators_are_not_holonomic(cusp_generators):
    holonomic, witness = is_holonomic(buchberger(cusp_generators, default_order()))
    assert not holonomic
    assert witness == HolonomyWitness(("x", "Dx", "Dy"), 1)
    assert str(witness) == "A = {x, Dx, Dy}, position 1"


def test_adding_euler_operator_makes_it_holonomic(cusp_generators, sig_xy, op):
    gens = cusp_generators + [op("3*x*Dx + 2*y*Dy + 6", sig_xy).with_position(1)]
    holonomic, witness = is_holonomic(buchberger(gens, default_order()))
    assert holonomic
    assert witness is None


def test_one_variable(sig_x, op):
    assert is_holonomic(buchberger([op("x*Dx + 1", sig_x)], default_order()))[0]


def test_unit_module_is_holonomic(sig_x):
    assert is_holonomic(buchberger([sig_x.generator("x"), sig_x.generator("Dx")], default_order()))[0]


def test_zero_module_is_not_holonomic(sig_x):
    G = GroebnerBasis(elements=[], order=default_order(), signature=sig_x)
    holonomic, witness = is_holonomic(G)
    assert not holonomic
    assert witness.position == 1


def test_needs_reduced_basis(sig_x):
    G = GroebnerBasis(elements=[], order=default_order(), signature=sig_x, reduced=False)
    with pytest.raises(NotReducedError):
        is_holonomic(G)


def test_rejects_T(sig_xy, cusp):
    sigT = sig_xy.with_localization(cusp, "T")
    G = buchberger([sigT.generator("T") - sigT.one()], closure_order())
    with pytest.raises(SignatureMismatchError):
        is_holonomic(G)


def test_rank_two_witness_position(op):
    sig = AlgebraSignature(poly_vars=("x",), rank=2)
    assert is_holonomic(buchberger([op("[Dx, 0]", sig), op("[0, Dx]", sig)], default_order()))[0]
    holonomic, witness = is_holonomic(buchberger([op("[Dx, 0]", sig)], default_order()))
    assert not holonomic
    assert witness.position == 2


def test_rational_variables_only():
    # no polynomial variables: finite dimensionality over K(t)
    sig = AlgebraSignature(rational_vars=("t",))
    G = buchberger([sig.generator("Dt") * sig.generator("Dt")], default_order())
    assert is_holonomic(G)[0]


def test_verdict_under_several_orders(cusp_generators, sig_xy, op):
    gens = cusp_generators + [op("3*x*Dx + 2*y*Dy + 6", sig_xy).with_position(1)]
    orders = [default_order(), parse_order("block(lex(x,y),grevlex(Dx,Dy))"), default_order("top")]
    verdicts = holonomic_under_orders(gens, orders)
    assert len(verdicts) == 3
    assert verdicts["grevlex/pot"]


@pytest.mark.parametrize("base", [
    ["Dx", "Dy"],
    ["x*Dx + 1", "Dy"],
    ["(x^2 - y^3)*Dx + 2*x", "(x^2 - y^3)*Dy - 3*y^2", "3*x*Dx + 2*y*Dy + 6"],
])
def test_adding_generators_keeps_holonomic(sig_xy, op, random_operator, base):
    for _ in range(3):
        gens = [op(text, sig_xy).with_position(1) for text in base]
        assert is_holonomic(buchberger(gens, default_order()))[0]
        for _ in range(3):
            gens.append(random_operator(sig_xy, nterms=2, max_exp=1).with_position(1))
            holonomic, witness = is_holonomic(buchberger(gens, default_order()))
            assert holonomic, witness
