import pytest

from weyl_closure.algebra import (
    AlgebraSignature,
    act_on_exponential,
    act_on_rational,
    annihilates,
    convert_element,
    left_multiply_by_T_power,
    multiply,
)
from weyl_closure.domains import RationalFunction, partial_derivative
from weyl_closure.errors import SignatureMismatchError, UnknownVariableError, ZeroElementError


def test_commutator(sig_x, op):
    Dx, x = sig_x.generator("Dx"), sig_x.generator("x")
    assert Dx * x - x * Dx == sig_x.one()
    assert Dx * x * x == op("x^2*Dx + 2*x", sig_x)
    assert Dx * Dx * x == op("x*Dx^2 + 2*Dx", sig_x)


def test_derivative_of_rational_variable(op):
    sig = AlgebraSignature(poly_vars=("x",), rational_vars=("t",))
    Dt, t = sig.generator("Dt"), sig.generator("t")
    assert Dt * t == t * Dt + sig.one()
    assert sig.generator("Dx") * t == t * sig.generator("Dx")
    assert Dt * op("1/t", sig) == op("1/t", sig) * Dt - op("1/t^2", sig)


def test_signature_validation():
    with pytest.raises(SignatureMismatchError):
        AlgebraSignature(poly_vars=("x", "x"))
    with pytest.raises(UnknownVariableError):
        AlgebraSignature(poly_vars=("x",), derivative_vars=("y",))
    with pytest.raises(SignatureMismatchError):
        AlgebraSignature(poly_vars=("x",), rank=0)


def test_mixed_signatures_do_not_combine(sig_x, sig_xy):
    with pytest.raises(SignatureMismatchError):
        sig_x.generator("x") + sig_xy.generator("x")


def test_T_commutes_past_derivative(sig_xy, cusp):
    sigT = sig_xy.with_localization(cusp, "T")
    T, Dx = sigT.generator("T"), sigT.generator("Dx")
    fx = sigT.from_function_poly(partial_derivative(cusp, "x"))
    assert T * Dx == Dx * T + fx * T * T
    assert Dx * T == T * Dx - fx * T * T


def test_T_times_cusp_generator(sig_xy, cusp, op):
    sigT = sig_xy.with_localization(cusp, "T")
    g1 = op("(x^2 - y^3)*Dx + 2*x", sigT)
    expected = op("(x^2 - y^3)*Dx*T + 2*x*(x^2 - y^3)*T^2 + 2*x*T", sigT)
    assert left_multiply_by_T_power(g1, 1) == expected
    assert sigT.generator("T") * g1 == expected
    assert expected.deg_T() == 2


def test_T_times_loc_element(sig_xy, cusp, op):
    sigT = sig_xy.with_localization(cusp, "T")
    loc = op("(x^2 - y^3)*T - 1", sigT)
    assert sigT.generator("T") * loc == op("(x^2 - y^3)*T^2 - T", sigT)


def test_degrees(sig_xy, op):
    P = op("x^2*Dx*Dy + y", sig_xy)
    assert P.total_degree() == 4
    with pytest.raises(ZeroElementError):
        sig_xy.zero().total_degree()
    with pytest.raises(SignatureMismatchError):
        P.deg_T()


def test_module_elements_do_not_multiply(sig_x):
    e = sig_x.generator("Dx").with_position(1)
    with pytest.raises(SignatureMismatchError):
        multiply(e, e)
    assert (sig_x.generator("x") * e).positions() == [1]


def test_distributivity_and_associativity(sig_xy, random_operator):
    for _ in range(10):
        P, Q, R = (random_operator(sig_xy, max_exp=1) for _ in range(3))
        assert (P * Q) * R == P * (Q * R)
        assert P * (Q + R) == P * Q + P * R
        assert (P + Q) * R == P * R + Q * R


@pytest.mark.slow
def test_associativity_many_triples(sig_xy, random_operator):
    for _ in range(1000):
        P, Q, R = (random_operator(sig_xy) for _ in range(3))
        assert (P * Q) * R == P * (Q * R)
        assert P * (Q + R) == P * Q + P * R


def test_associativity_with_T(sig_xy, cusp, random_operator):
    sigT = sig_xy.with_localization(cusp, "T")
    for _ in range(10):
        P, Q, R = (random_operator(sigT, nterms=2, max_exp=1, max_t=2) for _ in range(3))
        assert (P * Q) * R == P * (Q * R)


def test_degree_is_additive(sig_xy, random_operator):
    for _ in range(20):
        P, Q = random_operator(sig_xy), random_operator(sig_xy)
        assert (P * Q).total_degree() == P.total_degree() + Q.total_degree()


def _check_action(sig, random_operator, h, count, **sizes):
    for _ in range(count):
        P, Q = random_operator(sig, **sizes), random_operator(sig, **sizes)
        assert act_on_rational(P * Q, h)[0] == act_on_rational(P, act_on_rational(Q, h)[0])[0]


def test_action_is_compatible_with_product(sig_xy, random_operator):
    x, y = sig_xy.function_ring.gens
    h = RationalFunction(sig_xy.function_ring.one, x + 2 * y + 3)
    _check_action(sig_xy, random_operator, h, 5, nterms=2, max_exp=1)


@pytest.mark.slow
def test_action_is_compatible_with_product_many_pairs(sig_xy, random_operator):
    x, y = sig_xy.function_ring.gens
    h = RationalFunction(sig_xy.function_ring.one, x + 2 * y + 3)
    _check_action(sig_xy, random_operator, h, 100)


def test_action_with_T_matches_product(sig_xy, random_operator, random_poly):
    ring = sig_xy.function_ring
    x, y = ring.gens
    h = RationalFunction(x - y, x + 2 * y + 3)
    for _ in range(4):
        sigT = sig_xy.with_localization(random_poly(ring, nterms=2, max_exp=1), "T")
        _check_action(sigT, random_operator, h, 1, nterms=2, max_exp=1, max_t=1)


@pytest.mark.slow
def test_action_with_T_many_pairs(sig_xy, random_operator, random_poly):
    ring = sig_xy.function_ring
    x, y = ring.gens
    for _ in range(100):
        sigT = sig_xy.with_localization(random_poly(ring), "T")
        h = RationalFunction(random_poly(ring), x + 2 * y + 3)
        _check_action(sigT, random_operator, h, 1, nterms=2, max_exp=1, max_t=1)
        D = sigT.generator("Dx")
        T = sigT.generator("T")
        assert act_on_rational(T * D, h)[0] == act_on_rational(T, act_on_rational(D, h)[0])[0]


def test_loc_element_is_two_sided(sig_xy, random_poly):
    """d(fT - 1) = (fT - 1)(d - T f_l) and (fT - 1) d = (d + T f_l)(fT - 1)"""
    ring = sig_xy.function_ring
    for _ in range(20):
        f = random_poly(ring, max_exp=1)
        sigT = sig_xy.with_localization(f, "T")
        F, T = sigT.from_function_poly(f), sigT.generator("T")
        loc = F * T - sigT.one()
        for v in ("x", "y"):
            D = sigT.generator("D" + v)
            fl = sigT.from_function_poly(partial_derivative(f, v))
            assert D * loc == loc * (D - T * fl)
            assert loc * D == (D + T * fl) * loc


def test_euler_operator_annihilates(sig_xy, cusp, op):
    euler = op("3*x*Dx + 2*y*Dy + 6", sig_xy)
    h = RationalFunction(sig_xy.function_ring.one, cusp)
    assert annihilates(euler, act_on_rational(euler, h))
    assert not annihilates(op("x*Dx", sig_xy), act_on_rational(op("x*Dx", sig_xy), h))


def test_cusp_generators_annihilate(sig_xy, cusp, cusp_generators):
    h = RationalFunction(sig_xy.function_ring.one, cusp)
    for g in cusp_generators:
        assert annihilates(g, act_on_rational(g, h))


def test_module_action_sums_components(op):
    sig = AlgebraSignature(poly_vars=("x",), rank=2)
    ring = sig.function_ring
    (x,) = ring.gens
    # [Dx, -1] applied to (x^2, 2x) gives 2x - 2x
    P = op("[Dx, -1]", sig)
    values = act_on_rational(P, [x ** 2, 2 * x])
    assert annihilates(P, values)
    with pytest.raises(SignatureMismatchError):
        act_on_rational(P, x)


def test_exponential_action(sig_xy, op):
    ring = sig_xy.function_ring
    x, y = ring.gens
    g = x ** 2 * y
    assert annihilates(op("Dx - 2*x*y", sig_xy), act_on_exponential(op("Dx - 2*x*y", sig_xy), g))
    assert not annihilates(op("Dy", sig_xy), act_on_exponential(op("Dy", sig_xy), g))


def test_convert_element_rationalizes(sig_xy, op):
    P = op("x^2*Dx + y", sig_xy)
    rsig = sig_xy.rationalized()
    Q = convert_element(P, rsig)
    assert Q == rsig.generator("x") * rsig.generator("x") * rsig.generator("Dx") + rsig.generator("y")
    with pytest.raises(SignatureMismatchError):
        convert_element(P, AlgebraSignature(poly_vars=("x",)))


def test_pow_only_for_scalars(sig_x, op):
    assert sig_x.generator("Dx") ** 2 == op("Dx^2", sig_x)
    with pytest.raises(SignatureMismatchError):
        sig_x.generator("Dx").with_position(1) ** 2


def test_format_round_trip(sig_xy, op):
    P = op("3*x*Dx + 2*y*Dy - 1/2", sig_xy)
    assert op(str(P), sig_xy) == P
