import pytest
from pydantic import ValidationError

from weyl_closure.algebra import Monomial
from weyl_closure.errors import SignatureMismatchError, ZeroElementError
from weyl_closure.orders import (
    OrderSpec,
    TermOrder,
    closure_order,
    compare,
    default_order,
    elimination_order,
    leading_monomial,
    parse_order,
    sorted_terms,
)


def mono(*exps, t=0, pos=0):
    return Monomial(tuple(exps), t, pos)


def test_grevlex_breaks_ties_on_last_variable(sig_xy):
    # monomial variables are x, y, Dx, Dy
    order = default_order()
    assert compare(order, mono(0, 2, 0, 0), mono(1, 0, 1, 0), sig_xy) == 1
    assert compare(order, mono(1, 0, 0, 0), mono(0, 0, 0, 2), sig_xy) == -1
    assert compare(order, mono(1, 1, 0, 0), mono(1, 1, 0, 0), sig_xy) == 0


def test_lex(sig_xy):
    order = parse_order("lex")
    assert compare(order, mono(1, 0, 0, 0), mono(0, 5, 3, 3), sig_xy) == 1


def test_position_layers(sig_xy):
    small_e1 = mono(0, 0, 0, 0, pos=1)
    big_e2 = mono(3, 0, 0, 0, pos=2)
    pot = default_order("pot")
    top = default_order("top")
    assert compare(pot, small_e1, big_e2, sig_xy) == 1
    assert compare(top, small_e1, big_e2, sig_xy) == -1


def test_T_elimination(sig_xy, cusp):
    sigT = sig_xy.with_localization(cusp, "T")
    order = closure_order()
    assert order.eliminate_T
    assert compare(order, mono(0, 0, 0, 0, t=1), mono(9, 9, 9, 9), sigT) == 1
    assert compare(default_order(), mono(0, 0, 0, 0, t=1), mono(9, 9, 9, 9), sigT) == -1


def test_elimination_order(sig_commutative):
    order = elimination_order(sig_commutative, ["z"])
    assert compare(order, mono(0, 0, 1), mono(5, 5, 0), sig_commutative) == 1


def test_leading_monomial_and_sorting(sig_xy, op):
    P = op("x*Dx + y^2 + 1", sig_xy)
    lm, lc = leading_monomial(P, default_order())
    assert lm.exps == (0, 2, 0, 0)
    assert [m.exps for m, _ in sorted_terms(P, default_order())] == [(0, 2, 0, 0), (1, 0, 1, 0), (0, 0, 0, 0)]
    with pytest.raises(ZeroElementError):
        leading_monomial(sig_xy.zero(), default_order())


@pytest.mark.parametrize("text", [
    "grevlex",
    "lex(x,y,Dx,Dy)",
    "block(lex(x,y),grevlex(Dx,Dy))",
    "weight(0,0,1,1)",
    "weight(0,0,1,1;lex)",
])
def test_parse_order_round_trip(text):
    assert parse_order(text).syntax() == text


@pytest.mark.parametrize("text", ["foo", "lex(x", "weight(1,-2)", "block()", "grevlex extra"])
def test_parse_order_rejects(text):
    with pytest.raises(ValueError):
        parse_order(text)


def test_order_must_cover_every_variable(sig_xy):
    order = OrderSpec(term=TermOrder(kind="lex", variables=("x", "y")))
    with pytest.raises(SignatureMismatchError):
        compare(order, mono(0, 0, 0, 0), mono(1, 0, 0, 0), sig_xy)


def test_negative_weights_rejected():
    with pytest.raises(ValidationError):
        TermOrder(kind="weight", weights=(1, -1))


def test_block_order(sig_xy):
    order = parse_order("block(lex(Dx,Dy),grevlex(x,y))")
    assert compare(order, mono(0, 0, 1, 0), mono(7, 7, 0, 0), sig_xy) == 1


ORDER_TEXTS = ["grevlex", "lex", "block(lex(x,y),grevlex(Dx,Dy))", "weight(0,0,1,1)", "weight(1,2,0,3;lex)"]


def random_mono(rng, nvars, max_t=0, positions=(1, 2)):
    exps = tuple(int(e) for e in rng.integers(0, 4, size=nvars))
    t = int(rng.integers(0, max_t + 1)) if max_t else 0
    return Monomial(exps, t, int(rng.choice(positions)))


def times(a, c):
    """a * c for a scalar monomial c"""
    return Monomial(tuple(i + j for i, j in zip(a.exps, c.exps)), a.t + c.t, a.pos)


@pytest.mark.parametrize("layer", ["pot", "top"])
@pytest.mark.parametrize("text", ORDER_TEXTS)
def test_order_is_total_and_multiplicative(sig_xy, rng, text, layer):
    order = parse_order(text, layer)
    for _ in range(200):
        a, b = random_mono(rng, 4), random_mono(rng, 4)
        c = random_mono(rng, 4, positions=(0,))
        ab = compare(order, a, b, sig_xy)
        assert ab == -compare(order, b, a, sig_xy)
        assert (ab == 0) == (a == b)
        if ab:
            assert compare(order, times(a, c), times(b, c), sig_xy) == ab


@pytest.mark.parametrize("layer", ["pot", "top"])
@pytest.mark.parametrize("text", ORDER_TEXTS)
def test_divisors_are_smaller(sig_xy, rng, text, layer):
    order = parse_order(text, layer)
    for _ in range(100):
        a = random_mono(rng, 4)
        c = random_mono(rng, 4, positions=(0,))
        one = Monomial((0,) * 4, 0, a.pos)
        assert compare(order, one, a, sig_xy) <= 0
        assert compare(order, a, times(a, c), sig_xy) <= 0
        if any(c.exps):
            assert compare(order, a, times(a, c), sig_xy) == -1


def test_position_layers_on_random_samples(sig_xy, rng):
    pot, top = default_order("pot"), default_order("top")
    for _ in range(200):
        a, b = random_mono(rng, 4), random_mono(rng, 4)
        if a.pos != b.pos:
            expected = 1 if a.pos < b.pos else -1
            assert compare(pot, a, b, sig_xy) == expected
        term = compare(default_order(), a._replace(pos=1), b._replace(pos=1), sig_xy)
        if term:
            assert compare(top, a, b, sig_xy) == term
        elif a.pos != b.pos:
            assert compare(top, a, b, sig_xy) == (1 if a.pos < b.pos else -1)


def test_elimination_dominance(sig_xy, cusp, rng):
    order = elimination_order(sig_xy, ["Dx", "Dy"])
    for _ in range(200):
        a, b = random_mono(rng, 4, positions=(1,)), random_mono(rng, 4, positions=(1,))
        if any(a.exps[2:]) and not any(b.exps[2:]):
            assert compare(order, a, b, sig_xy) == 1

    sigT = sig_xy.with_localization(cusp, "T")
    order = closure_order()
    for _ in range(200):
        a, b = random_mono(rng, 4, max_t=3), random_mono(rng, 4, max_t=3)
        if a.t > b.t:
            assert compare(order, a, b, sigT) == 1
