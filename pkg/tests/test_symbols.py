import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bisym import _field as F
from bisym.errors import NotPolynomialError, ParseError, PreconditionError
from bisym.symbols import (
    ONE,
    X,
    XI,
    Z,
    ZBAR,
    SampleGrid,
    ShubinSymbol,
    TrigPoly,
    format_symbol_literal,
    kn_compose,
    monomial,
    parse_symbol_literal,
    principal_at,
    seminorm_check,
    sh_derivative,
    sh_mul,
    sh_principal,
    tp_mul,
    weight,
)

from .oracles import central_difference
from .strategies import poly_symbols, shubin_symbols, trig_polys

THETA = np.linspace(0, 2 * np.pi, 64, endpoint=False)


def _sample_points(rng, n, rmin=2.0, rmax=5.0):
    r = rng.uniform(rmin, rmax, n)
    th = rng.uniform(0, 2 * np.pi, n)
    return r * np.cos(th), r * np.sin(th)


# -- field -------------------------------------------------------------------

@pytest.mark.parametrize(
    "text, expected",
    [("3", (3, 0)), ("-1/2", (-0.5, 0)), ("i", (0, 1)), ("-2i", (0, -2)), ("1/2+3/4i", (0.5, 0.75))],
)
def test_parse_scalar(text, expected):
    assert F.to_complex(F.parse_scalar(text)) == complex(*expected)


@given(st.sampled_from(["3", "-1/2", "i", "-2i", "1/2+3/4i", "-5/3-7i", "0"]))
def test_scalar_format_round_trip(text):
    c = F.parse_scalar(text)
    assert F.parse_scalar(F.fmt(c)) == c


def test_parse_scalar_rejects_garbage():
    with pytest.raises(ParseError):
        F.parse_scalar("1.5.2")


# -- trig polynomials ----------------------------------------------------------

def test_tp_mul_examples():
    assert tp_mul(TrigPoly.exp(1), TrigPoly.exp(-1)) == TrigPoly.constant(1)
    a = TrigPoly({0: 1, 1: 1})
    assert tp_mul(a, a) == TrigPoly({0: 1, 1: 2, 2: 1})


def test_tp_canonical_drops_zeros():
    assert TrigPoly({0: 0, 3: 1}).coeffs == {3: F.ONE}
    assert (TrigPoly.exp(2) - TrigPoly.exp(2)).is_zero


@given(trig_polys(8), trig_polys(8))
def test_tp_mul_matches_pointwise(a, b):
    np.testing.assert_allclose(tp_mul(a, b).evaluate(THETA), a.evaluate(THETA) * b.evaluate(THETA), atol=1e-12 * (1 + a.max_abs_coeff() * b.max_abs_coeff() * 64))


@given(trig_polys(), trig_polys(), trig_polys())
def test_tp_mul_ring_laws(a, b, c):
    one = TrigPoly.constant(1)
    assert tp_mul(a, b) == tp_mul(b, a)
    assert tp_mul(tp_mul(a, b), c) == tp_mul(a, tp_mul(b, c))
    assert tp_mul(a, one) == a


# -- derivatives -----------------------------------------------------------------

def test_derivative_examples():
    assert sh_derivative(Z, "x") == ONE
    assert sh_derivative(Z, "xi") == ShubinSymbol.constant(F.I)
    r2 = sh_mul(Z, ZBAR)
    assert sh_principal(r2) == TrigPoly.constant(1)
    assert sh_derivative(r2, "x") == ShubinSymbol(1, [TrigPoly({1: 1, -1: 1})])


def test_derivative_of_r_squared_by_finite_differences():
    rng = np.random.default_rng(1)
    r2 = sh_mul(Z, ZBAR)
    d = sh_derivative(r2, "x")
    x, xi = _sample_points(rng, 20)
    fd = central_difference(r2.evaluate, x, xi, "x")
    np.testing.assert_allclose(d.evaluate(x, xi), fd, atol=1e-6)


@given(shubin_symbols(), st.sampled_from(["x", "xi"]))
def test_derivative_finite_differences(s, var):
    rng = np.random.default_rng(0)
    x, xi = _sample_points(rng, 10)
    d = sh_derivative(s, var)
    scale = 1 + sum(abs(F.to_complex(c)) for _, _, c in s.terms()) * 5.0 ** max(s.order or 0, 0)
    np.testing.assert_allclose(d.evaluate(x, xi), central_difference(s.evaluate, x, xi, var), atol=1e-5 * scale)


@given(shubin_symbols())
def test_derivative_lowers_order(s):
    for var in ("x", "xi"):
        d = sh_derivative(s, var)
        assert d.is_zero or d.order <= s.order - 1


@given(shubin_symbols())
def test_mixed_derivatives_commute(s):
    assert sh_derivative(sh_derivative(s, "x"), "xi") == sh_derivative(sh_derivative(s, "xi"), "x")


@given(shubin_symbols(max_depth=2), shubin_symbols(max_depth=2), st.sampled_from(["x", "xi"]))
def test_leibniz(a, b, var):
    lhs = sh_derivative(sh_mul(a, b), var)
    rhs = sh_mul(sh_derivative(a, var), b) + sh_mul(a, sh_derivative(b, var))
    assert lhs == rhs


# -- products and composition ----------------------------------------------------

def test_mul_examples():
    assert sh_mul(Z, ZBAR) == ShubinSymbol(2, [TrigPoly.constant(1)])
    assert sh_mul(Z, ONE) == Z


@given(shubin_symbols(), shubin_symbols())
def test_mul_matches_evaluation(a, b):
    rng = np.random.default_rng(2)
    x, xi = _sample_points(rng, 50)
    va, vb = a.evaluate(x, xi), b.evaluate(x, xi)
    np.testing.assert_allclose(sh_mul(a, b).evaluate(x, xi), va * vb, rtol=1e-10, atol=1e-10)


def test_depth_min_rule_for_inexact_operands():
    a = ShubinSymbol(2, [TrigPoly.constant(1), TrigPoly.constant(1)], exact=False)
    b = ShubinSymbol(1, [TrigPoly.exp(1)], exact=False)
    p = sh_mul(a, b)
    assert not p.exact and p.depth == 0 and p.order == 3


def test_kn_examples():
    assert kn_compose(XI, X) == sh_mul(X, XI) - ShubinSymbol.constant(F.I)
    assert kn_compose(X, XI) == sh_mul(X, XI)
    assert kn_compose(Z, ONE) == Z
    assert str(kn_compose(XI, X)) == "xξ - i"


def test_kn_truncated_depth_is_marked_inexact():
    a = monomial(0, 2)
    b = monomial(2, 0)
    full = kn_compose(a, b)
    part = kn_compose(a, b, depth=1)
    assert full.exact and not part.exact
    assert part.order == full.order
    assert part.component(4) == full.component(4)


@given(poly_symbols(2), poly_symbols(2), poly_symbols(2))
def test_kn_associative(a, b, c):
    assert kn_compose(kn_compose(a, b), c) == kn_compose(a, kn_compose(b, c))


@given(shubin_symbols(max_depth=1), shubin_symbols(max_depth=1))
def test_principal_multiplicative(a, b):
    pa, pb = sh_principal(a), sh_principal(b)
    prod = tp_mul(pa, pb)
    c = kn_compose(a, b, depth=1)
    if prod.is_zero:
        return
    assert c.order == a.order + b.order
    assert sh_principal(c) == prod


def test_principal_examples():
    assert sh_principal(Z) == TrigPoly.exp(1)
    assert sh_principal(sh_mul(Z, ZBAR) + 1) == TrigPoly.constant(1)
    assert sh_principal(ShubinSymbol.zero()).is_zero
    with pytest.raises(PreconditionError):
        principal_at(sh_mul(Z, Z), 1)


def test_weight_is_binomial_series():
    assert weight(1) == sh_mul(Z, ZBAR) + 1
    assert weight(2) == sh_mul(sh_mul(Z, ZBAR), sh_mul(Z, ZBAR)) + sh_mul(Z, ZBAR).scale(2) + 1


# -- polynomial class ------------------------------------------------------------

@given(poly_symbols())
def test_monomial_round_trip(s):
    from bisym.symbols import from_monomials

    assert from_monomials(s.to_monomials()) == s


def test_not_polynomial_diagnostic():
    s = ShubinSymbol(1, [TrigPoly.exp(3)])
    with pytest.raises(NotPolynomialError, match=r"r\^1 e\^\{3iθ\}"):
        s.to_monomials()


# -- seminorms ---------------------------------------------------------------------

def test_seminorm_examples():
    assert seminorm_check(Z, 1).passed
    assert not seminorm_check(Z, 0).passed
    z = seminorm_check(ShubinSymbol.zero(), 3)
    assert z.passed and z.worst_ratio == 0


def test_seminorm_ratio_grows_linearly():
    grid = SampleGrid(np.array([10.0, 100.0]), np.array([0.3]))
    rep = seminorm_check(Z, 0, grid=grid, cap=1e9)
    assert 50 < rep.worst_ratio < 200


def test_seminorm_rejects_small_radii():
    with pytest.raises(PreconditionError):
        seminorm_check(Z, 1, grid=SampleGrid(np.array([0.5]), np.array([0.0])))


@given(shubin_symbols(max_order=2))
def test_seminorm_passes_at_true_order(s):
    if s.is_zero:
        return
    assert seminorm_check(s, s.order, cap=1e4).passed


@given(shubin_symbols())
def test_component_bound(s):
    r = np.array([1.0, 3.0, 10.0])
    for j in s.degrees():
        c = s.component(j)
        bound = c.max_abs_coeff() * len(c.coeffs) * r**j
        for th in (0.0, 1.0, 2.5):
            assert np.all(np.abs(c.evaluate(th) * r**j) <= bound + 1e-12)


# -- literal grammar -----------------------------------------------------------------

def test_literal_parse_and_warnings():
    s, w = parse_symbol_literal("1 1 1 # z\n1 1 1\n0 0 0")
    assert s == Z.scale(2)
    assert len(w) == 2


def test_literal_errors_carry_position():
    with pytest.raises(ParseError) as exc:
        parse_symbol_literal("1 1 1\n  2 x 1")
    assert exc.value.line == 2


@given(shubin_symbols())
def test_literal_round_trip(s):
    assert parse_symbol_literal(format_symbol_literal(s))[0] == s
