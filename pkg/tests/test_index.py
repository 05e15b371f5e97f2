import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bisym.bisingular import BiTrigPoly, SigmaPair, SymbolValuedLoop, external_product, sigma_pair, unit_pair
from bisym.errors import NotEllipticError, NotInvertibleError, OutsideFormulaScopeError, PreconditionError
from bisym.index import (
    analytic_index,
    bidegree,
    family_index,
    family_index_matrices,
    index_multiplicativity,
    sharp_product,
    symbol_winding,
    topological_index,
    winding,
)
from bisym.quantization import quantize_poly
from bisym.symbols import ONE, X, XI, Z, ZBAR, ShubinSymbol, TrigPoly, sh_mul

from .oracles import arg_increment_winding, gaussian_coefficients

R2P1 = sh_mul(Z, ZBAR) + 1


def _power(k):
    s = ONE
    for _ in range(abs(k)):
        s = sh_mul(s, Z if k > 0 else ZBAR)
    return s


# -- winding ------------------------------------------------------------------

@pytest.mark.parametrize(
    "coeffs, want",
    [({1: 1}, 1), ({-1: 1}, -1), ({0: 3, 2: 1}, 0), ({0: 1, 2: 3}, 2), ({0: 2, 1: 1, -3: 0.5}, 0)],
)
def test_winding_examples(coeffs, want):
    u = TrigPoly(coeffs)
    assert winding(u).value == want
    assert arg_increment_winding(u.evaluate) == want


def test_winding_zero_on_circle():
    with pytest.raises(NotEllipticError):
        winding(TrigPoly({0: 1, 1: 1}))


@given(st.integers(-4, 4), st.integers(-4, 4))
@settings(max_examples=30)
def test_winding_additive(a, b):
    u, v = TrigPoly({a: 1}), TrigPoly({b: 2})
    from bisym.symbols import tp_mul

    assert winding(tp_mul(u, v)).value == winding(u).value + winding(v).value


def test_symbol_winding_orientation():
    assert symbol_winding(Z).value == 1
    assert symbol_winding(ZBAR).value == -1
    assert symbol_winding(R2P1).value == 0


# -- analytic index -------------------------------------------------------------

@pytest.mark.parametrize("k", [-2, -1, 0, 1, 2])
@pytest.mark.parametrize("strategy", ["spectral_gap", "heat_trace"])
def test_analytic_index_powers(k, strategy):
    A = quantize_poly(_power(k), 48)
    rep = analytic_index(A, strategy)
    assert rep.value == k and rep.reliable


def test_identity_has_index_zero():
    assert analytic_index(quantize_poly(ONE, 16)).value == 0


def test_oscillator_shift_index_zero():
    assert analytic_index(quantize_poly(R2P1, 32)).value == 0


def test_annihilator_kernel_is_gaussian():
    A = quantize_poly(Z, 32)
    c1, _ = A.compressions()
    w, v = np.linalg.eigh(c1)
    g = gaussian_coefficients(32)
    assert abs(abs(np.vdot(v[:, 0], g)) - 1) < 1e-10


def test_unknown_strategy():
    with pytest.raises(PreconditionError):
        analytic_index(quantize_poly(Z, 8), "fredholm")


@pytest.mark.parametrize("j", [-1, 0, 1])
@pytest.mark.parametrize("k", [-1, 1, 2])
def test_multiplicativity(j, k):
    rep = index_multiplicativity(_power(j), _power(k), 32, 32)
    assert rep.passed
    assert rep.details["product"] == j * k


def test_sharp_dense_matches_structured():
    A, B = quantize_poly(Z, 10), quantize_poly(sh_mul(ZBAR, ZBAR), 10)
    P = sharp_product(A, B)
    assert analytic_index(P).value == analytic_index(P.dense()).value == -2
    s_dense = np.sort(np.linalg.eigvalsh(P.dense().compressions()[0]))
    s_fast = np.sort(P.spectra()[0])
    assert np.allclose(s_dense, s_fast, atol=1e-9)


# -- families ------------------------------------------------------------------

def test_family_matrices_examples():
    P0 = np.diag([1.0, 0.0])
    assert family_index_matrices({0: np.eye(2) - P0, 1: P0}).value == 1
    assert family_index_matrices({0: 2 * np.eye(3), 1: np.eye(3)}).value == 0
    with pytest.raises(NotInvertibleError):
        family_index_matrices({0: np.eye(2), 1: np.eye(2)})


def test_family_index_stable_in_truncation():
    L = SymbolValuedLoop(1, {0: R2P1.scale(3), 1: ONE}, 2)
    a = family_index(L, 16).value
    assert a == family_index(L, 24).value == 0
    L2 = SymbolValuedLoop(1, {1: R2P1}, 2)
    # a scalar phase on every basis vector: the winding counts the truncation
    assert family_index(L2, 12).value == 12 and family_index(L2, 20).value == 20


# -- bidegree / topological -------------------------------------------------------

def test_bidegree_examples():
    assert bidegree(BiTrigPoly({(1, 1): 1})) == (1, 1)
    assert bidegree(BiTrigPoly({(2, -1): 1, (0, 0): 0.25})) == (2, -1)
    assert bidegree(BiTrigPoly({(0, 0): 3, (1, 0): 1})) == (0, 0)
    with pytest.raises(NotEllipticError):
        bidegree(BiTrigPoly({(0, 0): 1, (1, 0): 1}))


@pytest.mark.parametrize("m", [0, 1, 2])
def test_topological_external_product(m):
    assert topological_index(sigma_pair(external_product(Z, Z)), m).value == 1


def test_topological_examples():
    assert topological_index(sigma_pair(external_product(Z, ZBAR))).value == -1
    assert topological_index(unit_pair()).value == 0
    sq = sigma_pair(external_product(sh_mul(Z, Z), ZBAR))
    assert topological_index(sq).value == -2


def test_topological_matches_analytic():
    for f, g in [(Z, Z), (ZBAR, Z), (sh_mul(Z, Z), ZBAR)]:
        top = topological_index(sigma_pair(external_product(f, g))).value
        ana = index_multiplicativity(f, g, 24, 24).details["product"]
        assert top == ana


def test_topological_outside_scope():
    a = external_product(Z, Z) + external_product(ZBAR, R2P1).with_order((1, 2))
    a = a.with_order((1, 2))
    with pytest.raises(OutsideFormulaScopeError):
        topological_index(sigma_pair(a))
