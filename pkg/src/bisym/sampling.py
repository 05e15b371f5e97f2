"""Seeded random symbols for the demo and the property suites."""

from fractions import Fraction

import numpy as np

from . import _field as F
from .bisingular import BisingularSymbol, reconstruct, sigma_pair
from .symbols import ShubinSymbol, TrigPoly, from_monomials

__all__ = [
    "random_scalar",
    "random_poly_symbol",
    "random_polar_symbol",
    "random_bisingular",
    "random_cancelling_bisingular",
    "random_compatible_pair",
]


def random_scalar(rng, span=3, denom=4, complex_=True):
    re = Fraction(int(rng.integers(-span * denom, span * denom + 1)), int(rng.integers(1, denom + 1)))
    im = Fraction(int(rng.integers(-span * denom, span * denom + 1)), int(rng.integers(1, denom + 1))) if complex_ else 0
    return F.gq(re, im)


def random_poly_symbol(rng, max_degree=3, n_terms=None, leading=True):
    """sum c_pq x^p xi^q with p + q <= max_degree and random Gaussian-rational c."""
    monos = [(p, d - p) for d in range(max_degree + 1) for p in range(d + 1)]
    n = int(rng.integers(1, len(monos) + 1)) if n_terms is None else n_terms
    picks = rng.choice(len(monos), size=min(n, len(monos)), replace=False)
    coeffs = {monos[i]: random_scalar(rng) for i in picks}
    if leading:
        p = int(rng.integers(0, max_degree + 1))
        coeffs[(p, max_degree - p)] = random_scalar(rng) or F.ONE
    return from_monomials({k: v for k, v in coeffs.items() if v})


def random_polar_symbol(rng, order, depth=2, max_freq=3):
    """Exact symbol with arbitrary (j, k) terms, not necessarily polynomial."""
    comps = []
    for _ in range(depth + 1):
        ks = rng.choice(np.arange(-max_freq, max_freq + 1), size=int(rng.integers(1, 4)), replace=False)
        comps.append(TrigPoly({int(k): random_scalar(rng) for k in ks}))
    if comps[0].is_zero:
        comps[0] = TrigPoly.constant(1)
    return ShubinSymbol(order, comps)


def random_bisingular(rng, order=None, n_terms=None, polynomial=False):
    if order is None:
        order = (int(rng.integers(0, 3)), int(rng.integers(0, 3)))
    m1, m2 = order
    n = int(rng.integers(1, 4)) if n_terms is None else n_terms
    terms = []
    for _ in range(n):
        if polynomial:
            f = random_poly_symbol(rng, m1)
            g = random_poly_symbol(rng, m2)
        else:
            f = random_polar_symbol(rng, m1 - int(rng.integers(0, 2)))
            g = random_polar_symbol(rng, m2 - int(rng.integers(0, 2)))
        terms.append((f, g))
    return BisingularSymbol(order, terms)


def _same_principal(rng, s):
    """s plus a random lower-order perturbation."""
    low = random_polar_symbol(rng, s.order - 1, depth=1)
    return s + low


def random_cancelling_bisingular(rng, order=None):
    """Symbol of declared order (m1, m2) whose two principal symbols vanish.

    Alternates between two constructions: (f - f')(x)(g - g') expanded into
    four terms, with f, f' (and g, g') sharing principal parts, and
    b - reconstruct(sigma(b)) for a random b.
    """
    if order is None:
        order = (int(rng.integers(0, 3)), int(rng.integers(0, 3)))
    m1, m2 = order
    if rng.random() < 0.5:
        f = random_polar_symbol(rng, m1)
        g = random_polar_symbol(rng, m2)
        f2, g2 = _same_principal(rng, f), _same_principal(rng, g)
        terms = [(f, g), (f.scale(-1), g2), (f2.scale(-1), g), (f2, g2)]
        return BisingularSymbol(order, terms)
    b = random_bisingular(rng, order)
    return b - reconstruct(sigma_pair(b))


def random_compatible_pair(rng, order=None):
    """Principal pair of a random bisingular symbol (always compatible)."""
    return sigma_pair(random_bisingular(rng, order))
