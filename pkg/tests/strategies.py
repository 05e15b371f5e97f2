from fractions import Fraction

from hypothesis import strategies as st

from bisym import _field as F
from bisym.bisingular import BisingularSymbol
from bisym.symbols import ShubinSymbol, TrigPoly, from_monomials

rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))
scalars = st.builds(lambda a, b: F.gq(a, b), rationals, rationals)
nonzero_scalars = scalars.filter(bool)


def trig_polys(max_freq=4, max_terms=4):
    return st.dictionaries(st.integers(-max_freq, max_freq), scalars, max_size=max_terms).map(TrigPoly)


@st.composite
def shubin_symbols(draw, min_order=-2, max_order=3, max_depth=3, max_freq=3):
    order = draw(st.integers(min_order, max_order))
    depth = draw(st.integers(0, max_depth))
    comps = [draw(trig_polys(max_freq)) for _ in range(depth + 1)]
    return ShubinSymbol(order, comps)


@st.composite
def poly_symbols(draw, max_degree=3):
    monos = [(p, d - p) for d in range(max_degree + 1) for p in range(d + 1)]
    picked = draw(st.dictionaries(st.sampled_from(monos), scalars, min_size=1, max_size=5))
    return from_monomials(picked)


@st.composite
def bisingular_symbols(draw, polynomial=False, max_terms=3):
    n = draw(st.integers(1, max_terms))
    gen = poly_symbols() if polynomial else shubin_symbols(min_order=-1, max_order=2, max_depth=2)
    terms = [(draw(gen), draw(gen)) for _ in range(n)]
    m1 = max([f.order for f, _ in terms if f.order is not None], default=0)
    m2 = max([g.order for _, g in terms if g.order is not None], default=0)
    return BisingularSymbol((m1, m2), terms)
