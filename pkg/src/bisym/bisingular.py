"""Bisingular symbols on R^1 x R^1 and their principal symbol pairs.

A bisingular symbol is kept as a finite tensor sum a = sum_t f_t (x) g_t of
Shubin symbols in the two factors.  Its two principal symbols are
operator-valued loops:

* sigma1(a)(theta1) = sum_t c_{m1}(f_t)(theta1) g_t   (values on factor 2)
* sigma2(a)(theta2) = sum_t c_{m2}(g_t)(theta2) f_t   (values on factor 1)

and a compatible pair (F, G) of such loops is a :class:`SigmaPair`.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _field as F
from .errors import IncompatiblePairError, PreconditionError
from .symbols import (
    CheckReport,
    ShubinSymbol,
    TrigPoly,
    kn_compose,
    principal_at,
)

__all__ = [
    "BisingularSymbol",
    "SymbolValuedLoop",
    "BiTrigPoly",
    "SigmaPair",
    "bs_compose",
    "sigma1",
    "sigma2",
    "sigma_pair",
    "tsigma1",
    "tsigma2",
    "compat_check",
    "sigma_pair_compose",
    "reconstruct",
    "kernel_order_check",
    "external_product",
    "unit_pair",
]


def _sym_order(s):
    return -np.inf if s.order is None else s.order


class BisingularSymbol:
    """Finite tensor sum of factor symbols with a declared bi-order (m1, m2).

    ``cutoffs`` is metadata only: it records that the stored polar
    components are excised near the origin of each factor (the smoothstep
    of :func:`bisym.symbols.cutoff`), as produced by :func:`reconstruct`.
    """

    __slots__ = ("order", "terms", "cutoffs")

    def __init__(self, order, terms, cutoffs=None):
        m1, m2 = (int(order[0]), int(order[1]))
        kept = []
        for f, g in terms:
            if f.is_zero or g.is_zero:
                continue
            if _sym_order(f) > m1 or _sym_order(g) > m2:
                raise PreconditionError(
                    f"term of order ({f.order}, {g.order}) exceeds declared order ({m1}, {m2})"
                )
            kept.append((f, g))
        self.order = (m1, m2)
        self.terms = tuple(kept)
        self.cutoffs = cutoffs

    @classmethod
    def zero(cls, order=(0, 0)):
        return cls(order, ())

    @classmethod
    def unit(cls):
        return cls((0, 0), [(ShubinSymbol.constant(1), ShubinSymbol.constant(1))])

    @property
    def is_zero(self):
        return not self.terms

    @property
    def exact(self):
        return all(f.exact and g.exact for f, g in self.terms)

    def attained_order(self):
        """Largest factor orders actually present among the terms."""
        if not self.terms:
            return None
        return (max(f.order for f, _ in self.terms), max(g.order for _, g in self.terms))

    def __add__(self, other):
        order = (max(self.order[0], other.order[0]), max(self.order[1], other.order[1]))
        return BisingularSymbol(order, self.terms + other.terms)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return BisingularSymbol(self.order, [(f.scale(c), g) for f, g in self.terms], self.cutoffs)

    def with_order(self, order):
        return BisingularSymbol(order, self.terms, self.cutoffs)

    def bi_expansion(self):
        """Exact expansion {(j1, k1, j2, k2): c} of sum c r1^j1 e^{ik1 th1} r2^j2 e^{ik2 th2}."""
        if not self.exact:
            raise PreconditionError("bi-expansion needs exact factor symbols")
        out = {}
        for f, g in self.terms:
            for j1, k1, c1 in f.terms():
                for j2, k2, c2 in g.terms():
                    key = (j1, k1, j2, k2)
                    out[key] = out.get(key, F.ZERO) + c1 * c2
        return {k: v for k, v in sorted(out.items()) if v}

    def remainder_orders(self):
        """Bi-orders of the unknown tails of inexact terms."""
        out = []
        for f, g in self.terms:
            if not f.exact:
                out.append((f.remainder_order, _sym_order(g)))
            if not g.exact:
                out.append((_sym_order(f), g.remainder_order))
        return out

    def __eq__(self, other):
        if not isinstance(other, BisingularSymbol):
            return NotImplemented
        return self.order == other.order and self.bi_expansion() == other.bi_expansion()

    __hash__ = None

    def canonical(self):
        """Regroup the bi-expansion as sum_{(j1,k1)} r1^j1 e^{ik1 th1} (x) g_{j1,k1}."""
        groups = {}
        for (j1, k1, j2, k2), c in self.bi_expansion().items():
            groups.setdefault((j1, k1), []).append((j2, k2, c))
        terms = []
        for (j1, k1), g_terms in groups.items():
            f = ShubinSymbol.from_terms([(j1, k1, 1)])
            terms.append((f, ShubinSymbol.from_terms(g_terms)))
        return BisingularSymbol(self.order, terms, self.cutoffs)

    def evaluate(self, x1, xi1, x2, xi2):
        out = 0.0
        for f, g in self.terms:
            out = out + f.evaluate(x1, xi1) * g.evaluate(x2, xi2)
        return out

    def __repr__(self):
        body = " + ".join(f"({f!s}) ⊗ ({g!s})" for f, g in self.terms) or "0"
        return f"BisingularSymbol(order={self.order}: {body})"


def external_product(f, g):
    """f (x) g, a one-term symbol of order (ord f, ord g)."""
    m1 = 0 if f.order is None else f.order
    m2 = 0 if g.order is None else g.order
    return BisingularSymbol((m1, m2), [(f, g)])


def bs_compose(a, b, depth=None):
    """a # b, using (f (x) g) # (f' (x) g') = (f # f') (x) (g # g')."""
    order = (a.order[0] + b.order[0], a.order[1] + b.order[1])
    terms = []
    for f, g in a.terms:
        for f2, g2 in b.terms:
            terms.append((kn_compose(f, f2, depth), kn_compose(g, g2, depth)))
    return BisingularSymbol(order, terms)


# -- loops -------------------------------------------------------------

class SymbolValuedLoop:
    """theta -> sum_k e^{ik theta} coeffs[k], a trig polynomial with symbol values.

    ``factor`` is the circle the loop lives on (1 or 2); the values are
    Shubin symbols on the other factor of order <= ``value_order``.
    """

    __slots__ = ("factor", "coeffs", "value_order")

    def __init__(self, factor, coeffs, value_order):
        if factor not in (1, 2):
            raise PreconditionError("loop factor must be 1 or 2")
        clean = {}
        for k, s in coeffs.items():
            if s.is_zero:
                continue
            if _sym_order(s) > value_order:
                raise PreconditionError(
                    f"loop coefficient of order {s.order} exceeds value order {value_order}"
                )
            clean[int(k)] = s
        self.factor = factor
        self.coeffs = dict(sorted(clean.items()))
        self.value_order = int(value_order)

    @classmethod
    def constant(cls, factor, value, value_order=None):
        vo = value.order if value_order is None else value_order
        return cls(factor, {0: value}, 0 if vo is None else vo)

    @property
    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, SymbolValuedLoop):
            return NotImplemented
        return (
            self.factor == other.factor
            and self.value_order == other.value_order
            and self.coeffs == other.coeffs
        )

    __hash__ = None

    def __add__(self, other):
        if self.factor != other.factor:
            raise PreconditionError("cannot add loops on different factors")
        out = dict(self.coeffs)
        for k, s in other.coeffs.items():
            out[k] = out[k] + s if k in out else s
        return SymbolValuedLoop(self.factor, out, max(self.value_order, other.value_order))

    def scale(self, c):
        return SymbolValuedLoop(self.factor, {k: s.scale(c) for k, s in self.coeffs.items()}, self.value_order)

    def compose(self, other, depth=None):
        """Pointwise operator product theta -> self(theta) # other(theta)."""
        if self.factor != other.factor:
            raise PreconditionError("cannot compose loops on different factors")
        out = {}
        for k, s in self.coeffs.items():
            for l, t in other.coeffs.items():
                prod = kn_compose(s, t, depth)
                out[k + l] = out[k + l] + prod if k + l in out else prod
        return SymbolValuedLoop(self.factor, out, self.value_order + other.value_order)

    def value_at(self, theta, x, xi):
        """Numerical value of the symbol L(theta) at (x, xi)."""
        out = 0.0
        for k, s in self.coeffs.items():
            out = out + np.exp(1j * k * theta) * s.evaluate(x, xi)
        return out

    def __repr__(self):
        body = " + ".join(f"{_exp_label(k, self.factor)}({s!s})" for k, s in self.coeffs.items()) or "0"
        return f"SymbolValuedLoop(factor={self.factor}, value_order={self.value_order}: {body})"


def _exp_label(k, factor):
    if k == 0:
        return ""
    if k in (1, -1):
        return f"e^{{{'-' if k < 0 else ''}iθ{factor}}}·"
    return f"e^{{{k}iθ{factor}}}·"


class BiTrigPoly:
    """sum c_{k1,k2} e^{i(k1 theta1 + k2 theta2)} with exact coefficients."""

    __slots__ = ("_c",)

    def __init__(self, coeffs=None):
        self._c = {
            (int(k1), int(k2)): F.gq(c)
            for (k1, k2), c in sorted((coeffs or {}).items())
            if F.gq(c)
        }

    @classmethod
    def tensor(cls, u, v):
        return cls({(k1, k2): c1 * c2 for k1, c1 in u.items() for k2, c2 in v.items()})

    @property
    def coeffs(self):
        return dict(self._c)

    def items(self):
        return self._c.items()

    @property
    def is_zero(self):
        return not self._c

    def __eq__(self, other):
        if not isinstance(other, BiTrigPoly):
            return NotImplemented
        return self._c == other._c

    __hash__ = None

    def __add__(self, other):
        out = dict(self._c)
        for k, v in other._c.items():
            out[k] = out.get(k, F.ZERO) + v
        return BiTrigPoly(out)

    def __mul__(self, other):
        out = {}
        for (a1, a2), u in self._c.items():
            for (b1, b2), v in other._c.items():
                key = (a1 + b1, a2 + b2)
                out[key] = out.get(key, F.ZERO) + u * v
        return BiTrigPoly(out)

    def evaluate(self, theta1, theta2):
        t1, t2 = np.broadcast_arrays(np.asarray(theta1, float), np.asarray(theta2, float))
        out = np.zeros(t1.shape, dtype=complex)
        for (k1, k2), c in self._c.items():
            out += F.to_complex(c) * np.exp(1j * (k1 * t1 + k2 * t2))
        return out

    def __repr__(self):
        body = " + ".join(f"({F.fmt(c)})e^{{i({k1}θ1+{k2}θ2)}}" for (k1, k2), c in self._c.items()) or "0"
        return f"BiTrigPoly({body})"


# -- principal symbol maps -----------------------------------------------

def _accumulate(coeffs, k, s):
    coeffs[k] = coeffs[k] + s if k in coeffs else s


def sigma1(a):
    """First principal symbol: a loop in theta1 with values on factor 2."""
    m1, m2 = a.order
    coeffs = {}
    for f, g in a.terms:
        for k, c in principal_at(f, m1).items():
            _accumulate(coeffs, k, g.scale(c))
    return SymbolValuedLoop(1, coeffs, m2)


def sigma2(a):
    """Second principal symbol: a loop in theta2 with values on factor 1."""
    m1, m2 = a.order
    coeffs = {}
    for f, g in a.terms:
        for k, c in principal_at(g, m2).items():
            _accumulate(coeffs, k, f.scale(c))
    return SymbolValuedLoop(2, coeffs, m1)


def tsigma2(loop):
    """Pointwise principal symbol (in factor 2) of a factor-1 loop."""
    if loop.factor != 1:
        raise PreconditionError("tsigma2 acts on loops over factor 1")
    out = {}
    for k1, s in loop.coeffs.items():
        for k2, c in principal_at(s, loop.value_order).items():
            out[(k1, k2)] = out.get((k1, k2), F.ZERO) + c
    return BiTrigPoly(out)


def tsigma1(loop):
    """Pointwise principal symbol (in factor 1) of a factor-2 loop."""
    if loop.factor != 2:
        raise PreconditionError("tsigma1 acts on loops over factor 2")
    out = {}
    for k2, s in loop.coeffs.items():
        for k1, c in principal_at(s, loop.value_order).items():
            out[(k1, k2)] = out.get((k1, k2), F.ZERO) + c
    return BiTrigPoly(out)


def compat_check(F_loop, G_loop):
    """True iff the two loops agree on the torus: tsigma2(F) == tsigma1(G)."""
    return tsigma2(F_loop) == tsigma1(G_loop)


@dataclass
class SigmaPair:
    """Compatible pair (F, G) of principal symbol loops of bi-order (m1, m2)."""

    F: SymbolValuedLoop
    G: SymbolValuedLoop
    order: tuple
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        self.order = (int(self.order[0]), int(self.order[1]))
        if self.F.factor != 1 or self.G.factor != 2:
            raise PreconditionError("SigmaPair needs F over factor 1 and G over factor 2")
        if self.F.value_order != self.order[1] or self.G.value_order != self.order[0]:
            raise PreconditionError("loop value orders do not match the pair order")
        if self.check and not compat_check(self.F, self.G):
            raise IncompatiblePairError("tsigma2(F) != tsigma1(G)")

    @property
    def compatible(self):
        return compat_check(self.F, self.G)

    def common_value(self):
        """The shared torus function tsigma2(F) = tsigma1(G)."""
        return tsigma2(self.F)


def sigma_pair(a):
    return SigmaPair(sigma1(a), sigma2(a), a.order)


def unit_pair():
    one = ShubinSymbol.constant(1)
    return SigmaPair(SymbolValuedLoop(1, {0: one}, 0), SymbolValuedLoop(2, {0: one}, 0), (0, 0))


def sigma_pair_compose(p, q, depth=None):
    """{F_p, G_p} o {F_q, G_q} = {F_p #_2 F_q, G_p #_1 G_q}."""
    for name, pair in (("left", p), ("right", q)):
        if not pair.compatible:
            raise IncompatiblePairError(f"{name} operand is not a compatible pair")
    out = SigmaPair(
        p.F.compose(q.F, depth),
        p.G.compose(q.G, depth),
        (p.order[0] + q.order[0], p.order[1] + q.order[1]),
        check=False,
    )
    if not out.compatible:
        raise IncompatiblePairError("composition lost compatibility (inexact depth?)")
    return out


def reconstruct(p):
    """A symbol with principal pair p: a = chi1 P + chi2 Q - chi1 chi2 R.

    P and Q are the radial extensions of F and G of degree m1 in factor 1
    (resp. m2 in factor 2), R the bihomogeneous extension of the common torus
    value.  The cut-offs live in the polar representation and are recorded
    in ``cutoffs``.
    """
    if not compat_check(p.F, p.G):
        raise IncompatiblePairError("cannot reconstruct from an incompatible pair")
    m1, m2 = p.order
    terms = []
    for k, s in p.F.coeffs.items():
        terms.append((ShubinSymbol.from_terms([(m1, k, 1)]), s))
    for k, s in p.G.coeffs.items():
        terms.append((s, ShubinSymbol.from_terms([(m2, k, 1)])))
    for (k1, k2), c in p.common_value().items():
        terms.append((ShubinSymbol.from_terms([(m1, k1, -c)]), ShubinSymbol.from_terms([(m2, k2, 1)])))
    return BisingularSymbol((m1, m2), terms, cutoffs=("smoothstep", "smoothstep"))


def kernel_order_check(a):
    """Verify that a symbol with vanishing principal pair has order (m1-1, m2-1).

    The symbol is re-canonicalized through its exact bi-expansion and
    regrouped as a tensor sum; the check passes iff every bi-degree of the
    regrouped form (and every unknown tail) sits at or below (m1-1, m2-1) and
    the regrouped symbol equals the input.
    """
    m1, m2 = a.order
    s1, s2 = sigma1(a), sigma2(a)
    if not (s1.is_zero and s2.is_zero):
        return CheckReport(
            passed=False,
            applicable=False,
            details={"reason": "principal symbols do not vanish"},
        )
    tails = a.remainder_orders()
    exact_part = BisingularSymbol(a.order, [(f, g) for f, g in a.terms if f.exact and g.exact])
    if tails:
        # inexact terms: their known components still enter the expansion
        known = []
        for f, g in a.terms:
            if f.exact and g.exact:
                continue
            known.append((_known(f), _known(g)))
        exact_part = exact_part + BisingularSymbol(a.order, known)
    canon = exact_part.canonical()
    exp = canon.bi_expansion()
    top1 = max((j1 for j1, _, _, _ in exp), default=None)
    top2 = max((j2 for _, _, j2, _ in exp), default=None)
    ok = all(j1 <= m1 - 1 and j2 <= m2 - 1 for j1, _, j2, _ in exp)
    ok = ok and all(t1 <= m1 - 1 and t2 <= m2 - 1 for t1, t2 in tails)
    ok = ok and exp == exact_part.bi_expansion()
    lowered = canon.with_order((m1 - 1, m2 - 1)) if ok else None
    return CheckReport(
        passed=ok,
        details={
            "declared_order": (m1, m2),
            "attained": (top1, top2),
            "tails": tails,
            "lowered": lowered,
        },
    )


def _known(s):
    """The stored components of s as an exact symbol."""
    if s.order is None or not s.components:
        return ShubinSymbol.zero()
    return ShubinSymbol(s.order, s.components, exact=True)
