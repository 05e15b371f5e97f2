"""Classical Shubin symbols on one factor R^1 in exact polar form.

A symbol of order m is stored through its homogeneous components
c_j(theta) r^j, j = m, m-1, ..., m-D, where (x, xi) = r (cos theta, sin theta)
and each angular part c_j is a finite Fourier series (:class:`TrigPoly`)
with Gaussian-rational coefficients.  All algebra is exact; floating point
only appears in :meth:`ShubinSymbol.evaluate` and in quantization.

``exact=True`` means every component below the stored ones is known to
vanish (finite expansions such as polynomials).  Otherwise the symbol is
only known modulo S^{m-D-1} and products/compositions keep track of that.
"""

from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import _field as F
from .errors import ParseError, PreconditionError

__all__ = [
    "TrigPoly",
    "ShubinSymbol",
    "SampleGrid",
    "CheckReport",
    "tp_mul",
    "sh_derivative",
    "sh_mul",
    "kn_compose",
    "sh_principal",
    "principal_at",
    "seminorm_check",
    "weight",
    "monomial",
    "from_monomials",
    "parse_symbol_literal",
    "format_symbol_literal",
    "cutoff",
    "X",
    "XI",
    "Z",
    "ZBAR",
    "ONE",
]


def _exp(k):
    if k in (1, -1):
        return "e^{iθ}" if k == 1 else "e^{-iθ}"
    return f"e^{{{k}iθ}}"


class TrigPoly:
    """Finite Fourier series sum_k c_k e^{ik theta} with exact coefficients.

    Immutable; no zero coefficients are stored.
    """

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs=None):
        out = {}
        for k, c in (coeffs or {}).items():
            c = F.gq(c)
            if c:
                out[int(k)] = c
        self._c = dict(sorted(out.items()))
        self._hash = None

    @classmethod
    def _raw(cls, d):
        obj = cls.__new__(cls)
        obj._c = dict(sorted((k, v) for k, v in d.items() if v))
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, c):
        return cls({0: c})

    @classmethod
    def exp(cls, k, c=1):
        """c e^{ik theta}"""
        return cls({k: c})

    @property
    def coeffs(self):
        return dict(self._c)

    def items(self):
        return self._c.items()

    def __getitem__(self, k):
        return self._c.get(k, F.ZERO)

    @property
    def is_zero(self):
        return not self._c

    def frequencies(self):
        return list(self._c)

    def __eq__(self, other):
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple((k, str(v)) for k, v in self._c.items()))
        return self._hash

    def __add__(self, other):
        out = dict(self._c)
        for k, v in other._c.items():
            out[k] = out.get(k, F.ZERO) + v
        return TrigPoly._raw(out)

    def __neg__(self):
        return TrigPoly._raw({k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = F.gq(c)
        return TrigPoly._raw({k: c * v for k, v in self._c.items()})

    def __mul__(self, other):
        if isinstance(other, TrigPoly):
            return tp_mul(self, other)
        return self.scale(other)

    __rmul__ = scale

    def shift(self, k):
        """Multiply by e^{ik theta}."""
        return TrigPoly._raw({j + k: v for j, v in self._c.items()})

    def conj(self):
        """Pointwise complex conjugate."""
        return TrigPoly._raw({-k: F.conj(v) for k, v in self._c.items()})

    def max_abs_coeff(self):
        return max((abs(F.to_complex(v)) for v in self._c.values()), default=0.0)

    def evaluate(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape, dtype=complex)
        for k, v in self._c.items():
            out += F.to_complex(v) * np.exp(1j * k * theta)
        return out

    def __repr__(self):
        if not self._c:
            return "TrigPoly(0)"
        return "TrigPoly(" + " + ".join(f"({F.fmt(v)}){_exp(k)}" for k, v in self._c.items()) + ")"

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for k, v in self._c.items():
            c = F.fmt(v)
            if k == 0:
                parts.append(c)
            else:
                e = _exp(k)
                parts.append(e if c == "1" else f"({c})" + e)
        return " + ".join(parts)


def tp_mul(a, b):
    """Coefficient convolution of two trig polynomials."""
    out = {}
    for k1, v1 in a._c.items():
        for k2, v2 in b._c.items():
            k = k1 + k2
            out[k] = out.get(k, F.ZERO) + v1 * v2
    return TrigPoly._raw(out)


_TP_ZERO = TrigPoly()


def cutoff(r):
    """Smoothstep excision: 0 for r <= 1/2, 1 for r >= 1, cubic Hermite between."""
    r = np.asarray(r, dtype=float)
    s = np.clip(2.0 * r - 1.0, 0.0, 1.0)
    return s * s * (3.0 - 2.0 * s)


class ShubinSymbol:
    """Polyhomogeneous symbol sum_j c_j(theta) r^j on R^2_(x, xi).

    Parameters
    ----------
    order : int
        Degree of the first stored component.
    components : sequence of TrigPoly
        Angular parts for degrees order, order-1, ..., order-depth.
    exact : bool
        Whether all lower components are known to vanish.

    The constructor canonicalizes: leading zero components lower the order,
    trailing zeros of exact symbols are dropped.  The exact zero symbol has
    ``order is None``.  A non-exact symbol whose known components all vanish
    keeps no components; its ``order`` is then only an upper bound for the
    unknown remainder (depth -1).
    """

    __slots__ = ("order", "components", "exact", "_hash")

    def __init__(self, order, components, exact=True):
        comps = [c if isinstance(c, TrigPoly) else TrigPoly(c) for c in components]
        if order is None:
            if any(not c.is_zero for c in comps):
                raise PreconditionError("zero symbol cannot carry components")
            comps = []
        else:
            order = int(order)
        if order is not None:
            lowest = order - len(comps) + 1
            while comps and comps[0].is_zero:
                comps.pop(0)
                order -= 1
            if exact:
                while comps and comps[-1].is_zero:
                    comps.pop()
                if not comps:
                    order = None
            elif not comps:
                order = lowest - 1
        self.order = order
        self.components = tuple(comps)
        self.exact = bool(exact)
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls):
        return cls(None, (), exact=True)

    @classmethod
    def constant(cls, c):
        return cls(0, [TrigPoly.constant(c)])

    @classmethod
    def from_terms(cls, terms, exact=True):
        """Build from (j, k, c) triples meaning sum c r^j e^{ik theta}."""
        by_deg = {}
        for j, k, c in terms:
            by_deg.setdefault(int(j), {}).setdefault(int(k), F.ZERO)
            by_deg[int(j)][int(k)] += F.gq(c)
        if not by_deg:
            return cls.zero()
        top, bot = max(by_deg), min(by_deg)
        comps = [TrigPoly._raw(by_deg.get(j, {})) for j in range(top, bot - 1, -1)]
        return cls(top, comps, exact=exact)

    # -- structure ----------------------------------------------------
    @property
    def is_zero(self):
        return self.order is None

    @property
    def depth(self):
        return len(self.components) - 1

    @property
    def floor(self):
        """Lowest degree with known content (None for the zero symbol)."""
        if self.order is None:
            return None
        return self.order - len(self.components) + 1

    @property
    def remainder_order(self):
        """Order bound of the unknown tail, None when exact."""
        if self.exact:
            return None
        return self.floor - 1

    @property
    def effective_depth(self):
        return float("inf") if self.exact else self.depth

    def component(self, j):
        """Angular part of degree j (zero outside the stored range if exact)."""
        if self.order is None or j > self.order:
            return _TP_ZERO
        idx = self.order - j
        if idx < len(self.components):
            return self.components[idx]
        if not self.exact:
            raise PreconditionError(f"degree {j} lies below the known depth of this symbol")
        return _TP_ZERO

    def terms(self):
        """(j, k, c) triples of the stored expansion."""
        out = []
        for i, comp in enumerate(self.components):
            j = self.order - i
            out.extend((j, k, c) for k, c in comp.items())
        return out

    def degrees(self):
        if self.order is None:
            return range(0)
        return range(self.order, self.floor - 1, -1)

    def __eq__(self, other):
        if not isinstance(other, ShubinSymbol):
            return NotImplemented
        return (
            self.order == other.order
            and self.components == other.components
            and self.exact == other.exact
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.order, self.components, self.exact))
        return self._hash

    def is_polynomial(self):
        """True iff every r^j e^{ik theta} term is a polynomial in (x, xi)."""
        return self.exact and all(
            j >= 0 and abs(k) <= j and (j - k) % 2 == 0 for j, k, _ in self.terms()
        )

    def total_degree(self):
        return max((j for j, _, _ in self.terms()), default=0)

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, ShubinSymbol):
            other = ShubinSymbol.constant(other)
        return _add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        if not isinstance(other, ShubinSymbol):
            other = ShubinSymbol.constant(other)
        return _add(self, -other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = F.gq(c)
        if self.order is None:
            return self
        if not c:
            return ShubinSymbol.zero() if self.exact else ShubinSymbol(self.floor - 1, [], exact=False)
        return ShubinSymbol(self.order, [p.scale(c) for p in self.components], exact=self.exact)

    def shift_theta(self, k):
        """Multiply every component by e^{ik theta}."""
        if self.order is None:
            return self
        return ShubinSymbol(self.order, [p.shift(k) for p in self.components], exact=self.exact)

    def __mul__(self, other):
        if isinstance(other, ShubinSymbol):
            return sh_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def conj(self):
        """Pointwise complex conjugate."""
        if self.order is None:
            return self
        return ShubinSymbol(self.order, [p.conj() for p in self.components], exact=self.exact)

    def truncate(self, floor):
        """Forget components below ``floor``; exact only if nothing was dropped."""
        if self.order is None:
            return self
        if self.floor >= floor:
            return self
        kept = [self.component(j) for j in range(self.order, floor - 1, -1)]
        dropped = any(not self.component(j).is_zero for j in range(floor - 1, self.floor - 1, -1))
        exact = self.exact and not dropped
        if exact:
            return ShubinSymbol(self.order, kept, exact=True)
        if self.order < floor:
            return ShubinSymbol(floor - 1, [], exact=False)
        return ShubinSymbol(self.order, kept, exact=False)

    # -- numerics -----------------------------------------------------
    def evaluate_polar(self, r, theta):
        """Sum c_j(theta) r^j without the excision (meaningful for r >= 1)."""
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(np.broadcast(r, theta).shape, dtype=complex)
        for j in self.degrees():
            comp = self.component(j)
            if not comp.is_zero:
                out = out + comp.evaluate(theta) * r ** j
        return out

    def evaluate(self, x, xi):
        """Evaluate at (x, xi); below r = 1 the smoothstep excision applies."""
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        r = np.hypot(x, xi)
        theta = np.arctan2(xi, x)
        chi = cutoff(r)
        safe_r = np.where(r > 0.25, r, 1.0)
        return chi * self.evaluate_polar(safe_r, theta)

    def to_monomials(self):
        """Coefficients {(p, q): c} with symbol = sum c x^p xi^q (polynomial class only)."""
        from .errors import NotPolynomialError

        out = {}
        for j, k, c in self.terms():
            if not (j >= 0 and abs(k) <= j and (j - k) % 2 == 0) or not self.exact:
                raise NotPolynomialError(
                    f"component r^{j} {_exp(k)} is not a polynomial in (x, ξ)"
                )
            a, b = (j + k) // 2, (j - k) // 2
            for (p, q), v in _zzbar_monomials(a, b).items():
                out[(p, q)] = out.get((p, q), F.ZERO) + c * v
        return {pq: v for pq, v in sorted(out.items()) if v}

    def __repr__(self):
        if self.order is None:
            return "ShubinSymbol(0)"
        tail = "" if self.exact else f" + O(r^{self.floor - 1})"
        body = "; ".join(f"{F.fmt(c)} r^{j} {_exp(k)}" for j, k, c in self.terms())
        return f"ShubinSymbol(order={self.order}: {body or '0'}{tail})"

    def __str__(self):
        if self.order is None:
            return "0"
        if self.is_polynomial():
            return format_polynomial(self.to_monomials())
        return format_symbol_literal(self, inline=True) + ("" if self.exact else f" + O(r^{self.floor - 1})")


def _zzbar_monomials(a, b):
    """(x + i xi)^a (x - i xi)^b expanded as {(p, q): c} for x^p xi^q."""
    out = {}
    for s in range(a + 1):
        cs = F.gq(comb(a, s)) * F.I ** s
        for t in range(b + 1):
            ct = F.gq(comb(b, t)) * (-F.I) ** t
            key = (a + b - s - t, s + t)
            out[key] = out.get(key, F.ZERO) + cs * ct
    return out


def _add(a, b):
    if a.order is None:
        return b
    if b.order is None:
        return a
    top = max(a.order, b.order)
    floors = [s.floor for s in (a, b) if not s.exact]
    if floors:
        low = max(floors)
        exact = False
    else:
        low = min(a.floor, b.floor)
        exact = True
    comps = []
    for j in range(top, low - 1, -1):
        comps.append(_component_or_zero(a, j) + _component_or_zero(b, j))
    if not comps:
        return ShubinSymbol(low - 1, [], exact=False)
    return ShubinSymbol(top, comps, exact=exact)


def _component_or_zero(s, j):
    if s.order is None or j > s.order or j < s.floor:
        return _TP_ZERO
    return s.components[s.order - j]


def sh_mul(a, b):
    """Pointwise product; orders add, depth is the minimum of the inexact depths."""
    if a.order is None or b.order is None:
        return ShubinSymbol.zero()
    top = a.order + b.order
    if a.exact and b.exact:
        low = a.floor + b.floor
        exact = True
    else:
        d = min(s.depth for s in (a, b) if not s.exact)
        low = top - d
        exact = False
    buckets = {}
    for ja in range(a.order, a.floor - 1, -1):
        ca = a.components[a.order - ja]
        if ca.is_zero:
            continue
        for jb in range(b.order, b.floor - 1, -1):
            j = ja + jb
            if j < low:
                break
            cb = b.components[b.order - jb]
            if cb.is_zero:
                continue
            prod = tp_mul(ca, cb)
            buckets[j] = buckets[j] + prod if j in buckets else prod
    if low > top:
        return ShubinSymbol(low - 1, [], exact=False)
    comps = [buckets.get(j, _TP_ZERO) for j in range(top, low - 1, -1)]
    return ShubinSymbol(top, comps, exact=exact)


def _d_component(comp, j, var):
    """Derivative of c(theta) r^j; returns the angular part of degree j - 1."""
    out = {}
    half = F.gq(1, 0) / 2
    for k, c in comp.items():
        up = F.gq(j - k) * half * c  # coefficient of e^{i(k+1)theta}
        down = F.gq(j + k) * half * c  # coefficient of e^{i(k-1)theta}
        if var == "xi":
            up = up * (-F.I)
            down = down * F.I
        out[k + 1] = out.get(k + 1, F.ZERO) + up
        out[k - 1] = out.get(k - 1, F.ZERO) + down
    return TrigPoly._raw(out)


def sh_derivative(s, var):
    """d/dx or d/dxi of a symbol; ``var`` is 'x' or 'xi'.

    In polar form d/dx = cos(theta) d/dr - (sin(theta)/r) d/dtheta and
    d/dxi = sin(theta) d/dr + (cos(theta)/r) d/dtheta, so r^j e^{ik theta}
    goes to a combination of r^{j-1} e^{i(k +- 1) theta}.
    """
    if var in ("ξ", "xi", "ξ"):
        var = "xi"
    elif var != "x":
        raise ValueError(f"unknown variable {var!r}")
    if s.order is None:
        return s
    comps = [_d_component(s.components[i], s.order - i, var) for i in range(len(s.components))]
    if not comps:
        return ShubinSymbol(s.floor - 2, [], exact=False)
    return ShubinSymbol(s.order - 1, comps, exact=s.exact)


def _nth_derivative(s, var, n):
    for _ in range(n):
        s = sh_derivative(s, var)
    return s


_FULL_DEPTH_CAP = 64


def kn_compose(a, b, depth=None):
    """Kohn-Nirenberg composition a # b ~ sum_k (1/k!) d_xi^k a . D_x^k b.

    The k-th term has order ord(a) + ord(b) - 2k.  The expansion is kept down
    to homogeneity ord(a) + ord(b) - depth.  ``depth=None`` means full: for
    exact operands the series is summed until it terminates (polynomial
    symbols), otherwise the smaller operand depth is used.
    """
    if a.order is None or b.order is None:
        return ShubinSymbol.zero()
    top = a.order + b.order
    inexact = [s.depth for s in (a, b) if not s.exact]
    info_depth = min(inexact) if inexact else None
    if depth is None and info_depth is None:
        out = ShubinSymbol.zero()
        for k in range(_FULL_DEPTH_CAP + 1):
            term = _kn_term(a, b, k)
            if term is None:
                return out
            out = out + term
        raise PreconditionError("composition series does not terminate; pass a finite depth")
    if depth is None:
        depth = info_depth
    depth = int(depth)
    if depth < 0:
        raise PreconditionError("depth must be non-negative")
    if info_depth is not None:
        depth = min(depth, info_depth)
    low = top - depth
    out = ShubinSymbol.zero()
    terminated = False
    for k in range(depth // 2 + 2):
        term = _kn_term(a, b, k)
        if term is None:
            terminated = True
            break
        if k <= depth // 2:
            out = out + term
    out = out.truncate(low)
    if info_depth is not None or not terminated:
        out = _as_inexact(out, low)
    return out


def _kn_term(a, b, k):
    """(-i)^k / k! d_xi^k a . d_x^k b, or None once a derivative vanishes."""
    da = _nth_derivative(a, "xi", k)
    db = _nth_derivative(b, "x", k)
    if da.is_zero or db.is_zero:
        return None
    return sh_mul(da, db).scale((-F.I) ** k * F.factorial_inv(k))


def _as_inexact(s, low):
    if not s.exact:
        return s
    if s.order is None:
        return ShubinSymbol(low - 1, [], exact=False)
    return ShubinSymbol(s.order, [_component_or_zero(s, j) for j in range(s.order, low - 1, -1)], exact=False)


def sh_principal(s):
    """Leading angular part c_m (zero TrigPoly for the zero symbol)."""
    if s.order is None or not s.components:
        return _TP_ZERO
    return s.components[0]


def principal_at(s, m):
    """Degree-m component of a symbol of order <= m."""
    if s.order is None or s.order < m:
        return _TP_ZERO
    if s.order > m:
        raise PreconditionError(f"symbol has order {s.order} > {m}")
    return sh_principal(s)


ONE = ShubinSymbol.constant(1)
Z = ShubinSymbol(1, [TrigPoly.exp(1)])  # x + i xi
ZBAR = ShubinSymbol(1, [TrigPoly.exp(-1)])  # x - i xi
X = ShubinSymbol(1, [TrigPoly({1: F.gq(1, 0) / 2, -1: F.gq(1, 0) / 2})])
XI = ShubinSymbol(1, [TrigPoly({1: -F.I / 2, -1: F.I / 2})])


def monomial(p, q):
    """x^p xi^q as a symbol."""
    out = ONE
    for _ in range(p):
        out = sh_mul(out, X)
    for _ in range(q):
        out = sh_mul(out, XI)
    return out


def from_monomials(coeffs):
    """Symbol sum c x^p xi^q from {(p, q): c}."""
    out = ShubinSymbol.zero()
    for (p, q), c in coeffs.items():
        out = out + monomial(p, q).scale(c)
    return out


def weight(s, depth=None):
    """<x, xi>^{2s} = (1 + r^2)^s via the binomial series r^{2s} sum_k C(s, k) r^{-2k}.

    Exact for s >= 0; for s < 0 the series is cut after ``depth`` degrees.
    """
    s = int(s)
    if s >= 0:
        return ShubinSymbol.from_terms([(2 * s - 2 * k, 0, comb(s, k)) for k in range(s + 1)])
    if depth is None:
        raise PreconditionError("negative weight powers need a finite depth")
    terms = []
    coef = F.ONE
    for k in range(depth // 2 + 1):
        terms.append((2 * s - 2 * k, 0, coef))
        coef = coef * F.gq(s - k) / (k + 1)
    comps = ShubinSymbol.from_terms(terms)
    return ShubinSymbol(2 * s, [comps.component(j) for j in range(2 * s, 2 * s - depth - 1, -1)], exact=False)


# -- seminorm estimates ------------------------------------------------

@dataclass(frozen=True)
class SampleGrid:
    radii: tuple
    angles: tuple

    @classmethod
    def default(cls, n_radii=25, n_angles=32, r_max=1e6):
        radii = tuple(np.geomspace(1.0, r_max, n_radii))
        angles = tuple(np.linspace(0, 2 * np.pi, n_angles, endpoint=False))
        return cls(radii, angles)

    def points(self):
        r, t = np.meshgrid(np.asarray(self.radii), np.asarray(self.angles), indexing="ij")
        return r.ravel(), t.ravel()


@dataclass
class CheckReport:
    """Outcome of a verification routine."""

    passed: bool
    worst_ratio: float = 0.0
    applicable: bool = True
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return bool(self.passed)

    def to_dict(self):
        return {
            "passed": bool(self.passed),
            "applicable": bool(self.applicable),
            "worst_ratio": float(self.worst_ratio),
            "details": _jsonable(self.details),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if obj is None or isinstance(obj, (str, int, float, bool)):
        return obj
    return str(obj)


def seminorm_check(s, claimed_order, grid=None, cap=1e3, max_derivative=2):
    """Check |d_x^b d_xi^a s| <= C <x, xi>^{m - a - b} on a grid with r >= 1.

    Derivatives are symbolic, evaluation numeric.  Passes iff the worst ratio
    stays below ``cap``.
    """
    grid = grid or SampleGrid.default()
    r, theta = grid.points()
    if np.any(r < 1.0):
        raise PreconditionError("seminorm grid must satisfy r >= 1")
    w = np.sqrt(1.0 + r * r)
    worst = 0.0
    per_index = {}
    for total in range(max_derivative + 1):
        for b in range(total + 1):
            a = total - b
            d = _nth_derivative(_nth_derivative(s, "x", b), "xi", a)
            vals = np.abs(d.evaluate_polar(r, theta)) if not d.is_zero else np.zeros_like(r)
            ratio = float(np.max(vals / w ** (claimed_order - total)))
            per_index[f"dx^{b} dxi^{a}"] = ratio
            worst = max(worst, ratio)
    return CheckReport(passed=worst <= cap, worst_ratio=worst, details={"ratios": per_index, "cap": cap})


# -- literal grammar ---------------------------------------------------

def parse_symbol_literal(text, source="<literal>"):
    """Parse the symbol literal grammar.

    One term per line (or ';'-separated): ``j k c`` with c a complex literal
    such as ``1``, ``-1/2``, ``i``, ``1/2-3/4i``, or ``j k re im``.  '#'
    starts a comment.  Returns ``(symbol, warnings)``; duplicate (j, k) pairs
    are summed and zero coefficients dropped, each with a warning.
    """
    seen = {}
    warnings = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        col = 1
        for chunk in line.split(";"):
            toks = chunk.split()
            if not toks:
                col += len(chunk) + 1
                continue
            if len(toks) not in (3, 4):
                raise ParseError(
                    f"{source}: expected 'j k c' or 'j k re im', got {chunk.strip()!r}",
                    lineno,
                    col + len(chunk) - len(chunk.lstrip()),
                )
            try:
                j, k = int(toks[0]), int(toks[1])
            except ValueError:
                raise ParseError(f"{source}: degree and frequency must be integers", lineno, col) from None
            try:
                c = F.parse_scalar(toks[2]) if len(toks) == 3 else F.gq(F.parse_scalar(toks[2]).x, F.parse_scalar(toks[3]).x)
            except ParseError as exc:
                raise ParseError(f"{source}: {exc}", lineno, col) from None
            if (j, k) in seen:
                warnings.append(f"line {lineno}: duplicate term (j={j}, k={k}) summed")
                seen[(j, k)] += c
            else:
                seen[(j, k)] = c
            col += len(chunk) + 1
    for (j, k), c in seen.items():
        if not c:
            warnings.append(f"term (j={j}, k={k}) has zero coefficient and was dropped")
    sym = ShubinSymbol.from_terms([(j, k, c) for (j, k), c in seen.items()])
    return sym, warnings


def format_symbol_literal(s, inline=False):
    terms = [f"{j} {k} {F.fmt(c)}" for j, k, c in s.terms()]
    if not terms:
        return "0 0 0" if not inline else "0"
    return "; ".join(terms) if inline else "\n".join(terms) + "\n"


def format_polynomial(coeffs, x="x", xi="ξ"):
    """Human form of {(p, q): c}, e.g. 'xξ - i'."""
    if not coeffs:
        return "0"
    parts = []
    for (p, q), c in sorted(coeffs.items(), key=lambda t: (-(t[0][0] + t[0][1]), -t[0][0])):
        mono = (x if p == 1 else f"{x}^{p}" if p else "") + (xi if q == 1 else f"{xi}^{q}" if q else "")
        cs = F.fmt(c)
        if mono and cs == "1":
            term = mono
        elif mono and cs == "-1":
            term = "-" + mono
        elif mono:
            term = (f"({cs})" if ("+" in cs[1:] or "-" in cs[1:]) else cs) + mono
        else:
            term = cs
        parts.append(term)
    out = parts[0]
    for t in parts[1:]:
        out += " - " + t[1:] if t.startswith("-") else " + " + t
    return out
