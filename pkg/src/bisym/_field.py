"""Exact Gaussian-rational scalars (sympy's QQ_I) and conversions."""

from fractions import Fraction
import re

from sympy.polys.domains import QQ, QQ_I

from .errors import ParseError

ZERO = QQ_I.zero
ONE = QQ_I.one
I = QQ_I(0, 1)

_RAT = r"\d+(?:/\d+)?"
_COMPLEX_RE = re.compile(
    rf"^(?P<re>[+-]?{_RAT})?(?:(?P<sign>[+-])?(?P<im>{_RAT})?\*?(?P<i>[ij]))?$"
)


def _rational(value):
    if isinstance(value, float):
        value = Fraction(value)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    return QQ.convert(value)


def gq(value, imag=0):
    """Coerce ints, Fractions, floats (exactly), complex and strings to QQ_I."""
    if isinstance(value, type(ZERO)):
        if imag:
            return value + gq(imag) * I
        return value
    if isinstance(value, str):
        out = parse_scalar(value)
        return out + gq(imag) * I if imag else out
    if isinstance(value, complex):
        return QQ_I(_rational(value.real), _rational(value.imag))
    return QQ_I(_rational(value), _rational(imag))


def parse_scalar(text):
    """Parse '3', '-1/2', 'i', '-2i', '1/2+3/4i' into an exact Gaussian rational."""
    s = text.replace(" ", "")
    m = _COMPLEX_RE.match(s)
    if not s or m is None or (m.group("re") is None and m.group("i") is None):
        raise ParseError(f"cannot parse complex literal {text!r}")
    re_part = QQ.zero
    im_part = QQ.zero
    if m.group("re") is not None:
        if m.group("i") is not None and m.group("sign") is None and m.group("im") is None:
            # '3i' or '-1/2i': the whole number is imaginary
            im_part = _frac(m.group("re"))
        else:
            re_part = _frac(m.group("re"))
            if m.group("i") is not None:
                mag = _frac(m.group("im")) if m.group("im") else QQ.one
                im_part = -mag if m.group("sign") == "-" else mag
    elif m.group("i") is not None:
        mag = _frac(m.group("im")) if m.group("im") else QQ.one
        im_part = -mag if m.group("sign") == "-" else mag
    return QQ_I(re_part, im_part)


def _frac(tok):
    neg = tok.startswith("-")
    tok = tok.lstrip("+-")
    if "/" in tok:
        p, q = tok.split("/")
        if int(q) == 0:
            raise ParseError(f"zero denominator in {tok!r}")
        val = QQ(int(p), int(q))
    else:
        val = QQ(int(tok))
    return -val if neg else val


def is_zero(c):
    return not c


def conj(c):
    return QQ_I(c.x, -c.y)


def to_complex(c):
    return complex(float(c.x), float(c.y))


def real_part(c):
    return Fraction(int(c.x.numerator), int(c.x.denominator))


def imag_part(c):
    return Fraction(int(c.y.numerator), int(c.y.denominator))


def fmt(c):
    """Canonical text form used by the literal grammar: '1/2-3/4i', '-i', '0'."""
    re_s = _fmt_rat(c.x)
    if not c.y:
        return re_s
    im = c.y
    mag = _fmt_rat(abs(im))
    mag = "" if mag == "1" else mag
    if not c.x:
        return ("-" if im < 0 else "") + mag + "i"
    return re_s + ("-" if im < 0 else "+") + mag + "i"


def _fmt_rat(q):
    if q.denominator == 1:
        return str(int(q.numerator))
    return f"{int(q.numerator)}/{int(q.denominator)}"


def factorial_inv(k):
    out = QQ.one
    for j in range(2, k + 1):
        out = out / j
    return QQ_I(out, 0)
