"""Readers and writers for .sym, .bsym, .sig and .kd files.

.sym is the bare symbol literal grammar.  The other three are TOML:

    # .bsym
    order = [1, 1]
    [[terms]]
    f = "1 1 1"
    g = "1 -1 1"

    # .sig
    order = [1, 1]
    [[F]]
    k = 1
    value = "1 1 1"
    [[G]]
    k = 1
    value = "1 1 1"

    # .kd  (kind = "mv" | "sixterm" | "kunneth")
    kind = "mv"
    left = { K0 = { rank = 2 }, K1 = { rank = 2 } }
    right = { K0 = { rank = 2 }, K1 = { rank = 2 } }
    M0 = [[1, -1], [0, 0]]
    M1 = [[1, 0], [0, -1]]

Groups are ``{ rank = r, torsion = [d1, ...] }``; matrices are lists of
rows with columns indexed by source generators.
"""

import sys
from pathlib import Path

from .bisingular import BisingularSymbol, SigmaPair, SymbolValuedLoop
from .errors import ParseError, PreconditionError
from .ktheory import FGAbGroup, IntHom, PullbackData
from .symbols import format_symbol_literal, parse_symbol_literal

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = [
    "read_sym",
    "write_sym",
    "read_bsym",
    "write_bsym",
    "read_sig",
    "write_sig",
    "read_kd",
    "load_any",
]


def _text(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _toml(path):
    try:
        return tomllib.loads(_text(path))
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"{path}: {getattr(exc, 'msg', exc)}", getattr(exc, "lineno", None), getattr(exc, "colno", None)) from None


def _need(doc, key, path, kind=None):
    if key not in doc:
        raise ParseError(f"{path}: missing key {key!r}")
    val = doc[key]
    if kind is not None and not isinstance(val, kind):
        raise ParseError(f"{path}: key {key!r} has the wrong type")
    return val


def _order(doc, path):
    order = _need(doc, "order", path, list)
    if len(order) != 2 or not all(isinstance(m, int) for m in order):
        raise ParseError(f"{path}: order must be two integers")
    return tuple(order)


def _literal(text, where, warnings):
    if not isinstance(text, str):
        raise ParseError(f"{where}: symbol literal must be a string")
    s, w = parse_symbol_literal(text, where)
    warnings.extend(f"{where}: {m}" for m in w)
    return s


def read_sym(path):
    """(ShubinSymbol, warnings) from a .sym file."""
    return parse_symbol_literal(_text(path), str(path))


def write_sym(path, s):
    Path(path).write_text(format_symbol_literal(s), encoding="utf-8")


def read_bsym(path):
    doc = _toml(path)
    order = _order(doc, path)
    warnings, terms = [], []
    for n, t in enumerate(_need(doc, "terms", path, list)):
        if not isinstance(t, dict):
            raise ParseError(f"{path}: terms[{n}] must be a table")
        terms.append((
            _literal(_need(t, "f", path), f"{path}: terms[{n}].f", warnings),
            _literal(_need(t, "g", path), f"{path}: terms[{n}].g", warnings),
        ))
    try:
        return BisingularSymbol(order, terms), warnings
    except PreconditionError as exc:
        raise ParseError(f"{path}: {exc}") from None


def _lit(s):
    return format_symbol_literal(s, inline=True)


def write_bsym(path, a):
    lines = [f"order = [{a.order[0]}, {a.order[1]}]", ""]
    for f, g in a.terms:
        lines += ["[[terms]]", f'f = "{_lit(f)}"', f'g = "{_lit(g)}"', ""]
    Path(path).write_text("\n".join(lines), encoding="utf-8")


def _loop(doc, key, factor, value_order, path, warnings):
    coeffs = {}
    for n, entry in enumerate(doc.get(key, [])):
        if not isinstance(entry, dict) or not isinstance(entry.get("k"), int):
            raise ParseError(f"{path}: {key}[{n}] needs an integer 'k'")
        s = _literal(_need(entry, "value", path), f"{path}: {key}[{n}].value", warnings)
        k = entry["k"]
        coeffs[k] = coeffs[k] + s if k in coeffs else s
    return SymbolValuedLoop(factor, coeffs, value_order)


def read_sig(path):
    """(SigmaPair, warnings); compatibility is checked on construction."""
    doc = _toml(path)
    m1, m2 = _order(doc, path)
    warnings = []
    F = _loop(doc, "F", 1, m2, path, warnings)
    G = _loop(doc, "G", 2, m1, path, warnings)
    return SigmaPair(F, G, (m1, m2)), warnings


def write_sig(path, p):
    lines = [f"order = [{p.order[0]}, {p.order[1]}]", ""]
    for key, loop in (("F", p.F), ("G", p.G)):
        for k, s in loop.coeffs.items():
            lines += [f"[[{key}]]", f"k = {k}", f'value = "{_lit(s)}"', ""]
    Path(path).write_text("\n".join(lines), encoding="utf-8")


def _group(obj, where):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: group must be a table with 'rank' and 'torsion'")
    rank = obj.get("rank", 0)
    torsion = obj.get("torsion", [])
    if not isinstance(rank, int) or not isinstance(torsion, list) or not all(isinstance(d, int) for d in torsion):
        raise ParseError(f"{where}: rank must be an integer and torsion a list of integers")
    return FGAbGroup(rank, tuple(torsion))


def _pair(doc, key, path):
    obj = _need(doc, key, path, dict)
    return _group(obj.get("K0", {}), f"{path}: {key}.K0"), _group(obj.get("K1", {}), f"{path}: {key}.K1")


def _hom(doc, key, source, target, path):
    try:
        if key not in doc:
            return IntHom.zero(source, target)
        M = doc[key]
        if not isinstance(M, list) or not all(isinstance(r, list) for r in M):
            raise ParseError(f"{path}: {key} must be a list of rows")
        if not M:
            M = [[] for _ in range(target.ngens)]
        return IntHom(M, source, target)
    except PreconditionError as exc:
        raise ParseError(f"{path}: {key}: {exc}") from None


def read_kd(path):
    """Diagram file -> (kind, payload).

    mv      -> PullbackData
    sixterm -> (KI, KQ, delta, eps)
    kunneth -> (A, B)
    """
    doc = _toml(path)
    kind = _need(doc, "kind", path, str)
    if kind == "mv":
        left, right = _pair(doc, "left", path), _pair(doc, "right", path)
        M0 = _hom(doc, "M0", left[0], right[0], path)
        M1 = _hom(doc, "M1", left[1], right[1], path)
        return kind, PullbackData(left, right, M0, M1)
    if kind == "sixterm":
        KI, KQ = _pair(doc, "ideal", path), _pair(doc, "quotient", path)
        delta = _hom(doc, "delta", KQ[1], KI[0], path)
        eps = _hom(doc, "eps", KQ[0], KI[1], path)
        return kind, (KI, KQ, delta, eps)
    if kind == "kunneth":
        return kind, (_pair(doc, "A", path), _pair(doc, "B", path))
    raise ParseError(f"{path}: unknown diagram kind {kind!r}")


def load_any(path):
    """Dispatch on extension; returns (object, warnings)."""
    ext = Path(path).suffix
    if ext == ".sym":
        return read_sym(path)
    if ext == ".bsym":
        return read_bsym(path)
    if ext == ".sig":
        return read_sig(path)
    if ext == ".kd":
        return read_kd(path), []
    raise ParseError(f"{path}: unknown file extension {ext!r}")
