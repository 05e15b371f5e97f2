"""Reference computations that share no code with the package."""

import itertools
import math
from fractions import Fraction

import numpy as np
from numpy.polynomial import hermite as H
from numpy.polynomial import polynomial as P


def hermite_function_poly(n):
    """Power-basis coefficients p with h_n(x) = p(x) exp(-x^2/2)."""
    c = np.zeros(n + 1)
    c[n] = 1.0
    norm = 1.0 / math.sqrt(2.0**n * math.factorial(n) * math.sqrt(math.pi))
    return H.herm2poly(c) * norm


def _apply_monomial(poly, p, q):
    """x^p (-i d/dx)^q acting on poly(x) exp(-x^2/2); returns complex coefficients."""
    cur = np.asarray(poly, dtype=complex)
    for _ in range(q):
        # d/dx (f e^{-x^2/2}) = (f' - x f) e^{-x^2/2}
        cur = -1j * P.polysub(P.polyder(cur), P.polymulx(cur))
    for _ in range(p):
        cur = P.polymulx(cur)
    return cur


def quadrature_matrix(monomials, N, nodes=120):
    """<h_m, Op(sum c x^p xi^q) h_n> for m, n < N by Gauss-Hermite quadrature."""
    xs, ws = H.hermgauss(nodes)
    basis = [P.polyval(xs, hermite_function_poly(n)) for n in range(N)]
    out = np.zeros((N, N), dtype=complex)
    for n in range(N):
        img = np.zeros_like(xs, dtype=complex)
        for (p, q), c in monomials.items():
            img += c * P.polyval(xs, _apply_monomial(hermite_function_poly(n), p, q))
        for m in range(N):
            out[m, n] = np.sum(ws * basis[m] * img)
    return out


def gaussian_coefficients(N, nodes=120):
    """Hermite coefficients of pi^{-1/4} exp(-x^2/2)."""
    xs, ws = H.hermgauss(nodes)
    g = np.pi**-0.25 * np.ones_like(xs)
    return np.array([np.sum(ws * g * P.polyval(xs, hermite_function_poly(n))) for n in range(N)])


def central_difference(f, x, xi, var, h=1e-5):
    if var == "x":
        return (f(x + h, xi) - f(x - h, xi)) / (2 * h)
    return (f(x, xi + h) - f(x, xi - h)) / (2 * h)


def arg_increment_winding(fun, samples=10000):
    th = np.linspace(0, 2 * np.pi, samples + 1)
    v = fun(th)
    return int(round(np.sum(np.angle(v[1:] / v[:-1])) / (2 * np.pi)))


# -- integer oracles ------------------------------------------------------------

def rational_rank(M):
    rows = [[Fraction(int(x)) for x in r] for r in M]
    if not rows or not rows[0]:
        return 0
    rank, cols = 0, len(rows[0])
    for c in range(cols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                f = rows[r][c] / rows[rank][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def _det(M):
    n = len(M)
    if n == 0:
        return 1
    return sum(
        (-1) ** j * M[0][j] * _det([row[:j] + row[j + 1:] for row in M[1:]]) for j in range(n)
    )


def invariant_factors(M):
    """Nonzero invariant factors via gcds of k x k minors (determinantal divisors)."""
    M = [[int(x) for x in r] for r in M]
    m = len(M)
    n = len(M[0]) if m else 0
    out, prev = [], 1
    for k in range(1, min(m, n) + 1):
        g = 0
        for rs in itertools.combinations(range(m), k):
            for cs in itertools.combinations(range(n), k):
                g = math.gcd(g, _det([[M[r][c] for c in cs] for r in rs]))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def image_size_mod(M, q):
    """|image of (Z/q)^n under M mod q|."""
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[1]
    seen = set()
    for x in itertools.product(range(q), repeat=n):
        seen.add(tuple((M @ np.array(x, dtype=np.int64)) % q) if n else ())
    return len(seen)


def group_count_mod(rank, torsion, q):
    """|G / qG| for G = Z^rank + sum Z/d."""
    out = q**rank
    for d in torsion:
        out *= math.gcd(d, q)
    return out


def finite_kernel_profile(M, src_orders, tgt_orders, ks=(2, 3, 4, 6, 12)):
    """Enumerate ker of M: prod Z/s -> prod Z/t; return |ker| and #{x in ker : kx = 0}."""
    M = np.asarray(M, dtype=np.int64).reshape(len(tgt_orders), len(src_orders))
    tgt = np.array(tgt_orders, dtype=np.int64)
    kernel = []
    for x in itertools.product(*[range(s) for s in src_orders]):
        v = np.array(x, dtype=np.int64)
        img = (M @ v) % tgt if len(tgt_orders) else np.zeros(0)
        if not np.any(img):
            kernel.append(v)
    src = np.array(src_orders, dtype=np.int64)
    prof = {k: sum(1 for v in kernel if not np.any((k * v) % src)) for k in ks}
    return len(kernel), prof


def group_profile(rank, torsion, ks=(2, 3, 4, 6, 12)):
    assert rank == 0
    size = math.prod(torsion) if torsion else 1
    return size, {k: math.prod(math.gcd(k, d) for d in torsion) for k in ks}
