"""Kohn-Nirenberg quantization of polynomial symbols on Hermite functions.

x^p xi^q is sent to X^p D^q (all positions to the left), where X and
D = -i d/dx are the tridiagonal position and momentum matrices on the
normalized Hermite functions h_0, h_1, ...  Matrices are assembled at size
N + B and then cropped, so that with B >= total degree the kept entries are
exactly the matrix elements of the infinite operator.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import NotEllipticError, NotPolynomialError, PreconditionError
from .symbols import CheckReport, ShubinSymbol, kn_compose, sh_principal

__all__ = [
    "TruncatedOperator",
    "DecayReport",
    "hermite_ladder_matrices",
    "quantize_poly",
    "quantize_bisingular",
    "composition_consistency",
    "compactness_proxy",
    "write_matrix",
    "read_matrix",
    "MAX_SIZE",
]

MAX_SIZE = 512


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    """A quantized operator on the span of the first N Hermite functions.

    ``full`` holds the buffered assembly; ``kept`` indexes the basis vectors
    of the truncation inside it.  Columns ``full[:, kept]`` and rows
    ``full[kept, :]`` are exact images of the kept basis vectors under the
    operator and its adjoint, which is what the index routines use.
    """

    full: np.ndarray
    sizes: tuple
    buffers: tuple
    kept: np.ndarray
    quantization: str = "KN"
    factors: tuple = None
    kind: str = "scalar"

    def __post_init__(self):
        if not np.all(np.isfinite(self.full)):
            raise PreconditionError("operator has non-finite entries")
        self.full.setflags(write=False)
        self.kept.setflags(write=False)

    @cached_property
    def matrix(self):
        return self.full[np.ix_(self.kept, self.kept)]

    @property
    def columns(self):
        return self.full[:, self.kept]

    @property
    def rows(self):
        return self.full[self.kept, :]

    @property
    def dim(self):
        return len(self.kept)

    @property
    def shape(self):
        return (self.dim, self.dim)

    def adjoint(self):
        return TruncatedOperator(
            np.ascontiguousarray(self.full.conj().T),
            self.sizes,
            self.buffers,
            self.kept.copy(),
            self.quantization,
            None if self.factors is None else tuple(f.adjoint() for f in self.factors),
            self.kind if self.kind != "sharp" else "sharp-adjoint",
        )

    def compressions(self):
        """(P A*A P, P A A* P) restricted to the kept basis."""
        c = self.columns
        r = self.rows
        m1 = c.conj().T @ c
        m2 = r @ r.conj().T
        return 0.5 * (m1 + m1.conj().T), 0.5 * (m2 + m2.conj().T)


@dataclass
class DecayReport:
    passed: bool
    singular_values: dict
    tail: dict
    kth: dict
    index: int
    prediction: float = None
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return bool(self.passed)


def hermite_ladder_matrices(N, B=0):
    """Position X and momentum D = -i d/dx on h_0..h_{N+B-1}.

    x h_n = sqrt((n+1)/2) h_{n+1} + sqrt(n/2) h_{n-1} and
    h_n' = sqrt(n/2) h_{n-1} - sqrt((n+1)/2) h_{n+1}.
    """
    if N < 1 or B < 0:
        raise PreconditionError("need N >= 1 and B >= 0")
    n = N + B
    off = np.sqrt(np.arange(1, n) / 2.0)
    X = np.diag(off, -1) + np.diag(off, 1)
    D = 1j * np.diag(off, -1) - 1j * np.diag(off, 1)
    return X.astype(complex), D


def _check_size(N):
    if N < 1 or N > MAX_SIZE:
        raise PreconditionError(f"truncation size {N} outside 1..{MAX_SIZE}")


def _assemble(monos, n):
    X, D = hermite_ladder_matrices(n, 0)
    xp = {0: np.eye(n, dtype=complex)}
    dq = {0: np.eye(n, dtype=complex)}
    out = np.zeros((n, n), dtype=complex)
    for (p, q), c in monos.items():
        for cache, base, e in ((xp, X, p), (dq, D, q)):
            for j in range(1, e + 1):
                if j not in cache:
                    cache[j] = cache[j - 1] @ base
        out += complex(float(c.x), float(c.y)) * (xp[p] @ dq[q])
    return out


def _degree(monos):
    return max((p + q for p, q in monos), default=0)


def quantize_poly(s, N, buffer=None):
    """Op(s) on the first N Hermite functions (assembled at N + buffer)."""
    _check_size(N)
    monos = s.to_monomials()
    d = _degree(monos)
    B = d if buffer is None else int(buffer)
    if B < d:
        raise PreconditionError(f"buffer {B} smaller than symbol degree {d}")
    full = _assemble(monos, N + B)
    return TruncatedOperator(full, (N,), (B,), np.arange(N))


def _factor_buffers(a):
    b1 = b2 = 0
    for f, g in a.terms:
        b1 = max(b1, _degree(f.to_monomials()))
        b2 = max(b2, _degree(g.to_monomials()))
    return b1, b2


def quantize_bisingular(a, N1, N2):
    """sum_t Op(f_t) (x) Op(g_t) as a Kronecker sum on the product basis."""
    _check_size(N1)
    _check_size(N2)
    B1, B2 = _factor_buffers(a)
    n1, n2 = N1 + B1, N2 + B2
    full = np.zeros((n1 * n2, n1 * n2), dtype=complex)
    for f, g in a.terms:
        full += np.kron(
            quantize_poly(f, N1, B1).full,
            quantize_poly(g, N2, B2).full,
        )
    kept = (np.arange(N1)[:, None] * n2 + np.arange(N2)[None, :]).ravel()
    return TruncatedOperator(full, (N1, N2), (B1, B2), kept, kind="tensor")


def composition_consistency(a, b, N, rtol=1e-10):
    """Compare Op(a) Op(b) with Op(a # b) on the block unaffected by cropping."""
    ab = kn_compose(a, b, None)
    da = _degree(a.to_monomials())
    db = _degree(b.to_monomials())
    n = N - da - db
    if n < 1:
        raise PreconditionError("truncation too small for the degrees involved")
    lhs = (quantize_poly(a, N).matrix @ quantize_poly(b, N).matrix)[:n, :n]
    rhs = quantize_poly(ab, N).matrix[:n, :n]
    err = float(np.linalg.norm(lhs - rhs, 2))
    scale = max(float(np.linalg.norm(lhs, 2)), float(np.linalg.norm(rhs, 2)), 1.0)
    return CheckReport(
        passed=err <= rtol * scale,
        worst_ratio=err / scale,
        details={"block": n, "error": err, "scale": scale, "composed": str(ab)},
    )


def _check_elliptic_base(base):
    if base.order is None or base.order < 0 or base.order % 2:
        raise PreconditionError("compactness proxy needs a base of even non-negative order")
    theta = np.linspace(0, 2 * np.pi, 1024, endpoint=False)
    if np.min(np.abs(sh_principal(base).evaluate(theta))) < 1e-9:
        raise NotEllipticError("base principal symbol vanishes on the circle")


def compactness_proxy(base, Ns, shift=1, index=0, prediction=None, cond_cap=1e12):
    """Singular-value decay of the inverse of Op(base + shift) across truncations.

    ``base`` is a ShubinSymbol (or a BisingularSymbol, quantized with
    N1 = N2 = N).  The inverse of a positive-order elliptic operator is of
    negative order, hence compact: its singular value at index N/2 must
    shrink as N grows.  Order-0 bases are accepted as control cases.
    Passes iff the mid-spectrum singular values strictly decrease with N and,
    when ``prediction`` is given, the singular value at ``index`` does not
    move away from it.
    """
    from .bisingular import BisingularSymbol

    Ns = sorted(int(n) for n in Ns)
    svals, tail, kth = {}, {}, {}
    for N in Ns:
        if isinstance(base, BisingularSymbol):
            for f, g in base.terms:
                _check_elliptic_base(f)
                _check_elliptic_base(g)
            shifted = base + BisingularSymbol((0, 0), [(ShubinSymbol.constant(shift), ShubinSymbol.constant(1))]) if shift else base
            Q = quantize_bisingular(shifted, N, N).matrix
        else:
            _check_elliptic_base(base)
            Q = quantize_poly(base + shift, N).matrix
        cond = np.linalg.cond(Q)
        if not np.isfinite(cond) or cond > cond_cap:
            raise PreconditionError(f"truncation at N={N} is singular (cond {cond:.3g}); use a shift")
        s = np.linalg.svd(np.linalg.inv(Q), compute_uv=False)
        svals[N] = s
        tail[N] = float(s[len(s) // 2])
        kth[N] = float(s[index])
    t = [tail[N] for N in Ns]
    decaying = len(t) >= 2 and all(b < a for a, b in zip(t, t[1:])) and t[-1] <= 0.9 * t[0]
    converging = True
    if prediction is not None:
        errs = [abs(kth[N] - prediction) for N in Ns]
        converging = all(b <= a * (1 + 1e-9) + 1e-14 for a, b in zip(errs, errs[1:]))
    return DecayReport(
        passed=decaying and converging,
        singular_values=svals,
        tail=tail,
        kth=kth,
        index=index,
        prediction=prediction,
        details={"decaying": decaying, "converging": converging},
    )


def write_matrix(path, M):
    """Text container: 'rows cols' header, then one row per line as re im pairs."""
    M = np.asarray(M, dtype=complex)
    with open(path, "w") as fh:
        fh.write(f"{M.shape[0]} {M.shape[1]}\n")
        for row in M:
            fh.write(" ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row) + "\n")


def read_matrix(path):
    with open(path) as fh:
        rows, cols = (int(t) for t in fh.readline().split())
        data = np.loadtxt(fh, ndmin=2) if rows else np.zeros((0, 2 * cols))
    data = data.reshape(rows, 2 * cols)
    return data[:, 0::2] + 1j * data[:, 1::2]
