"""Fredholm indices: spectral counting on truncations, windings, bidegrees."""

from dataclasses import dataclass, field

import numpy as np

from .bisingular import BiTrigPoly, SigmaPair, SymbolValuedLoop
from .errors import (
    NotEllipticError,
    NotInvertibleError,
    OutsideFormulaScopeError,
    PreconditionError,
    UnreliableError,
)
from .quantization import TruncatedOperator, quantize_poly
from .symbols import CheckReport, ShubinSymbol, TrigPoly, sh_principal

__all__ = [
    "IndexReport",
    "SharpProduct",
    "winding",
    "symbol_winding",
    "analytic_index",
    "sharp_product",
    "index_multiplicativity",
    "family_index",
    "family_index_matrices",
    "bidegree",
    "topological_index",
    "RESIDUAL_LIMIT",
]

RESIDUAL_LIMIT = 0.1
ZERO_TOL = 1e-9
METHODS = ("spectral_gap", "heat_trace", "winding", "bidegree", "det_family")


@dataclass
class IndexReport:
    value: int
    method: str
    residual: float
    reliable: bool = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown index method {self.method!r}")
        self.value = int(self.value)
        self.residual = float(self.residual)
        if self.reliable is None:
            self.reliable = self.residual < RESIDUAL_LIMIT

    def to_dict(self):
        from .symbols import _jsonable

        return {
            "value": self.value,
            "method": self.method,
            "residual": self.residual,
            "reliable": bool(self.reliable),
            "diagnostics": _jsonable(self.diagnostics),
        }

    def to_text(self):
        lines = [
            f"method: {self.method}",
            f"value: {self.value}",
            f"residual: {self.residual:.3e}",
            f"reliable: {'yes' if self.reliable else 'no'}",
        ]
        for k, v in self.diagnostics.items():
            if isinstance(v, float):
                v = f"{v:.6g}"
            lines.append(f"{k}: {v}")
        return "\n".join(lines)

    def __str__(self):
        return self.to_text()


def _finish(report, strict):
    if strict and not report.reliable:
        raise UnreliableError(
            f"{report.method} index not reliable (residual {report.residual:.3g})", report=report
        )
    return report


# -- windings ------------------------------------------------------------

def _arg_increments(values):
    """Principal-branch argument steps of a closed sampled loop."""
    return np.angle(np.roll(values, -1) / values)


def _loop_degree(values):
    steps = _arg_increments(values)
    total = steps.sum() / (2 * np.pi)
    d = int(round(total))
    return d, abs(total - d), float(np.max(np.abs(steps)))


def winding(u, samples=4096, strict=False):
    """Degree of theta -> u(theta) around 0, counterclockwise positive."""
    if not isinstance(u, TrigPoly):
        u = TrigPoly(u)
    theta = 2 * np.pi * np.arange(samples) / samples
    vals = u.evaluate(theta)
    low = float(np.min(np.abs(vals)))
    if low < ZERO_TOL:
        raise NotEllipticError(f"loop vanishes on the grid (min |u| = {low:.3g})")
    d, res, step = _loop_degree(vals)
    # steps near pi mean the grid does not resolve the loop
    reliable = res < RESIDUAL_LIMIT and step < 1.0
    rep = IndexReport(d, "winding", res, reliable, {"samples": samples, "min_abs": low, "max_step": step})
    return _finish(rep, strict)


def symbol_winding(s, samples=4096):
    """Winding of the principal symbol of a Shubin symbol."""
    return winding(sh_principal(s), samples)


# -- analytic index --------------------------------------------------------

@dataclass(frozen=True)
class SharpProduct:
    """Graded external product of two truncated scalar operators.

    D = [[A x 1, -1 x B*], [1 x B, A* x 1]] on two copies of the product
    space.  D*D and DD* are block diagonal with Kronecker-sum blocks, so
    their compressed spectra are sums of factor spectra; ``dense()``
    assembles D itself for cross-checks at small sizes.
    """

    left: TruncatedOperator
    right: TruncatedOperator

    @property
    def sizes(self):
        return self.left.sizes + self.right.sizes

    @property
    def dim(self):
        return 2 * self.left.dim * self.right.dim

    def dense(self):
        A, B = self.left, self.right
        n1, n2 = A.full.shape[0], B.full.shape[0]
        if 2 * n1 * n2 > 4096:
            raise PreconditionError("dense sharp product too large; use the structured path")
        I1, I2 = np.eye(n1), np.eye(n2)
        Af, Bf = A.full, B.full
        full = np.block([
            [np.kron(Af, I2), -np.kron(I1, Bf.conj().T)],
            [np.kron(I1, Bf), np.kron(Af.conj().T, I2)],
        ])
        kk = (A.kept[:, None] * n2 + B.kept[None, :]).ravel()
        kept = np.concatenate([kk, n1 * n2 + kk])
        return TruncatedOperator(
            full, self.sizes, A.buffers + B.buffers, kept, A.quantization, (A, B), "sharp"
        )

    def spectra(self):
        """Eigenvalues of the compressions of D*D and DD*."""
        a1, a2 = (np.linalg.eigvalsh(m) for m in self.left.compressions())
        b1, b2 = (np.linalg.eigvalsh(m) for m in self.right.compressions())

        def ksum(u, v):
            return (u[:, None] + v[None, :]).ravel()

        dd = np.concatenate([ksum(a1, b1), ksum(a2, b2)])
        ddt = np.concatenate([ksum(a2, b1), ksum(a1, b2)])
        return np.sort(dd), np.sort(ddt)


def sharp_product(A, B):
    if A.kind != "scalar" or B.kind != "scalar":
        raise PreconditionError("sharp product takes two scalar truncated operators")
    return SharpProduct(A, B)


def _spectra(A):
    if isinstance(A, SharpProduct):
        return A.spectra()
    m1, m2 = A.compressions()
    return np.linalg.eigvalsh(m1), np.linalg.eigvalsh(m2)


def _select_gap(lam, mu):
    """Largest relative gap of the merged spectrum at or below its median.

    The origin is a virtual lower end, so operators without small
    eigenvalues select the gap (0, lambda_min) and count zero on both sides.
    """
    merged = np.sort(np.clip(np.concatenate([lam, mu]), 0.0, None))
    top = float(merged[-1]) if merged.size else 0.0
    eps = 1e-12 * max(top, 1e-300)
    median = float(np.median(merged))
    ends = np.concatenate([[0.0], merged])
    best = None
    for a, b in zip(ends[:-1], ends[1:]):
        if a > median:
            break
        if b <= eps:
            continue
        a_eff = max(a, eps)
        score = b / a_eff
        if best is None or score > best[0]:
            best = (score, a_eff, float(b))
    if best is None:
        return None
    _, a_eff, b = best
    tau = np.sqrt(a_eff * b)
    return tau, max(a_eff / tau, tau / b), (a_eff, b)


def analytic_index(A, strategy="spectral_gap", tau=None, t=1.0, strict=True):
    """dim ker - dim coker read off the low spectra of A*A and AA*.

    The compressions are exact (P A*A P and P AA* P), so each kernel vector
    shows up as one eigenvalue near 0 while the rest stays above the gap.
    """
    lam, mu = _spectra(A)
    diag = {"sizes": tuple(A.sizes), "dim": int(lam.size)}
    if strategy == "spectral_gap":
        if tau is None:
            sel = _select_gap(lam, mu)
            if sel is None:
                rep = IndexReport(0, "spectral_gap", 1.0, False, dict(diag, gap=None))
                return _finish(rep, strict)
            tau, residual, gap = sel
            diag["gap"] = gap
        else:
            tau = float(tau)
            near = np.concatenate([lam, mu])
            dist = np.min(np.abs(np.log(np.clip(near, 1e-300, None) / tau)))
            residual = float(np.exp(-dist))
        value = int(np.sum(lam < tau)) - int(np.sum(mu < tau))
        diag["tau"] = float(tau)
        diag["kernel_count"] = int(np.sum(lam < tau))
        diag["cokernel_count"] = int(np.sum(mu < tau))
        rep = IndexReport(value, "spectral_gap", residual, None, diag)
    elif strategy == "heat_trace":
        tr = float(np.sum(np.exp(-t * np.clip(lam, 0, None))) - np.sum(np.exp(-t * np.clip(mu, 0, None))))
        value = int(round(tr))
        diag["t"] = float(t)
        diag["trace_difference"] = tr
        rep = IndexReport(value, "heat_trace", abs(tr - value), None, diag)
    else:
        raise PreconditionError(f"unknown strategy {strategy!r}")
    return _finish(rep, strict)


def index_multiplicativity(f, g, N1, N2, strategy="spectral_gap", dense=False):
    """Check ind(f # g) = ind(f) ind(g) for the graded external product."""
    A, B = quantize_poly(f, N1), quantize_poly(g, N2)
    P = sharp_product(A, B)
    ia = analytic_index(A, strategy)
    ib = analytic_index(B, strategy)
    ip = analytic_index(P.dense() if dense else P, strategy)
    ok = ip.value == ia.value * ib.value
    return CheckReport(
        passed=ok,
        worst_ratio=max(ia.residual, ib.residual, ip.residual),
        details={"product": ip.value, "left": ia.value, "right": ib.value, "sizes": (N1, N2)},
    )


# -- families ------------------------------------------------------------

def family_index_matrices(coeffs, samples=1024, cond_cap=1e12, strict=True):
    """Winding of det M(theta) for M(theta) = sum_k e^{ik theta} coeffs[k]."""
    coeffs = {int(k): np.asarray(M, dtype=complex) for k, M in coeffs.items()}
    if not coeffs:
        raise NotInvertibleError("empty loop")
    theta = 2 * np.pi * np.arange(samples) / samples
    phases = np.empty(samples, dtype=complex)
    worst = 0.0
    # measure smallness against the loop's size, not M itself: c*I is
    # perfectly conditioned for any tiny c
    scale = sum(np.linalg.norm(C, 2) for C in coeffs.values()) or 1.0
    for i, th in enumerate(theta):
        M = sum(np.exp(1j * k * th) * C for k, C in coeffs.items())
        smin = np.linalg.svd(M, compute_uv=False)[-1]
        cond = scale / smin if smin > 0 else np.inf
        if not np.isfinite(cond) or cond > cond_cap:
            raise NotInvertibleError(f"loop not invertible at theta={th:.4f} (cond {cond:.3g})")
        worst = max(worst, float(cond))
        sign, _ = np.linalg.slogdet(M)
        phases[i] = sign
    d, res, step = _loop_degree(phases)
    reliable = res < RESIDUAL_LIMIT and step < 1.0
    rep = IndexReport(
        d, "det_family", res, reliable, {"samples": samples, "max_cond": worst, "max_step": step}
    )
    return _finish(rep, strict)


def family_index(L, N, samples=1024, strict=True):
    """Determinant winding of theta -> Op(L(theta)) truncated to size N."""
    if not isinstance(L, SymbolValuedLoop):
        raise PreconditionError("family_index takes a SymbolValuedLoop")
    coeffs = {k: quantize_poly(s, N).matrix for k, s in L.coeffs.items()}
    rep = family_index_matrices(coeffs, samples, strict=strict)
    rep.diagnostics["truncation"] = N
    return rep


def bidegree(u, grid=256, slices=8):
    """(winding in theta1 at theta2 = 0, winding in theta2 at theta1 = 0).

    The same degrees are required on ``slices`` further slices in each
    direction; a mismatch means the grid does not resolve u.
    """
    if not isinstance(u, BiTrigPoly):
        raise PreconditionError("bidegree takes a BiTrigPoly")
    theta = 2 * np.pi * np.arange(grid) / grid
    vals = u.evaluate(theta[:, None], theta[None, :])
    low = float(np.min(np.abs(vals)))
    if low < ZERO_TOL:
        raise NotEllipticError(f"torus function vanishes on the grid (min |u| = {low:.3g})")
    picks = [0] + [(grid * j) // (slices + 1) for j in range(1, slices + 1)]
    d1s = [_loop_degree(vals[:, j])[0] for j in picks]
    d2s = [_loop_degree(vals[i, :])[0] for i in picks]
    if len(set(d1s)) > 1 or len(set(d2s)) > 1:
        raise PreconditionError(f"slice windings disagree: {d1s} / {d2s}")
    return d1s[0], d2s[0]


# -- topological index -------------------------------------------------------

def _ratio_profile(coeffs):
    """Write {k: s_k} as {k: lambda_k} * s0 if all s_k are multiples of one s0."""
    items = list(coeffs.items())
    if not items:
        return None, {}
    s0 = items[0][1]
    j0, k0, c0 = s0.terms()[0]
    lams = {}
    for k, s in items:
        lam = s.component(j0)[k0] / c0
        if not lam or s != s0.scale(lam):
            return None, {}
        lams[k] = lam
    return s0, lams


def _is_scalar_loop(loop):
    return all(
        s.exact and [(j, k) for j, k, _ in s.terms()] == [(0, 0)] for s in loop.coeffs.values()
    )


def topological_index(p, splitting_m=0):
    """Index of a compatible pair from winding / bidegree data.

    External products f # g: winding(sigma(f)) * winding(sigma(g)), pushed
    through l -> beta(l) = (l m, l) and read back with epsilon.  Scalar
    pairs: product of the bidegree of the common torus value.  Other pair
    shapes raise OutsideFormulaScopeError.
    """
    from .ktheory import beta_map, epsilon_map

    if not isinstance(p, SigmaPair):
        raise PreconditionError("topological_index takes a SigmaPair")
    if not p.compatible:
        raise PreconditionError("pair is not compatible")
    diag = {"splitting_m": int(splitting_m)}
    if _is_scalar_loop(p.F) and _is_scalar_loop(p.G):
        d1, d2 = bidegree(p.common_value())
        l = d1 * d2
        diag.update(shape="scalar", bidegree=(d1, d2))
    else:
        g0, lam_f = _ratio_profile(p.F.coeffs)
        f0, lam_g = _ratio_profile(p.G.coeffs)
        if g0 is None or f0 is None:
            raise OutsideFormulaScopeError(
                "pair is neither an external product nor scalar; the index formula is only formal here"
            )
        w1 = winding(TrigPoly(lam_f), strict=True).value
        w2 = winding(TrigPoly(lam_g), strict=True).value
        # the values themselves must be elliptic too
        winding(sh_principal(g0), strict=True)
        winding(sh_principal(f0), strict=True)
        l = w1 * w2
        diag.update(shape="external", windings=(w1, w2))
    k, l2 = beta_map(l, splitting_m)
    diag["beta"] = (k, l2)
    value = epsilon_map(k, l2)
    return IndexReport(value, "bidegree", 0.0, True, diag)
