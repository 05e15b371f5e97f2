"""Command-line front-end: ``bisym symbol|index|ktheory|demo``.

Exit codes: 0 ok, 2 parse or configuration error, 3 numerically
unreliable result, 4 violated precondition.
"""

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .bisingular import BisingularSymbol, SigmaPair, bs_compose, kernel_order_check, sigma_pair
from .errors import ParseError, PreconditionError, UnreliableError
from .formats import load_any, read_kd
from .index import (
    analytic_index,
    family_index,
    index_multiplicativity,
    symbol_winding,
    topological_index,
)
from .ktheory import (
    IntHom,
    hom_cokernel,
    hom_kernel,
    kunneth_torsion_free,
    mayer_vietoris,
    paper_instance,
    six_term_solve,
    snf,
)
from .quantization import (
    MAX_SIZE,
    compactness_proxy,
    composition_consistency,
    quantize_bisingular,
    quantize_poly,
)
from .symbols import (
    ONE,
    ShubinSymbol,
    Z,
    ZBAR,
    _jsonable,
    kn_compose,
    seminorm_check,
    sh_mul,
    sh_principal,
)

EXIT_OK, EXIT_PARSE, EXIT_UNRELIABLE, EXIT_PRECONDITION = 0, 2, 3, 4

DEMO_SCHEMA = {
    "type": "object",
    "required": ["command", "quick", "passed", "checks"],
    "properties": {
        "command": {"const": "demo"},
        "quick": {"type": "boolean"},
        "passed": {"type": "boolean"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "passed", "detail"],
                "properties": {
                    "name": {"type": "string"},
                    "passed": {"type": "boolean"},
                    "detail": {"type": "string"},
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}


@dataclass
class RunConfig:
    command: str
    action: str = None
    inputs: list = field(default_factory=list)
    N: int = 64
    N1: int = 48
    N2: int = 48
    depth: object = None
    tau: float = None
    t: float = 1.0
    residual_cap: float = 0.1
    splitting_m: int = 0
    strategy: str = "spectral_gap"
    json: bool = False

    def validate(self):
        for name in ("N", "N1", "N2"):
            v = getattr(self, name)
            if not 1 <= v <= MAX_SIZE:
                raise ParseError(f"{name} = {v} outside 1..{MAX_SIZE}")
        for name in ("tau", "t", "residual_cap"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ParseError(f"{name} must be positive")


class Output:
    """Collects one structured record; renders it as text or JSON."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.record = {"command": cfg.command}
        if cfg.action:
            self.record["action"] = cfg.action
        self.lines = []
        self.warnings = []

    def text(self, line):
        self.lines.append(line)

    def emit(self):
        if self.warnings:
            self.record["warnings"] = list(self.warnings)
        if self.cfg.json:
            print(json.dumps(_jsonable(self.record), sort_keys=True, ensure_ascii=False))
        else:
            for w in self.warnings:
                print(f"warning: {w}", file=sys.stderr)
            print("\n".join(self.lines))


def _load(path, out, kinds):
    obj, warnings = load_any(path)
    out.warnings.extend(warnings)
    if not isinstance(obj, kinds):
        raise ParseError(f"{path}: wrong kind of input for this command")
    return obj


def _depth(value):
    if value is None or value == "full":
        return None
    try:
        d = int(value)
    except ValueError:
        raise ParseError(f"depth must be 'full' or an integer, got {value!r}") from None
    if d < 0:
        raise ParseError("depth must be non-negative")
    return d


# -- symbol ----------------------------------------------------------------

def cmd_symbol(cfg, args, out):
    kinds = (ShubinSymbol, BisingularSymbol)
    objs = [_load(p, out, kinds) for p in cfg.inputs]
    a = objs[0]
    if cfg.action == "check":
        if isinstance(a, BisingularSymbol):
            rep = kernel_order_check(a)
            out.text(f"kernel order check: {'pass' if rep.passed else 'fail'}"
                     + ("" if rep.applicable else " (principal symbols do not vanish)"))
        else:
            order = a.order if args.order is None else args.order
            if order is None:
                order = 0
            rep = seminorm_check(a, order)
            out.text(f"order {order} check: {'pass' if rep.passed else 'fail'} (worst ratio {rep.worst_ratio:.3g})")
        out.record["report"] = rep.to_dict()
        return EXIT_OK
    if cfg.action == "principal":
        if isinstance(a, BisingularSymbol):
            p = sigma_pair(a)
            out.text(f"sigma1: {p.F}")
            out.text(f"sigma2: {p.G}")
            out.text(f"compatible: {p.compatible}")
            out.record["principal"] = {"sigma1": repr(p.F), "sigma2": repr(p.G), "compatible": p.compatible}
        else:
            pr = sh_principal(a)
            out.text(str(pr))
            out.record["principal"] = str(pr)
        return EXIT_OK
    if cfg.action == "compose":
        if len(objs) != 2 or type(objs[0]) is not type(objs[1]):
            raise ParseError("compose needs two inputs of the same kind")
        if isinstance(a, BisingularSymbol):
            c = bs_compose(objs[0], objs[1], cfg.depth)
            out.text(repr(c))
            out.record["result"] = repr(c)
        else:
            c = kn_compose(objs[0], objs[1], cfg.depth)
            text = str(c)
            out.text(text)
            out.record["result"] = text
            out.record["terms"] = [[j, k, str(v)] for j, k, v in c.terms()]
            out.record["exact"] = c.exact
        return EXIT_OK
    raise ParseError(f"unknown symbol action {cfg.action!r}")


# -- index -------------------------------------------------------------------

def _report_exit(rep, cfg, out):
    reliable = rep.reliable and rep.residual < cfg.residual_cap
    out.record["report"] = rep.to_dict()
    out.text(rep.to_text())
    return EXIT_OK if reliable else EXIT_UNRELIABLE


def cmd_index(cfg, args, out):
    if cfg.action == "analytic":
        a = _load(cfg.inputs[0], out, (ShubinSymbol, BisingularSymbol))
        A = quantize_poly(a, cfg.N) if isinstance(a, ShubinSymbol) else quantize_bisingular(a, cfg.N1, cfg.N2)
        rep = analytic_index(A, cfg.strategy, tau=cfg.tau, t=cfg.t, strict=False)
        if isinstance(a, ShubinSymbol):
            w = symbol_winding(a)
            rep.diagnostics["principal_winding"] = w.value
        return _report_exit(rep, cfg, out)
    if cfg.action == "topological":
        obj = _load(cfg.inputs[0], out, (BisingularSymbol, object))
        p = sigma_pair(obj) if isinstance(obj, BisingularSymbol) else obj
        rep = topological_index(p, cfg.splitting_m)
        return _report_exit(rep, cfg, out)
    if cfg.action == "family":
        obj = _load(cfg.inputs[0], out, object)
        if isinstance(obj, BisingularSymbol):
            obj = sigma_pair(obj)
        if not isinstance(obj, SigmaPair):
            raise ParseError(f"{cfg.inputs[0]}: 'family' needs a .sig or .bsym file")
        loop = obj.F if args.loop == "F" else obj.G
        rep = family_index(loop, cfg.N, strict=False)
        return _report_exit(rep, cfg, out)
    if cfg.action == "multiplicativity":
        if len(cfg.inputs) != 2:
            raise ParseError("multiplicativity needs two .sym files")
        f, g = (_load(p, out, ShubinSymbol) for p in cfg.inputs)
        rep = index_multiplicativity(f, g, cfg.N1, cfg.N2, cfg.strategy)
        d = rep.details
        out.text(f"{d['product']} = {d['left']} x {d['right']}: {'holds' if rep.passed else 'FAILS'}")
        out.record["report"] = rep.to_dict()
        return EXIT_OK if rep.passed else EXIT_UNRELIABLE
    raise ParseError(f"unknown index action {cfg.action!r}")


# -- ktheory -------------------------------------------------------------------

def _solve_out(res, out, names):
    for key, name in names:
        out.text(f"{name} ≅ {res[key]}")
    out.record["groups"] = {k: res[k].to_dict() for k, _ in names}
    out.record["ambiguity_flag"] = res.ambiguity_flag
    out.record["audit"] = res.audit()
    if res.ambiguity_flag:
        for label, (sub, quot) in res.bounds.items():
            out.warnings.append(f"{label}: extension of {quot} by {sub} not determined; split form reported")


def cmd_ktheory(cfg, args, out):
    if cfg.action == "paper":
        rep = paper_instance()
        out.text(rep.to_text())
        out.record["report"] = rep.to_dict()
        return EXIT_OK
    if not cfg.inputs:
        raise ParseError(f"ktheory {cfg.action} needs a diagram file")
    kind, payload = read_kd(cfg.inputs[0])
    if kind != cfg.action:
        raise ParseError(f"{cfg.inputs[0]}: diagram kind {kind!r} does not match {cfg.action!r}")
    if kind == "mv":
        _solve_out(mayer_vietoris(payload), out, [("K0", "K0(Σ)"), ("K1", "K1(Σ)")])
    elif kind == "sixterm":
        _solve_out(six_term_solve(*payload), out, [("K0", "K0(A)"), ("K1", "K1(A)")])
    else:
        K0, K1 = kunneth_torsion_free(*payload)
        out.text(f"K0 ≅ {K0}")
        out.text(f"K1 ≅ {K1}")
        out.record["groups"] = {"K0": K0.to_dict(), "K1": K1.to_dict()}
    return EXIT_OK


# -- demo -------------------------------------------------------------------

def _zpow(k):
    s = ONE
    for _ in range(abs(k)):
        s = sh_mul(s, Z if k > 0 else ZBAR)
    return s


def _demo_checks(quick):
    from .bisingular import external_product, reconstruct
    from .sampling import random_cancelling_bisingular, random_compatible_pair, random_poly_symbol

    checks = []

    def add(name, ok, detail):
        checks.append({"name": name, "passed": bool(ok), "detail": detail})

    rep = paper_instance()
    g = rep.groups
    ok = (
        str(g["Σ"][0]) == "ℤ" and str(g["Σ"][1]) == "ℤ"
        and all(str(g[n][0]) == "ℤ" and str(g[n][1]) == "0" for n in ("A^{-1,-1}", "A^{-1,0}", "A^{0,-1}", "A^{0,0}"))
        and all(rep.audits.values())
    )
    add("K-theory of the bisingular algebras", ok, f"K(Σ) = ({g['Σ'][0]}, {g['Σ'][1]}), K(A^{{0,0}}) = ({g['A^{0,0}'][0]}, {g['A^{0,0}'][1]})")
    h = IntHom.free([[1, -1], [0, 0]])
    add("Mayer-Vietoris map", str(hom_kernel(h)) == "ℤ" and str(hom_cokernel(h)) == "ℤ",
        f"ker = {hom_kernel(h)}, coker = {hom_cokernel(h)}")
    rng = np.random.default_rng(7)
    n_snf = 50 if quick else 200
    for _ in range(n_snf):
        snf(rng.integers(-5, 6, size=(int(rng.integers(1, 6)), int(rng.integers(1, 6)))))
    add("Smith normal form self-checks", True, f"{n_snf} random instances")
    if quick:
        return checks

    n_bad = sum(not kernel_order_check(random_cancelling_bisingular(rng)).passed for _ in range(40))
    add("principal symbols cancel => order drops", n_bad == 0, f"{40 - n_bad}/40")
    n_bad = 0
    for _ in range(20):
        p = random_compatible_pair(rng)
        n_bad += sigma_pair(reconstruct(p)) != p
    add("pair reconstruction round trip", n_bad == 0, f"{20 - n_bad}/20")

    bad = []
    for k in range(-2, 3):
        A = quantize_poly(_zpow(k), 48)
        vals = (analytic_index(A).value, analytic_index(A, "heat_trace").value, symbol_winding(_zpow(k)).value)
        if vals != (k, k, k):
            bad.append((k, vals))
    add("analytic index of (x±iξ)^k", not bad, "k = -2..2 at N = 48, both strategies, winding" + (f"; bad {bad}" if bad else ""))

    bad = [(a, b) for a in range(-2, 3) for b in range(-2, 3) if not index_multiplicativity(_zpow(a), _zpow(b), 48, 48).passed]
    add("index multiplicativity", not bad, "25 cases at N1 = N2 = 48")

    p = sigma_pair(external_product(Z, Z))
    ta = [topological_index(p, m).value for m in (0, 1, 2)]
    an = analytic_index(quantize_poly(Z, 48)).value ** 2
    add("topological = analytic", ta == [an] * 3 == [1] * 3, f"topological {ta}, analytic {an}")

    worst = max(
        composition_consistency(random_poly_symbol(rng, 3), random_poly_symbol(rng, 3), 32).worst_ratio
        for _ in range(10)
    )
    add("Op(a)Op(b) = Op(a#b)", worst <= 1e-10, f"worst relative error {worst:.2e}")

    osc = kn_compose(Z, ZBAR) + (-1)  # x^2 + xi^2
    dec = compactness_proxy(osc, [16, 32, 64], shift=1)
    ctrl = compactness_proxy(ONE, [16, 32, 64], shift=0)
    add("compactness proxy", dec.passed and not ctrl.passed, f"tail {dec.tail[64]:.3g} at N = 64, identity control fails")
    return checks


def cmd_demo(cfg, args, out):
    t0 = time.perf_counter()
    checks = _demo_checks(args.quick)
    passed = all(c["passed"] for c in checks)
    out.record = {"command": "demo", "quick": bool(args.quick), "passed": passed, "checks": checks}
    width = max(len(c["name"]) for c in checks)
    for c in checks:
        out.text(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']:<{width}}  {c['detail']}")
    out.text(f"{'all checks passed' if passed else 'some checks FAILED'} ({time.perf_counter() - t0:.1f} s)")
    return EXIT_OK if passed else EXIT_UNRELIABLE


# -- entry ---------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_PARSE)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="structured output on stdout")

    p = _Parser(prog="bisym", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"bisym {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("symbol", parents=[common], help="symbol checks, principal parts, composition")
    s.add_argument("action", choices=["check", "principal", "compose"])
    s.add_argument("inputs", nargs="+", help=".sym or .bsym files")
    s.add_argument("--order", type=int, help="claimed order for 'check'")
    s.add_argument("--depth", default="full", help="'full' or number of expansion terms")

    i = sub.add_parser("index", parents=[common], help="analytic, topological and family indices")
    i.add_argument("action", choices=["analytic", "topological", "family", "multiplicativity"])
    i.add_argument("inputs", nargs="+")
    i.add_argument("-N", type=int, default=64, help="truncation size")
    i.add_argument("--N1", type=int, default=48)
    i.add_argument("--N2", type=int, default=48)
    i.add_argument("--strategy", choices=["spectral_gap", "heat_trace"], default="spectral_gap")
    i.add_argument("--tau", type=float, help="spectral threshold (default: auto gap)")
    i.add_argument("-t", type=float, default=1.0, help="heat-trace time")
    i.add_argument("--residual-cap", type=float, default=0.1)
    i.add_argument("-m", "--splitting", type=int, default=0, help="splitting parameter m")
    i.add_argument("--loop", choices=["F", "G"], default="F", help="which loop of a pair for 'family'")

    k = sub.add_parser("ktheory", parents=[common], help="exact sequences over the integers")
    k.add_argument("action", choices=["paper", "mv", "sixterm", "kunneth"])
    k.add_argument("inputs", nargs="*", help=".kd diagram file")

    d = sub.add_parser("demo", parents=[common], help="end-to-end check table")
    d.add_argument("--quick", action="store_true", help="K-theory subset only")
    return p


def _config(args):
    cfg = RunConfig(command=args.command, action=getattr(args, "action", None), json=args.json)
    cfg.inputs = list(getattr(args, "inputs", []) or [])
    if args.command == "symbol":
        cfg.depth = _depth(args.depth)
    if args.command == "index":
        cfg.N, cfg.N1, cfg.N2 = args.N, args.N1, args.N2
        cfg.strategy, cfg.tau, cfg.t = args.strategy, args.tau, args.t
        cfg.residual_cap, cfg.splitting_m = args.residual_cap, args.splitting
    cfg.validate()
    return cfg


COMMANDS = {"symbol": cmd_symbol, "index": cmd_index, "ktheory": cmd_ktheory, "demo": cmd_demo}


def main(argv=None):
    args = build_parser().parse_args(argv)
    out = None
    try:
        cfg = _config(args)
        out = Output(cfg)
        code = COMMANDS[cfg.command](cfg, args, out)
        out.emit()
        return code
    except ParseError as exc:
        return _fail(out, args, exc, EXIT_PARSE)
    except UnreliableError as exc:
        return _fail(out, args, exc, EXIT_UNRELIABLE)
    except PreconditionError as exc:
        return _fail(out, args, exc, EXIT_PRECONDITION)


def _fail(out, args, exc, code):
    kind = {EXIT_PARSE: "parse", EXIT_UNRELIABLE: "unreliable", EXIT_PRECONDITION: "precondition"}[code]
    if getattr(args, "json", False):
        rec = {"command": args.command, "error": {"kind": kind, "type": type(exc).__name__, "message": str(exc)}}
        report = getattr(exc, "report", None)
        if report is not None:
            rec["report"] = report.to_dict()
        print(json.dumps(_jsonable(rec), sort_keys=True, ensure_ascii=False))
    else:
        print(f"bisym: {kind} error: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
