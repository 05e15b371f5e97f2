"""Bisingular symbol calculus on R x R: exact symbols, Hermite quantization,
Fredholm indices and integer K-theory."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BisymError,
    IncompatiblePairError,
    NotEllipticError,
    NotInvertibleError,
    NotPolynomialError,
    OutsideFormulaScopeError,
    ParseError,
    PreconditionError,
    UnreliableError,
)
from .symbols import (  # noqa: E402
    CheckReport,
    ShubinSymbol,
    TrigPoly,
    kn_compose,
    parse_symbol_literal,
    seminorm_check,
    sh_derivative,
    sh_mul,
    sh_principal,
    tp_mul,
)
from .bisingular import (  # noqa: E402
    BisingularSymbol,
    BiTrigPoly,
    SigmaPair,
    SymbolValuedLoop,
    bs_compose,
    external_product,
    kernel_order_check,
    reconstruct,
    sigma1,
    sigma2,
    sigma_pair,
)
from .quantization import TruncatedOperator, compactness_proxy, quantize_bisingular, quantize_poly  # noqa: E402
from .index import (  # noqa: E402
    IndexReport,
    analytic_index,
    bidegree,
    family_index,
    index_multiplicativity,
    topological_index,
    winding,
)
from .ktheory import (  # noqa: E402
    FGAbGroup,
    IntHom,
    hom_cokernel,
    hom_kernel,
    kunneth_torsion_free,
    mayer_vietoris,
    paper_instance,
    six_term_solve,
    snf,
)
