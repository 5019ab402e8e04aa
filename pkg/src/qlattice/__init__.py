"""Exact computations on the lattice of closed subspaces of l2: certificate
codes of subspaces, quantum states as functionals on them, spectral
valuations of bounded self-adjoint operators, and convergence checks."""
from .arith import (
    CONFIRMED,
    UNKNOWN,
    DomainError,
    GaussianRational,
    ParseError,
    RationalInterval,
    Semidecision,
    UpperReal,
    Verdict,
)
from .hilbert import OrthogonalFamily, Vector, distance_sq, gram_schmidt, inner_product, rationalize_unit
from .lattice import (
    Certificate,
    Subspace,
    SubspaceCode,
    certificate_valid,
    encode,
    halfspace_tests,
    meet,
    semidecide_not_member,
)
from .spectral import (
    BoundedOperator,
    ClosedRationalSet,
    PLFunction,
    SpectralValuation,
    bernstein_approx,
    integral,
    parse_closed_set,
    valuation_semidecide,
    valuation_upper,
)
from .states import PureState, State, check_additivity, mixed_eval, pure_eval, pure_eval_code
from .topology import (
    OperatorSequence,
    SubspaceSequence,
    demo_biorth_discontinuity,
    demo_join_discontinuity,
    demo_schroeder,
    lattice_converge_check,
    sot_check,
)

__all__ = [
    "bernstein_approx",
    "BoundedOperator",
    "Certificate",
    "certificate_valid",
    "check_additivity",
    "ClosedRationalSet",
    "CONFIRMED",
    "demo_biorth_discontinuity",
    "demo_join_discontinuity",
    "demo_schroeder",
    "distance_sq",
    "DomainError",
    "encode",
    "GaussianRational",
    "gram_schmidt",
    "halfspace_tests",
    "inner_product",
    "integral",
    "lattice_converge_check",
    "meet",
    "mixed_eval",
    "OperatorSequence",
    "OrthogonalFamily",
    "parse_closed_set",
    "ParseError",
    "PLFunction",
    "pure_eval",
    "pure_eval_code",
    "PureState",
    "RationalInterval",
    "rationalize_unit",
    "semidecide_not_member",
    "Semidecision",
    "sot_check",
    "SpectralValuation",
    "State",
    "Subspace",
    "SubspaceCode",
    "SubspaceSequence",
    "UNKNOWN",
    "UpperReal",
    "valuation_semidecide",
    "valuation_upper",
    "Vector",
    "Verdict",
]

__version__ = "0.1.0"
