"""Exact computer-algebra toolkit for the Brieskorn-lattice connection data
of a convenient nondegenerate (Laurent) polynomial and a sub-diagram
deformation: weight filtrations, Milnor bases, the connection matrices
B0(x), B_inf, C^(i)(x), the spectrum at infinity, the residue pairing and
the eigenvector/injectivity/generation deployment conditions.
"""

from .errors import (
    BrieskornError,
    BudgetExceeded,
    DegenerateInput,
    DomainError,
    HypothesisViolation,
    NotCommode,
    ParseError,
    ReductionWatchdog,
    SubdiagramViolation,
)
from .polyring import LAURENT, POLYNOMIAL, LaurentPoly, parse_poly, poly_to_str
from .newton import (
    NewtonPolyhedron,
    build_polyhedron,
    is_commode,
    is_nondegenerate,
    is_subdiagram,
    newton_number,
    phi,
    phi_star,
)
from .jacobi import (
    DivisionEngine,
    JacobianSystem,
    MilnorBasis,
    divide,
    e0_basis,
    groebner,
    milnor_number,
    multiplication_matrix,
)
from .connection import (
    ConnectionData,
    build_connection,
    gauge_normalize,
    reconstruct_C_from_B0,
    spectrum,
    theta_reduce,
    verify_integrability,
)
from .duality import check_T_symmetry, orthonormalize, residue_pairing, socle
from .frobgate import check_EC, check_GC, check_IC, suggest_deformation

__version__ = "0.1.0"

__all__ = [
    "BrieskornError", "BudgetExceeded", "DegenerateInput", "DomainError",
    "HypothesisViolation", "NotCommode", "ParseError", "ReductionWatchdog",
    "SubdiagramViolation",
    "LAURENT", "POLYNOMIAL", "LaurentPoly", "parse_poly", "poly_to_str",
    "NewtonPolyhedron", "build_polyhedron", "is_commode", "is_nondegenerate",
    "is_subdiagram", "newton_number", "phi", "phi_star",
    "DivisionEngine", "JacobianSystem", "MilnorBasis", "divide", "e0_basis",
    "groebner", "milnor_number", "multiplication_matrix",
    "ConnectionData", "build_connection", "gauge_normalize",
    "reconstruct_C_from_B0", "spectrum", "theta_reduce", "verify_integrability",
    "check_T_symmetry", "orthonormalize", "residue_pairing", "socle",
    "check_EC", "check_GC", "check_IC", "suggest_deformation",
]
