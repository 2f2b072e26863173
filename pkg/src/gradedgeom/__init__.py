"""Exact computer algebra for graded manifolds given by polynomial charts."""
from .core import (
    NONHOMOGENEOUS,
    ZERO,
    ContextMismatch,
    DegreeMismatch,
    DuplicateCoordinate,
    GradedError,
    GradingContext,
    Polynomial,
    UnknownCoordinate,
    declare_chart,
    degree_of,
    multiply,
    substitute,
)
from .derivations import (
    CheckResult,
    GradedVectorField,
    apply,
    commutator,
    euler_field,
    is_cohomological,
    odd_flow_first_order,
    partial_derivative,
)
from .forms import (
    as_form,
    contract,
    de_rham,
    degree_of_form,
    doubled,
    form_degree,
    lie_derivative,
    total_degree,
)
from .symplectic import (
    Degenerate,
    NondegeneracyUnverified,
    NotClosed,
    SymplecticForm,
    check_master_equation,
    check_symplectic,
    darboux_form,
    hamiltonian_of_field,
    hamiltonian_vector_field,
    liouville_potential,
    poisson_bracket,
)
from .dsl import Model, ParseError, parse_expression, parse_source
from .render import render_latex, render_plain

__version__ = "0.1.0"

__all__ = [
    "NONHOMOGENEOUS",
    "ZERO",
    "ContextMismatch",
    "DegreeMismatch",
    "DuplicateCoordinate",
    "GradedError",
    "GradingContext",
    "Polynomial",
    "UnknownCoordinate",
    "declare_chart",
    "degree_of",
    "multiply",
    "substitute",
    "CheckResult",
    "GradedVectorField",
    "apply",
    "commutator",
    "euler_field",
    "is_cohomological",
    "odd_flow_first_order",
    "partial_derivative",
    "as_form",
    "contract",
    "de_rham",
    "degree_of_form",
    "doubled",
    "form_degree",
    "lie_derivative",
    "total_degree",
    "Degenerate",
    "NondegeneracyUnverified",
    "NotClosed",
    "SymplecticForm",
    "check_master_equation",
    "check_symplectic",
    "darboux_form",
    "hamiltonian_of_field",
    "hamiltonian_vector_field",
    "liouville_potential",
    "poisson_bracket",
    "Model",
    "ParseError",
    "parse_expression",
    "parse_source",
    "render_latex",
    "render_plain",
]
