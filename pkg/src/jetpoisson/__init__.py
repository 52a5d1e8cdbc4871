"""Differential polynomials on jet spaces, Lagrange adjoints, and Hamiltonian-operator checks."""

from .bicomplex import Derivation, MixedForm, d_h, d_v, eval_form, wedge
from .diffops import (
    DiffOperator,
    adjoint,
    apply,
    compose,
    ev_on_operator,
    frechet,
    green_current,
    pairing,
)
from .jetalgebra import (
    DiffFunction,
    JetVar,
    Signature,
    characteristic_bracket,
    divergence,
    ev_apply,
    jet,
    partial_jet,
    partial_x,
    total_derivative,
)
from .poisson import (
    PoissonSetup,
    bracket,
    classify,
    find_witness,
    hamiltonian_sufficient,
    hamiltonian_universal,
    is_skew_adjoint,
    jacobi_direct,
    jacobi_mt,
)
from .variational import (
    Functional,
    euler,
    functional_equal,
    is_divergence,
    j_prolong,
    j_star,
    nabla,
    nabla_star,
    split_covector,
)
from .workbench.syntax import format_function, format_operator, parse_expression, parse_operator

__version__ = "0.1.0"
