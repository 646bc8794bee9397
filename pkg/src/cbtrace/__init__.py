"""Traces on quantized abelian Coulomb branches.

Exact polynomial and lattice tools, the algebra with its twisted traces,
closed-form integration weights, generating functions and the positive
trace classifier.
"""

from __future__ import annotations

from .algebra import AlgebraElement, CoulombData, is_quotient_subspace, quotient_hom, rho
from .classify import classify_positive_cone
from .config import InstanceConfig, load_config
from .lattice import WeightList, Zonotope, b_set, facet_coweights, matroid_basis_count
from .poly import Poly
from .scalars import Cyclotomic, GaussianRational, Q, root_of_unity
from .series import ExponentialFraction, GeneratingSeries, generating_series
from .traces import TraceFunctional, gram_matrix, solve_trace_space
from .weights import WeightFunction, quadrature_functional, quadrature_trace

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement",
    "CoulombData",
    "Cyclotomic",
    "ExponentialFraction",
    "GaussianRational",
    "GeneratingSeries",
    "InstanceConfig",
    "Poly",
    "Q",
    "TraceFunctional",
    "WeightFunction",
    "WeightList",
    "Zonotope",
    "b_set",
    "classify_positive_cone",
    "facet_coweights",
    "generating_series",
    "gram_matrix",
    "is_quotient_subspace",
    "load_config",
    "matroid_basis_count",
    "quadrature_functional",
    "quadrature_trace",
    "quotient_hom",
    "rho",
    "root_of_unity",
    "solve_trace_space",
]
