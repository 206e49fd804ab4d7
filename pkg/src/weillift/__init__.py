"""weillift: exact discriminant-form and Weil-representation computations,
with boundary Eisenstein q-expansions of theta lifts and floating-point
verification of the supporting analytic identities."""

from .cyclo import CycloNum, root_of_unity, sqrt_nat
from .lattice import IntegralLattice, FiniteQuadraticModule, discriminant_form, isotropic_elements, theta_coefficients
from .cusp import IsotropicCusp, cusp_data, find_isotropic_vectors

__all__ = [
    "CycloNum",
    "root_of_unity",
    "sqrt_nat",
    "IntegralLattice",
    "FiniteQuadraticModule",
    "discriminant_form",
    "isotropic_elements",
    "theta_coefficients",
    "IsotropicCusp",
    "cusp_data",
    "find_isotropic_vectors",
]
