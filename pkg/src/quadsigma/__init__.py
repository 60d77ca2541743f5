"""Class groups, S-units and local norm symbols of quadratic fields, with
exact cross-checks between the unit side and the class-group side."""

from .abgroup import (
    AbHom,
    ExactSequence,
    FinAbGroup,
    IntMatrix,
    InvolutionModule,
    group_from_presentation,
    hom_decompose,
    kercok_sequence,
    snf,
    tate_h,
    two_rank,
    verify_exact,
)
from .elements import QuadElement
from .localsym import INFINITY, Place, SigmaSet, hilbert, hilbert_matrix, is_local_norm, kronecker, sigma_prime_set, splitting_type
from .norm1kit import VerificationReport, alpha_beta_r0_check, verify_field, w_subgroup
from .quadfield import (
    QuadField,
    QuadForm,
    QuadIdeal,
    SUnitGroup,
    class_group,
    field,
    fundamental_unit,
    primes_above,
    principal_generator,
    reduce_form,
    s_class_group,
    s_unit_group,
)

__version__ = "0.1.0"
