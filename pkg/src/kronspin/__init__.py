"""Exact computations with Kronecker tensor product lifts between spin and half-spin groups.

Modules
-------
root_systems
    Classical root systems, coroots, Cartan matrices and Weyl reflections.
exact_arithmetic
    Scalars in Q(i, sqrt 2) and Laurent polynomials in formal parameters.
matrix_groups
    Matrix Chevalley generators of Sp and SO and the commutator oracle.
steinberg_engine
    Words in Steinberg generators of Spin and Sp with a canonical form.
tensor_lifts
    The lifted tensor product maps, their kernels and center images.
rost_lattices
    Character lattices, normalized Killing forms and Rost multipliers.
cli
    The ``kronspin`` command line front end.
"""

from .errors import (
    ConfigurationError,
    DomainError,
    ExactArithmeticError,
    KronspinError,
    UnsupportedWordError,
    VerificationFailure,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "DomainError",
    "ExactArithmeticError",
    "KronspinError",
    "UnsupportedWordError",
    "VerificationFailure",
    "__version__",
]
