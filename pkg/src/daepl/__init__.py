"""Analysis and solution of linear differential-algebraic pencils ``(E, A)``."""

from .errors import (
    ChainTooShortError,
    ContourError,
    DaeplError,
    DimensionError,
    DomainDefectError,
    InconsistentInitialValueError,
    InjectivityGapError,
    MatrixMarketError,
    SingularPencilError,
    StabilizationError,
    TruncationError,
)
from .subspace import Subspace, compare, distance, full, image, preimage, sine_angle, span, zero
from .pencil import IndexEstimate, Pencil, estimate_index, resolvent_apply, resolvent_matrix, resolvent_norm
from .wong import WongResult, consistent_space, lemma_identity_check, wong_sequence
from .semigroup import (
    Generator,
    SolutionTrace,
    build_generator,
    evolve,
    injectivity_gap,
    verify_generator_relation,
    verify_mild,
)
from .laplace import ContourSpec, default_contour, hardy_norm_estimate, laplace_solution, support_residual
from .counterexample import build_example, noninjectivity_witness, verify_resolvent_bound

__version__ = "0.1.0"

__all__ = [
    "ChainTooShortError",
    "ContourError",
    "DaeplError",
    "DimensionError",
    "DomainDefectError",
    "InconsistentInitialValueError",
    "InjectivityGapError",
    "MatrixMarketError",
    "SingularPencilError",
    "StabilizationError",
    "TruncationError",
    "Subspace",
    "compare",
    "distance",
    "full",
    "image",
    "preimage",
    "sine_angle",
    "span",
    "zero",
    "IndexEstimate",
    "Pencil",
    "estimate_index",
    "resolvent_apply",
    "resolvent_matrix",
    "resolvent_norm",
    "WongResult",
    "consistent_space",
    "lemma_identity_check",
    "wong_sequence",
    "Generator",
    "SolutionTrace",
    "build_generator",
    "evolve",
    "injectivity_gap",
    "verify_generator_relation",
    "verify_mild",
    "ContourSpec",
    "default_contour",
    "hardy_norm_estimate",
    "laplace_solution",
    "support_residual",
    "build_example",
    "noninjectivity_witness",
    "verify_resolvent_bound",
]
