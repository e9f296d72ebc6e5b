"""Correlation polynomials for n two-setting parties.

Builds the recursive MK family and its Svetlichny combinations, computes
exact maxima under local and hybrid two-block hidden-variable models, finds
quantum maxima by see-saw ascent over measurement directions and states, and
classifies entanglement depth and genuine n-party non-separability.
"""

from .errors import (
    BellPolyError,
    DataFormatError,
    IncompleteDataError,
    InconsistentInputError,
    InvalidArgumentError,
    NotTabulatedError,
    NumericalIntegrityError,
    ResourceLimitError,
)
from .polynomial import (
    CorrelationVector,
    DyadicCoefficient,
    Polynomial,
    Term,
    algebraic_limit,
    combine,
    evaluate,
    mk,
    prime_flip,
    support_size,
    svetlichny,
    svetlichny_minus,
    tensor_product,
)
from .models import (
    Bipartition,
    BlockStrategy,
    BoundResult,
    HybridWitness,
    LocalStrategy,
    bipartitions,
    brute_hybrid_bound,
    evaluate_hybrid,
    evaluate_local,
    hybrid_bound,
    hybrid_bound_all,
    local_bound,
)
from .quantum import (
    BellOperator,
    DensityMatrix,
    MeasurementFrame,
    PureState,
    UnitVector,
    bell_operator,
    block_product_max,
    effective_bloch,
    expectation,
    ghz,
    max_eigenvalue,
    observable,
    quantum_max,
    seesaw,
)
from .classify import (
    BoundTable,
    ModelKind,
    Root2Power,
    Verdict,
    entanglement_depth_verdict,
    mk_bound,
    nonseparability_verdict,
    svetlichny_bounds,
    table1,
)

__version__ = "0.1.0"
