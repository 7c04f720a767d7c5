"""Noiseless and protectable subsystem analysis for error operator sets.

The library decomposes the matrix algebra generated by a set of error
operators, finds noiseless subsystem encodings (including non-unitary
similarity structure made unitary through channel fixed points), and
decides initialization-protectability of candidate encodings with
verifiable certificates.
"""

__version__ = "1.0.0"

from .algebra import (
    AlgebraStructure,
    MatrixAlgebra,
    OperatorSet,
    adjoin_identity,
    algebra_structure,
    dagger_closure,
    generate_algebra,
    is_invariant,
    jacobson_radical,
    semisimple_span,
    zero_space,
)
from .errors import (
    ClusteringAmbiguous,
    DimensionMismatch,
    EmptyBasis,
    EnvironmentTooSmall,
    InfeasibleConstraints,
    LambdaTooLarge,
    NoPositiveFixedPoint,
    NotHermitian,
    NotIsotypic,
    NotKroneckerFactorable,
    NotPreserving,
    NotUniqueFixedPoint,
    OperatorFileError,
    RetriesExhausted,
    RowSpanDeficient,
    SubsysError,
)
from .linalg import DEFAULT_TOL, Subspace, Tolerance, subspace_distance
from .noiseless import (
    FixedPointPair,
    IsotypicComponent,
    SubsystemDecomposition,
    SubsystemEncoding,
    channel_fixed_point,
    factorize_component,
    find_noiseless,
    isotypic_components,
    make_cptp,
    unitarize,
    verify_noiseless,
)
from .protectable import (
    NOT_PROTECTABLE,
    PROTECTABLE,
    UNDECIDED,
    FMapFamily,
    OrthoColumnInstance,
    ProjectionInstance,
    ProtectabilityCertificate,
    ProtectVerdict,
    build_f_maps,
    check_protectable,
    detecting_code_check,
    extract_subsystem_from_decoder,
    ortho_to_projection,
    preimage_space,
    projection_defect,
    projection_to_ortho,
    prune_low_rank,
    reduce_span_extm,
    reduce_to_projection,
    solve_ortho,
    verify_error_correcting,
)
from .opio import (
    load_encoding_file,
    load_operator_file,
    save_encoding_file,
    save_operator_file,
)
