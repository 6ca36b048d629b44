from hodge_sigma import config  # isort:skip; load hodge-sigma config

import hodge_sigma.lib.gaussian_lattice as gaussian_lattice
import hodge_sigma.lib.hodge_ops as hodge_ops
import hodge_sigma.lib.instance_gen as instance_gen
import hodge_sigma.lib.linalg as linalg
import hodge_sigma.lib.weierstrass as weierstrass
from hodge_sigma.lib.gaussian_lattice import (
    OMEGA1,
    OMEGA2,
    LatticePoint,
    enumerate,
    generators,
    is_lattice_point,
    lambda_of_pq,
    nearest_lattice_point,
    pq_of_lambda,
)
from hodge_sigma.lib.hodge_ops import (
    HodgeDecomposition,
    HodgeType,
    OperatorTriple,
    Summand,
    VerificationReport,
    assemble,
    batch_verify,
    build_block,
    build_filtration,
    character,
    classify,
    hodge_decomposition,
    real_normal_form,
    restricted_residual,
    rho_block,
    rho_eval,
    sigma_residual,
    split,
    verify_operator,
    verify_pair,
    verify_restricted,
    verify_sigma,
    weight_decomposition,
)
from hodge_sigma.lib.instance_gen import (
    GenConfig,
    random_hodge_type,
    random_instance,
    random_unimodular,
)
from hodge_sigma.lib.io.json import load_operator, operator_to_dict, write_json
from hodge_sigma.lib.io.typespec import parse_hodge_type
from hodge_sigma.lib.linalg import (
    SpectralData,
    kernel_basis,
    lattice_spectrum,
    mat_exp,
    mat_sin,
    mat_sinh,
    numerical_rank,
)
from hodge_sigma.lib.weierstrass import (
    eisenstein,
    quasi_periods,
    sigma,
    sigma_derivative_at,
    sigma_grid,
    sigma_many,
    sigma_matrix,
    zeta,
)
from hodge_sigma.utils import (
    ConjugateMultiplicityMismatch,
    DecompositionError,
    DimensionMismatch,
    HodgeTypeSyntaxError,
    InternalConsistencyError,
    MatrixFileError,
    MixedWeightError,
    NonFiniteMatrixError,
    NonIntegerInputError,
    NotALatticePoint,
    NotDiagonalizable,
    PoleError,
    ResourceLimitError,
    SingularConjugator,
    SpectrumError,
    SpectrumOffLattice,
    Witness,
    WitnessKind,
)
from hodge_sigma.version import __version__
