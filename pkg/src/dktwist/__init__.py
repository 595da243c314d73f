"""Orthogonal twist matrices for the defining representations of A, B, C, D."""

from .algebra import SeriesSpec, cartan_generators, conjugate_index, parse_spec, weight_of
from .coassoc import Associator, fused_operators_left, fused_operators_right, g_left, g_right, phi, racah_coboundary
from .errors import (
    ChainMismatch,
    DegenerateSector,
    DKTwistError,
    InternalConsistency,
    LabelMismatch,
    LimitNotConverged,
    NotSymmetric,
    SignAmbiguity,
    SpectrumMismatch,
    UnsupportedAtZero,
    UnsupportedSector,
    ZeroDenominatorOrder,
)
from .linops import kron, leg_permute, residual, sym_eigencluster
from .qparam import QKind, QParam, qnumber_ratio
from .rmatrices import (
    RData,
    SpectralModel,
    classical_projector_set,
    classical_q,
    exponent_model,
    frt_r,
    qbar,
    r_bar,
)
from .twist import (
    BasisLabel,
    FMatrix,
    LabeledBasis,
    assemble_f,
    bcd_closed_basis,
    compose,
    crystal_basis,
    f_interval,
    natural_basis,
    spectral_basis,
    su_closed_basis,
    weight_partition,
)
from .verify import VerificationReport, run_suite

__version__ = "0.1.0"
