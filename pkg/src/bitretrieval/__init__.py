"""Bit retrieval from cyclic autocorrelations, and what its hardness buys."""

from .rings import (
    CycloElement,
    DimensionMismatchError,
    DomainError,
    RingElement,
    Spectrum,
    autocorrelation,
    conjugate,
    drop_binary,
    euclidean_norm,
    forward_transform,
    inverse_transform,
    is_binary,
    lift_binary,
    perp_norm,
    perp_norm_exact,
    quotient_map,
    read_element,
    ring_multiply,
    write_element,
)
from .algnorm import algebraic_norm, log_algebraic_norm
from .instances import (
    BinaryKey,
    DifferenceSetParams,
    expected_log_norm,
    hadamard_legendre,
    is_perfect,
    norm_bound,
    pi_sequence,
    random_binary,
    symmetry_related,
    torus_log_volume,
)
from .diffmap import (
    InvalidAutocorrelationError,
    IterationStats,
    SolveResult,
    SolverConfig,
    iteration_statistics,
    solve,
    solve_each,
    solve_runs,
)
from .lattice import (
    AttackReport,
    ExperimentSummary,
    IntegerLattice,
    LatticeError,
    counterfeit_attack,
    hermite_normal_form,
    hnf_avector,
    ideal_discovery_experiment,
    ideal_generators,
    ideal_ocoord_basis,
    lll_reduce,
)
from .watermark import (
    BlockPlan,
    ForgeReport,
    GrayImage,
    SignStats,
    default_plan,
    forge_demo,
    read_pbm,
    read_pgm,
    rescale_range,
    verification_summary,
    watermark_sign,
    watermark_sign_with_stats,
    watermark_verify,
    write_pbm,
    write_pgm,
)
from .signature import (
    FidelityParams,
    KeyPair,
    PublicKeyError,
    SignedElement,
    SigningError,
    VerifyResult,
    default_big_delta,
    estimate_delta_O,
    fidelity,
    hash_to_element,
    keygen,
    load_private_key,
    load_public_key,
    quantize_O,
    quantize_Z,
    read_signed_element,
    save_private_key,
    save_public_key,
    sign,
    verify,
    write_signed_element,
)
