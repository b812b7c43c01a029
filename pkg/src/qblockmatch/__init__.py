"""Quantum block matching: swap-test and QFT-subtraction dissimilarity on a
small state-vector simulator, with depolarizing noise and classical block search."""

from .encoding import BlockVector, PairEncoding, build_pair_encoding, normalize, prepare_state_circuit
from .errors import (
    ArgumentError,
    BoundsError,
    CapacityError,
    DecompositionError,
    EncodingError,
    FormatError,
    QBMError,
    QubitIndexError,
    SearchError,
    ShapeError,
)
from .imaging import (
    BlockRef,
    GrayImage,
    MatchResult,
    add_gaussian_noise,
    classical_euclidean_distance,
    downsample,
    extract_block,
    full_search,
    gaussian_smooth,
    hierarchical_search,
    load_pgm,
    preprocess,
    reduce_bit_depth,
    save_pgm,
)
from .noise import (
    NoiseModel,
    TrajectoryResult,
    apply_depolarizing,
    exact_density_probabilities,
    fidelity_to_depolarizing,
    run_noisy_trajectories,
)
from .qft import AdderLayout, build_subtractor, qft_circuit, run_subtraction, ssd_distance
from .sim import (
    Circuit,
    GateKind,
    GateOp,
    GateReport,
    StateVector,
    apply_circuit,
    apply_gate,
    decompose_to_basis,
    gate_counts,
    new_state,
    qubit_probabilities,
    sample_counts,
)
from .swap import (
    DistanceEstimate,
    build_swap_test_circuit,
    distance_from_overlap,
    estimate_distance,
    overlap_from_p0,
)

__version__ = "0.1.0"
