"""Sparse time-frequency denoising with symplectic eigenvector windows."""

__version__ = "0.1.0"

from . import errors
from .ringmod import (
    AdmissibilityMode,
    DimensionCandidate,
    Factorization,
    Residue,
    check_admissible,
    enumerate_dimensions,
    factorize,
    mod_inverse,
    require_admissible,
)
from .zauner import (
    StarWindowResult,
    SymplecticMatrix,
    apply_weil,
    apply_zauner,
    cube_phase,
    star_window,
    weil_unitary,
    zauner_matrix,
)
from .gabor import (
    FrameBounds,
    GaborAnalysisOp,
    GaborCoefficients,
    GaborLattice,
    Window,
    WINDOW_KINDS,
    coefficients_to_csv,
    coefficients_to_svg,
    dgt,
    dgt_naive,
    dgt_real,
    frame_bounds,
    gabor_system,
    idgt,
    idgt_real,
    make_window,
    spark_oracle,
)
from .noise import (
    KIND_CODES,
    NOISE_KINDS,
    NoiseSpec,
    gen_noise,
    sigma_sweep,
    spectral_slope_db_per_decade,
)
from .solver import (
    DenoiseProblem,
    SolverConfig,
    SolverResult,
    proj_ball,
    smoothing_mu,
    soft_threshold_complex,
    solve,
    solve_abpdn,
    solve_reference_admm,
    trace_to_csv,
)
from .wavio import load_wav, write_wav
from .fixture import speech_fixture
from .harness import (
    DEFAULT_WINDOWS,
    FORCED_DIMS,
    GRID_DIM,
    GRID_PAIRS,
    ExperimentReport,
    InstanceResult,
    MseRecord,
    SignalRecord,
    denoise_instance,
    load_report_json,
    mse,
    pair_seed,
    prepare_signal,
    report_to_csv,
    report_to_json,
    report_to_svg,
    run_lattice_grid,
    run_sigma_sweep,
    truncate_to_admissible,
)

__all__ = [
    "errors",
    "__version__",
    # dimension arithmetic
    "AdmissibilityMode",
    "DimensionCandidate",
    "Factorization",
    "Residue",
    "check_admissible",
    "enumerate_dimensions",
    "factorize",
    "mod_inverse",
    "require_admissible",
    # order-three unitary and its eigenvectors
    "StarWindowResult",
    "SymplecticMatrix",
    "apply_weil",
    "apply_zauner",
    "cube_phase",
    "star_window",
    "weil_unitary",
    "zauner_matrix",
    # transforms and frames
    "FrameBounds",
    "GaborAnalysisOp",
    "GaborCoefficients",
    "GaborLattice",
    "Window",
    "WINDOW_KINDS",
    "coefficients_to_csv",
    "coefficients_to_svg",
    "dgt",
    "dgt_naive",
    "dgt_real",
    "frame_bounds",
    "gabor_system",
    "idgt",
    "idgt_real",
    "make_window",
    "spark_oracle",
    # noise
    "KIND_CODES",
    "NOISE_KINDS",
    "NoiseSpec",
    "gen_noise",
    "sigma_sweep",
    "spectral_slope_db_per_decade",
    # solvers
    "DenoiseProblem",
    "SolverConfig",
    "SolverResult",
    "proj_ball",
    "smoothing_mu",
    "soft_threshold_complex",
    "solve",
    "solve_abpdn",
    "solve_reference_admm",
    "trace_to_csv",
    # audio io and the synthetic clip
    "load_wav",
    "write_wav",
    "speech_fixture",
    # experiments
    "DEFAULT_WINDOWS",
    "FORCED_DIMS",
    "GRID_DIM",
    "GRID_PAIRS",
    "ExperimentReport",
    "InstanceResult",
    "MseRecord",
    "SignalRecord",
    "denoise_instance",
    "load_report_json",
    "mse",
    "pair_seed",
    "prepare_signal",
    "report_to_csv",
    "report_to_json",
    "report_to_svg",
    "run_lattice_grid",
    "run_sigma_sweep",
    "truncate_to_admissible",
]
