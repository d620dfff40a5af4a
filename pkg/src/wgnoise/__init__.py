"""White-Gaussian-noise feasible set: compact spectral packing, closed-form
blockwise projection, soft-regularizer baselines, and ascent drivers."""

from .blocks import (
    BlockLayout,
    BlockProjectionResult,
    MagnitudeBounds,
    magnitude_bounds,
    oracle_project_block,
    project_block,
    project_block_array,
)
from .errors import (
    DegenerateInputError,
    DimensionError,
    DivergenceError,
    OracleFailureError,
    SingularInputError,
    ValidationError,
    WgnoiseError,
)
from .feasible import (
    ProjectionReport,
    SimilarityStudyResult,
    cosine_similarity_study,
    feasibility_residuals,
    project_latent_batch,
    project_to_feasible,
)
from .fileio import read_latent, write_latent
from .harness import (
    AutocorrelationProfile,
    ScenarioConfig,
    autocorrelation,
    autocorrelation_direct,
    run_comparison,
    spike_reward,
    wiener_khinchin_check,
)
from .optimize import (
    AdamState,
    OptimizerConfig,
    Trajectory,
    adam_step,
    projected_ascent,
    regularized_ascent,
)
from .regularizers import RegularizerSpec, combined_gradient, l_norm_loss, l_power_loss
from .spectral import (
    HermitianCheck,
    check_hermitian,
    dft_unitary,
    from_compact,
    idft_unitary,
    to_compact,
)

__version__ = "0.1.0"

__all__ = [
    "AdamState",
    "AutocorrelationProfile",
    "BlockLayout",
    "BlockProjectionResult",
    "DegenerateInputError",
    "DimensionError",
    "DivergenceError",
    "HermitianCheck",
    "MagnitudeBounds",
    "OptimizerConfig",
    "OracleFailureError",
    "ProjectionReport",
    "RegularizerSpec",
    "ScenarioConfig",
    "SimilarityStudyResult",
    "SingularInputError",
    "Trajectory",
    "ValidationError",
    "WgnoiseError",
    "adam_step",
    "autocorrelation",
    "autocorrelation_direct",
    "check_hermitian",
    "combined_gradient",
    "cosine_similarity_study",
    "dft_unitary",
    "feasibility_residuals",
    "from_compact",
    "idft_unitary",
    "l_norm_loss",
    "l_power_loss",
    "magnitude_bounds",
    "oracle_project_block",
    "project_block",
    "project_block_array",
    "project_latent_batch",
    "project_to_feasible",
    "projected_ascent",
    "read_latent",
    "regularized_ascent",
    "run_comparison",
    "spike_reward",
    "to_compact",
    "wiener_khinchin_check",
    "write_latent",
]
