"""Sampling and least-squares reconstruction of bandlimited graph signals.

Computes the exact expected reconstruction error of a sample set, the SNR
threshold below which dropping a sample lowers that error, and reproduces
the corresponding experiment sweeps.
"""

__version__ = "0.1.0"

from .analysis import (  # noqa: E402
    MseReport,
    NoiseModel,
    RemovalEffect,
    expected_mse,
    improving_indices,
    monte_carlo_mse,
    removal_effect,
    removal_improves,
    tau_along_ordering,
    verify_noiseless_optimal_prefix,
    xi1,
    xi2,
)
from .graph import (  # noqa: E402
    Graph,
    ShiftKind,
    generate_ba,
    generate_er,
    generate_sbm,
    shift_operator,
)
from .reconstruction import (  # noqa: E402
    Method,
    Observation,
    ReconstructionOperator,
    glr_operator,
    ls_operator,
    reconstruct,
)
from .sampling import (  # noqa: E402
    Criterion,
    SampleSet,
    WeightedRandom,
    criterion_value,
    gram,
    greedy_select,
    restrict_rows,
    weighted_random_select,
)
from .spectral import (  # noqa: E402
    BandBasis,
    SpectralBasis,
    band,
    band_projector,
    eigendecompose,
    leverage_scores,
)

__all__ = [
    "__version__",
    "MseReport",
    "NoiseModel",
    "RemovalEffect",
    "expected_mse",
    "improving_indices",
    "monte_carlo_mse",
    "removal_effect",
    "removal_improves",
    "tau_along_ordering",
    "verify_noiseless_optimal_prefix",
    "xi1",
    "xi2",
    "Graph",
    "ShiftKind",
    "generate_ba",
    "generate_er",
    "generate_sbm",
    "shift_operator",
    "Method",
    "Observation",
    "ReconstructionOperator",
    "glr_operator",
    "ls_operator",
    "reconstruct",
    "Criterion",
    "SampleSet",
    "WeightedRandom",
    "criterion_value",
    "gram",
    "greedy_select",
    "restrict_rows",
    "weighted_random_select",
    "BandBasis",
    "SpectralBasis",
    "band",
    "band_projector",
    "eigendecompose",
    "leverage_scores",
]
