"""gradrec: language-directed comparative recommendation by latent-space
traversal over precomputed joint text/image embeddings.

Given a catalog of unit-norm product embeddings and a prompt bank of encoded
text queries, the engine builds attribute direction vectors from zero-shot
retrieved class sets, walks the space by iterating a direction-plus-local-
density update, and logs the unseen products discovered along the way.
"""

__version__ = "0.1.0"

from .catalog import (
    Catalog,
    ProductRecord,
    PromptBank,
    SyntheticOracle,
    SyntheticSpec,
    generate_synthetic,
    load_catalog,
    load_oracle,
    load_prompt_bank,
    prompt_name,
    save_catalog,
    save_oracle,
    save_prompt_bank,
    save_synthetic_bundle,
)
from .direction import (
    ClassSets,
    DirectionProvenance,
    DirectionVector,
    build_class_sets,
    build_direction,
    snr_direction,
)
from .errors import GradRecError
from .evaluation import (
    DiscoveryCurves,
    IntensityDatasets,
    PeakOrderResult,
    TrajectorySource,
    discovery_trajectory_gradrec,
    discovery_trajectory_visual,
    generate_intensity_datasets,
    monotonicity_score,
    peak_order,
    project_2d,
    run_discovery_benchmark,
    windowed_intersection,
    write_benchmark_artifacts,
)
from .index import KnnIndex, Neighbor
from .traversal import (
    StopReason,
    TraversalConfig,
    TraversalPath,
    TraversalStep,
    drift_series,
    step,
    step_once,
    traverse,
    traverse_from_vector,
)

__all__ = [
    "__version__",
    "Catalog",
    "ProductRecord",
    "PromptBank",
    "SyntheticOracle",
    "SyntheticSpec",
    "generate_synthetic",
    "load_catalog",
    "load_oracle",
    "load_prompt_bank",
    "prompt_name",
    "save_catalog",
    "save_oracle",
    "save_prompt_bank",
    "save_synthetic_bundle",
    "ClassSets",
    "DirectionProvenance",
    "DirectionVector",
    "build_class_sets",
    "build_direction",
    "snr_direction",
    "GradRecError",
    "DiscoveryCurves",
    "IntensityDatasets",
    "PeakOrderResult",
    "TrajectorySource",
    "discovery_trajectory_gradrec",
    "discovery_trajectory_visual",
    "generate_intensity_datasets",
    "monotonicity_score",
    "peak_order",
    "project_2d",
    "run_discovery_benchmark",
    "windowed_intersection",
    "write_benchmark_artifacts",
    "KnnIndex",
    "Neighbor",
    "StopReason",
    "TraversalConfig",
    "TraversalPath",
    "TraversalStep",
    "drift_series",
    "step",
    "step_once",
    "traverse",
    "traverse_from_vector",
]
