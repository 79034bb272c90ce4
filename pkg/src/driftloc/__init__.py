"""Localization engine for passive drifters in gridded 2-D current fields.

Pipeline: discretize the region into a cell workspace (gridworld), Euler-map
the current field into a deterministic cell map (flowfield), widen it into a
stochastic cell-to-cell Markov chain and decompose the long-term flow into
attractors and transient groups (gcm), decode compass observation histories
with an HMM/Viterbi stack (hmm), and reproduce seeded Monte-Carlo error
experiments (sim).  Fields are loaded from text files or synthesized (ingest).
"""

from .errors import (
    ConfigError,
    DriftlocError,
    FieldParseError,
    LandCellError,
    NonAdjacentCellsError,
    ZeroProbabilityError,
)
from .flowfield import (
    CellMap,
    VectorField,
    build_cell_map,
    default_dt,
    euler_endpoint,
    mapped_cell,
)
from .gcm import (
    FlowDecomposition,
    StochasticCellMap,
    TransitionMatrix,
    build_stochastic_map,
    decompose,
    find_persistent_groups,
    find_transient_groups,
    reachability,
    strongly_connected_components,
    transition_matrix,
)
from .gridworld import (
    Direction,
    Workspace,
    cell_distance,
    direction_between,
    format_directions,
    neighbors,
    parse_directions,
)
from .hmm import (
    HmmModel,
    build_model,
    emission_matrix,
    initial_distribution,
    viterbi,
    viterbi_final_state,
)
from .ingest import (
    SyntheticFieldSpec,
    load_field,
    resolve_field,
    save_field,
    synthesize_field,
)
from .sim import (
    ErrorReport,
    ExperimentConfig,
    ExperimentResult,
    error_report,
    run_experiment,
    sample_trajectory,
)

__version__ = "0.1.0"
