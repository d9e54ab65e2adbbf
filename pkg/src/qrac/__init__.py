"""Random access codes assisted by two-qubit states.

Computes and independently verifies the optimal worst-case success
probability of 2->1 and 3->1 random access codes for arbitrary two-qubit
assisting states and fixed decoding directions, compares against the exact
classical baselines assisted by two correlated bits, and evaluates the
correlation measures that track the quantum advantage.
"""

from .bloch import (
    BellDiagonal,
    DensityMatrix4,
    RotationPair,
    TwoQubitBloch,
    bloch_from_density,
    canonicalize,
    density_from_bloch,
    joint_outcome_prob,
    load_state,
    parity_prob,
    state_from_json_dict,
    state_to_json_dict,
    unit3,
)
from .classical import ClassicalStrategy, LpResult, classical_maxmin, strategy_worstcase
from .errors import (
    ConfigError,
    CoplanarDecodings,
    DegenerateDecodings,
    FrameError,
    NotAState,
    NotOrdered,
    QracError,
    SizeMismatch,
    UnsupportedN,
)
from .measures import (
    AdvantageFlags,
    MeasureSet,
    advantage_predicates,
    geometric_discord,
    measure_set,
    orthogonal_performance,
    q3,
    superunsteerability,
)
from .optimal import (
    OptimalResult,
    equal_projection_residual,
    orthogonal_min_2to1,
    pmax_2to1,
    pmax_3to1,
)
from .oracle import SphereSearchConfig, oracle_orthogonal_min, oracle_pmax
from .rac import (
    DecodingSet,
    EncodingSet,
    RacReport,
    RacTask,
    bits,
    bitstring,
    evaluate,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "AdvantageFlags",
    "BellDiagonal",
    "ClassicalStrategy",
    "ConfigError",
    "CoplanarDecodings",
    "DecodingSet",
    "DegenerateDecodings",
    "DensityMatrix4",
    "EncodingSet",
    "FrameError",
    "LpResult",
    "MeasureSet",
    "NotAState",
    "NotOrdered",
    "OptimalResult",
    "QracError",
    "RacReport",
    "RacTask",
    "RotationPair",
    "SizeMismatch",
    "SphereSearchConfig",
    "TwoQubitBloch",
    "UnsupportedN",
    "advantage_predicates",
    "bits",
    "bitstring",
    "bloch_from_density",
    "canonicalize",
    "classical_maxmin",
    "density_from_bloch",
    "equal_projection_residual",
    "evaluate",
    "geometric_discord",
    "joint_outcome_prob",
    "load_state",
    "measure_set",
    "oracle_orthogonal_min",
    "oracle_pmax",
    "orthogonal_min_2to1",
    "orthogonal_performance",
    "parity_prob",
    "pmax_2to1",
    "pmax_3to1",
    "q3",
    "simulate",
    "state_from_json_dict",
    "state_to_json_dict",
    "strategy_worstcase",
    "superunsteerability",
    "unit3",
]
