"""catbell: a numerical laboratory for macroscopic-realism tests on
coherent-state superpositions.

Single- and two-mode states in a truncated number basis, exact diagonal
evolution under a quartic-number Hamiltonian, position/momentum
distributions, sign-binned spin correlations, and the inequality
protocols built from them.
"""

from .errors import (
    CatbellError,
    DimensionMismatch,
    GridTooSmall,
    TruncationTooSmall,
    ZeroProbability,
)
from .fock import (
    ModeState,
    TwoModeState,
    WeightedEnsemble,
    bell_normalization,
    bell_state,
    cat_state,
    coherent,
    default_dim,
    fidelity,
    inner,
    mixture,
    normalize,
    tensor,
)
from .dynamics import (
    T1,
    T2,
    T3,
    T4,
    EvolutionSchedule,
    RationalPhase,
    evolve,
    evolve_ensemble,
    evolve_mode,
    evolve_two_mode,
    kerr_phase,
    kerr_phase_table,
)
from .quadrature import (
    DistributionGrid1D,
    DistributionGrid2D,
    GridSpec,
    dist_joint,
    dist_p,
    dist_x,
    hermite_table,
    mean_p,
    mean_x,
    p_rotated,
    variance_p,
    variance_x,
)
from .measurement import (
    SignCorrelation,
    collapse_average,
    halfline_overlap,
    joint_sign_correlation,
    joint_sign_correlation_grid,
    negative_halfline_overlap,
    project_sign,
    project_sign_mode,
    sign_expectation,
    sign_expectation_grid,
    sign_probabilities,
)
from .oracle import (
    CoherentSuperposition,
    coherent_overlap,
    kerr_evolved,
    oracle_bell,
    oracle_cat,
    oracle_dist_joint,
    oracle_dist_p,
    oracle_dist_x,
    oracle_sign_correlation,
    oracle_sign_expectation,
    oracle_variance_p,
    position_amplitude,
)
from .protocols import (
    EprResult,
    ProtocolResult,
    Snapshot,
    SnapshotSet,
    bell_correlation,
    bell_four,
    delayed_collapse_check,
    epr_paradox,
    figure_sequences,
    lg_bell_three,
    lg_three_time,
)

__version__ = "0.1.0"
