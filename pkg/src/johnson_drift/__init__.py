"""Entropy-driven drift of local search on Johnson graphs J(n, k).

Shell combinatorics, the lumped birth-death distance chain, exact and
log-space hitting times, a Monte Carlo walker and a brute-force oracle.
"""

__version__ = "0.1.0"

from .chain import (
    DistanceChain,
    DriftProfile,
    build_chain,
    detailed_balance_check,
    drift_profile,
    entropy_gradient_diagnostic,
    equilibrium_distance,
    mean_reversion_form,
)
from .errors import DomainError, ResourceError, UnsupportedInstanceError
from .hitting import (
    HittingTimeTable,
    binary_entropy,
    entropy_scaling_trend,
    hitting_time_metropolis,
    hitting_time_rw,
    hitting_time_table,
    iid_baseline,
    log_hitting_time,
    log_ratio_vs_iid,
)
from .oracle import (
    EnumeratedGraph,
    Report,
    enumerate_graph,
    oracle_report,
    solve_hitting_exact,
    verify_lumpability,
    verify_shell_counts,
    verify_structure,
)
from .shells import (
    EXACT_CUTOFF,
    JohnsonParams,
    ShellProfile,
    continuous_argmax,
    log_shell_size_approx,
    shell_distribution,
    shell_profile,
    shell_size,
)
from .walker import (
    SubsetState,
    TrajectoryBatch,
    WalkConfig,
    distance,
    empirical_drift,
    simulate_batch,
    simulate_lumped,
    step,
)
