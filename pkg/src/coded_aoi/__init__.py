"""Age of information of status updates served by a straggler-prone worker pool.

Exact average-age formulas for uncoded, repetition-coded, MDS-coded, and
multi-message MDS-coded task distribution; optimizers for the code
parameter; and a Monte Carlo simulator that validates every formula.
"""

__version__ = "0.1.0"

from .age import AgeResult, age_from_moments, age_mds, age_mm_mds, age_of, age_repetition, age_uncoded
from .levels import Infeasible, InconsistentK, LevelSplit, NoConvergence, level_counts, solve_levels
from .optimize import OptResult, lambert_w_m1, opt_mds, opt_mm_mds, opt_repetition, refine_discrete
from .order_stats import (
    ShiftedExp,
    gen_harmonic2,
    harmonic,
    os_mean,
    os_second_moment,
    os_var,
    sample,
    sample_kth_of_n,
)
from .schemes import (
    MDS,
    DegenerateLevels,
    MultiMDS,
    Repetition,
    Scheme,
    ServiceMoments,
    SystemParams,
    Uncoded,
    mm_level_split,
    sample_service,
    sample_service_batch,
    service_moments,
)
from .simulate import InsufficientCycles, SimReport, jackknife_ci, run, run_parallel

__all__ = [
    "AgeResult", "age_from_moments", "age_mds", "age_mm_mds", "age_of",
    "age_repetition", "age_uncoded",
    "Infeasible", "InconsistentK", "LevelSplit", "NoConvergence",
    "level_counts", "solve_levels",
    "OptResult", "lambert_w_m1", "opt_mds", "opt_mm_mds", "opt_repetition",
    "refine_discrete",
    "ShiftedExp", "gen_harmonic2", "harmonic", "os_mean", "os_second_moment",
    "os_var", "sample", "sample_kth_of_n",
    "MDS", "DegenerateLevels", "MultiMDS", "Repetition", "Scheme",
    "ServiceMoments", "SystemParams", "Uncoded", "mm_level_split",
    "sample_service", "sample_service_batch", "service_moments",
    "InsufficientCycles", "SimReport", "jackknife_ci", "run", "run_parallel",
]
