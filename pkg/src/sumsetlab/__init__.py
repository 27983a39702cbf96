"""Exact and Monte Carlo distributions of missing sums and differences of
random subsets of {0, ..., n-1}."""

from .bitset import (
    IntervalSpec,
    Kind,
    PairSet,
    Preset,
    SubsetMask,
    diffset,
    make_subset,
    missing_count,
    preset_interval,
    sumset,
)
from .closed_forms import (
    cond_prob_closed,
    fibonacci,
    joint_event_prob_oracle,
    prob_sum_infinite,
    t_closed,
    t_recursive,
)
from .exact import DistQuery, Ensemble, ExactPmf, JointCounts, exact_joint_pmf, exact_pmf, min_element_pmf
from .montecarlo import EstimatedPmf, mc_pmf, sample_subset

__version__ = "0.1.0"
