"""Embedding of multiple coupon collection processes into continuous time."""

__version__ = '0.1.0'

from .algebra import (
    PiecewiseRateSchedule,
    euler_limit,
    exp_closed,
    exp_series,
    flow_params,
    lattice_norm,
    log_series,
    semigroup_params,
    star,
)
from .embedding import (
    EmbeddabilityVerdict,
    Outcome,
    avoidance_probs,
    conditional_avoidance,
    correlation_function,
    embeddability_verdict,
    generator_from_cm,
    log_params,
    pair_condition,
    partition_log_param,
)
from .lattice import enumerate_partitions, mobius_subsets, zeta_subsets, zeta_supersets
from .model import (
    cg_from_params,
    cm_from_params,
    cm_power_params,
    eigenbasis,
    extremal_cm,
    independent_params,
    params_from_cg,
    params_from_cm,
)
from .oracle import exp_oracle, matlog_oracle
