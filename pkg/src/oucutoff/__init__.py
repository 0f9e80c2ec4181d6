"""Cut-off for the maximum of n i.i.d. stable-driven Ornstein-Uhlenbeck processes."""

__version__ = "0.1.0"

from .numerics import QuadratureSpec, IntegralResult, DEFAULT_SPEC, RootBracketError, integrate_adaptive, find_root
from .rng import DEFAULT_SEED, RandomStream
from .stable import StableLaw, StableNumericsError
from .ou import OUParams, LocScale, marginal_law, stationary_law, sample_path
from .tvd import TvEstimate, TvRangeError, tv_quadrature, tv_gaussian_shift, tv_gumbel_shift, tv_cauchy_shift, tv_empirical
from .extremes import (
    LogCount,
    MaxLaw,
    Normalization,
    LimitLaw,
    GUMBEL,
    frechet,
    max_law,
    default_normalization,
    limit_law_for,
    evt_gap,
)
from .cutoff import (
    CutoffSchedule,
    ProfilePoint,
    PreconditionWarning,
    distance_dn,
    distance_Dn,
    theta_window,
    profile_G,
    cutoff_time,
    union_bound,
    reflect_min,
    profile_scan,
    cutoff_shape_scan,
    no_cutoff_scan,
)
