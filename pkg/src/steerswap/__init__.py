"""Simulator for swapping Gaussian EPR steering over lossy, noisy channels."""

from .channels import (
    ChannelParams,
    DetectionParams,
    channel_variance_terms,
    distance_to_transmittance,
    transmittance_to_distance,
)
from .errors import DegenerateResourceError, SourceReuseError, SteerSwapError, UnphysicalStateError
from .gauss_core import (
    Direction,
    Region,
    SqueezedResource,
    SteeringResult,
    TwoModeCovariance,
    epr_state,
    physicality_check,
    steerability,
)
from .swap_protocol import (
    Crossover,
    GainMode,
    GainSetting,
    Scheme,
    SwapConfig,
    find_crossover,
    find_distance_threshold,
    find_squeezing_threshold,
    numeric_optimal_gain,
    output_covariance,
    region_map,
    resolve_gain,
    swap_steering,
)

__version__ = "0.1.0"
