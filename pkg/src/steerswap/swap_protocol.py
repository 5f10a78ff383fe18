"""Steering swapping between two EPR pairs (A, B) and (C, D).

Modes B and C travel through channels 1 and 2 to a 1:1 beam splitter, the
outputs are homodyned with efficiency ``eta`` and the photocurrents are fed
forward to D with gain ``g``. Everything here works on the closed-form
covariance of the resulting pair (A, D').
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .channels import DEFAULT_ALPHA_DB_PER_KM, ChannelParams, DetectionParams
from .errors import DegenerateResourceError
from .gauss_core import (
    Direction,
    Region,
    SqueezedResource,
    SteeringResult,
    TwoModeCovariance,
    steering_log_ratio,
)
from .search import bisect_boundary, golden_section_max

GAIN_SEARCH_MAX = 10.0
GAIN_SEARCH_TOL = 1e-10
R_SEARCH_MAX = 3.0
R_SEARCH_TOL = 1e-6
L_SEARCH_MAX = 500.0
L_SEARCH_TOL = 1e-3
CROSSOVER_TOL = 1e-2

_SCAN_POINTS = 65


class GainMode(str, enum.Enum):
    UNIT = "unit"
    OPTIMAL_AD = "opt-ad"
    OPTIMAL_DA = "opt-da"
    FIXED = "fixed"


class Scheme(str, enum.Enum):
    SINGLE = "single"
    SYMMETRIC = "symmetric"


@dataclass(frozen=True)
class GainSetting:
    """Feedforward gain, shared by the amplitude and phase paths."""

    mode: GainMode = GainMode.UNIT
    fixed_value: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "mode", GainMode(self.mode))
        if self.mode is GainMode.FIXED:
            if self.fixed_value is None or not (math.isfinite(self.fixed_value) and self.fixed_value > 0):
                raise ValueError(f"a fixed gain must be a positive number, got {self.fixed_value!r}")
        elif self.fixed_value is not None:
            raise ValueError(f"fixed_value only applies to mode 'fixed', not {self.mode.value!r}")

    @classmethod
    def fixed(cls, g: float) -> "GainSetting":
        return cls(GainMode.FIXED, float(g))

    @classmethod
    def parse(cls, text: str) -> "GainSetting":
        """Parse ``unit``, ``opt-ad``, ``opt-da`` or ``fixed:<g>``."""
        text = text.strip()
        if text.startswith("fixed:"):
            try:
                value = float(text[len("fixed:"):])
            except ValueError:
                raise ValueError(f"cannot parse fixed gain from {text!r}") from None
            return cls.fixed(value)
        try:
            mode = GainMode(text)
        except ValueError:
            raise ValueError(f"unknown gain mode {text!r}; expected unit, opt-ad, opt-da or fixed:<g>") from None
        if mode is GainMode.FIXED:
            raise ValueError("fixed gain needs a value, e.g. fixed:0.8")
        return cls(mode)

    def __str__(self) -> str:
        if self.mode is GainMode.FIXED:
            return f"fixed:{self.fixed_value!r}"
        return self.mode.value


@dataclass(frozen=True)
class SwapConfig:
    resource: SqueezedResource
    channel1: ChannelParams = field(default_factory=ChannelParams)
    channel2: ChannelParams = field(default_factory=ChannelParams)
    detection: DetectionParams = field(default_factory=DetectionParams)
    gain: GainSetting = field(default_factory=GainSetting)

    @classmethod
    def from_params(
        cls,
        r: float,
        eta: float = 1.0,
        t1: float = 1.0,
        t2: float = 1.0,
        w1: float = 0.0,
        w2: float = 0.0,
        gain: GainSetting | str = "unit",
    ) -> "SwapConfig":
        if isinstance(gain, str):
            gain = GainSetting.parse(gain)
        return cls(
            SqueezedResource(r),
            ChannelParams(t1, w1),
            ChannelParams(t2, w2),
            DetectionParams(eta),
            gain,
        )

    def with_gain(self, gain: GainSetting | str) -> "SwapConfig":
        if isinstance(gain, str):
            gain = GainSetting.parse(gain)
        return replace(self, gain=gain)

    def with_r(self, r: float) -> "SwapConfig":
        return replace(self, resource=SqueezedResource(r))

    @property
    def is_ideal(self) -> bool:
        return self.detection.eta == 1.0 and self.channel1.t == 1.0 and self.channel2.t == 1.0

    def to_dict(self) -> dict:
        return {
            "r": self.resource.r,
            "eta": self.detection.eta,
            "t1": self.channel1.t,
            "t2": self.channel2.t,
            "w1": self.channel1.w,
            "w2": self.channel2.w,
            "gain": str(self.gain),
        }


def _noise_factor(V, eta, t1, t2, w1, w2):
    # coefficient of g^2 in the D' variance
    return 2.0 + eta * ((t1 + t2) * (V - 1.0) - t1 * w1 - t2 * w2 + w1 + w2)


def imperfect_elements(V, g, eta, t1, t2, w1, w2) -> tuple[float, float, float]:
    """Closed-form (A, B, C) elements of the output covariance."""
    root = math.sqrt((V - 1.0) * (V + 1.0))
    a = V
    b = V - 2.0 * g * math.sqrt(eta * t2) * root + g * g * _noise_factor(V, eta, t1, t2, w1, w2)
    c = g * math.sqrt(eta * t1) * root
    return a, b, c


def ideal_optimal_gain_ad(V: float) -> float:
    return V * math.sqrt((V - 1.0) * (V + 1.0)) / (V * V + 1.0)


def ideal_optimal_gain_da(V: float) -> float:
    if V <= 1.0:
        raise DegenerateResourceError("the D'->A optimal gain diverges for an unsqueezed resource (r = 0)")
    return V / math.sqrt((V - 1.0) * (V + 1.0))


def optimal_gain_ad(V, eta, t1, t2, w1, w2) -> float:
    """Gain maximising A->D' steering for arbitrary loss, noise and efficiency."""
    root2 = (V - 1.0) * (V + 1.0)
    bracket = V * ((t1 + t2) * (V - 1.0) - t1 * w1 - t2 * w2 + w1 + w2) - root2 * t1
    return V * math.sqrt(eta * t2) * math.sqrt(root2) / (2.0 * V + eta * bracket)


def _cfg_args(cfg: SwapConfig):
    return (
        cfg.resource.V,
        cfg.detection.eta,
        cfg.channel1.t,
        cfg.channel2.t,
        cfg.channel1.w,
        cfg.channel2.w,
    )


def resolve_gain(cfg: SwapConfig) -> float:
    mode = cfg.gain.mode
    if mode is GainMode.UNIT:
        return 1.0
    if mode is GainMode.FIXED:
        return cfg.gain.fixed_value
    if mode is GainMode.OPTIMAL_AD:
        return optimal_gain_ad(*_cfg_args(cfg))
    # OPTIMAL_DA
    if cfg.resource.r == 0:
        raise DegenerateResourceError("the D'->A optimal gain diverges for an unsqueezed resource (r = 0)")
    if cfg.is_ideal:
        return ideal_optimal_gain_da(cfg.resource.V)
    return numeric_optimal_gain(cfg, Direction.B_TO_A).gain


def output_covariance(cfg: SwapConfig, gain: Optional[float] = None) -> TwoModeCovariance:
    """Covariance of (A, D'). ``gain`` overrides the configured gain setting."""
    g = resolve_gain(cfg) if gain is None else gain
    V, eta, t1, t2, w1, w2 = _cfg_args(cfg)
    a, b, c = imperfect_elements(V, g, eta, t1, t2, w1, w2)
    return TwoModeCovariance(a, b, c)


def swap_steering(cfg: SwapConfig) -> SteeringResult:
    if cfg.resource.r == 0:
        return SteeringResult(0.0, 0.0)
    return SteeringResult.of(output_covariance(cfg))


def log_ratio(cfg: SwapConfig, direction: Direction | str, gain: Optional[float] = None) -> float:
    """Signed steering exponent of the output pair; > 0 means steerable."""
    return steering_log_ratio(output_covariance(cfg, gain), direction)


class GainOptimum(NamedTuple):
    gain: float
    steerability: float

    @property
    def steerable(self) -> bool:
        """False when no gain in the search interval produces steering."""
        return self.steerability > 0


def numeric_optimal_gain(
    cfg: SwapConfig,
    direction: Direction | str,
    g_max: float = GAIN_SEARCH_MAX,
    tol: float = GAIN_SEARCH_TOL,
) -> GainOptimum:
    """Maximise the steering exponent over ``g`` in ``(0, g_max]``.

    The unclipped exponent is maximised so the search is well defined even
    where the clipped steerability is flat at zero.
    """
    direction = Direction(direction)
    g = golden_section_max(lambda x: log_ratio(cfg, direction, x), 0.0, g_max, tol)
    return GainOptimum(g, max(0.0, log_ratio(cfg, direction, g)))


def _steers(cfg: SwapConfig, direction: Direction) -> bool:
    if cfg.resource.r == 0:
        return False
    return log_ratio(cfg, direction) > 0


def find_squeezing_threshold(
    template: SwapConfig,
    direction: Direction | str,
    r_max: float = R_SEARCH_MAX,
    tol: float = R_SEARCH_TOL,
) -> Optional[float]:
    """Smallest squeezing ``r`` at which the output steers in ``direction``.

    Returns None when there is no steering anywhere on ``[0, r_max]``.
    Raises ValueError if steering switches off again as ``r`` grows, since
    the threshold is then not unique.
    """
    direction = Direction(direction)

    def inside(r):
        return _steers(template.with_r(r), direction)

    grid = np.linspace(0.0, r_max, _SCAN_POINTS)
    flags = [inside(float(r)) for r in grid]
    if not any(flags):
        return None
    first = flags.index(True)
    if not all(flags[first:]):
        raise ValueError(f"steering {direction.value} is not monotone in r on [0, {r_max}]")
    if first == 0:
        return 0.0
    return bisect_boundary(inside, float(grid[first - 1]), float(grid[first]), tol)


def distance_config(
    template: SwapConfig, length_km: float, scheme: Scheme | str, alpha: float = DEFAULT_ALPHA_DB_PER_KM
) -> SwapConfig:
    """Template with fibre lengths set for ``scheme``.

    Single-channel: only channel 1 has fibre, channel 2 is lossless.
    Symmetric dual-channel: both channels get ``length_km``.
    """
    scheme = Scheme(scheme)
    ch1 = ChannelParams.from_length(length_km, alpha, template.channel1.w)
    if scheme is Scheme.SINGLE:
        ch2 = ChannelParams(1.0, template.channel2.w)
    else:
        ch2 = ChannelParams.from_length(length_km, alpha, template.channel2.w)
    return replace(template, channel1=ch1, channel2=ch2)


def dual_config(template: SwapConfig, l1_km: float, l2_km: float, alpha: float = DEFAULT_ALPHA_DB_PER_KM) -> SwapConfig:
    return replace(
        template,
        channel1=ChannelParams.from_length(l1_km, alpha, template.channel1.w),
        channel2=ChannelParams.from_length(l2_km, alpha, template.channel2.w),
    )


def _last_inside(inside, lo: float, hi: float, tol: float) -> Optional[float]:
    """Supremum of ``{x : inside(x)}`` on [lo, hi], given inside(lo).

    None if ``hi`` is still inside. A coarse scan guards against a
    non-monotone profile before bisecting.
    """
    grid = np.linspace(lo, hi, _SCAN_POINTS)
    flags = [inside(float(x)) for x in grid]
    if flags[-1]:
        return None
    last = max(i for i, f in enumerate(flags) if f)
    return bisect_boundary(inside, float(grid[last]), float(grid[last + 1]), tol)


def find_distance_threshold(
    template: SwapConfig,
    direction: Direction | str,
    scheme: Scheme | str = Scheme.SINGLE,
    alpha: float = DEFAULT_ALPHA_DB_PER_KM,
    l_max: float = L_SEARCH_MAX,
    tol: float = L_SEARCH_TOL,
) -> Optional[float]:
    """Longest fibre (km) over which steering in ``direction`` survives.

    0.0 if there is no steering even without fibre; None if steering
    persists up to ``l_max``.
    """
    direction = Direction(direction)

    def inside(length):
        return _steers(distance_config(template, length, scheme, alpha), direction)

    if not inside(0.0):
        return 0.0
    return _last_inside(inside, 0.0, l_max, tol)


def boundary_l2(
    template: SwapConfig,
    l1_km: float,
    direction: Direction | str,
    alpha: float = DEFAULT_ALPHA_DB_PER_KM,
    l_max: float = L_SEARCH_MAX,
    tol: float = 1e-8,
) -> Optional[float]:
    """Channel-2 length where steering in ``direction`` dies, at fixed ``l1_km``.

    None when there is no such boundary in ``[0, l_max]``.
    """
    direction = Direction(direction)

    def inside(l2):
        return _steers(dual_config(template, l1_km, l2, alpha), direction)

    if l_max <= 0 or not inside(0.0):
        return None
    return _last_inside(inside, 0.0, l_max, tol)


class Crossover(NamedTuple):
    l1_km: float
    l2_km: float


def _l1_extent(template, direction, alpha, l_max) -> float:
    """Largest L1 at which steering survives with L2 = 0, clipped to the box."""
    extent = find_distance_threshold(template, direction, Scheme.SINGLE, alpha, l_max, tol=1e-8)
    return l_max if extent is None else extent


def _first_sign_change(f, lo: float, hi: float, tol: float) -> Optional[float]:
    grid = np.linspace(lo, hi, _SCAN_POINTS)
    values = [f(float(x)) for x in grid]
    for i in range(len(grid) - 1):
        v0, v1 = values[i], values[i + 1]
        if v0 is None or v1 is None:
            continue
        if (v0 > 0) != (v1 > 0):
            positive_first = v0 > 0

            def same_as_left(x):
                v = f(x)
                if v is None:
                    raise ValueError(f"function undefined at {x} inside a bracketing interval")
                return (v > 0) == positive_first

            return bisect_boundary(same_as_left, float(grid[i]), float(grid[i + 1]), tol)
    return None


def find_crossover(
    template: SwapConfig,
    alpha: float = DEFAULT_ALPHA_DB_PER_KM,
    l_max: float = L_SEARCH_MAX,
    tol: float = CROSSOVER_TOL,
) -> Optional[Crossover]:
    """Point in the (L1, L2) plane where the one-way steering direction flips.

    Walks along the A->D' death curve and locates where the D'->A exponent
    changes sign on it. There det sigma_A equals det sigma_D', so the two
    zero-steering curves meet. None when no such point lies in the box
    ``[0, l_max]^2``.
    """
    if l_max <= 0:
        return None
    extent = _l1_extent(template, Direction.A_TO_B, alpha, l_max)
    if extent <= 0:
        return None

    def offset(l1):
        l2 = boundary_l2(template, l1, Direction.A_TO_B, alpha, l_max)
        if l2 is None:
            return None
        return log_ratio(dual_config(template, l1, l2, alpha), Direction.B_TO_A)

    l1 = _first_sign_change(offset, 0.0, extent, tol * 1e-2)
    if l1 is None:
        return None
    l2 = boundary_l2(template, l1, Direction.A_TO_B, alpha, l_max)
    if l2 is None:
        return None
    return Crossover(l1, l2)


def crossover_by_intersection(
    template: SwapConfig,
    alpha: float = DEFAULT_ALPHA_DB_PER_KM,
    l_max: float = L_SEARCH_MAX,
    tol: float = CROSSOVER_TOL,
) -> Optional[Crossover]:
    """Intersection of the two zero-steering curves L2(L1), found directly."""
    if l_max <= 0:
        return None
    extent = min(
        _l1_extent(template, Direction.A_TO_B, alpha, l_max),
        _l1_extent(template, Direction.B_TO_A, alpha, l_max),
    )

    def gap(l1):
        ad = boundary_l2(template, l1, Direction.A_TO_B, alpha, l_max)
        da = boundary_l2(template, l1, Direction.B_TO_A, alpha, l_max)
        if ad is None or da is None:
            return None
        return da - ad

    l1 = _first_sign_change(gap, 0.0, extent, tol * 1e-2)
    if l1 is None:
        return None
    l2 = boundary_l2(template, l1, Direction.A_TO_B, alpha, l_max)
    return None if l2 is None else Crossover(l1, l2)


def region_map(
    template: SwapConfig,
    l1_grid: Sequence[float],
    l2_grid: Sequence[float],
    alpha: float = DEFAULT_ALPHA_DB_PER_KM,
) -> list[list[Region]]:
    """Steering region at every (L1, L2); indexed ``[i][j]`` for ``l1_grid[i]``, ``l2_grid[j]``."""
    for name, grid in (("l1_grid", l1_grid), ("l2_grid", l2_grid)):
        arr = np.asarray(grid, dtype=float)
        if arr.ndim != 1 or not np.all(np.isfinite(arr)) or np.any(arr < 0) or np.any(np.diff(arr) < 0):
            raise ValueError(f"{name} must be a finite, nonnegative, ascending sequence")
    return [
        [swap_steering(dual_config(template, float(l1), float(l2), alpha)).region for l2 in l2_grid]
        for l1 in l1_grid
    ]
