"""Lossy, noisy fibre channels and inefficient homodyne detection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

DEFAULT_ALPHA_DB_PER_KM = 0.2


def distance_to_transmittance(length_km: float, alpha_db_per_km: float = DEFAULT_ALPHA_DB_PER_KM) -> float:
    if not length_km >= 0:
        raise ValueError(f"fibre length must be >= 0 km, got {length_km!r}")
    if not alpha_db_per_km > 0:
        raise ValueError(f"attenuation must be > 0 dB/km, got {alpha_db_per_km!r}")
    return 10.0 ** (-alpha_db_per_km * length_km / 10.0)


def transmittance_to_distance(t: float, alpha_db_per_km: float = DEFAULT_ALPHA_DB_PER_KM) -> float:
    if not 0 < t <= 1:
        raise ValueError(f"transmittance must lie in (0, 1], got {t!r}")
    if not alpha_db_per_km > 0:
        raise ValueError(f"attenuation must be > 0 dB/km, got {alpha_db_per_km!r}")
    return -10.0 * math.log10(t) / alpha_db_per_km


@dataclass(frozen=True)
class ChannelParams:
    """Power transmittance ``t`` and excess noise ``w`` (shot-noise units).

    ``w = 0`` is a pure-loss channel. ``length_km`` and ``alpha_db_per_km``
    are only informative; they are set by :meth:`from_length`.
    """

    t: float = 1.0
    w: float = 0.0
    length_km: Optional[float] = None
    alpha_db_per_km: Optional[float] = None

    def __post_init__(self):
        if not 0 < self.t <= 1:
            raise ValueError(f"transmittance must lie in (0, 1], got {self.t!r}")
        if not (math.isfinite(self.w) and self.w >= 0):
            raise ValueError(f"excess noise must be finite and >= 0, got {self.w!r}")

    @classmethod
    def from_length(
        cls, length_km: float, alpha_db_per_km: float = DEFAULT_ALPHA_DB_PER_KM, w: float = 0.0
    ) -> "ChannelParams":
        t = distance_to_transmittance(length_km, alpha_db_per_km)
        return cls(t=t, w=w, length_km=length_km, alpha_db_per_km=alpha_db_per_km)

    @property
    def is_identity(self) -> bool:
        return self.t == 1.0


@dataclass(frozen=True)
class DetectionParams:
    eta: float = 1.0

    def __post_init__(self):
        if not 0 < self.eta <= 1:
            raise ValueError(f"detection efficiency must lie in (0, 1], got {self.eta!r}")


def channel_variance_terms(ch: ChannelParams) -> tuple[float, float]:
    """Return (amplitude scale, added quadrature variance) of the channel.

    The environment port carries vacuum plus an independent excess term of
    variance ``w``, so it adds ``(1 - t)(1 + w)``.
    """
    return math.sqrt(ch.t), (1.0 - ch.t) * (1.0 + ch.w)
