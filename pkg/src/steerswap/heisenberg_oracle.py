"""Brute-force Heisenberg-picture propagation of the swapping network.

Every quadrature is kept as an explicit linear combination of independent
Gaussian sources (the eight resource quadratures, fresh vacua and excess
noise terms). Output covariances are summed directly from that
bookkeeping, so nothing here relies on the closed-form elements used by
:mod:`steerswap.swap_protocol`.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, NamedTuple, Optional

import numpy as np

from .channels import ChannelParams
from .errors import SourceReuseError
from .gauss_core import TwoModeCovariance


@dataclass(frozen=True)
class NoiseSource:
    label: str
    variance: float


@dataclass(frozen=True)
class LinearQuadrature:
    """Real linear combination of noise sources, keyed by source label."""

    terms: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {k: float(v) for k, v in self.terms.items() if v != 0.0}
        object.__setattr__(self, "terms", MappingProxyType(cleaned))

    @property
    def support(self) -> frozenset:
        return frozenset(self.terms)

    def __add__(self, other: "LinearQuadrature") -> "LinearQuadrature":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0.0) + v
        return LinearQuadrature(out)

    def __neg__(self) -> "LinearQuadrature":
        return LinearQuadrature({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "LinearQuadrature") -> "LinearQuadrature":
        return self + (-other)

    def __mul__(self, scale: float) -> "LinearQuadrature":
        return LinearQuadrature({k: scale * v for k, v in self.terms.items()})

    __rmul__ = __mul__


class Mode(NamedTuple):
    x: LinearQuadrature
    p: LinearQuadrature


class SourcePool:
    """Independent sources plus the declared EPR correlations between them."""

    def __init__(self):
        self._sources: dict[str, NoiseSource] = {}
        self._partners: dict[str, list[tuple[str, float]]] = defaultdict(list)

    @property
    def sources(self) -> tuple[NoiseSource, ...]:
        return tuple(self._sources.values())

    def draw(self, label: str, variance: float) -> LinearQuadrature:
        if label in self._sources:
            raise SourceReuseError(f"noise source {label!r} has already been drawn")
        if not variance >= 0:
            raise ValueError(f"source variance must be >= 0, got {variance!r}")
        self._sources[label] = NoiseSource(label, float(variance))
        return LinearQuadrature({label: 1.0})

    def draw_mode(self, name: str, variance: float = 1.0) -> Mode:
        return Mode(self.draw(f"{name}.x", variance), self.draw(f"{name}.p", variance))

    def _correlate(self, l1: str, l2: str, cov: float):
        self._partners[l1].append((l2, cov))
        self._partners[l2].append((l1, cov))

    def epr_pair(self, name1: str, name2: str, V: float) -> tuple[Mode, Mode]:
        """Two-mode squeezed vacuum: x's correlated by +sqrt(V^2-1), p's by -sqrt(V^2-1)."""
        m1 = self.draw_mode(name1, V)
        m2 = self.draw_mode(name2, V)
        corr = math.sqrt((V - 1.0) * (V + 1.0))
        if corr:
            self._correlate(f"{name1}.x", f"{name2}.x", corr)
            self._correlate(f"{name1}.p", f"{name2}.p", -corr)
        return m1, m2

    def covariance(self, q1: LinearQuadrature, q2: LinearQuadrature) -> float:
        total = 0.0
        for label, c1 in q1.terms.items():
            c2 = q2.terms.get(label)
            if c2 is not None:
                total += c1 * c2 * self._sources[label].variance
            for partner, cov in self._partners.get(label, ()):
                c2 = q2.terms.get(partner)
                if c2 is not None:
                    total += c1 * c2 * cov
        return total

    def variance(self, q: LinearQuadrature) -> float:
        return self.covariance(q, q)

    def covariance_matrix(self, *modes: Mode) -> np.ndarray:
        """Covariance matrix in the ordering (x1, p1, x2, p2, ...)."""
        quads = [q for m in modes for q in m]
        n = len(quads)
        out = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                out[i, j] = out[j, i] = self.covariance(quads[i], quads[j])
        return out


def beam_splitter(
    q1: LinearQuadrature, q2: LinearQuadrature, ratio: float
) -> tuple[LinearQuadrature, LinearQuadrature]:
    """Mix two quadratures; ``ratio`` is the power transmission of q1."""
    if not 0 <= ratio <= 1:
        raise ValueError(f"beam splitter ratio must lie in [0, 1], got {ratio!r}")
    t, s = math.sqrt(ratio), math.sqrt(1.0 - ratio)
    return t * q1 - s * q2, s * q1 + t * q2


def mode_beam_splitter(m1: Mode, m2: Mode, ratio: float) -> tuple[Mode, Mode]:
    (x1, x2), (p1, p2) = beam_splitter(m1.x, m2.x, ratio), beam_splitter(m1.p, m2.p, ratio)
    return Mode(x1, p1), Mode(x2, p2)


def lossy_noisy(q: LinearQuadrature, ch: ChannelParams, pool: SourcePool, tag: str) -> LinearQuadrature:
    """``sqrt(T) q + sqrt(1-T) (vacuum + excess)`` with freshly drawn sources.

    Sources are named after ``tag``; reusing a tag raises SourceReuseError.
    A lossless channel draws nothing, and the excess term is only drawn when
    ``W > 0``.
    """
    if ch.t == 1.0:
        return q
    env = pool.draw(f"{tag}.vac", 1.0)
    if ch.w > 0:
        env = env + pool.draw(f"{tag}.exc", ch.w)
    return math.sqrt(ch.t) * q + math.sqrt(1.0 - ch.t) * env


def lossy_noisy_mode(mode: Mode, ch: ChannelParams, pool: SourcePool, tag: str) -> Mode:
    return Mode(lossy_noisy(mode.x, ch, pool, f"{tag}.x"), lossy_noisy(mode.p, ch, pool, f"{tag}.p"))


@dataclass
class SwapTrace:
    """The pool together with every intermediate mode of one network evaluation."""

    pool: SourcePool
    gain: float
    modes: dict[str, Mode]

    def covariance(self, *names: str) -> np.ndarray:
        return self.pool.covariance_matrix(*(self.modes[n] for n in names))


def trace_swap(cfg, gain: Optional[float] = None) -> SwapTrace:
    """Propagate the full swapping network for ``cfg``."""
    if gain is None:
        from .swap_protocol import resolve_gain

        gain = resolve_gain(cfg)
    V = cfg.resource.V
    eta = cfg.detection.eta
    pool = SourcePool()
    A, B = pool.epr_pair("A", "B", V)
    C, D = pool.epr_pair("C", "D", V)

    B_rx = lossy_noisy_mode(B, cfg.channel1, pool, "ch1")
    C_rx = lossy_noisy_mode(C, cfg.channel2, pool, "ch2")
    E, F = mode_beam_splitter(B_rx, C_rx, 0.5)

    detector = ChannelParams(eta, 0.0)
    E_det = lossy_noisy_mode(E, detector, pool, "detE")
    F_det = lossy_noisy_mode(F, detector, pool, "detF")
    i_E = E_det.x
    i_F = F_det.p

    D_out = Mode(D.x + math.sqrt(2.0) * gain * i_E, D.p + math.sqrt(2.0) * gain * i_F)
    modes = {
        "A": A, "B": B, "C": C, "D": D,
        "B_rx": B_rx, "C_rx": C_rx, "E": E, "F": F,
        "E_det": E_det, "F_det": F_det, "D_out": D_out,
    }
    return SwapTrace(pool, gain, modes)


def simulate_swap_matrix(cfg, gain: Optional[float] = None) -> np.ndarray:
    """Full 4x4 covariance of (A, D') in the ordering (xA, pA, xD', pD')."""
    return trace_swap(cfg, gain).covariance("A", "D_out")


def simulate_swap(cfg, gain: Optional[float] = None) -> TwoModeCovariance:
    return TwoModeCovariance.from_matrix(simulate_swap_matrix(cfg, gain))
