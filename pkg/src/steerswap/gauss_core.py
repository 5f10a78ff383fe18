"""Two-mode Gaussian states in standard form.

Every state handled by this package has the covariance matrix

    [[a I, c Z],
     [c Z, b I]]

in the quadrature ordering (x1, p1, x2, p2), with vacuum variance 1
(shot-noise units). Steerabilities are reported in nats.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import UnphysicalStateError

PHYSICALITY_TOL = 1e-9


class Direction(str, enum.Enum):
    """Steering direction. In the swapping context mode B is D'."""

    A_TO_B = "AtoB"
    B_TO_A = "BtoA"


class Region(str, enum.Enum):
    TWO_WAY = "I"
    ONE_WAY_AB = "II"
    ONE_WAY_BA = "III"
    NONE = "none"


@dataclass(frozen=True)
class SqueezedResource:
    """One EPR pair, i.e. a two-mode squeezed vacuum with squeezing ``r``."""

    r: float
    V: float = field(init=False)

    def __post_init__(self):
        if not math.isfinite(self.r) or self.r < 0:
            raise ValueError(f"squeezing parameter must be finite and >= 0, got {self.r!r}")
        object.__setattr__(self, "V", math.cosh(2.0 * self.r))

    @classmethod
    def from_variance(cls, V: float) -> "SqueezedResource":
        if not V >= 1.0:
            raise ValueError(f"quadrature variance must be >= 1, got {V!r}")
        return cls(0.5 * math.acosh(V))

    @classmethod
    def from_db(cls, squeezing_db: float) -> "SqueezedResource":
        """Resource whose squeezed quadrature sits ``squeezing_db`` below vacuum."""
        return cls(squeezing_db / (20.0 * math.log10(math.e)))

    @property
    def correlation(self) -> float:
        """sqrt(V^2 - 1), written to avoid cancellation near V = 1."""
        return math.sqrt((self.V - 1.0) * (self.V + 1.0))


@dataclass(frozen=True)
class TwoModeCovariance:
    """Standard-form two-mode covariance matrix.

    ``det_root`` is ``a*b - c**2``, the square root of the full determinant.
    Constructors that know it in closed form may pass it explicitly; for large
    squeezing the naive float difference loses about ``eps * a * b`` absolute
    accuracy. When omitted it is computed from ``a``, ``b``, ``c``.
    """

    a: float
    b: float
    c: float
    det_root: Optional[float] = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("a", "b", "c"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.a <= 0 or self.b <= 0:
            raise ValueError(f"diagonal elements must be positive, got a={self.a!r}, b={self.b!r}")
        if self.det_root is None:
            object.__setattr__(self, "det_root", self.a * self.b - self.c * self.c)

    def matrix(self) -> np.ndarray:
        a, b, c = self.a, self.b, self.c
        return np.array(
            [
                [a, 0.0, c, 0.0],
                [0.0, a, 0.0, -c],
                [c, 0.0, b, 0.0],
                [0.0, -c, 0.0, b],
            ]
        )

    @classmethod
    def from_matrix(cls, m, rtol: float = 1e-12) -> "TwoModeCovariance":
        """Read (a, b, c) off a 4x4 matrix, checking it has standard form."""
        m = np.asarray(m, dtype=float)
        if m.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
        scale = max(1.0, float(np.max(np.abs(m))))
        atol = rtol * scale
        if not np.allclose(m, m.T, rtol=0, atol=atol):
            raise ValueError("covariance matrix is not symmetric")
        a, b, c = m[0, 0], m[2, 2], m[0, 2]
        expected = cls(a, b, c).matrix()
        if not np.allclose(m, expected, rtol=0, atol=atol):
            worst = float(np.max(np.abs(m - expected)))
            raise ValueError(f"matrix is not in standard form (max deviation {worst:.3e})")
        return cls(float(a), float(b), float(c))

    # Determinants of the reduced and full states.
    @property
    def det_a(self) -> float:
        return self.a * self.a

    @property
    def det_b(self) -> float:
        return self.b * self.b

    @property
    def det_full(self) -> float:
        return self.det_root * self.det_root


class Physicality(NamedTuple):
    physical: bool
    nu_minus: float
    nu_plus: float

    def __bool__(self) -> bool:
        return self.physical


def symplectic_eigenvalues(cm: TwoModeCovariance) -> tuple[float, float]:
    """Return (nu_minus, nu_plus).

    Uses Delta = (a - b)^2 + 2 det_root so that no large terms cancel; this is
    algebraically the same as a^2 + b^2 - 2 c^2.
    """
    d = cm.det_root
    if d <= 0:
        # not even positive definite
        return (0.0, math.nan)
    diff2 = (cm.a - cm.b) ** 2
    delta = diff2 + 2.0 * d
    disc = math.sqrt(diff2 * (diff2 + 4.0 * d))
    nu_plus_sq = 0.5 * (delta + disc)
    nu_minus_sq = d * d / nu_plus_sq
    return math.sqrt(nu_minus_sq), math.sqrt(nu_plus_sq)


def physicality_check(cm: TwoModeCovariance) -> Physicality:
    nu_minus, nu_plus = symplectic_eigenvalues(cm)
    return Physicality(nu_minus >= 1.0 - PHYSICALITY_TOL, nu_minus, nu_plus)


def epr_state(res: SqueezedResource) -> TwoModeCovariance:
    """Covariance of the two-mode squeezed vacuum; pure, so ab - c^2 = 1."""
    return TwoModeCovariance(res.V, res.V, res.correlation, det_root=1.0)


def steerability(cm: TwoModeCovariance, direction: Direction | str) -> float:
    """Gaussian steerability in nats, clipped at zero."""
    return max(0.0, steering_log_ratio(cm, direction))


def steering_log_ratio(cm: TwoModeCovariance, direction: Direction | str) -> float:
    """Unclipped ``0.5 ln(det sigma_reduced / det sigma)``.

    Positive exactly when the state is steerable in ``direction``. Root
    finders work on this signed quantity rather than the clipped one.
    """
    direction = Direction(direction)
    check = physicality_check(cm)
    if not check.physical:
        raise UnphysicalStateError(
            f"covariance (a={cm.a!r}, b={cm.b!r}, c={cm.c!r}) violates the uncertainty "
            f"principle: smallest symplectic eigenvalue {check.nu_minus!r} < 1"
        )
    reduced = cm.a if direction is Direction.A_TO_B else cm.b
    # 0.5 ln(x^2 / d^2) = ln(x / d)
    return math.log(reduced / cm.det_root)


@dataclass(frozen=True)
class SteeringResult:
    g_ab: float
    g_ba: float
    region: Region = field(init=False)

    def __post_init__(self):
        if self.g_ab < 0 or self.g_ba < 0:
            raise ValueError("steerabilities are nonnegative")
        object.__setattr__(self, "region", classify(self.g_ab, self.g_ba))

    @classmethod
    def of(cls, cm: TwoModeCovariance) -> "SteeringResult":
        return cls(steerability(cm, Direction.A_TO_B), steerability(cm, Direction.B_TO_A))


def classify(g_ab: float, g_ba: float) -> Region:
    if g_ab > 0 and g_ba > 0:
        return Region.TWO_WAY
    if g_ab > 0:
        return Region.ONE_WAY_AB
    if g_ba > 0:
        return Region.ONE_WAY_BA
    return Region.NONE


def region_from_determinants(cm: TwoModeCovariance) -> Region:
    """Classify by comparing det sigma_A, det sigma_B against det sigma_AB."""
    full = cm.det_full
    a_steers = cm.det_a > full
    b_steers = cm.det_b > full
    if a_steers and b_steers:
        return Region.TWO_WAY
    if a_steers:
        return Region.ONE_WAY_AB
    if b_steers:
        return Region.ONE_WAY_BA
    return Region.NONE
