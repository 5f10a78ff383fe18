"""Randomised agreement test between the closed form and the Heisenberg oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import heisenberg_oracle, swap_protocol
from .gauss_core import TwoModeCovariance
from .swap_protocol import GainSetting, SwapConfig

EQUIVALENCE_TOL = 1e-10


def random_config(rng: np.random.Generator) -> SwapConfig:
    """Uniform draw over r in [0,2], T in [0.05,1], W in [0,5], eta in [0.5,1], g in [0.1,3]."""
    r = rng.uniform(0.0, 2.0)
    t1, t2 = rng.uniform(0.05, 1.0, size=2)
    w1, w2 = rng.uniform(0.0, 5.0, size=2)
    eta = rng.uniform(0.5, 1.0)
    g = rng.uniform(0.1, 3.0)
    return SwapConfig.from_params(
        float(r), float(eta), float(t1), float(t2), float(w1), float(w2), GainSetting.fixed(float(g))
    )


def random_configs(seed: int, n: int) -> list[SwapConfig]:
    rng = np.random.default_rng(seed)
    return [random_config(rng) for _ in range(n)]


def discrepancy(cfg: SwapConfig, closed_form: Optional[Callable[[SwapConfig], TwoModeCovariance]] = None) -> float:
    """Largest elementwise |closed form - oracle| of the (A, D') covariance."""
    if closed_form is None:
        closed_form = swap_protocol.output_covariance
    expected = heisenberg_oracle.simulate_swap_matrix(cfg)
    got = closed_form(cfg).matrix()
    return float(np.max(np.abs(got - expected)))


@dataclass(frozen=True)
class VerificationReport:
    n_checked: int
    max_error: float
    first_failure: Optional[SwapConfig] = None
    tolerance: float = EQUIVALENCE_TOL

    @property
    def ok(self) -> bool:
        return self.first_failure is None


def verify_equivalence(seed: int, n_cases: int, tol: float = EQUIVALENCE_TOL, closed_form=None) -> VerificationReport:
    worst = 0.0
    for i, cfg in enumerate(random_configs(seed, n_cases)):
        err = discrepancy(cfg, closed_form)
        worst = max(worst, err)
        if not err < tol:
            return VerificationReport(i + 1, worst, cfg, tol)
    return VerificationReport(n_cases, worst, None, tol)
