"""One-dimensional search primitives: golden-section maximisation and bisection."""

from __future__ import annotations

import math
from typing import Callable

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0


def golden_section_max(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10) -> float:
    """Location of the maximum of a unimodal ``f`` on ``[lo, hi]``.

    The bracket is shrunk until it is no wider than ``tol``; the returned
    point is its midpoint.
    """
    if hi < lo:
        lo, hi = hi, lo
    h = hi - lo
    if h <= tol:
        return 0.5 * (lo + hi)
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c = lo + INV_PHI_SQ * h
    d = lo + INV_PHI * h
    fc, fd = f(c), f(d)
    for _ in range(n):
        h *= INV_PHI
        if fc > fd:
            hi, d, fd = d, c, fc
            c = lo + INV_PHI_SQ * h
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_PHI * h
            fd = f(d)
    return 0.5 * (lo + hi)


def bisect_boundary(inside: Callable[[float], bool], lo: float, hi: float, tol: float) -> float:
    """Boundary between ``inside(x)`` true and false on ``[lo, hi]``.

    Exactly one endpoint must be inside. The endpoint of the final bracket
    lying inside is returned, so the result is itself inside and within
    ``tol`` of the boundary.
    """
    in_lo, in_hi = inside(lo), inside(hi)
    if in_lo == in_hi:
        raise ValueError(f"interval [{lo}, {hi}] does not bracket a boundary")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if inside(mid) == in_lo:
            lo = mid
        else:
            hi = mid
    return lo if in_lo else hi
