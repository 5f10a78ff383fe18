"""Exception types raised by steerswap."""


class SteerSwapError(Exception):
    """Base class for all library errors."""


class UnphysicalStateError(SteerSwapError, ValueError):
    """A covariance matrix violates the uncertainty principle."""


class DegenerateResourceError(SteerSwapError, ValueError):
    """An operation is undefined for an unsqueezed (r = 0) resource."""


class SourceReuseError(SteerSwapError, RuntimeError):
    """A noise source was drawn twice, breaking statistical independence."""
