"""Kernel-smoothed derivative of an isotonic step function."""

from enum import Enum

import numpy as np

from .isotonic import MonotoneStepFunction


class KernelSpec(str, Enum):
    EPANECHNIKOV = "epanechnikov"
    TRIWEIGHT = "triweight"

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        inside = np.abs(v) <= 1.0
        s = np.where(inside, 1.0 - v * v, 0.0)
        if self is KernelSpec.EPANECHNIKOV:
            return 0.75 * s
        return (35.0 / 32.0) * s**3


def smoothed_derivative(f: MonotoneStepFunction, kernel: KernelSpec, h: float, u):
    """Kernel estimate ``(1/h) * sum_j K((u - tau_j)/h) * jump_j`` of f'.

    ``tau_j`` and ``jump_j`` are the jump locations and sizes of ``f``.
    Accepts scalar or array ``u``.
    """
    if not h > 0:
        raise ValueError("bandwidth must be positive")
    u_arr = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u_arr)):
        raise ValueError("nonfinite input")
    tau, delta = f.jumps()
    flat = u_arr.reshape(-1)
    if tau.size == 0:
        out = np.zeros_like(flat)
    else:
        out = kernel((flat[:, None] - tau[None, :]) / h) @ delta / h
    out = out.reshape(u_arr.shape)
    return float(out) if out.ndim == 0 else out


def default_bandwidth(n: int, data_range: float, const: float = 0.5) -> float:
    """Bandwidth ``const * range * n**(-1/7)``."""
    if n < 1 or not data_range > 0:
        raise ValueError("need n >= 1 and a positive range")
    return const * data_range * n ** (-1.0 / 7.0)
