"""Vector norms, Hölder duals and the linear maximizers over l_r balls."""

from __future__ import annotations

import math

import numpy as np

from .specfn import conjugate_exponent


def lp_norm(x, r: float) -> float:
    """Counting l_r norm (sum |x_i|^r)^(1/r); r = inf is the max norm."""
    x = np.abs(np.asarray(x, dtype=float)).ravel()
    if x.size == 0:
        return 0.0
    if math.isinf(r):
        return float(x.max())
    if r == 1:
        return float(x.sum())
    if r == 2:
        return float(np.sqrt(x @ x))
    scale = x.max()
    if scale == 0:
        return 0.0
    return float(scale * np.sum((x / scale) ** r) ** (1.0 / r))


def expectation_norm(x, r: float) -> float:
    """Expectation l_r norm (mean |x_i|^r)^(1/r) = counting norm * n^(-1/r)."""
    x = np.asarray(x, dtype=float).ravel()
    if math.isinf(r):
        return lp_norm(x, r)
    return lp_norm(x, r) * x.size ** (-1.0 / r)


def holder_dual(x, r: float) -> np.ndarray:
    """Psi_r(x) = sgn(x) |x|^(r-1), entrywise; Psi_r(0) = 0 (also for r = 1)."""
    if r < 1 or math.isinf(r):
        raise ValueError(f"holder_dual needs a finite r >= 1, got {r!r}")
    x = np.asarray(x, dtype=float)
    if r == 1:
        return np.sign(x)
    return np.sign(x) * np.abs(x) ** (r - 1.0)


def dual_maximizer(z, r: float) -> np.ndarray:
    """A maximizer of <w, z> over the unit l_r ball.

    The optimum value is ||z||_{r*}. For r = 1 a single signed coordinate
    vector is returned; z = 0 returns 0.
    """
    z = np.asarray(z, dtype=float)
    if not np.any(z):
        return np.zeros_like(z)
    if math.isinf(r):
        w = np.sign(z)
        return w
    if r == 1:
        w = np.zeros_like(z)
        i = int(np.argmax(np.abs(z)))
        w.flat[i] = np.sign(z.flat[i])
        return w
    rs = conjugate_exponent(r)
    # scale first so the power cannot overflow or underflow
    zs = z / np.max(np.abs(z))
    w = holder_dual(zs, rs)
    return w / lp_norm(w, r)


def normalize(x, r: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    nrm = lp_norm(x, r)
    if nrm == 0:
        raise ValueError("cannot normalize the zero vector")
    return x / nrm
