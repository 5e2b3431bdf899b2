"""Lower-bound oracles for ||A||_{p->q} and structural checks.

``norm_power`` is the alternating Hölder-dual ascent

    y <- argmax_{||y||_{q*} <= 1} <y, A x>,   x <- argmax_{||x||_p <= 1} <A^T y, x>,

which never decreases ||Ax||_q. ``norm_grid`` enumerates the l_p sphere for
matrices with at most three columns.
"""

from __future__ import annotations

import math

import numpy as np

from .norms import dual_maximizer, lp_norm
from .relaxation import as_matrix
from .specfn import conjugate_exponent, gaussian_moment


def _ascent(A, x, p, qstar, max_iters, tol):
    value = lp_norm(A @ x, conjugate_exponent(qstar))
    y = dual_maximizer(A @ x, qstar)
    for _ in range(max_iters):
        y = dual_maximizer(A @ x, qstar)
        x_new = dual_maximizer(A.T @ y, p)
        new = lp_norm(A @ x_new, conjugate_exponent(qstar))
        if new < value:
            # cannot happen in exact arithmetic; keep the better point
            break
        x = x_new
        done = new - value <= tol * max(new, 1e-300)
        value = new
        if done:
            break
    y = dual_maximizer(A @ x, qstar)
    return value, x, y


def norm_power(A, p: float, q: float, starts: int = 20, seed: int = 0,
               max_iters: int = 2000, tol: float = 1e-13, init=None,
               return_dual: bool = False):
    """Lower bound on ||A||_{p->q} from several alternating-ascent starts.

    Returns ``(value, x)`` with ||x||_p = 1 and value = ||Ax||_q, or
    ``(value, x, y)`` with the dual vector y (||y||_{q*} = 1, y^T A x = value)
    when ``return_dual`` is set. ``init`` adds caller-supplied start vectors.
    """
    A = as_matrix(A)
    if p < 1 or q < 1:
        raise ValueError("p and q must be >= 1")
    qstar = conjugate_exponent(q)
    n = A.shape[1]
    rng = np.random.Generator(np.random.Philox(seed))
    candidates = [] if init is None else [np.asarray(v, float) for v in np.atleast_2d(init)]
    candidates += [rng.standard_normal(n) for _ in range(max(starts, 1))]
    best = None
    for x0 in candidates:
        if not np.any(x0):
            continue
        x0 = x0 / lp_norm(x0, p)
        res = _ascent(A, x0, p, qstar, max_iters, tol)
        if best is None or res[0] > best[0]:
            best = res
    value, x, y = best
    if return_dual:
        return value, x, y
    return value, x


def _cube_surface(n: int, resolution: int) -> np.ndarray:
    """Points on the faces x_i = 1 of [-1, 1]^n (enough up to sign)."""
    t = np.linspace(-1.0, 1.0, resolution + 1)
    if n == 1:
        return np.ones((1, 1))
    if n == 2:
        return np.vstack([np.column_stack([np.ones_like(t), t]),
                          np.column_stack([t, np.ones_like(t)])])
    a, b = np.meshgrid(t, t, indexing="ij")
    a, b = a.ravel(), b.ravel()
    one = np.ones_like(a)
    return np.vstack([np.column_stack([one, a, b]),
                      np.column_stack([a, one, b]),
                      np.column_stack([a, b, one])])


def norm_grid(A, p: float, q: float, resolution: int = 400) -> float:
    """Max of ||Ax||_q over a grid of the l_p unit sphere (at most 3 columns).

    The grid is the boundary of the cube [-1, 1]^n with ``resolution``
    intervals per edge, radially projected onto the l_p sphere; it contains
    every cube vertex, so for p = inf the maximum is exact.
    """
    A = as_matrix(A)
    n = A.shape[1]
    if n > 3:
        raise ValueError("norm_grid handles at most 3 columns")
    X = _cube_surface(n, resolution)
    if math.isinf(p):
        scale = np.max(np.abs(X), axis=1)
    else:
        scale = np.sum(np.abs(X) ** p, axis=1) ** (1.0 / p)
    X = X / scale[:, None]
    Y = np.abs(X @ A.T)
    if math.isinf(q):
        vals = Y.max(axis=1)
    else:
        vals = np.sum(Y ** q, axis=1) ** (1.0 / q)
    return float(vals.max())


def duality_check(A, p: float, q: float, starts: int = 20, seed: int = 0,
                  rtol: float = 1e-4) -> dict:
    """Compare ||A||_{p->q} with ||A^T||_{q*->p*} (equal for every matrix)."""
    A = as_matrix(A)
    lhs, _ = norm_power(A, p, q, starts=starts, seed=seed)
    rhs, _ = norm_power(A.T, conjugate_exponent(q), conjugate_exponent(p), starts=starts, seed=seed + 1)
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return {
        "p": p,
        "q": q,
        "norm": lhs,
        "transpose_norm": rhs,
        "rel_gap": abs(lhs - rhs) / scale,
        "ok": abs(lhs - rhs) <= rtol * scale,
    }


def kron_check(A, B, p: float, q: float, starts: int = 20, seed: int = 0,
               rtol: float = 1e-3) -> dict:
    """Test ||A (x) B||_{p->q} = ||A||_{p->q} ||B||_{p->q} for p <= q.

    The upper bound holds in the hypercontractive regime p <= q. The lower bound holds
    for all p, q: the product vector x_A (x) x_B has unit l_p norm and is
    mapped to (A x_A) (x) (B x_B), whose l_q norm is the product of norms.
    """
    if p > q:
        raise ValueError("the Kronecker product bound needs p <= q")
    A, B = as_matrix(A), as_matrix(B)
    na, xa = norm_power(A, p, q, starts=starts, seed=seed)
    nb, xb = norm_power(B, p, q, starts=starts, seed=seed + 1)
    nk, _ = norm_power(np.kron(A, B), p, q, starts=starts, seed=seed + 2, init=np.kron(xa, xb))
    product = na * nb
    scale = max(product, 1e-300)
    return {
        "p": p,
        "q": q,
        "norm_A": na,
        "norm_B": nb,
        "product": product,
        "norm_kron": nk,
        "upper_ok": nk <= product * (1 + rtol),
        "lower_ok": nk >= product * (1 - rtol),
        "ok": abs(nk - product) <= rtol * scale,
    }


def default_embedding_rows(n: int, q: float, cap: int = 100_000) -> int:
    return int(min(cap, math.ceil(50 * n ** (q / 2))))


def embedding_experiment(n: int, m: int | None = None, q: float = 4.0, trials: int = 100,
                         seed: int = 0, adversarial: bool = True) -> dict:
    """Empirical distortion of x -> Bx from l_2 to l_q for Gaussian B (m x n).

    Reports ratios ||Bx||_q / (m^{1/q} gamma_q ||x||_2) over random unit x,
    plus the maximizing x found by :func:`norm_power` when ``adversarial``.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    m = default_embedding_rows(n, q) if m is None else int(m)
    if m > 100_000:
        raise ValueError("m is capped at 1e5")
    rng = np.random.Generator(np.random.Philox(seed))
    B = rng.standard_normal((m, n))
    X = rng.standard_normal((trials, n))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    scale = m ** (1.0 / q) * gaussian_moment(q)
    BX = np.abs(X @ B.T)
    ratios = (np.sum(BX ** q, axis=1) ** (1.0 / q)) / scale
    report = {
        "n": n,
        "m": m,
        "q": q,
        "trials": trials,
        "seed": seed,
        "ratio_min": float(ratios.min()),
        "ratio_max": float(ratios.max()),
        "ratio_mean": float(ratios.mean()),
    }
    dev = float(np.max(np.abs(ratios - 1.0)))
    if adversarial:
        worst, _ = norm_power(B, 2.0, q, starts=5, seed=seed)
        report["adversarial_ratio"] = worst / scale
        dev = max(dev, abs(worst / scale - 1.0))
    report["max_deviation"] = dev
    return report
