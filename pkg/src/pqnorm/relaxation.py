"""The convex relaxation CP(A) and its dual certificate.

Primal (vector form): maximize sum_ij A_ij <u_i, v_j> subject to
sum_i ||u_i||^{q*} <= 1 and sum_j ||v_j||^p <= 1, with u_i, v_j in R^r.

Dual: minimize (xi_Y(s) + xi_X(t)) / 2 subject to [[D_s, -A], [-A^T, D_t]] >= 0,
where xi_X(t) = ||t||_{(p/2)*} and xi_Y(s) = ||s||_{(q*/2)*}.
Any PSD pair (s, t) gives an upper bound on CP(A) (weak duality).

The primal is solved on a rank-r Gram factorization by block coordinate
ascent: for fixed V the best U has rows along (AV)_i with lengths given by
the Hölder maximizer of the row norms, and symmetrically for V. Each block
update is an exact maximization, so the objective never decreases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .norms import dual_maximizer, lp_norm
from .specfn import ExponentPair, conjugate_exponent


def as_matrix(A) -> np.ndarray:
    """Validate a dense real m x n matrix."""
    A = np.array(A, dtype=float)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-d matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


@dataclass
class CPOptions:
    rank: int | None = None  # default m + n
    max_iters: int = 20000
    tol: float = 1e-8
    window: int = 50
    restarts: int = 5
    seed: int = 0
    warm_start: bool = True


@dataclass
class GramSolution:
    U: np.ndarray
    V: np.ndarray
    value: float
    converged: bool = True
    iterations: int = 0
    history: list = field(default_factory=list, repr=False)

    def row_norms(self):
        return np.linalg.norm(self.U, axis=1), np.linalg.norm(self.V, axis=1)

    def constraint_values(self, pair: ExponentPair):
        """(sum ||u_i||^{q*}, sum ||v_j||^p); inf exponents give the max row norm."""
        nu, nv = self.row_norms()
        return lp_norm(nu, pair.qstar) ** _power(pair.qstar), lp_norm(nv, pair.p) ** _power(pair.p)

    def to_json_dict(self):
        return {
            "value": self.value,
            "converged": self.converged,
            "iterations": self.iterations,
            "U": self.U.tolist(),
            "V": self.V.tolist(),
        }


def _power(r):
    return 1.0 if math.isinf(r) else r


def _block_update(G: np.ndarray, r: float, prev: np.ndarray) -> np.ndarray:
    """argmax of sum_i <w_i, g_i> subject to ||(||w_i||)_i||_r <= 1."""
    norms = np.linalg.norm(G, axis=1)
    lengths = dual_maximizer(norms, r)
    out = np.empty_like(G)
    live = norms > 0
    out[live] = G[live] * (lengths[live] / norms[live])[:, None]
    # rows with no signal keep their old direction at the assigned length
    if np.any(~live):
        pn = np.linalg.norm(prev[~live], axis=1)
        safe = np.where(pn > 0, pn, 1.0)
        out[~live] = prev[~live] / safe[:, None] * lengths[~live][:, None]
    return out


def _scale_feasible(W: np.ndarray, r: float) -> np.ndarray:
    nrm = lp_norm(np.linalg.norm(W, axis=1), r)
    return W / nrm if nrm > 0 else W


def _ascend(A, U, V, pair, opts):
    value = float(np.sum(A * (U @ V.T)))
    history = [value]
    converged = False
    it = 0
    for it in range(1, opts.max_iters + 1):
        U = _block_update(A @ V, pair.qstar, U)
        V = _block_update(A.T @ U, pair.p, V)
        value = float(np.sum(A * (U @ V.T)))
        history.append(value)
        if it >= opts.window:
            old = history[-1 - opts.window]
            if abs(value - old) <= opts.tol * max(abs(value), 1e-300):
                converged = True
                break
    return GramSolution(U, V, value, converged, it, history)


def solve_cp(A, pair: ExponentPair, opts: CPOptions | None = None) -> GramSolution:
    """Best feasible Gram factorization found for CP(A) over several restarts.

    One restart is warm-started from the rank-one solution of the
    alternating power heuristic (lifted with a small perturbation), so the
    result is never worse than that lower bound on ||A||_{p->q}.
    """
    from .oracle import norm_power  # local: oracle imports this module's helpers

    A = as_matrix(A)
    opts = opts or CPOptions()
    m, n = A.shape
    r = opts.rank or (m + n)
    rng = np.random.Generator(np.random.Philox(opts.seed))

    starts = []
    rank_one = None
    if opts.warm_start:
        val, x, y = norm_power(A, pair.p, pair.q, starts=20, seed=opts.seed, return_dual=True)
        U0 = np.zeros((m, r))
        V0 = np.zeros((n, r))
        U0[:, 0] = y
        V0[:, 0] = x
        rank_one = GramSolution(U0, V0, float(y @ A @ x), True, 0, [float(y @ A @ x)])
        starts.append((U0 + 1e-3 * rng.standard_normal((m, r)), V0 + 1e-3 * rng.standard_normal((n, r))))
    while len(starts) < max(opts.restarts, 1):
        starts.append((rng.standard_normal((m, r)), rng.standard_normal((n, r))))

    best = rank_one
    for U, V in starts:
        U = _scale_feasible(U, pair.qstar)
        V = _scale_feasible(V, pair.p)
        sol = _ascend(A, U, V, pair, opts)
        if best is None or sol.value > best.value:
            best = sol
    return best


@dataclass
class DualOptions:
    iters: int = 200
    step: float = 0.05
    penalty: float = 10.0
    gap_tol: float = 1e-5


@dataclass
class DualCertificate:
    s: np.ndarray
    t: np.ndarray
    value: float
    min_eig: float
    valid: bool

    def to_json_dict(self):
        return {
            "s": self.s.tolist(),
            "t": self.t.tolist(),
            "value": self.value,
            "min_eig": self.min_eig,
            "valid": self.valid,
        }


def _support_exponents(pair: ExponentPair):
    """Exponents of the norms xi_Y and xi_X."""
    ry = 0.5 * pair.qstar  # F_Y is the l_{q*/2} ball
    rx = 0.5 * pair.p  # F_X is the l_{p/2} ball
    return conjugate_exponent(ry), conjugate_exponent(rx)


def dual_value(s, t, pair: ExponentPair) -> float:
    ey, ex = _support_exponents(pair)
    return 0.5 * (lp_norm(s, ey) + lp_norm(t, ex))


def block_matrix(A, s, t) -> np.ndarray:
    A = as_matrix(A)
    m, n = A.shape
    M = np.empty((m + n, m + n))
    M[:m, :m] = np.diag(s)
    M[m:, m:] = np.diag(t)
    M[:m, m:] = -A
    M[m:, :m] = -A.T
    return M


def _min_eig(A, s, t):
    w, vecs = np.linalg.eigh(block_matrix(A, s, t))
    return float(w[0]), vecs[:, 0]


def _certificate(A, s, t, pair) -> DualCertificate:
    """Shift (s, t) up until the block matrix is PSD, then rebalance.

    Scaling s by alpha and t by 1/alpha is a congruence, so it keeps the
    block matrix PSD while the objective becomes the geometric mean
    sqrt(xi_Y(s) xi_X(t)) at the best alpha.
    """
    s = np.maximum(np.asarray(s, float), 0.0)
    t = np.maximum(np.asarray(t, float), 0.0)
    lam, _ = _min_eig(A, s, t)
    if lam < 0:
        # a little extra so roundoff in the repaired matrix stays nonnegative
        shift = -lam * (1 + 1e-9) + 1e-14 * max(1.0, float(np.abs(A).max()))
        s = s + shift
        t = t + shift
    ey, ex = _support_exponents(pair)
    xy, xx = lp_norm(s, ey), lp_norm(t, ex)
    if xy > 0 and xx > 0:
        alpha = math.sqrt(xx / xy)
        s, t = s * alpha, t / alpha
    lam, _ = _min_eig(A, s, t)
    return DualCertificate(s, t, dual_value(s, t, pair), lam, lam >= -1e-7)


def _norm_grad(x, r):
    if lp_norm(x, r) == 0:
        return np.zeros_like(x)
    return dual_maximizer(x, conjugate_exponent(r))


def solve_dual(A, pair: ExponentPair, primal: GramSolution | None = None,
               opts: DualOptions | None = None) -> DualCertificate:
    """A PSD dual pair (s, t) with small objective.

    Starts from the stationarity conditions of the primal, D_s U = A V and
    D_t V = A^T U, then runs projected subgradient steps on the objective
    plus a penalty on the smallest eigenvalue. Every candidate is repaired to
    an exactly PSD certificate before it is compared, so the returned value
    is always a valid upper bound when ``valid`` is set.
    """
    A = as_matrix(A)
    opts = opts or DualOptions()
    if primal is None:
        primal = solve_cp(A, pair)
    AV = A @ primal.V
    AtU = A.T @ primal.U
    nu, nv = primal.row_norms()
    s = np.where(nu > 0, np.linalg.norm(AV, axis=1) / np.where(nu > 0, nu, 1), 0.0)
    t = np.where(nv > 0, np.linalg.norm(AtU, axis=1) / np.where(nv > 0, nv, 1), 0.0)
    best = _certificate(A, s, t, pair)

    ey, ex = _support_exponents(pair)
    m = A.shape[0]
    s, t = best.s.copy(), best.t.copy()
    scale = max(best.value, 1e-12)
    for k in range(1, opts.iters + 1):
        lam, vec = _min_eig(A, s, t)
        gs = 0.5 * _norm_grad(s, ey)
        gt = 0.5 * _norm_grad(t, ex)
        if lam < 0:
            gs = gs - opts.penalty * vec[:m] ** 2
            gt = gt - opts.penalty * vec[m:] ** 2
        eta = opts.step * scale / math.sqrt(k)
        s = np.maximum(s - eta * gs, 0.0)
        t = np.maximum(t - eta * gt, 0.0)
        cand = _certificate(A, s, t, pair)
        if cand.valid and cand.value < best.value:
            best = cand
    return best
