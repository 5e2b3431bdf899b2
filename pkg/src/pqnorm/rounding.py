"""Generalized Krivine rounding with Gaussian Hölder-dual rounding.

Given a CP(A) solution (U, V), the Krivine Gram matrix is

    M = [[h(c U^ U^T),  f^{-1}(c U^ V^T)],
         [f^{-1}(c V^ U^T), h(c V^ V^T)]]

(entrywise series, unit-normalized rows U^, V^, h = abs(f^{-1}), c = c_{a,b}).
Its Gram factorization gives unit vectors phi_i, psi_j with
<phi_i, psi_j> = f^{-1}(c <u^_i, v^_j>). A Gaussian g is then rounded to

    y_i ~ ||u_i|| sgn(z_i)|z_i|^b,   x_j ~ ||v_j|| sgn(w_j)|w_j|^a,
    z = phi g, w = psi g,

normalized to the unit l_{q*} and l_p spheres. This is the same output as
scaling the rows by ||u_i||^{1/b} and ||v_j||^{1/a} before applying
Psi_q and Psi_{p*}, written so that the row scale never has to be raised to
1/b; for b = 0 it is the limit of that formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .inversion import compute_c, inverse_series
from .norms import holder_dual, lp_norm
from .relaxation import GramSolution, as_matrix
from .specfn import DEFAULT_TERMS, ExponentPair, eval_odd

PSD_REPAIR_TOL = 1e-4


@dataclass
class KrivineGram:
    M: np.ndarray
    c: float
    m: int
    n: int
    u_norms: np.ndarray
    v_norms: np.ndarray
    diag_error: float

    @property
    def cross(self) -> np.ndarray:
        return self.M[: self.m, self.m :]


@dataclass
class RoundedPair:
    y: np.ndarray
    x: np.ndarray
    value: float
    trial: int = 0
    seed: int | None = None

    def to_json_dict(self):
        return {
            "y": self.y.tolist(),
            "x": self.x.tolist(),
            "value": self.value,
            "trial": self.trial,
            "seed": self.seed,
        }


def _unit_rows(W):
    norms = np.linalg.norm(W, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    return W / safe[:, None], norms


def build_krivine_gram(sol: GramSolution, pair: ExponentPair, K: int = DEFAULT_TERMS,
                       c: float | None = None) -> KrivineGram:
    """Krivine Gram matrix of a CP(A) solution; zero rows give zero rows of M."""
    c = compute_c(pair, K) if c is None else c
    inv = inverse_series(pair, K)
    h = np.abs(inv.coeffs)
    Uh, nu = _unit_rows(sol.U)
    Vh, nv = _unit_rows(sol.V)
    m, n = Uh.shape[0], Vh.shape[0]
    W = np.vstack([Uh, Vh])
    G = np.clip(c * (W @ W.T), -1.0, 1.0)
    M = np.empty_like(G)
    M[:m, :m] = eval_odd(h, G[:m, :m])
    M[m:, m:] = eval_odd(h, G[m:, m:])
    M[:m, m:] = eval_odd(inv.coeffs, G[:m, m:])
    M[m:, :m] = M[:m, m:].T
    M = 0.5 * (M + M.T)
    live = np.concatenate([nu, nv]) > 0
    M[~live, :] = 0.0
    M[:, ~live] = 0.0
    diag = np.diag(M)[live]
    diag_error = float(np.max(np.abs(diag - 1.0))) if diag.size else 0.0
    return KrivineGram(M, c, m, n, nu, nv, diag_error)


def gram_rows(gram: KrivineGram):
    """Rows phi (m x r), psi (n x r) realizing M by eigendecomposition.

    Negative eigenvalues are clipped to zero; a minimum eigenvalue below
    -1e-4 (relative to the diagonal) is an error. Returns
    ``(phi, psi, clipped_mass)``.
    """
    M = 0.5 * (gram.M + gram.M.T)
    w, Q = np.linalg.eigh(M)
    scale = max(1.0, float(np.max(np.abs(np.diag(M)))))
    if w[0] < -PSD_REPAIR_TOL * scale:
        raise np.linalg.LinAlgError(f"Krivine Gram matrix is indefinite (min eig {w[0]:.3g})")
    clipped = float(np.sum(np.clip(-w, 0.0, None)))
    R = Q * np.sqrt(np.clip(w, 0.0, None))
    return R[: gram.m], R[gram.m :], clipped


def _round_batch(phi, psi, u_norms, v_norms, pair, G):
    """Rounded vectors for each column of the Gaussian matrix G.

    Returns (Y, X, Yraw, Xraw) where the raw vectors are Psi_q(phi g) and
    Psi_{p*}(psi g) for the rescaled rows, before normalization.
    """
    Z = phi @ G
    Wv = psi @ G
    Yraw = u_norms[:, None] * holder_dual(Z, pair.q)
    Xraw = v_norms[:, None] * holder_dual(Wv, pair.pstar)
    Y = Yraw / _col_norms(Yraw, pair.qstar)
    X = Xraw / _col_norms(Xraw, pair.p)
    return Y, X, Yraw, Xraw


def _col_norms(M, r):
    a = np.abs(M)
    if math.isinf(r):
        out = a.max(axis=0)
    else:
        out = np.sum(a ** r, axis=0) ** (1.0 / r)
    return np.where(out > 0, out, 1.0)


class RoundingPlan:
    """Everything needed to draw rounded pairs for one CP solution."""

    def __init__(self, A, sol: GramSolution, pair: ExponentPair, K: int = DEFAULT_TERMS):
        self.A = as_matrix(A)
        self.pair = pair
        self.sol = sol
        self.gram = build_krivine_gram(sol, pair, K)
        self.phi, self.psi, self.clipped = gram_rows(self.gram)
        # b = 0 with non-unit rows: sgn() forgets the 1/b row scaling
        nu = self.gram.u_norms
        self.degenerate_scaling = bool(pair.b == 0 and np.any(np.abs(nu[nu > 0] - 1.0) > 1e-8)) or bool(
            pair.a == 0 and np.any(np.abs(self.gram.v_norms[self.gram.v_norms > 0] - 1.0) > 1e-8)
        )

    def gaussians(self, rng: np.random.Generator, trials: int) -> np.ndarray:
        return rng.standard_normal((self.phi.shape[1], trials))

    def draw(self, G):
        return _round_batch(self.phi, self.psi, self.gram.u_norms, self.gram.v_norms, self.pair, G)

    def numerator_samples(self, G):
        """Outer products Psi_q(phi g) Psi_{p*}(psi g)^T, one per column of G."""
        _, _, Yraw, Xraw = self.draw(G)
        return np.einsum("it,jt->tij", Yraw, Xraw)

    def denominator_samples(self, G):
        """||phi g||_q^b ||psi g||_{p*}^a per column of G (rescaled rows)."""
        _, _, Yraw, Xraw = self.draw(G)
        return _col_norms(Yraw, self.pair.qstar) * _col_norms(Xraw, self.pair.p)


def round_once(phi, psi, A, pair: ExponentPair, rng: np.random.Generator,
               u_norms=None, v_norms=None, max_resample: int = 100) -> RoundedPair:
    """One Gaussian Hölder-dual rounding of the rows phi, psi."""
    A = as_matrix(A)
    u_norms = np.ones(phi.shape[0]) if u_norms is None else np.asarray(u_norms, float)
    v_norms = np.ones(psi.shape[0]) if v_norms is None else np.asarray(v_norms, float)
    for _ in range(max_resample):
        g = rng.standard_normal((phi.shape[1], 1))
        Y, X, Yraw, Xraw = _round_batch(phi, psi, u_norms, v_norms, pair, g)
        if np.any(Yraw) and np.any(Xraw):
            y, x = Y[:, 0], X[:, 0]
            return RoundedPair(y, x, float(y @ A @ x))
    raise ArithmeticError("rounded vector was zero on every draw")


def round_best(A, sol: GramSolution, pair: ExponentPair, trials: int = 100, seed: int = 0,
               K: int = DEFAULT_TERMS, batch: int = 1000) -> RoundedPair:
    """Best of ``trials`` independent roundings (Philox stream from ``seed``).

    A negative rounded value is replaced by (-y, x), which is feasible and
    has value |y^T A x|.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    plan = RoundingPlan(A, sol, pair, K)
    rng = np.random.Generator(np.random.Philox(seed))
    best = None
    done = 0
    while done < trials:
        size = min(batch, trials - done)
        G = plan.gaussians(rng, size)
        Y, X, _, _ = plan.draw(G)
        vals = np.einsum("it,ij,jt->t", Y, plan.A, X)
        idx = int(np.argmax(np.abs(vals)))
        sign = 1.0 if vals[idx] >= 0 else -1.0
        if best is None or abs(vals[idx]) > best.value:
            best = RoundedPair(sign * Y[:, idx], X[:, idx], float(abs(vals[idx])), done + idx, seed)
        done += size
    return best


def check_feasible(rp: RoundedPair, pair: ExponentPair, tol: float = 1e-10) -> bool:
    return (abs(lp_norm(rp.y, pair.qstar) - 1.0) <= tol
            and abs(lp_norm(rp.x, pair.p) - 1.0) <= tol)
