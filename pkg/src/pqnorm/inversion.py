"""Compositional inversion of f_{a,b} and the rounding constant c_{a,b}.

``h = abs(f^{-1})`` is the inverse series with absolute-valued coefficients
and ``c_{a,b} = h^{-1}(1)``. Besides computing these, this module checks the
coefficient sign pattern

    f^{-1}_k <= 1/k!   (k = 1 mod 4),      f^{-1}_k <= 0   (k = 3 mod 4),

bounds the tail sum_{k >= t} |f^{-1}_k| delta^k with the decay estimate
|f^{-1}_k| <= 6.1831 / (k (1+eps)^k), and turns both into a certified lower
bound on c_{a,b}.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .specfn import DEFAULT_TERMS, ExponentPair, OddSeries, eval_odd, f_coefficients

DECAY_CONSTANT = 6.1831
DEFAULT_TAIL_START = 31


def _compose_inverse(dense: np.ndarray) -> np.ndarray:
    """Inverse of a series given by full-degree coefficients with f_0 = 0, f_1 = 1.

    Works one degree at a time. Column d of the power table holds
    [rho^d] g^j for all j; for j >= 2 it only needs g up to degree d - 1,
    so g_d = -sum_{j>=2} f_j [rho^d] g^j can be solved for directly.
    """
    n = dense.size - 1
    g = np.zeros(n + 1)
    powers = np.zeros((n + 1, n + 1))  # powers[j, d] = [rho^d] g^j
    g[1] = 1.0
    powers[1, 1] = 1.0
    for d in range(2, n + 1):
        # powers[j, d] = sum_{i=1}^{d-1} g_i powers[j-1, d-i],   j = 2..d
        powers[2 : d + 1, d] = powers[1:d, d - 1 : 0 : -1] @ g[1:d]
        g[d] = -(dense[2 : d + 1] @ powers[2 : d + 1, d])
        powers[1, d] = g[d]
    return g


def invert_odd_series(f: OddSeries) -> OddSeries:
    """Odd series g with f(g(rho)) = rho up to the truncation degree."""
    if f.coeffs[0] != 1.0:
        raise ValueError(f"series must start with rho^1 coefficient 1, got {f.coeffs[0]!r}")
    g = _compose_inverse(f.dense())
    return OddSeries(g[1::2].copy())


def compose_odd(f: OddSeries, g: OddSeries) -> np.ndarray:
    """Full-degree coefficients of f(g(rho)) truncated at the common degree."""
    n = min(f.degree, g.degree)
    gd = g.dense()[: n + 1]
    fd = f.dense()[: n + 1]
    out = np.zeros(n + 1)
    power = np.zeros(n + 1)
    power[0] = 1.0
    for j in range(1, n + 1):
        power = np.convolve(power, gd)[: n + 1]
        if fd[j]:
            out += fd[j] * power
    return out


def abs_series(s: OddSeries) -> OddSeries:
    return OddSeries(np.abs(s.coeffs))


@lru_cache(maxsize=4096)
def _inverse_cached(a: float, b: float, K: int) -> np.ndarray:
    out = invert_odd_series(OddSeries(f_coefficients(a, b, K)))
    coeffs = out.coeffs
    coeffs.setflags(write=False)
    return coeffs


def inverse_coefficients(a: float, b: float, K: int = DEFAULT_TERMS) -> np.ndarray:
    """f^{-1}_{2k+1} for k = 0..K (read-only, cached)."""
    return _inverse_cached(float(a), float(b), int(K))


def inverse_series(pair: ExponentPair, K: int = DEFAULT_TERMS) -> OddSeries:
    return OddSeries(inverse_coefficients(pair.a, pair.b, K).copy())


def is_identity(pair: ExponentPair) -> bool:
    # (0)_k = 0 for k >= 1, so f_{a,b}(rho) = rho when a or b equals 1
    return pair.a == 1.0 or pair.b == 1.0


def compute_c(pair: ExponentPair, K: int = DEFAULT_TERMS, tol: float = 1e-12,
              iterations: int = 200) -> float:
    """c_{a,b} = h^{-1}(1) by bisection on [0, 1]."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if is_identity(pair):
        return 1.0
    h = abs_series(inverse_series(pair, K))
    if h(1.0) < 1.0:
        raise ArithmeticError(
            f"cannot bracket h^{{-1}}(1): h(1) = {h(1.0):.6g} < 1 at K={K} "
            f"(a={pair.a}, b={pair.b})"
        )
    lo, hi = 0.0, 1.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if h(mid) < 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16:
            break
    c = 0.5 * (lo + hi)
    resid = abs(h(c) - 1.0)
    if resid > tol:
        raise ArithmeticError(f"bisection residual {resid:.3g} exceeds tol {tol:.3g}")
    return c


def condition_bound(k: int) -> float:
    """Upper bound on f^{-1}_k: 1/k! for k = 1 mod 4, 0 for k = 3 mod 4."""
    if k % 2 == 0:
        raise ValueError("k must be odd")
    return 1.0 / math.factorial(k) if k % 4 == 1 else 0.0


def _slacks(a: float, b: float, k_max: int) -> np.ndarray:
    K = (k_max - 1) // 2
    inv = inverse_coefficients(a, b, K)
    bounds = np.array([condition_bound(2 * i + 1) for i in range(K + 1)])
    return bounds - inv


def sign_pattern_holds(a: float, b: float, k_max: int, margin: float = 1e-9) -> bool:
    """Both coefficient conditions at one (a, b) for every odd k <= k_max."""
    return bool(np.all(_slacks(a, b, k_max) >= -margin))


@dataclass
class SignPatternReport:
    k_max: int
    grid_step: float
    margin: float
    ok: bool
    per_k: list = field(default_factory=list)
    method: str = "numeric grid with local refinement (not exact polynomial maximization)"

    def to_dict(self):
        return asdict(self)


def verify_sign_pattern(k_max: int = 29, grid_step: float = 0.05, margin: float = 1e-9,
                        refine: bool = True) -> SignPatternReport:
    """Check both coefficient conditions for odd k <= k_max on a grid over [0, 1]^2.

    Failures are reported, never raised. With ``refine`` each k's worst grid
    point is re-examined on a 9x9 sub-grid spanning its neighbouring cells.
    """
    if k_max < 1 or k_max % 2 == 0:
        raise ValueError("k_max must be a positive odd integer")
    if not 0 < grid_step <= 0.5:
        raise ValueError("grid_step must lie in (0, 0.5]")
    n = int(round(1.0 / grid_step))
    axis = np.linspace(0.0, 1.0, n + 1)
    nk = (k_max + 1) // 2
    slack = np.empty((axis.size, axis.size, nk))
    for i, a in enumerate(axis):
        for j, b in enumerate(axis):
            slack[i, j] = _slacks(float(a), float(b), k_max)

    per_k = []
    for idx in range(nk):
        k = 2 * idx + 1
        flat = int(np.argmin(slack[:, :, idx]))
        i, j = np.unravel_index(flat, slack.shape[:2])
        worst, wa, wb = float(slack[i, j, idx]), float(axis[i]), float(axis[j])
        if refine:
            sub_a = np.linspace(max(0.0, wa - grid_step), min(1.0, wa + grid_step), 9)
            sub_b = np.linspace(max(0.0, wb - grid_step), min(1.0, wb + grid_step), 9)
            for a in sub_a:
                for b in sub_b:
                    s = float(_slacks(float(a), float(b), k)[idx])
                    if s < worst:
                        worst, wa, wb = s, float(a), float(b)
        per_k.append({
            "k": k,
            "condition": "C1" if k % 4 == 1 else "C2",
            "bound": condition_bound(k),
            "worst_slack": worst,
            "worst_a": wa,
            "worst_b": wb,
            "ok": worst >= -margin,
        })
    return SignPatternReport(k_max, grid_step, margin, all(r["ok"] for r in per_k), per_k)


def tail_bound(t: int, delta: float, eps: float = 0.0) -> float:
    """Upper bound on sum_{odd k >= t} |f^{-1}_k| delta^k.

    Summing 6.1831/k * (delta/(1+eps))^k over odd k >= t gives at most
    (6.1831/t) r^t / (1 - r^2) with r = delta/(1+eps). eps = 0 is always valid.
    """
    if t < 3 or t % 2 == 0:
        raise ValueError("t must be an odd integer >= 3")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    r = delta / (1.0 + eps)
    if r >= 1:
        raise ValueError(f"delta/(1+eps) = {r:.6g} must be < 1")
    return DECAY_CONSTANT / t * r ** t / (1.0 - r * r)


def tail_direct(a: float, b: float, t: int, delta: float, k_last: int = 301) -> float:
    """sum_{odd t <= k <= k_last} |f^{-1}_k| delta^k from the computed coefficients."""
    K = (k_last - 1) // 2
    inv = np.abs(inverse_coefficients(a, b, K))
    ks = np.arange(1, 2 * K + 2, 2)
    sel = ks >= t
    return float(np.sum(inv[sel] * delta ** ks[sel].astype(float)))


@dataclass
class CertifiedBound:
    rho: float
    delta: float
    tail: float
    t: int


def _certify(a: float, b: float, t: int, eps: float, grid: float) -> CertifiedBound:
    def rho_of(delta):
        x = 1.0 - 2.0 * tail_bound(t, delta, eps)
        return math.asinh(x) if x > 0 else -math.inf

    deltas = np.arange(grid, 0.999 + 0.5 * grid, grid)
    valid = [d for d in deltas if rho_of(d) <= d]
    if not valid:
        raise ArithmeticError(
            f"no self-consistent delta for t={t}; use a larger t (a={a}, b={b})"
        )
    # rho_of is decreasing, so the best pair sits at the smallest valid delta;
    # bisect between it and the previous grid point for the fixed point.
    hi = float(valid[0])
    lo = max(hi - grid, 0.0)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if rho_of(mid) <= mid:
            hi = mid
        else:
            lo = mid
    return CertifiedBound(rho_of(hi), hi, tail_bound(t, hi, eps), t)


def certified_hinv_lower_bound(pair: ExponentPair, t: int = DEFAULT_TAIL_START,
                               eps: float = 0.0, margin: float = 1e-9,
                               grid: float = 1e-3) -> float:
    """A value rho with h^{-1}(1) >= rho, valid when the sign pattern holds below t.

    Picks delta so that rho = asinh(1 - 2 T(t, delta)) <= delta, where T is
    :func:`tail_bound`. The identity case a = 1 or b = 1 returns 1.
    """
    return certify(pair, t, eps, margin, grid).rho


def certify(pair: ExponentPair, t: int = DEFAULT_TAIL_START, eps: float = 0.0,
            margin: float = 1e-9, grid: float = 1e-3) -> CertifiedBound:
    if is_identity(pair):
        return CertifiedBound(1.0, 1.0, 0.0, t)
    if not sign_pattern_holds(pair.a, pair.b, t - 2, margin):
        raise ArithmeticError(
            f"coefficient sign pattern fails below t={t} at a={pair.a}, b={pair.b}"
        )
    return _certify(pair.a, pair.b, t, eps, grid)


def contour_coefficient(pair: ExponentPair, k: int, delta: float = 0.3,
                        n_points: int = 512, K: int = DEFAULT_TERMS,
                        rtol: float = 1e-9) -> float:
    """f^{-1}_k = (2/(pi k)) Im of the integral of f(z)^(-k) over the quarter circle |z| = delta.

    Composite Gauss-Legendre on theta in [0, pi/2]. The estimate is compared
    with the half-resolution rule; disagreement beyond ``rtol`` times the
    integrand scale raises.
    """
    if k < 1 or k % 2 == 0:
        raise ValueError("k must be a positive odd integer")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    coeffs = f_coefficients(pair.a, pair.b, K)

    def rule(npts):
        x, w = _gauss_legendre(npts)
        theta = 0.25 * np.pi * (x + 1.0)
        z = delta * np.exp(1j * theta)
        fz = eval_odd(coeffs, z)
        integral = 0.25 * np.pi * np.sum(w * fz ** (-k) * 1j * z)
        return 2.0 / (np.pi * k) * integral.imag

    full = rule(n_points)
    half = rule(max(n_points // 2, 2))
    scale = 2.0 / (np.pi * k) * 0.5 * np.pi * delta ** (1 - k)
    resid = abs(full - half)
    if resid > rtol * scale:
        raise ArithmeticError(
            f"contour quadrature did not converge: residual {resid:.3g} "
            f"(scale {scale:.3g}); increase n_points"
        )
    return float(full)


@lru_cache(maxsize=16)
def _gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


@dataclass
class InverseReport:
    p: float
    q: float
    a: float
    b: float
    c_ab: float
    hinv_lower_bound: float
    ratio: float
    certified: bool
    k_checked: int
    c1_c2_ok: bool
    tail_bound_used: float
    delta: float
    worst_case_eps: float

    def to_json_dict(self) -> dict:
        return {
            "p": "inf" if math.isinf(self.p) else self.p,
            "q": self.q,
            "a": self.a,
            "b": self.b,
            "c_ab": self.c_ab,
            "hinv_lb": self.hinv_lower_bound,
            "ratio": self.ratio,
            "certified": self.certified,
            "k_checked": self.k_checked,
            "c1c2_ok": self.c1_c2_ok,
            "tail_bound": self.tail_bound_used,
            "delta": self.delta,
            "worst_case_eps": self.worst_case_eps,
        }


def approx_ratio(pair: ExponentPair, certified: bool = False, K: int = DEFAULT_TERMS,
                 t: int = DEFAULT_TAIL_START) -> InverseReport:
    """Approximation factor 1/(L gamma_{p*} gamma_q) of the relaxation plus rounding.

    L is c_{a,b} itself, or its certified lower bound when ``certified``.
    """
    c = compute_c(pair, K)
    k_checked = t - 2
    ok = is_identity(pair) or sign_pattern_holds(pair.a, pair.b, k_checked)
    if ok:
        cert = certify(pair, t)
    else:
        cert = CertifiedBound(float("nan"), float("nan"), float("nan"), t)
        if certified:
            raise ArithmeticError(
                f"cannot certify: sign pattern fails for k <= {k_checked} at a={pair.a}, b={pair.b}"
            )
    lower = cert.rho if certified else c
    ratio = 1.0 / (lower * pair.gamma_pstar * pair.gamma_q)
    return InverseReport(
        p=pair.p,
        q=pair.q,
        a=pair.a,
        b=pair.b,
        c_ab=c,
        hinv_lower_bound=cert.rho,
        ratio=ratio,
        certified=certified,
        k_checked=k_checked,
        c1_c2_ok=bool(ok),
        tail_bound_used=cert.tail,
        delta=cert.delta,
        worst_case_eps=math.asinh(1.0) / cert.rho - 1.0,
    )


def c_monotonicity_scan(step: float = 0.05, K: int = 60, tol: float = 1e-12):
    """Grid points where c_{a,b} decreases along a or b (logged, not asserted)."""
    n = int(round(1.0 / step))
    axis = np.linspace(0.0, 1.0, n + 1)
    c = np.array([[compute_c(ExponentPair.from_ab(a, b), K) for b in axis] for a in axis])
    violations = []
    for i in range(n + 1):
        for j in range(n + 1):
            if i + 1 <= n and c[i + 1, j] < c[i, j] - tol:
                violations.append(("a", float(axis[i]), float(axis[j]), float(c[i + 1, j] - c[i, j])))
            if j + 1 <= n and c[i, j + 1] < c[i, j] - tol:
                violations.append(("b", float(axis[i]), float(axis[j]), float(c[i, j + 1] - c[i, j])))
    return c, violations
