"""Gamma function, Gaussian moments and the normalized correlation series.

For rho-correlated standard Gaussians g1, g2 the correlation

    E[sgn(g1)|g1|^a * sgn(g2)|g2|^b]

divided by gamma_{a+1}^{a+1} * gamma_{b+1}^{b+1} is an odd power series in rho,

    f_{a,b}(rho) = rho * 2F1((1-a)/2, (1-b)/2; 3/2; rho^2),

whose Taylor coefficients are nonnegative and start with 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

DEFAULT_TERMS = 150

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def log_gamma_fn(x: float) -> float:
    """Natural log of Gamma(x) for x > 0."""
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise ValueError(f"log_gamma_fn requires a finite positive argument, got {x!r}")
    if x < 0.5:
        # reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma_fn(1.0 - x)
    x -= 1.0
    acc = _LANCZOS_COEFFS[0]
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    return 0.5 * math.log(2 * math.pi) + (x + 0.5) * math.log(t) - t + math.log(acc)


def gamma_fn(x: float) -> float:
    """Gamma(x) for x > 0 via the Lanczos approximation.

    Integer arguments up to 20 are returned exactly as factorials.
    """
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise ValueError(f"gamma_fn requires a finite positive argument, got {x!r}")
    if x == int(x) and x <= 21:
        return float(math.factorial(int(x) - 1))
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    return math.exp(log_gamma_fn(x))


def gaussian_moment(r: float) -> float:
    """gamma_r = (E|g|^r)^(1/r) for a standard Gaussian g.

    Uses E|g|^r = 2^(r/2) Gamma((1+r)/2) / sqrt(pi). r = 0 returns 1 by
    convention; only r > 0 is used by the algorithms.
    """
    r = float(r)
    if r < 0 or math.isnan(r):
        raise ValueError(f"gaussian_moment requires r >= 0, got {r!r}")
    if r == 0:
        return 1.0
    if math.isinf(r):
        return math.inf
    log_moment = 0.5 * r * math.log(2.0) + log_gamma_fn(0.5 * (1.0 + r)) - 0.5 * math.log(math.pi)
    return math.exp(log_moment / r)


def conjugate_exponent(r: float) -> float:
    """Hölder conjugate r* with 1/r + 1/r* = 1."""
    if r < 1:
        raise ValueError(f"exponent must be >= 1, got {r!r}")
    if r == 1:
        return math.inf
    if math.isinf(r):
        return 1.0
    return r / (r - 1.0)


@dataclass(frozen=True)
class ExponentPair:
    """Norm parameters 1 <= q <= 2 <= p <= inf and the derived quantities.

    ``a = p* - 1`` and ``b = q - 1`` both lie in [0, 1].
    """

    p: float
    q: float
    a: float = field(init=False)
    b: float = field(init=False)
    pstar: float = field(init=False)
    qstar: float = field(init=False)
    gamma_pstar: float = field(init=False)
    gamma_q: float = field(init=False)

    def __post_init__(self):
        p, q = float(self.p), float(self.q)
        if not (p >= 2):
            raise ValueError(f"p must lie in [2, inf], got {p!r}")
        if not (1 <= q <= 2):
            raise ValueError(f"q must lie in [1, 2], got {q!r}")
        pstar = conjugate_exponent(p)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "pstar", pstar)
        object.__setattr__(self, "qstar", conjugate_exponent(q))
        object.__setattr__(self, "a", min(max(pstar - 1.0, 0.0), 1.0))
        object.__setattr__(self, "b", q - 1.0)
        object.__setattr__(self, "gamma_pstar", gaussian_moment(pstar))
        object.__setattr__(self, "gamma_q", gaussian_moment(q))

    @classmethod
    def from_ab(cls, a: float, b: float) -> "ExponentPair":
        """Build the pair with p* = 1 + a and q = 1 + b."""
        _check_ab(a, b)
        p = math.inf if a == 0 else (1.0 + a) / a
        pair = cls(p, 1.0 + b)
        # keep the exact inputs rather than the round trip through p
        object.__setattr__(pair, "a", float(a))
        object.__setattr__(pair, "pstar", 1.0 + float(a))
        object.__setattr__(pair, "gamma_pstar", gaussian_moment(1.0 + float(a)))
        return pair

    @property
    def moment_scale(self) -> float:
        """gamma_{a+1}^{a+1} gamma_{b+1}^{b+1}, the factor between E[...] and f_{a,b}."""
        return self.gamma_pstar ** self.pstar * self.gamma_q ** self.q


@dataclass
class OddSeries:
    """Truncated odd power series: ``coeffs[k]`` multiplies rho^(2k+1)."""

    coeffs: np.ndarray
    remainder: float = 0.0  # estimate of the largest dropped coefficient, if known

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.ndim != 1 or self.coeffs.size == 0:
            raise ValueError("coeffs must be a non-empty 1-d array")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("coeffs must be finite")

    @property
    def K(self) -> int:
        return self.coeffs.size - 1

    @property
    def degree(self) -> int:
        return 2 * self.K + 1

    def dense(self) -> np.ndarray:
        """Coefficients indexed by full degree (even entries zero)."""
        out = np.zeros(self.degree + 1)
        out[1::2] = self.coeffs
        return out

    def __call__(self, rho):
        return eval_odd(self.coeffs, rho)

    def __len__(self):
        return self.coeffs.size


def eval_odd(coeffs: np.ndarray, rho):
    """Horner evaluation of sum_k coeffs[k] rho^(2k+1); works for complex rho."""
    rho = np.asarray(rho)
    rho2 = rho * rho
    acc = np.zeros_like(rho2) + coeffs[-1]
    for c in coeffs[-2::-1]:
        acc = acc * rho2 + c
    out = acc * rho
    return out[()] if out.ndim == 0 else out


def _check_ab(a, b):
    if not (0 <= a <= 1 and 0 <= b <= 1):
        raise ValueError(f"a and b must lie in [0, 1], got a={a!r}, b={b!r}")


def f_coefficients(a: float, b: float, K: int) -> np.ndarray:
    """Coefficients of rho^1, rho^3, ..., rho^(2K+1) in f_{a,b}."""
    _check_ab(a, b)
    if K < 0:
        raise ValueError("K must be nonnegative")
    alpha, beta = 0.5 * (1.0 - a), 0.5 * (1.0 - b)
    out = np.empty(K + 1)
    out[0] = 1.0
    for k in range(1, K + 1):
        j = k - 1
        out[k] = out[j] * (alpha + j) * (beta + j) / ((1.5 + j) * k)
    return out


def f_coefficient(a: float, b: float, k: int) -> float:
    """Coefficient of rho^(2k+1): (alpha)_k (beta)_k / ((3/2)_k k!)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return float(f_coefficients(a, b, k)[k])


def f_series(pair: ExponentPair, K: int = DEFAULT_TERMS) -> OddSeries:
    if K < 1:
        raise ValueError("K must be >= 1")
    coeffs = f_coefficients(pair.a, pair.b, K)
    nxt = coeffs[-1] * (0.5 * (1 - pair.a) + K) * (0.5 * (1 - pair.b) + K) / ((1.5 + K) * (K + 1))
    return OddSeries(coeffs, remainder=nxt)


def truncation_remainder(series: OddSeries, rho: float) -> float:
    """Geometric estimate coeffs[K] |rho|^(2K+1) / (1 - rho^2) of the dropped tail."""
    r = abs(float(rho))
    if r >= 1:
        return math.inf
    return abs(series.coeffs[-1]) * r ** series.degree / (1.0 - r * r)


def f_eval(pair: ExponentPair, rho, K: int = DEFAULT_TERMS):
    """Truncated f_{a,b}(rho) for |rho| <= 1.

    Near the endpoints the series converges slowly (like k^(-3/2) at
    a = b = 0); a RuntimeWarning carries the remainder estimate there.
    """
    rho_arr = np.asarray(rho, dtype=float)
    if np.any(np.abs(rho_arr) > 1):
        raise ValueError("f_eval requires |rho| <= 1")
    series = f_series(pair, K)
    rmax = float(np.max(np.abs(rho_arr))) if rho_arr.size else 0.0
    if rmax >= 0.999 and series.coeffs[-1] > 0:
        warnings.warn(
            f"f_eval at |rho|={rmax:.6g}: slow convergence, truncation remainder "
            f"estimate {truncation_remainder(series, rmax):.3g}",
            RuntimeWarning,
            stacklevel=2,
        )
    return series(rho_arr)


def correlated_gaussians(rho: float, n: int, rng: np.random.Generator):
    """Pairs (g1, g2) with g1 = rho g2 + sqrt(1 - rho^2) g3."""
    g2 = rng.standard_normal(n)
    g3 = rng.standard_normal(n)
    g1 = rho * g2 + math.sqrt(max(0.0, 1.0 - rho * rho)) * g3
    return g1, g2


def noise_correlation_mc(a: float, b: float, rho: float, n: int, rng: np.random.Generator):
    """Monte-Carlo estimate of E[sgn(g1)|g1|^a sgn(g2)|g2|^b].

    Returns ``(mean, standard_error)``. ``0 ** 0`` is taken as 1 so that the
    a = 0 factor is the plain sign.
    """
    g1, g2 = correlated_gaussians(rho, n, rng)
    samples = np.sign(g1) * np.abs(g1) ** a * np.sign(g2) * np.abs(g2) ** b
    return float(samples.mean()), float(samples.std(ddof=1) / math.sqrt(n))


def noise_correlation_exact(a: float, b: float, rho: float, K: int = DEFAULT_TERMS) -> float:
    """gamma_{a+1}^{a+1} gamma_{b+1}^{b+1} f_{a,b}(rho)."""
    pair = ExponentPair.from_ab(a, b)
    return pair.moment_scale * float(eval_odd(f_coefficients(a, b, K), rho))
