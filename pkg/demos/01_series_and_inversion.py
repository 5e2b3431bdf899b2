"""Hypergeometric correlation series and its compositional inverse.

Run with ``python demos/01_series_and_inversion.py``.
"""
# %%
import math

import numpy as np

from pqnorm import ExponentPair, f_series, inverse_series
from pqnorm.specfn import noise_correlation_exact, noise_correlation_mc

# For a = b = 0 the series is arcsin, so its inverse should be sin.
pair = ExponentPair(math.inf, 1)
f = f_series(pair, 6)
g = inverse_series(pair, 6)
print("f coefficients:", np.round(f.coeffs, 6))
print("inverse       :", np.round(g.coeffs, 8))
print("sin           :", np.round([(-1) ** k / math.factorial(2 * k + 1) for k in range(7)], 8))

# %%
# The series is the normalized correlation of Hölder-dual Gaussian transforms.
rng = np.random.Generator(np.random.Philox(1))
for a, b, rho in [(0.0, 0.0, 0.5), (0.3, 0.7, -0.9), (0.5, 0.5, 0.2)]:
    mean, se = noise_correlation_mc(a, b, rho, 400_000, rng)
    exact = noise_correlation_exact(a, b, rho)
    print(f"a={a} b={b} rho={rho:+.1f}: simulated {mean:+.5f} +- {se:.5f}, series {exact:+.5f}")
