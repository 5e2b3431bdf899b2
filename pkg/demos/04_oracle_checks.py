"""Norm duality and Kronecker multiplicativity on small matrices."""
# %%
import math

import numpy as np

from pqnorm.oracle import duality_check, kron_check, norm_grid, norm_power

rng = np.random.Generator(np.random.Philox(4))
A = rng.standard_normal((3, 3))
print("power:", norm_power(A, math.inf, 1)[0], " grid:", norm_grid(A, math.inf, 1))

rep = duality_check(A, 4, 4 / 3)
print(f"||A||_(4->4/3) = {rep['norm']:.8f}, ||A^T||_(4->4/3) = {rep['transpose_norm']:.8f}")

# %%
# For p <= q the norm of a Kronecker product is the product of norms.
B = rng.standard_normal((2, 2))
C = rng.standard_normal((2, 2))
rep = kron_check(B, C, 2, 4)
print(f"product {rep['product']:.8f}  kron {rep['norm_kron']:.8f}  ok={rep['ok']}")
# Outside that regime the upper bound can fail; the oracle refuses the question.
try:
    kron_check(B, C, 4, 2)
except ValueError as err:
    print("p > q:", err)
