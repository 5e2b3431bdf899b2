"""Relax a random matrix, certify the relaxation, and round it back."""
# %%
import numpy as np

from pqnorm import ExponentPair, approx_ratio, norm_power, round_best, solve_cp, solve_dual

rng = np.random.Generator(np.random.Philox(3))
A = rng.standard_normal((5, 4))
pair = ExponentPair(4, 4 / 3)

lower, _ = norm_power(A, pair.p, pair.q)
sol = solve_cp(A, pair)
cert = solve_dual(A, pair, sol)
print(f"power iteration   {lower:.6f}")
print(f"relaxation value  {sol.value:.6f}  (converged: {sol.converged})")
print(f"dual certificate  {cert.value:.6f}  (min eig {cert.min_eig:.1e})")

# %%
ratio = approx_ratio(pair, certified=True).ratio
rp = round_best(A, sol, pair, trials=500, seed=0)
print(f"rounded value     {rp.value:.6f}  guarantee CP/ratio = {sol.value / ratio:.6f}")
print("x =", np.round(rp.x, 4), " ||x||_4 =", round(float(np.sum(np.abs(rp.x) ** 4) ** 0.25), 12))
