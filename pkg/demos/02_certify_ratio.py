"""Rounding constant, coefficient sign checks and certified ratios."""
# %%
import math

from pqnorm import ExponentPair, approx_ratio, compute_c, verify_sign_pattern
from pqnorm.inversion import certify, tail_bound

print("c(0,0) =", compute_c(ExponentPair(math.inf, 1)), " ln(1+sqrt2) =", math.log(1 + math.sqrt(2)))

# %%
rep = verify_sign_pattern(k_max=29, grid_step=0.05)
print("sign pattern holds up to k = 29:", rep.ok)
for row in rep.per_k[:4]:
    print("  k={k:2d} {condition} worst slack {worst_slack:+.3e}".format(**row))

# %%
# The tail of |f^-1| beyond degree 31 is tiny, which is what makes the bound rigorous.
print("tail(31, asinh(0.974203)) =", tail_bound(31, math.asinh(0.974203)))
cb = certify(ExponentPair.from_ab(0.4, 0.2))
print(f"certified lower bound on c(0.4, 0.2): {cb.rho:.6f} (true {compute_c(ExponentPair.from_ab(0.4, 0.2)):.6f})")

# %%
for p, q in [(math.inf, 1), (4, 4 / 3), (2, 1), (math.inf, 2), (2, 2)]:
    r = approx_ratio(ExponentPair(p, q), certified=True)
    print(f"p={p:<5} q={q:<6.4g} ratio {r.ratio:.6f}  c={r.c_ab:.6f}")
