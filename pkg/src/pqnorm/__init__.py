"""Approximating p->q operator norms by convex relaxation and Krivine-type rounding."""

from .inversion import (
    InverseReport,
    abs_series,
    approx_ratio,
    certified_hinv_lower_bound,
    compute_c,
    contour_coefficient,
    inverse_series,
    invert_odd_series,
    tail_bound,
    verify_sign_pattern,
)
from .norms import holder_dual, lp_norm
from .oracle import duality_check, embedding_experiment, kron_check, norm_grid, norm_power
from .relaxation import CPOptions, DualCertificate, GramSolution, solve_cp, solve_dual
from .rounding import RoundedPair, build_krivine_gram, gram_rows, round_best, round_once
from .specfn import (
    ExponentPair,
    OddSeries,
    f_coefficient,
    f_eval,
    f_series,
    gamma_fn,
    gaussian_moment,
)

__version__ = "0.1.0"
